#pragma once

// Reference implementations used only by the tests. Each one is written from
// the defining formula, without sharing code paths with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<long long>>;

// H_0 = [1], H_k = [[H, H], [H, -H]].
inline Matrix hadamard_recursive(int k) {
  Matrix h{{1}};
  for (int i = 0; i < k; ++i) {
    const std::size_t n = h.size();
    Matrix next(2 * n, std::vector<long long>(2 * n));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        next[r][c] = h[r][c];
        next[r][c + n] = h[r][c];
        next[r + n][c] = h[r][c];
        next[r + n][c + n] = -h[r][c];
      }
    }
    h = std::move(next);
  }
  return h;
}

inline int count_sign_changes(const std::vector<long long>& row) {
  int n = 0;
  for (std::size_t i = 1; i < row.size(); ++i) n += (row[i] < 0) != (row[i - 1] < 0);
  return n;
}

// Hadamard rows sorted by sign-change count.
inline Matrix walsh_by_sorting(int k) {
  Matrix h = hadamard_recursive(k);
  std::stable_sort(h.begin(), h.end(),
                   [](const auto& a, const auto& b) { return count_sign_changes(a) < count_sign_changes(b); });
  return h;
}

template <typename T>
std::vector<T> matvec(const Matrix& m, const std::vector<T>& x) {
  std::vector<T> y(m.size(), T(0));
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < x.size(); ++c) y[r] += T(m[r][c]) * x[c];
  }
  return y;
}

inline Matrix matmul_transpose(const Matrix& a) {
  const std::size_t n = a.size();
  Matrix out(n, std::vector<long long>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      long long s = 0;
      for (std::size_t c = 0; c < a[i].size(); ++c) s += a[i][c] * a[j][c];
      out[i][j] = s;
    }
  }
  return out;
}

// Explicit block-diagonal matrix: block b is the sequency-ordered Walsh matrix
// of size sizes[b], whose trailing pads[b] columns face zero padding.
inline Matrix block_diagonal(const std::vector<std::size_t>& sizes, const std::vector<std::size_t>& pads) {
  std::size_t rows = 0, cols = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    rows += sizes[b];
    cols += sizes[b] - pads[b];
  }
  Matrix m(rows, std::vector<long long>(cols, 0));
  std::size_t r0 = 0, c0 = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    const Matrix w = walsh_by_sorting(static_cast<int>(std::log2(static_cast<double>(sizes[b]))));
    for (std::size_t r = 0; r < sizes[b]; ++r) {
      for (std::size_t c = 0; c < sizes[b] - pads[b]; ++c) m[r0 + r][c0 + c] = w[r][c];
    }
    r0 += sizes[b];
    c0 += sizes[b] - pads[b];
  }
  return m;
}

inline double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// Integer value of a bit pattern (bits[j] = bit j), two's complement when signed.
inline long long value_of_bits(const std::vector<int>& bits, bool twos_complement) {
  long long v = 0;
  for (std::size_t j = 0; j < bits.size(); ++j) v += static_cast<long long>(bits[j]) << j;
  if (twos_complement && !bits.empty() && bits.back()) v -= 1LL << bits.size();
  return v;
}

inline double binomial(unsigned n, unsigned k) {
  double c = 1.0;
  for (unsigned i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

// P(sum = s) for n i.i.d. Bernoulli(p) terms.
inline std::vector<double> binomial_pmf(unsigned n, double p) {
  std::vector<double> out(n + 1);
  for (unsigned s = 0; s <= n; ++s) out[s] = binomial(n, s) * std::pow(p, s) * std::pow(1.0 - p, n - s);
  return out;
}

// Every alphabetic binary tree over leaves [lo, hi], as per-leaf depth profiles.
inline std::vector<std::vector<int>> all_tree_depths(int lo, int hi) {
  if (lo == hi) return {{0}};
  std::vector<std::vector<int>> out;
  for (int t = lo + 1; t <= hi; ++t) {
    for (const auto& l : all_tree_depths(lo, t - 1)) {
      for (const auto& r : all_tree_depths(t, hi)) {
        std::vector<int> d;
        for (int x : l) d.push_back(x + 1);
        for (int x : r) d.push_back(x + 1);
        out.push_back(std::move(d));
      }
    }
  }
  return out;
}

inline double exhaustive_min_expected_depth(const std::vector<double>& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& d : all_tree_depths(0, static_cast<int>(p.size()) - 1)) {
    double e = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) e += p[i] * d[i];
    best = std::min(best, e);
  }
  return best;
}

// Uniform mid-tread quantizer: cell k covers [k, k+1) * vdd / 2^B.
inline std::uint32_t ideal_quantizer(double vin, double vdd, int bits) {
  const double levels = std::ldexp(1.0, bits);
  const double k = std::floor(vin / vdd * levels);
  return static_cast<std::uint32_t>(std::clamp(k, 0.0, levels - 1.0));
}

}  // namespace oracle
