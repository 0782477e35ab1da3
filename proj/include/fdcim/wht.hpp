#pragma once

// Walsh-Hadamard transform kernels.
//
// Matrices are held implicitly: entry (r, c) of the natural-order Hadamard
// matrix is (-1)^popcount(r & c), which is the closed form of the block
// recursion H_k = [[H, H], [H, -H]]. A WalshMatrix only stores the mapping from
// its row position to the natural Hadamard row, so even k = 16 is cheap.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fdcim/errors.hpp"

namespace fdcim::wht {

inline constexpr int kMaxOrderLog2 = 16;

enum class Ordering { Natural, Sequency };

enum class Direction { Forward, Inverse };

std::string to_string(Ordering o);

class WalshMatrix {
 public:
  int order_log2() const { return order_log2_; }
  std::size_t size() const { return std::size_t{1} << order_log2_; }
  Ordering ordering() const { return ordering_; }

  int at(std::size_t row, std::size_t col) const {
    return (std::popcount(natural_row_[row] & col) & 1U) ? -1 : 1;
  }

  std::vector<int> row(std::size_t r) const;

  // Row-major dense copy. Throws CapacityError above 2^12 x 2^12.
  std::vector<std::int8_t> dense() const;

  // Natural Hadamard row that sits at position `r` in this ordering.
  std::size_t natural_row(std::size_t r) const { return natural_row_[r]; }

 private:
  friend WalshMatrix hadamard(int k);
  friend WalshMatrix walsh(int k);

  WalshMatrix(int k, Ordering o, std::vector<std::size_t> map)
      : order_log2_(k), ordering_(o), natural_row_(std::move(map)) {}

  int order_log2_;
  Ordering ordering_;
  std::vector<std::size_t> natural_row_;
};

WalshMatrix hadamard(int k);
WalshMatrix walsh(int k);
WalshMatrix make_matrix(int k, Ordering o);

int sign_changes(std::span<const int> row);

// Natural Hadamard row index holding sequency `s` (bit-reversed Gray code).
std::size_t sequency_to_natural(std::size_t s, int k);

inline bool is_power_of_two(std::size_t n) { return n != 0 && std::has_single_bit(n); }

// In-place natural-order butterfly. T needs +, - and copy.
template <typename T>
void fwht_natural_inplace(std::span<T> x) {
  const std::size_t n = x.size();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        T a = x[j];
        T b = x[j + h];
        x[j] = a + b;
        x[j + h] = a - b;
      }
    }
  }
}

// Unnormalised transform W * x in the requested ordering, O(N log N).
template <typename T>
std::vector<T> fwht(std::span<const T> x, Ordering ordering = Ordering::Sequency) {
  if (!is_power_of_two(x.size())) {
    throw ShapeError("fwht: length " + std::to_string(x.size()) + " is not a power of two");
  }
  std::vector<T> buf(x.begin(), x.end());
  fwht_natural_inplace(std::span<T>(buf));
  if (ordering == Ordering::Natural) return buf;

  const int k = std::countr_zero(x.size());
  std::vector<T> out;
  out.reserve(buf.size());
  for (std::size_t s = 0; s < buf.size(); ++s) out.push_back(buf[sequency_to_natural(s, k)]);
  return out;
}

template <typename T>
std::vector<T> fwht(const std::vector<T>& x, Ordering ordering = Ordering::Sequency) {
  return fwht(std::span<const T>(x), ordering);
}

// Blockwise decomposition of an arbitrary-length transform.
struct BwhtPlan {
  std::size_t input_len = 0;
  std::vector<std::size_t> block_sizes;
  std::vector<std::size_t> pad;  // zeros appended to each block

  std::size_t padded_len() const;
  std::size_t total_padding() const;
  // Offset of block b in the unpadded input.
  std::size_t input_offset(std::size_t b) const;
  // Offset of block b in the padded coefficient vector.
  std::size_t padded_offset(std::size_t b) const;
};

inline constexpr std::size_t kDefaultMinBlock = 4;

// Greedy binary decomposition. Powers of two map to a single block. Otherwise
// blocks are taken from the set bits of m that are >= min_block; a non-zero
// remainder below min_block is zero-padded into one extra min_block block.
BwhtPlan bwht_plan(std::size_t m, std::size_t min_block = kDefaultMinBlock);

// Forward: per-block sequency-ordered WHT of the zero-padded input; returns
// plan.padded_len() coefficients. Inverse: accepts plan.padded_len()
// coefficients, applies W/N per block and strips padding, returning
// plan.input_len values. Inverse needs a field type (double, rational).
template <typename T>
std::vector<T> bwht_apply(const BwhtPlan& plan, std::span<const T> x, Direction dir) {
  const std::size_t expected = dir == Direction::Forward ? plan.input_len : plan.padded_len();
  if (x.size() != expected) {
    throw ShapeError("bwht_apply: expected length " + std::to_string(expected) + ", got " +
                     std::to_string(x.size()));
  }
  std::vector<T> out;
  out.reserve(dir == Direction::Forward ? plan.padded_len() : plan.input_len);
  for (std::size_t b = 0; b < plan.block_sizes.size(); ++b) {
    const std::size_t n = plan.block_sizes[b];
    const std::size_t real = n - plan.pad[b];
    std::vector<T> block(n, T(0));
    if (dir == Direction::Forward) {
      const std::size_t off = plan.input_offset(b);
      for (std::size_t i = 0; i < real; ++i) block[i] = x[off + i];
      auto y = fwht(std::span<const T>(block), Ordering::Sequency);
      out.insert(out.end(), y.begin(), y.end());
    } else {
      const std::size_t off = plan.padded_offset(b);
      for (std::size_t i = 0; i < n; ++i) block[i] = x[off + i];
      auto y = fwht(std::span<const T>(block), Ordering::Sequency);
      const T scale(static_cast<long>(n));
      for (std::size_t i = 0; i < real; ++i) out.push_back(y[i] / scale);
    }
  }
  return out;
}

template <typename T>
std::vector<T> bwht_apply(const BwhtPlan& plan, const std::vector<T>& x, Direction dir) {
  return bwht_apply(plan, std::span<const T>(x), dir);
}

}  // namespace fdcim::wht
