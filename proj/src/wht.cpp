#include "fdcim/wht.hpp"

#include <numeric>

namespace fdcim::wht {

namespace {

void check_order(int k) {
  if (k < 0) throw ParameterError("transform order must be non-negative");
  if (k > kMaxOrderLog2) {
    throw CapacityError("transform order 2^" + std::to_string(k) + " exceeds budget 2^" +
                        std::to_string(kMaxOrderLog2));
  }
}

std::size_t bit_reverse(std::size_t v, int bits) {
  std::size_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (v & 1U);
    v >>= 1;
  }
  return r;
}

}  // namespace

std::string to_string(Ordering o) { return o == Ordering::Natural ? "natural" : "sequency"; }

std::size_t sequency_to_natural(std::size_t s, int k) { return bit_reverse(s ^ (s >> 1), k); }

WalshMatrix hadamard(int k) {
  check_order(k);
  std::vector<std::size_t> map(std::size_t{1} << k);
  std::iota(map.begin(), map.end(), std::size_t{0});
  return WalshMatrix(k, Ordering::Natural, std::move(map));
}

WalshMatrix walsh(int k) {
  check_order(k);
  std::vector<std::size_t> map(std::size_t{1} << k);
  for (std::size_t s = 0; s < map.size(); ++s) map[s] = sequency_to_natural(s, k);
  return WalshMatrix(k, Ordering::Sequency, std::move(map));
}

WalshMatrix make_matrix(int k, Ordering o) { return o == Ordering::Natural ? hadamard(k) : walsh(k); }

std::vector<int> WalshMatrix::row(std::size_t r) const {
  std::vector<int> out(size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = at(r, c);
  return out;
}

std::vector<std::int8_t> WalshMatrix::dense() const {
  if (order_log2_ > 12) throw CapacityError("dense(): matrix larger than 2^12 x 2^12");
  const std::size_t n = size();
  std::vector<std::int8_t> out(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) out[r * n + c] = static_cast<std::int8_t>(at(r, c));
  }
  return out;
}

int sign_changes(std::span<const int> row) {
  int n = 0;
  for (std::size_t i = 1; i < row.size(); ++i) n += (row[i] != row[i - 1]);
  return n;
}

std::size_t BwhtPlan::padded_len() const {
  return std::accumulate(block_sizes.begin(), block_sizes.end(), std::size_t{0});
}

std::size_t BwhtPlan::total_padding() const {
  return std::accumulate(pad.begin(), pad.end(), std::size_t{0});
}

std::size_t BwhtPlan::input_offset(std::size_t b) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < b; ++i) off += block_sizes[i] - pad[i];
  return off;
}

std::size_t BwhtPlan::padded_offset(std::size_t b) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < b; ++i) off += block_sizes[i];
  return off;
}

BwhtPlan bwht_plan(std::size_t m, std::size_t min_block) {
  if (m == 0) throw ParameterError("bwht_plan: input length must be >= 1");
  if (!is_power_of_two(min_block)) throw ParameterError("bwht_plan: min_block must be a power of two");

  BwhtPlan plan;
  plan.input_len = m;
  if (is_power_of_two(m)) {
    plan.block_sizes = {m};
    plan.pad = {0};
    return plan;
  }
  for (std::size_t bit = std::bit_floor(m); bit >= min_block; bit >>= 1) {
    if (m & bit) {
      plan.block_sizes.push_back(bit);
      plan.pad.push_back(0);
    }
  }
  const std::size_t rem = m & (min_block - 1);
  if (rem != 0) {
    plan.block_sizes.push_back(min_block);
    plan.pad.push_back(min_block - rem);
  }
  return plan;
}

}  // namespace fdcim::wht
