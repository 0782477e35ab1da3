#pragma once

// Behavioral model of the binary transform crossbar.
//
// Each input bitplane is applied to the array in one two-cycle step. Every row
// charge-averages its cell products into a multiply-average value (MAV), a
// differential comparator turns the MAV into one bit, and the per-plane bits
// are combined as signed digits weighted by plane significance.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fdcim/quant.hpp"
#include "fdcim/wht.hpp"

namespace fdcim::crossbar {

enum class EtMode { Full, HeuristicET, SoundET };
enum class PlaneOrder { MsbFirst, LsbFirst };

struct CrossbarConfig {
  std::vector<double> comparator_offset;  // per row; empty means all zero
  double mav_noise_sigma = 0.0;
  std::uint64_t rng_seed = 0;
  PlaneOrder plane_order = PlaneOrder::MsbFirst;
};

class CrossbarArray {
 public:
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int weight(std::size_t r, std::size_t c) const { return weights_[r * cols_ + c]; }
  std::span<const std::int8_t> row(std::size_t r) const {
    return {weights_.data() + r * cols_, cols_};
  }
  const std::vector<double>& comparator_offset() const { return offsets_; }
  double mav_noise_sigma() const { return sigma_; }
  std::uint64_t rng_seed() const { return seed_; }
  PlaneOrder plane_order() const { return order_; }

 private:
  friend CrossbarArray program(std::span<const int> matrix, std::size_t rows, std::size_t cols,
                               const CrossbarConfig& cfg);
  CrossbarArray() = default;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int8_t> weights_;
  std::vector<double> offsets_;
  double sigma_ = 0.0;
  std::uint64_t seed_ = 0;
  PlaneOrder order_ = PlaneOrder::MsbFirst;
};

// Row-major matrix with entries in {-1, +1}; anything else is a ProgrammingError.
CrossbarArray program(std::span<const int> matrix, std::size_t rows, std::size_t cols,
                      const CrossbarConfig& cfg = {});
CrossbarArray program(const wht::WalshMatrix& w, const CrossbarConfig& cfg = {});

// Gaussian MAV noise stream. Seeded from (array seed, invocation id) so each
// f0 invocation owns its state.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t seed, std::uint64_t invocation, double sigma);
  double next();
  double sigma() const { return sigma_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> dist_;
  double sigma_;
};

// Noise-free MAV: (sum_c w[r,c] * plane[c]) / C per row.
std::vector<double> mav(const CrossbarArray& array, std::span<const std::uint8_t> plane);
std::vector<double> mav(const CrossbarArray& array, std::span<const std::uint8_t> plane, NoiseStream& noise);

// bit_r = 1 iff mav_r + offset_r > 0. Empty offsets mean zero.
std::vector<std::uint8_t> comparator(std::span<const double> mav_values, std::span<const double> offsets);

struct F0Result {
  quant::FixedPointVector output;  // per row
  std::vector<int> planes_processed;
  std::vector<bool> terminated_early;
  std::uint64_t comparator_ops = 0;
  std::uint64_t cycle_count = 0;

  bool operator==(const F0Result&) const = default;
};

inline constexpr int kCyclesPerPlane = 2;

F0Result f0_transform(const CrossbarArray& array, const quant::BitplaneTensor& input, EtMode mode,
                      const quant::ThresholdParams& T, std::uint64_t invocation = 0);

// Requantization between the two transforms of a chained layer.
struct RequantConfig {
  int bits = 5;
  double lo = -1.0;
  double hi = 1.0;
};

// Requantization that represents the first transform's output grid exactly:
// one extra bit over the input width and range +/- 2^B * input scale.
RequantConfig exact_requant(const quant::FixedPointVector& input);

// x -> F0(S_T(F0(x))) on a square array, returning the spatial-domain output.
quant::FixedPointVector chain_layer(const CrossbarArray& array, const quant::FixedPointVector& x,
                                    const quant::ThresholdParams& T, const RequantConfig& requant,
                                    EtMode mode = EtMode::Full, std::uint64_t invocation = 0);

}  // namespace fdcim::crossbar
