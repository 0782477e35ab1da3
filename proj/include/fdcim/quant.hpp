#pragma once

// Fixed-point vectors, bitplane decomposition and the soft-threshold shrinkage.

#include <cstdint>
#include <span>
#include <vector>

#include "fdcim/errors.hpp"

namespace fdcim::quant {

enum class Signedness { Unsigned, TwosComplement };

inline constexpr int kMaxBits = 16;

// real value = offset + integer * scale
struct FixedPointVector {
  std::vector<std::int64_t> values;
  int total_bits = 1;
  Signedness signedness = Signedness::Unsigned;
  double scale = 1.0;
  double offset = 0.0;

  std::int64_t min_code() const;
  std::int64_t max_code() const;
  bool fits() const;
  std::vector<double> dequantize() const;

  bool operator==(const FixedPointVector&) const = default;
};

struct BitplaneTensor {
  // planes[j] holds bit j of every element (j = significance).
  std::vector<std::vector<std::uint8_t>> planes;
  // Integer significance per plane: 2^j, negated for a two's-complement sign plane.
  std::vector<std::int64_t> int_weights;
  double scale = 1.0;
  double offset = 0.0;
  Signedness signedness = Signedness::Unsigned;

  std::size_t length() const { return planes.empty() ? 0 : planes.front().size(); }
  std::size_t num_planes() const { return planes.size(); }
  double plane_weight(std::size_t j) const { return static_cast<double>(int_weights[j]) * scale; }
};

// Codes cover 2^B cells of width (hi - lo) / 2^B. Unsigned codes 0..2^B-1 are
// anchored at lo; two's-complement codes -2^(B-1)..2^(B-1)-1 are anchored at
// the range midpoint, so zero maps to code 0 on a symmetric range. Rounding is
// half away from zero and out-of-range inputs saturate.
FixedPointVector quantize(std::span<const double> x, int bits, double lo, double hi, Signedness s);

BitplaneTensor to_bitplanes(const FixedPointVector& v);
FixedPointVector from_bitplanes(const BitplaneTensor& t);

// Per-channel thresholds. A single entry broadcasts over every element.
struct ThresholdParams {
  std::vector<double> t;

  ThresholdParams() = default;
  explicit ThresholdParams(double scalar) : t{scalar} {}
  explicit ThresholdParams(std::vector<double> per_channel) : t(std::move(per_channel)) {}

  double at(std::size_t i) const { return t.size() == 1 ? t[0] : t[i]; }
  void validate(std::size_t n) const;
};

std::vector<double> soft_threshold(std::span<const double> x, const ThresholdParams& T);

struct SoftThresholdGrads {
  std::vector<double> dy_dx;
  std::vector<double> dy_dt;
};

SoftThresholdGrads soft_threshold_grads(std::span<const double> x, const ThresholdParams& T);

}  // namespace fdcim::quant
