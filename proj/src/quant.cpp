#include "fdcim/quant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fdcim::quant {

namespace {

void check_bits(int bits) {
  if (bits < 1 || bits > kMaxBits) {
    throw ParameterError("bit width " + std::to_string(bits) + " outside 1.." + std::to_string(kMaxBits));
  }
}

}  // namespace

std::int64_t FixedPointVector::min_code() const {
  return signedness == Signedness::Unsigned ? 0 : -(std::int64_t{1} << (total_bits - 1));
}

std::int64_t FixedPointVector::max_code() const {
  return signedness == Signedness::Unsigned ? (std::int64_t{1} << total_bits) - 1
                                            : (std::int64_t{1} << (total_bits - 1)) - 1;
}

bool FixedPointVector::fits() const {
  const auto lo = min_code();
  const auto hi = max_code();
  return std::all_of(values.begin(), values.end(), [&](std::int64_t v) { return v >= lo && v <= hi; });
}

std::vector<double> FixedPointVector::dequantize() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = offset + static_cast<double>(values[i]) * scale;
  return out;
}

FixedPointVector quantize(std::span<const double> x, int bits, double lo, double hi, Signedness s) {
  check_bits(bits);
  if (!(lo < hi)) throw ParameterError("quantize: range requires lo < hi");
  if (x.empty()) throw ShapeError("quantize: empty input");

  FixedPointVector v;
  v.total_bits = bits;
  v.signedness = s;
  v.scale = (hi - lo) / std::ldexp(1.0, bits);
  v.offset = s == Signedness::Unsigned ? lo : 0.5 * (lo + hi);
  const auto cmin = v.min_code();
  const auto cmax = v.max_code();
  v.values.reserve(x.size());
  for (double xi : x) {
    const double r = std::round((xi - v.offset) / v.scale);  // half away from zero
    const double c = std::clamp(r, static_cast<double>(cmin), static_cast<double>(cmax));
    v.values.push_back(static_cast<std::int64_t>(c));
  }
  return v;
}

BitplaneTensor to_bitplanes(const FixedPointVector& v) {
  check_bits(v.total_bits);
  if (!v.fits()) throw ParameterError("to_bitplanes: value does not fit declared bit width");

  BitplaneTensor t;
  t.scale = v.scale;
  t.offset = v.offset;
  t.signedness = v.signedness;
  const int B = v.total_bits;
  const std::uint64_t mask = (B == 64) ? ~0ULL : ((1ULL << B) - 1);
  t.planes.assign(B, std::vector<std::uint8_t>(v.values.size()));
  for (std::size_t i = 0; i < v.values.size(); ++i) {
    const auto raw = static_cast<std::uint64_t>(v.values[i]) & mask;
    for (int j = 0; j < B; ++j) t.planes[j][i] = static_cast<std::uint8_t>((raw >> j) & 1U);
  }
  for (int j = 0; j < B; ++j) t.int_weights.push_back(std::int64_t{1} << j);
  if (v.signedness == Signedness::TwosComplement) t.int_weights.back() = -t.int_weights.back();
  return t;
}

FixedPointVector from_bitplanes(const BitplaneTensor& t) {
  FixedPointVector v;
  v.total_bits = static_cast<int>(t.num_planes());
  v.signedness = t.signedness;
  v.scale = t.scale;
  v.offset = t.offset;
  v.values.assign(t.length(), 0);
  for (std::size_t j = 0; j < t.num_planes(); ++j) {
    if (t.planes[j].size() != t.length()) throw ShapeError("from_bitplanes: ragged planes");
    for (std::size_t i = 0; i < t.length(); ++i) v.values[i] += t.int_weights[j] * t.planes[j][i];
  }
  return v;
}

void ThresholdParams::validate(std::size_t n) const {
  if (t.empty()) throw ParameterError("threshold: no values");
  if (t.size() != 1 && t.size() != n) {
    throw ShapeError("threshold: " + std::to_string(t.size()) + " channels for " + std::to_string(n) +
                     " elements");
  }
  for (double v : t) {
    if (!(v >= 0.0)) throw ParameterError("threshold: T must be non-negative");
  }
}

std::vector<double> soft_threshold(std::span<const double> x, const ThresholdParams& T) {
  T.validate(x.size());
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = T.at(i);
    if (x[i] < -t) {
      y[i] = x[i] + t;
    } else if (x[i] > t) {
      y[i] = x[i] - t;
    } else {
      y[i] = 0.0;
    }
  }
  return y;
}

SoftThresholdGrads soft_threshold_grads(std::span<const double> x, const ThresholdParams& T) {
  T.validate(x.size());
  SoftThresholdGrads g;
  g.dy_dx.resize(x.size());
  g.dy_dt.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = T.at(i);
    if (x[i] > t) {
      g.dy_dx[i] = 1.0;
      g.dy_dt[i] = -1.0;
    } else if (x[i] < -t) {
      g.dy_dx[i] = 1.0;
      g.dy_dt[i] = 1.0;
    } else {
      g.dy_dx[i] = 0.0;  // dead zone and kinks
      g.dy_dt[i] = 0.0;
    }
  }
  return g;
}

}  // namespace fdcim::quant
