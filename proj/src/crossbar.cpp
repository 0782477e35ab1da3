#include "fdcim/crossbar.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <string>

namespace fdcim::crossbar {

CrossbarArray program(std::span<const int> matrix, std::size_t rows, std::size_t cols,
                      const CrossbarConfig& cfg) {
  if (rows == 0 || cols == 0) throw ShapeError("program: array needs at least one row and column");
  if (matrix.size() != rows * cols) throw ShapeError("program: matrix size does not match rows x cols");
  if (!(cfg.mav_noise_sigma >= 0.0)) throw ParameterError("program: noise sigma must be >= 0");
  if (!cfg.comparator_offset.empty() && cfg.comparator_offset.size() != rows) {
    throw ShapeError("program: comparator offsets must have one entry per row");
  }

  CrossbarArray a;
  a.rows_ = rows;
  a.cols_ = cols;
  a.weights_.reserve(matrix.size());
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const int w = matrix[i];
    if (w != 1 && w != -1) {
      throw ProgrammingError("program: entry (" + std::to_string(i / cols) + ", " + std::to_string(i % cols) +
                             ") = " + std::to_string(w) + " is not +/-1");
    }
    a.weights_.push_back(static_cast<std::int8_t>(w));
  }
  a.offsets_ = cfg.comparator_offset.empty() ? std::vector<double>(rows, 0.0) : cfg.comparator_offset;
  a.sigma_ = cfg.mav_noise_sigma;
  a.seed_ = cfg.rng_seed;
  a.order_ = cfg.plane_order;
  return a;
}

CrossbarArray program(const wht::WalshMatrix& w, const CrossbarConfig& cfg) {
  const std::size_t n = w.size();
  std::vector<int> m(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) m[r * n + c] = w.at(r, c);
  }
  return program(m, n, n, cfg);
}

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t invocation, double sigma)
    : dist_(0.0, sigma > 0.0 ? sigma : 1.0), sigma_(sigma) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(invocation), static_cast<std::uint32_t>(invocation >> 32)};
  rng_.seed(seq);
}

double NoiseStream::next() { return sigma_ > 0.0 ? dist_(rng_) : 0.0; }

namespace {

std::vector<double> mav_impl(const CrossbarArray& array, std::span<const std::uint8_t> plane, NoiseStream* noise) {
  if (plane.size() != array.cols()) {
    throw ShapeError("mav: plane length " + std::to_string(plane.size()) + " != columns " +
                     std::to_string(array.cols()));
  }
  std::vector<double> out(array.rows());
  const double c = static_cast<double>(array.cols());
  for (std::size_t r = 0; r < array.rows(); ++r) {
    const auto w = array.row(r);
    long sum = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (plane[i] > 1) throw ParameterError("mav: plane entries must be 0 or 1");
      sum += w[i] * plane[i];
    }
    out[r] = static_cast<double>(sum) / c;
    if (noise != nullptr) out[r] += noise->next();
  }
  return out;
}

}  // namespace

std::vector<double> mav(const CrossbarArray& array, std::span<const std::uint8_t> plane) {
  return mav_impl(array, plane, nullptr);
}

std::vector<double> mav(const CrossbarArray& array, std::span<const std::uint8_t> plane, NoiseStream& noise) {
  return mav_impl(array, plane, &noise);
}

std::vector<std::uint8_t> comparator(std::span<const double> mav_values, std::span<const double> offsets) {
  if (!offsets.empty() && offsets.size() != mav_values.size()) {
    throw ShapeError("comparator: offset count does not match MAV count");
  }
  std::vector<std::uint8_t> bits(mav_values.size());
  for (std::size_t r = 0; r < mav_values.size(); ++r) {
    const double off = offsets.empty() ? 0.0 : offsets[r];
    bits[r] = (mav_values[r] + off > 0.0) ? 1 : 0;
  }
  return bits;
}

F0Result f0_transform(const CrossbarArray& array, const quant::BitplaneTensor& input, EtMode mode,
                      const quant::ThresholdParams& T, std::uint64_t invocation) {
  if (input.length() != array.cols()) {
    throw ShapeError("f0_transform: input length " + std::to_string(input.length()) + " != columns " +
                     std::to_string(array.cols()));
  }
  const std::size_t R = array.rows();
  T.validate(R);
  const std::size_t B = input.num_planes();

  std::vector<std::size_t> order(B);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (array.plane_order() == PlaneOrder::MsbFirst) std::reverse(order.begin(), order.end());

  // remaining[s] = sum of |weight| over planes after step s
  std::vector<std::int64_t> remaining(B, 0);
  for (std::size_t s = B; s-- > 1;) remaining[s - 1] = remaining[s] + std::llabs(input.int_weights[order[s]]);

  F0Result res;
  std::vector<std::int64_t> partial(R, 0);
  std::vector<bool> active(R, true);
  res.planes_processed.assign(R, 0);
  res.terminated_early.assign(R, false);

  NoiseStream noise(array.rng_seed(), invocation, array.mav_noise_sigma());
  std::size_t live = R;
  for (std::size_t s = 0; s < B && live > 0; ++s) {
    const std::size_t j = order[s];
    const auto& plane = input.planes[j];
    // All-zero planes are gated digitally: they still occupy their step and
    // draw noise, but contribute digit 0 and fire no comparator.
    const bool gated = std::none_of(plane.begin(), plane.end(), [](std::uint8_t b) { return b != 0; });
    const auto m = array.mav_noise_sigma() > 0.0 ? mav(array, plane, noise) : mav(array, plane);
    const auto bits = comparator(m, array.comparator_offset());
    const std::int64_t w = input.int_weights[j];

    for (std::size_t r = 0; r < R; ++r) {
      if (!active[r]) continue;
      if (!gated) {
        partial[r] += bits[r] ? w : -w;
        ++res.comparator_ops;
      }
      ++res.planes_processed[r];

      bool stop = false;
      const double mag = static_cast<double>(std::llabs(partial[r]));
      if (mode == EtMode::HeuristicET) {
        stop = mag * input.scale <= T.at(r);
      } else if (mode == EtMode::SoundET) {
        stop = (mag + static_cast<double>(remaining[s])) * input.scale <= T.at(r);
      }
      if (stop) {
        partial[r] = 0;
        active[r] = false;
        res.terminated_early[r] = remaining[s] > 0;
        --live;
      }
    }
  }

  const int max_planes = R ? *std::max_element(res.planes_processed.begin(), res.planes_processed.end()) : 0;
  res.cycle_count = static_cast<std::uint64_t>(kCyclesPerPlane) * static_cast<std::uint64_t>(max_planes);
  res.output.values = std::move(partial);
  res.output.total_bits = static_cast<int>(B) + 1;
  res.output.signedness = quant::Signedness::TwosComplement;
  res.output.scale = input.scale;
  res.output.offset = 0.0;
  return res;
}

RequantConfig exact_requant(const quant::FixedPointVector& input) {
  RequantConfig rq;
  rq.bits = input.total_bits + 1;
  rq.hi = std::ldexp(input.scale, input.total_bits);
  rq.lo = -rq.hi;
  return rq;
}

quant::FixedPointVector chain_layer(const CrossbarArray& array, const quant::FixedPointVector& x,
                                    const quant::ThresholdParams& T, const RequantConfig& requant, EtMode mode,
                                    std::uint64_t invocation) {
  if (array.rows() != array.cols()) throw ShapeError("chain_layer: array must be square");
  const auto freq = f0_transform(array, quant::to_bitplanes(x), mode, T, 2 * invocation);
  const auto dense = freq.output.dequantize();
  const auto shrunk = quant::soft_threshold(dense, T);
  const auto rq = quant::quantize(shrunk, requant.bits, requant.lo, requant.hi, quant::Signedness::TwosComplement);
  const auto spatial = f0_transform(array, quant::to_bitplanes(rq), EtMode::Full, quant::ThresholdParams(0.0),
                                    2 * invocation + 1);
  return spatial.output;
}

}  // namespace fdcim::crossbar
