#include "fdcim/adc.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fdcim::adc {

void CapDac::validate() const {
  if (n_units < 2) throw ConfigError("CapDac: needs at least 2 unit capacitors");
  if (!unit_mismatch.empty() && unit_mismatch.size() != n_units) {
    throw ConfigError("CapDac: mismatch vector length differs from unit count");
  }
  for (double m : unit_mismatch) {
    if (!(m > -1.0)) throw ConfigError("CapDac: unit mismatch must be > -1");
  }
  if (!(vdd > 0.0)) throw ConfigError("CapDac: vdd must be positive");
}

CapDac ideal_dac(std::size_t n_units, double vdd) { return CapDac{n_units, {}, vdd}; }

CapDac random_mismatch_dac(std::size_t n_units, double sigma, std::uint64_t seed, double vdd) {
  CapDac dac{n_units, std::vector<double>(n_units, 0.0), vdd};
  if (sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sigma);
    for (auto& m : dac.unit_mismatch) m = std::max(dist(rng), -0.9);
  }
  return dac;
}

double dac_reference(const CapDac& dac, std::span<const bool> precharged) {
  dac.validate();
  if (precharged.size() != dac.n_units) throw ConfigError("dac_reference: precharge mask size mismatch");
  double charged = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < dac.n_units; ++i) {
    const double c = dac.capacitance(i);
    total += c;
    if (precharged[i]) charged += c;
  }
  return dac.vdd * charged / total;
}

double dac_reference_first(const CapDac& dac, std::size_t count) {
  dac.validate();
  if (count > dac.n_units) throw ConfigError("dac_reference: more precharged units than available");
  double charged = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < dac.n_units; ++i) {
    const double c = dac.capacitance(i);
    total += c;
    if (i < count) charged += c;
  }
  return dac.vdd * charged / total;
}

double code_reference(const CapDac& dac, std::uint32_t code, int bits) {
  // round(code / 2^bits * n), halves rounded up, in integer arithmetic
  const std::uint64_t num = static_cast<std::uint64_t>(code) * dac.n_units;
  const std::uint64_t den = std::uint64_t{1} << bits;
  const std::uint64_t units = (2 * num + den) / (2 * den);
  return dac_reference_first(dac, static_cast<std::size_t>(units));
}

std::string to_string(ModeTag m) {
  switch (m) {
    case ModeTag::Sar: return "sar";
    case ModeTag::Flash: return "flash";
    case ModeTag::Asymmetric: return "asym";
  }
  return "?";
}

std::string to_string(ArrayRole r) {
  switch (r) {
    case ArrayRole::MavHold: return "mav";
    case ArrayRole::FlashReference: return "flash_ref";
    case ArrayRole::SarReference: return "sar_ref";
    case ArrayRole::Free: return "free";
  }
  return "?";
}

void AdcConfig::validate() const {
  if (bits < 1 || bits > 8) throw ConfigError("AdcConfig: bits must be in 1..8");
  if (kind == Kind::Hybrid && (flash_bits < 1 || flash_bits >= bits)) {
    throw ConfigError("AdcConfig: hybrid flash_bits must be in 1..bits-1");
  }
  if (kind == Kind::Asymmetric) {
    if (tree == nullptr) throw ConfigError("AdcConfig: asymmetric mode needs a search tree");
    if (tree->bits() != bits) throw ConfigError("AdcConfig: search tree resolution differs from bits");
  }
}

namespace {

// Resolves the low `n_bits` below `prefix` by successive approximation.
std::uint32_t sar_cycles(double vin, const CapDac& dac, int total_bits, std::uint32_t prefix, int n_bits,
                         double offset, AdcConversionTrace& trace) {
  std::uint32_t code = prefix;
  for (int b = n_bits - 1; b >= 0; --b) {
    const std::uint32_t trial = code | (1U << b);
    const double ref = code_reference(dac, trial, total_bits);
    const bool decision = vin + offset > ref;
    if (decision) code = trial;
    CycleRecord rec;
    rec.cycle = static_cast<int>(trace.cycles.size());
    rec.mode = ModeTag::Sar;
    rec.references = {ref};
    rec.decisions = {decision};
    rec.dac_array = 1;
    trace.cycles.push_back(std::move(rec));
    ++trace.comparator_ops;
  }
  return code;
}

void begin_trace(AdcConversionTrace& trace, double vin, double vdd) {
  trace.input_v = vin;
  trace.saturated = vin < 0.0 || vin > vdd;
}

}  // namespace

AdcConversionTrace sar_convert(double vin, const CapDac& dac, const AdcConfig& config) {
  config.validate();
  dac.validate();
  AdcConversionTrace trace;
  begin_trace(trace, vin, dac.vdd);
  trace.code = sar_cycles(vin, dac, config.bits, 0, config.bits, config.comparator_offset, trace);
  trace.comparisons = static_cast<int>(trace.cycles.size());
  return trace;
}

FlashResult flash_convert_msbs(double vin, std::span<const CapDac> dacs, int m, double comparator_offset) {
  if (m < 1 || m > 8) throw ConfigError("flash: msb count must be in 1..8");
  const std::size_t needed = (std::size_t{1} << m) - 1;
  if (dacs.size() != needed) {
    throw ConfigError("flash: " + std::to_string(m) + " MSBs need " + std::to_string(needed) +
                      " reference arrays, got " + std::to_string(dacs.size()));
  }
  FlashResult res;
  res.record.mode = ModeTag::Flash;
  res.record.dac_array = 1;
  std::uint32_t ones = 0;
  for (std::size_t k = 1; k <= needed; ++k) {
    const double ref = code_reference(dacs[k - 1], static_cast<std::uint32_t>(k), m);
    const bool d = vin + comparator_offset > ref;
    res.record.references.push_back(ref);
    res.record.decisions.push_back(d);
    ones += d ? 1U : 0U;  // ones-count tolerates thermometer bubbles
  }
  res.msbs = ones;
  res.parallel_comparators = static_cast<int>(needed);
  return res;
}

AdcNetwork AdcNetwork::ideal(std::size_t n_arrays, std::size_t n_units, double vdd) {
  if (n_arrays < 2) throw ConfigError("AdcNetwork: needs the MAV array plus at least one reference array");
  AdcNetwork net;
  net.reference_arrays.assign(n_arrays - 1, ideal_dac(n_units, vdd));
  return net;
}

AdcConversionTrace hybrid_convert(double vin, const AdcNetwork& network, const AdcConfig& config) {
  config.validate();
  const int m = config.flash_bits;
  if (m < 1 || m >= config.bits) throw ConfigError("hybrid: flash_bits must be in 1..bits-1");
  const std::size_t needed = (std::size_t{1} << m) - 1;
  if (network.reference_arrays.size() < needed) {
    throw ConfigError("hybrid: network has " + std::to_string(network.reference_arrays.size()) +
                      " reference arrays, Flash stage needs " + std::to_string(needed));
  }
  const CapDac& sar_dac = network.reference_arrays.front();
  AdcConversionTrace trace;
  begin_trace(trace, vin, sar_dac.vdd);

  auto flash = flash_convert_msbs(vin, std::span<const CapDac>(network.reference_arrays.data(), needed), m,
                                  config.comparator_offset);
  flash.record.cycle = 0;
  trace.comparator_ops += flash.parallel_comparators;
  trace.cycles.push_back(std::move(flash.record));

  const int rest = config.bits - m;
  trace.code = sar_cycles(vin, sar_dac, config.bits, flash.msbs << rest, rest, config.comparator_offset, trace);
  trace.comparisons = static_cast<int>(trace.cycles.size());
  return trace;
}

AdcConversionTrace flash_convert(double vin, const AdcNetwork& network, const AdcConfig& config) {
  config.validate();
  const std::size_t needed = (std::size_t{1} << config.bits) - 1;
  if (network.reference_arrays.size() < needed) {
    throw ConfigError("flash: " + std::to_string(config.bits) + "-bit Flash needs " + std::to_string(needed) +
                      " reference arrays");
  }
  AdcConversionTrace trace;
  begin_trace(trace, vin, network.reference_arrays.front().vdd);
  auto flash = flash_convert_msbs(vin, std::span<const CapDac>(network.reference_arrays.data(), needed),
                                  config.bits, config.comparator_offset);
  trace.code = flash.msbs;
  trace.comparator_ops = flash.parallel_comparators;
  trace.cycles.push_back(std::move(flash.record));
  trace.comparisons = 1;
  return trace;
}

std::vector<TimelineEntry> hybrid_timeline(std::size_t n_arrays, int bits, int flash_bits) {
  if (flash_bits < 1 || flash_bits >= bits) throw ConfigError("timeline: flash_bits must be in 1..bits-1");
  const std::size_t flash_arrays = std::size_t{1} << flash_bits;  // MAV array + 2^m - 1 references
  if (n_arrays < flash_arrays) {
    throw ConfigError("timeline: " + std::to_string(n_arrays) + " arrays cannot host a " +
                      std::to_string(flash_bits) + "-bit Flash stage");
  }
  std::vector<TimelineEntry> out;
  for (std::size_t a = 1; a <= n_arrays; ++a) {
    const bool in_flash = a <= flash_arrays;
    out.push_back({0, static_cast<int>(a), a == 1 ? ArrayRole::MavHold : in_flash ? ArrayRole::FlashReference
                                                                                   : ArrayRole::Free,
                   in_flash ? 0 : -1});
  }
  const int sar_cycles_n = bits - flash_bits;
  for (int c = 1; c <= sar_cycles_n; ++c) {
    for (std::size_t a = 1; a <= n_arrays; ++a) {
      TimelineEntry e{c, static_cast<int>(a), ArrayRole::Free, -1};
      if (a <= 2) {
        e.role = a == 1 ? ArrayRole::MavHold : ArrayRole::SarReference;
        e.conversion = 0;
      } else {
        // pairs (3,4), (5,6), ...: odd array holds the MAV, even array references
        const bool holder = a % 2 == 1;
        const std::size_t partner = holder ? a + 1 : a - 1;
        if (partner <= n_arrays) {
          e.role = holder ? ArrayRole::MavHold : ArrayRole::SarReference;
          e.conversion = static_cast<int>((a - 1) / 2);
        }
      }
      out.push_back(e);
    }
  }
  return out;
}

AdcConversionTrace asymmetric_convert(double vin, const CapDac& dac, const AdcConfig& config) {
  config.validate();
  if (config.kind != AdcConfig::Kind::Asymmetric) throw ConfigError("asymmetric_convert: mode is not asymmetric");
  dac.validate();
  const SearchTree& tree = *config.tree;
  AdcConversionTrace trace;
  begin_trace(trace, vin, dac.vdd);
  int n = tree.root();
  while (!tree.node(n).is_leaf()) {
    const auto& node = tree.node(n);
    const double ref = code_reference(dac, node.threshold, config.bits);
    const bool decision = vin + config.comparator_offset > ref;
    CycleRecord rec;
    rec.cycle = static_cast<int>(trace.cycles.size());
    rec.mode = ModeTag::Asymmetric;
    rec.references = {ref};
    rec.decisions = {decision};
    trace.cycles.push_back(std::move(rec));
    ++trace.comparator_ops;
    n = decision ? node.right : node.left;
  }
  trace.code = tree.node(n).lo;
  trace.comparisons = static_cast<int>(trace.cycles.size());
  return trace;
}

AdcConversionTrace MemoryImmersedAdc::convert(double vin) const {
  if (network.reference_arrays.empty()) throw ConfigError("adc: network has no reference arrays");
  switch (config.kind) {
    case AdcConfig::Kind::Sar: return sar_convert(vin, network.reference_arrays.front(), config);
    case AdcConfig::Kind::Flash: return flash_convert(vin, network, config);
    case AdcConfig::Kind::Hybrid: return hybrid_convert(vin, network, config);
    case AdcConfig::Kind::Asymmetric: return asymmetric_convert(vin, network.reference_arrays.front(), config);
  }
  throw ConfigError("adc: unknown mode");
}

// -- MAV statistics -----------------------------------------------------------

void MavPmf::validate() const {
  if (bits < 1 || p.size() != (std::size_t{1} << bits)) throw ShapeError("MavPmf: needs 2^bits entries");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) throw ParameterError("MavPmf: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw ParameterError("MavPmf: probabilities do not sum to 1");
}

std::vector<double> column_sum_distribution(std::size_t n_cols, MavAlgebra algebra) {
  // per-column term distribution, indexed from its minimum value
  const std::vector<double> term = algebra == MavAlgebra::AndProduct ? std::vector<double>{0.75, 0.25}
                                                                     : std::vector<double>{0.25, 0.5, 0.25};
  std::vector<double> dist{1.0};
  for (std::size_t c = 0; c < n_cols; ++c) {
    std::vector<double> next(dist.size() + term.size() - 1, 0.0);
    for (std::size_t i = 0; i < dist.size(); ++i) {
      for (std::size_t j = 0; j < term.size(); ++j) next[i + j] += dist[i] * term[j];
    }
    dist = std::move(next);
  }
  return dist;
}

MavPmf mav_pmf(std::size_t n_cols, int bits, MavAlgebra algebra) {
  if (n_cols < 1) throw ParameterError("mav_pmf: n_cols must be >= 1");
  if (bits < 1 || bits > 8) throw ParameterError("mav_pmf: bits must be in 1..8");
  const auto dist = column_sum_distribution(n_cols, algebra);
  const std::uint64_t levels = std::uint64_t{1} << bits;
  // fraction of full scale = idx / span, idx counted from the minimum sum
  const std::uint64_t span = algebra == MavAlgebra::AndProduct ? n_cols : 2 * n_cols;
  MavPmf pmf;
  pmf.bits = bits;
  pmf.p.assign(levels, 0.0);
  for (std::size_t idx = 0; idx < dist.size(); ++idx) {
    const std::uint64_t code = std::min<std::uint64_t>(idx * levels / span, levels - 1);
    pmf.p[code] += dist[idx];
  }
  return pmf;
}

MavPmf uniform_pmf(int bits) {
  MavPmf pmf;
  pmf.bits = bits;
  pmf.p.assign(std::size_t{1} << bits, 1.0 / static_cast<double>(std::size_t{1} << bits));
  return pmf;
}

MavPmf point_pmf(int bits, std::uint32_t code) {
  MavPmf pmf;
  pmf.bits = bits;
  pmf.p.assign(std::size_t{1} << bits, 0.0);
  pmf.p.at(code) = 1.0;
  return pmf;
}

// -- Static characterisation -----------------------------------------------------

std::vector<double> linear_sweep(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

std::vector<CurvePoint> transfer_curve(const MemoryImmersedAdc& adc, std::span<const double> sweep) {
  std::vector<CurvePoint> out;
  out.reserve(sweep.size());
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (i > 0 && sweep[i] < sweep[i - 1]) throw ParameterError("transfer_curve: sweep must be non-decreasing");
    out.push_back({sweep[i], adc.convert(sweep[i]).code});
  }
  return out;
}

namespace {

void refine(const MemoryImmersedAdc& adc, const CurvePoint& a, const CurvePoint& b, double tol,
            std::vector<CurvePoint>& out) {
  if (a.code == b.code || b.vin - a.vin <= tol) return;
  const double mid = a.vin + 0.5 * (b.vin - a.vin);
  if (mid <= a.vin || mid >= b.vin) return;
  const CurvePoint m{mid, adc.convert(mid).code};
  refine(adc, a, m, tol, out);
  out.push_back(m);
  refine(adc, m, b, tol, out);
}

}  // namespace

std::vector<CurvePoint> refine_transitions(const MemoryImmersedAdc& adc, std::vector<CurvePoint> curve, double tol) {
  if (curve.size() < 2) return curve;
  std::vector<CurvePoint> out;
  out.reserve(curve.size());
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    out.push_back(curve[i]);
    refine(adc, curve[i], curve[i + 1], tol, out);
  }
  out.push_back(curve.back());
  return out;
}

Linearity dnl_inl(std::span<const CurvePoint> curve, int bits) {
  if (curve.size() < 2) throw ShapeError("dnl_inl: curve needs at least two points");
  if (bits < 1 || bits > 16) throw ParameterError("dnl_inl: bits out of range");
  const std::size_t levels = std::size_t{1} << bits;
  const double v_min = curve.front().vin;
  const double v_max = curve.back().vin;

  // edge[k] = first vin reaching code >= k; edge[0] and edge[levels] are the sweep ends
  std::vector<double> edge(levels + 1, v_max);
  edge[0] = v_min;
  std::vector<bool> seen(levels, false);
  for (const auto& p : curve) {
    if (p.code >= levels) throw ShapeError("dnl_inl: code exceeds resolution");
    seen[p.code] = true;
    for (std::size_t k = 1; k <= p.code; ++k) edge[k] = std::min(edge[k], p.vin);
  }
  for (std::size_t k = 1; k <= levels; ++k) edge[k] = std::max(edge[k], edge[k - 1]);

  Linearity lin;
  lin.ideal_width = (v_max - v_min) / static_cast<double>(levels);
  lin.width.resize(levels);
  lin.dnl.resize(levels);
  lin.inl.resize(levels);
  double acc = 0.0;
  for (std::size_t k = 0; k < levels; ++k) {
    if (!seen[k]) {
      lin.missing_codes.push_back(static_cast<std::uint32_t>(k));
      lin.width[k] = 0.0;
      lin.dnl[k] = -1.0;
    } else {
      lin.width[k] = edge[k + 1] - edge[k];
      lin.dnl[k] = (lin.width[k] - lin.ideal_width) / lin.ideal_width;
    }
    acc += lin.dnl[k];
    lin.inl[k] = acc;
  }
  return lin;
}

// -- Common-mode mismatch ------------------------------------------------------------

CommonModeResult common_mode_experiment(std::size_t n_units, int bits, double sigma, int trials, std::uint64_t seed) {
  CommonModeResult res;
  res.trials = trials;
  const double vdd = 1.0;
  const double half_lsb = 0.5 * vdd / static_cast<double>(std::size_t{1} << bits);
  AdcConfig cfg;
  cfg.bits = bits;
  cfg.comparator_offset = half_lsb;  // MAV levels sit mid-step
  const std::uint64_t levels = std::uint64_t{1} << bits;

  for (int t = 0; t < trials; ++t) {
    const CapDac dac = random_mismatch_dac(n_units, sigma, seed + static_cast<std::uint64_t>(t), vdd);
    for (std::size_t s = 0; s < n_units; ++s) {
      const auto ideal = static_cast<long>(
          std::min<std::uint64_t>((2 * s + 1) * levels / (2 * n_units), levels - 1));
      // Shared array: the MAV is the charge of s lines of the same mismatched array.
      const double mav_shared = dac_reference_first(dac, s);
      const double mav_ideal = vdd * static_cast<double>(s) / static_cast<double>(n_units);
      const auto shared = static_cast<long>(sar_convert(mav_shared, dac, cfg).code);
      const auto ref_only = static_cast<long>(sar_convert(mav_ideal, dac, cfg).code);
      res.shared_error += std::labs(shared - ideal);
      res.reference_only_error += std::labs(ref_only - ideal);
    }
  }
  return res;
}

}  // namespace fdcim::adc
