#include "fdcim/cost.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>

#include "fdcim/wht.hpp"

namespace fdcim::cost {

Rational parse_decimal(std::string_view text) {
  if (text.empty()) throw ParameterError("parse_decimal: empty value");
  std::size_t i = 0;
  bool neg = false;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    ++i;
  }
  std::int64_t num = 0;
  std::int64_t den = 1;
  bool dot = false;
  bool digits = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.' && !dot) {
      dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ParameterError("parse_decimal: '" + std::string(text) + "' is not a plain decimal");
    }
    digits = true;
    if (num > (INT64_MAX - 9) / 10 || den > INT64_MAX / 10) {
      throw ParameterError("parse_decimal: '" + std::string(text) + "' has too many digits");
    }
    num = num * 10 + (c - '0');
    if (dot) den *= 10;
  }
  if (!digits) throw ParameterError("parse_decimal: '" + std::string(text) + "' has no digits");
  return Rational(neg ? -num : num, den);
}

double to_double(const Rational& r) { return boost::rational_cast<double>(r); }

std::string to_string(Architecture a) {
  switch (a) {
    case Architecture::Sar: return "SAR";
    case Architecture::Flash: return "Flash";
    case Architecture::InMemory: return "InMemory";
  }
  return "?";
}

std::string to_string(AdcStyle s) {
  switch (s) {
    case AdcStyle::Sar: return "sar";
    case AdcStyle::Flash: return "flash";
    case AdcStyle::Hybrid: return "hybrid";
    case AdcStyle::Asymmetric: return "asymmetric";
  }
  return "?";
}

const CostEntry& CostTable::get(Architecture a) const {
  switch (a) {
    case Architecture::Sar: return sar;
    case Architecture::Flash: return flash;
    case Architecture::InMemory: return in_memory;
  }
  throw ParameterError("unknown architecture");
}

CostEntry& CostTable::get(Architecture a) {
  return const_cast<CostEntry&>(static_cast<const CostTable&>(*this).get(a));
}

void CostTable::validate() const {
  for (auto a : {Architecture::Sar, Architecture::Flash, Architecture::InMemory}) {
    const auto& e = get(a);
    if (e.tech_nm <= 0 || e.area_um2 <= 0 || e.energy_pj <= 0) {
      throw ParameterError("CostTable: entries for " + to_string(a) + " must be positive");
    }
  }
  if (reference_bits < 1) throw ParameterError("CostTable: reference bits must be >= 1");
}

const Ratio& RatioReport::find(std::string_view metric, Architecture num) const {
  for (const auto& r : ratios) {
    if (r.metric == metric && r.numerator == num) return r;
  }
  throw ParameterError("RatioReport: no such ratio");
}

RatioReport ratio_report(const CostTable& table) {
  table.validate();
  RatioReport rep;
  auto add = [&](const char* metric, Architecture num, const Rational& a, const Rational& b) {
    Ratio r{metric, num, Architecture::InMemory, a / b, 0.0, 0.0};
    r.value = to_double(r.exact);
    r.rounded = std::round(r.value * 10.0) / 10.0;
    rep.ratios.push_back(r);
  };
  const auto& im = table.in_memory;
  add("area", Architecture::Sar, table.sar.area_um2, im.area_um2);
  add("area", Architecture::Flash, table.flash.area_um2, im.area_um2);
  add("energy", Architecture::Sar, table.sar.energy_pj, im.energy_pj);
  add("energy", Architecture::Flash, table.flash.energy_pj, im.energy_pj);
  return rep;
}

LatencyEstimate latency_model(AdcStyle style, int bits, int flash_bits, double expected_asym_depth) {
  if (bits < 1) throw ParameterError("latency_model: bits must be >= 1");
  switch (style) {
    case AdcStyle::Sar: return {static_cast<double>(bits), 1};
    case AdcStyle::Flash: return {1.0, (1 << bits) - 1};
    case AdcStyle::Hybrid:
      if (flash_bits < 1 || flash_bits >= bits) throw ParameterError("latency_model: flash_bits must be in 1..bits-1");
      return {1.0 + (bits - flash_bits), (1 << flash_bits) - 1};
    case AdcStyle::Asymmetric:
      if (!(expected_asym_depth >= 0.0)) throw ParameterError("latency_model: expected depth must be >= 0");
      return {expected_asym_depth, 1};
  }
  throw ParameterError("latency_model: unknown style");
}

Rational asymmetric_energy(const CostTable& table, int bits, const Rational& expected_comparisons) {
  if (bits < 1) throw ParameterError("asymmetric_energy: bits must be >= 1");
  return table.in_memory.energy_pj * expected_comparisons / Rational(bits);
}

double asymmetric_energy(const CostTable& table, int bits, double expected_comparisons) {
  if (bits < 1) throw ParameterError("asymmetric_energy: bits must be >= 1");
  return to_double(table.in_memory.energy_pj) * expected_comparisons / bits;
}

double interleaved_pair_throughput(double array_rate) { return 0.5 * array_rate; }

std::vector<DesignPoint> design_space(const CostTable& table, int min_bits, int max_bits, int flash_bits) {
  table.validate();
  if (min_bits < 1 || max_bits < min_bits || max_bits > 16) throw ParameterError("design_space: bad bit range");
  const double b0 = table.reference_bits;
  const double comps0 = std::ldexp(1.0, table.reference_bits) - 1.0;
  const double caps0 = std::ldexp(1.0, table.reference_bits);
  std::vector<DesignPoint> out;
  for (int b = min_bits; b <= max_bits; ++b) {
    const double comps = std::ldexp(1.0, b) - 1.0;
    const double caps = std::ldexp(1.0, b);
    out.push_back({b, Architecture::Sar, to_double(table.sar.area_um2) * caps / caps0,
                   to_double(table.sar.energy_pj) * b / b0, static_cast<double>(b)});
    out.push_back({b, Architecture::Flash, to_double(table.flash.area_um2) * comps / comps0,
                   to_double(table.flash.energy_pj) * comps / comps0, 1.0});
    const int m = std::min(flash_bits, b - 1);
    const double im_latency = m >= 1 ? 1.0 + (b - m) : static_cast<double>(b);
    out.push_back({b, Architecture::InMemory, to_double(table.in_memory.area_um2) * b / b0,
                   to_double(table.in_memory.energy_pj) * b / b0, im_latency});
  }
  return out;
}

void LayerShape::validate() const {
  if (c_in < 1 || c_out < 1) throw ParameterError("LayerShape: channel counts must be positive");
}

std::int64_t layer_params(const LayerShape& shape) {
  shape.validate();
  if (shape.kind == LayerKind::Conv1x1) return shape.c_in * shape.c_out;
  return std::max(shape.c_in, shape.c_out);  // one threshold per channel
}

LayerOps layer_macs(const LayerShape& shape, std::int64_t input_len) {
  shape.validate();
  if (input_len < 1) throw ParameterError("layer_macs: input_len must be positive");
  LayerOps ops;
  if (shape.kind == LayerKind::Conv1x1) {
    const std::int64_t mac = shape.c_in * shape.c_out;
    ops.per_position = {mac, mac, mac};
  } else {
    const auto plan = wht::bwht_plan(static_cast<std::size_t>(std::max(shape.c_in, shape.c_out)));
    std::int64_t adds = 0;
    for (std::size_t n : plan.block_sizes) {
      adds += 2 * static_cast<std::int64_t>(n) * std::countr_zero(n);
    }
    ops.per_position = {0, adds, 0};
  }
  ops.total = {ops.per_position.multiplies * input_len, ops.per_position.additions * input_len,
               ops.per_position.macs * input_len};
  return ops;
}

LayerComparison compare_replacement(std::int64_t c_in, std::int64_t c_out, std::int64_t input_len) {
  LayerComparison c;
  c.conv = {c_in, c_out, LayerKind::Conv1x1};
  const LayerShape bwht{c_in, c_out, LayerKind::BwhtLayer};
  c.conv_params = layer_params(c.conv);
  c.bwht_params = layer_params(bwht);
  c.param_reduction = 1.0 - static_cast<double>(c.bwht_params) / static_cast<double>(c.conv_params);
  c.conv_ops = layer_macs(c.conv, input_len);
  c.bwht_ops = layer_macs(bwht, input_len);
  return c;
}

}  // namespace fdcim::cost
