#pragma once

// Area / energy / latency accounting for ADC styles and BWHT layer replacement.
//
// Table entries are exact decimals held as rationals so that ratios can be
// compared bit-for-bit before rounding.

#include <boost/rational.hpp>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fdcim/errors.hpp"

namespace fdcim::cost {

using Rational = boost::rational<std::int64_t>;

// Parses "5235.20", "105", "1e3" is rejected. Exact.
Rational parse_decimal(std::string_view text);
double to_double(const Rational& r);

enum class Architecture { Sar, Flash, InMemory };
std::string to_string(Architecture a);

struct CostEntry {
  int tech_nm = 0;
  Rational area_um2;
  Rational energy_pj;
};

struct CostTable {
  CostEntry sar{40, parse_decimal("5235.20"), parse_decimal("105")};
  CostEntry flash{40, parse_decimal("10703.36"), parse_decimal("952")};
  CostEntry in_memory{65, parse_decimal("207.8"), parse_decimal("74.23")};
  int reference_bits = 5;

  const CostEntry& get(Architecture a) const;
  CostEntry& get(Architecture a);
  void validate() const;
};

struct Ratio {
  std::string metric;  // "area" or "energy"
  Architecture numerator;
  Architecture denominator;
  Rational exact;
  double value = 0.0;    // exact converted to double
  double rounded = 0.0;  // one decimal place
};

struct RatioReport {
  std::vector<Ratio> ratios;  // area SAR/IM, area Flash/IM, energy SAR/IM, energy Flash/IM
  const Ratio& find(std::string_view metric, Architecture num) const;
};

RatioReport ratio_report(const CostTable& table);

// Network-level parameter reduction reported for MobileNetV2; not recomputed.
inline constexpr double kReportedMobileNetV2ParamReduction = 0.87;

enum class AdcStyle { Sar, Flash, Hybrid, Asymmetric };
std::string to_string(AdcStyle s);

struct LatencyEstimate {
  double cycles = 0.0;
  int comparators = 1;  // comparators firing in parallel in the widest cycle
};

LatencyEstimate latency_model(AdcStyle style, int bits, int flash_bits = 2, double expected_asym_depth = 0.0);

// Energy per asymmetric conversion, scaled from SAR's `bits` comparisons.
Rational asymmetric_energy(const CostTable& table, int bits, const Rational& expected_comparisons);
double asymmetric_energy(const CostTable& table, int bits, double expected_comparisons);

// Interleaved compute/digitize: a left/right pair alternates roles, so a pair
// delivers half of one array's compute rate.
double interleaved_pair_throughput(double array_rate);

// Design-space sweep anchored at the table's reference resolution.
//   Flash area/energy ~ (2^B - 1) comparators,
//   SAR area ~ 2^B unit capacitors, energy ~ B cycles,
//   in-memory area ~ B (precharge control + SAR logic), energy ~ B cycles,
//   hybrid in-memory cycles = 1 + (B - m).
struct DesignPoint {
  int bits = 0;
  Architecture arch = Architecture::Sar;
  double area_um2 = 0.0;
  double energy_pj = 0.0;
  double latency_cycles = 0.0;
};

std::vector<DesignPoint> design_space(const CostTable& table, int min_bits, int max_bits, int flash_bits = 2);

enum class LayerKind { Conv1x1, BwhtLayer };

struct LayerShape {
  std::int64_t c_in = 1;
  std::int64_t c_out = 1;
  LayerKind kind = LayerKind::Conv1x1;

  void validate() const;
};

std::int64_t layer_params(const LayerShape& shape);

struct OpCount {
  std::int64_t multiplies = 0;
  std::int64_t additions = 0;
  std::int64_t macs = 0;  // fused multiply-adds (Conv1x1 only)
};

// Per-position and total (x input_len positions) operation counts. A BWHT
// layer runs forward and inverse fast transforms over the blocked channel
// dimension: 2 * N * log2(N) additions per block of padded length N.
struct LayerOps {
  OpCount per_position;
  OpCount total;
};

LayerOps layer_macs(const LayerShape& shape, std::int64_t input_len);

struct LayerComparison {
  LayerShape conv;
  std::int64_t conv_params = 0;
  std::int64_t bwht_params = 0;
  double param_reduction = 0.0;  // 1 - bwht / conv
  LayerOps conv_ops;
  LayerOps bwht_ops;
};

LayerComparison compare_replacement(std::int64_t c_in, std::int64_t c_out, std::int64_t input_len);

}  // namespace fdcim::cost
