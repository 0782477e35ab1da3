#pragma once

// Memory-immersed collaborative digitization.
//
// A neighbouring array's column lines act as the unit capacitors of a charge-
// sharing DAC. Precharging u of n lines and shorting them yields
// vdd * C(precharged) / C(all). SAR resolves one bit per comparison against
// such references; Flash compares against 2^m - 1 references held by separate
// arrays in one cycle; the hybrid mode does Flash for the MSBs then SAR.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fdcim/errors.hpp"

namespace fdcim::adc {

struct CapDac {
  std::size_t n_units = 32;
  std::vector<double> unit_mismatch;  // fractional error per unit; empty = ideal
  double vdd = 1.0;

  void validate() const;
  double capacitance(std::size_t unit) const {
    return 1.0 + (unit_mismatch.empty() ? 0.0 : unit_mismatch[unit]);
  }
};

CapDac ideal_dac(std::size_t n_units = 32, double vdd = 1.0);
// Units with i.i.d. N(0, sigma) fractional mismatch, clamped above -0.9.
CapDac random_mismatch_dac(std::size_t n_units, double sigma, std::uint64_t seed, double vdd = 1.0);

// Charge-sharing reference with the given units precharged.
double dac_reference(const CapDac& dac, std::span<const bool> precharged);
// Reference with units [0, count) precharged.
double dac_reference_first(const CapDac& dac, std::size_t count);
// Reference for code threshold `code` / 2^bits: round(fraction * n_units) units.
double code_reference(const CapDac& dac, std::uint32_t code, int bits);

enum class ModeTag { Sar, Flash, Asymmetric };
std::string to_string(ModeTag m);

struct CycleRecord {
  int cycle = 0;
  ModeTag mode = ModeTag::Sar;
  std::vector<double> references;  // one per comparator fired this cycle
  std::vector<bool> decisions;     // vin + offset > reference
  int dac_array = 1;               // index of the first reference array used (A2 = 1)
};

struct AdcConversionTrace {
  double input_v = 0.0;
  std::uint32_t code = 0;
  std::vector<CycleRecord> cycles;
  int comparisons = 0;  // == cycles.size()
  int comparator_ops = 0;
  bool saturated = false;
};

class SearchTree;

struct AdcConfig {
  int bits = 5;
  double comparator_offset = 0.0;
  enum class Kind { Sar, Flash, Hybrid, Asymmetric } kind = Kind::Sar;
  int flash_bits = 2;
  const SearchTree* tree = nullptr;

  void validate() const;
};

AdcConversionTrace sar_convert(double vin, const CapDac& dac, const AdcConfig& config);

struct FlashResult {
  std::uint32_t msbs = 0;
  CycleRecord record;
  int parallel_comparators = 0;
};

// dacs.size() must equal 2^m - 1; dac k-1 holds reference k / 2^m.
FlashResult flash_convert_msbs(double vin, std::span<const CapDac> dacs, int m, double comparator_offset = 0.0);

// Array A1 holds the MAV; A2.. provide references. Flash needs 2^m - 1 of
// them, SAR couples A1 with its nearest neighbour A2.
struct AdcNetwork {
  std::vector<CapDac> reference_arrays;

  static AdcNetwork ideal(std::size_t n_arrays, std::size_t n_units = 32, double vdd = 1.0);
  std::size_t size() const { return reference_arrays.size() + 1; }
};

AdcConversionTrace hybrid_convert(double vin, const AdcNetwork& network, const AdcConfig& config);

// Full-Flash conversion: one cycle, 2^B - 1 comparators.
AdcConversionTrace flash_convert(double vin, const AdcNetwork& network, const AdcConfig& config);

enum class ArrayRole { MavHold, FlashReference, SarReference, Free };
std::string to_string(ArrayRole r);

struct TimelineEntry {
  int cycle = 0;
  int array = 0;       // 1-based, A1 = 1
  ArrayRole role = ArrayRole::Free;
  int conversion = -1;  // conversion served; 0 is the primary, -1 when free
};

// Per-array roles over one hybrid conversion in an n-array network. After the
// Flash cycle A1/A2 finish the primary conversion in SAR mode while the other
// arrays pair off (A3+A4, A5+A6, ...) to run SAR conversions of their own.
std::vector<TimelineEntry> hybrid_timeline(std::size_t n_arrays, int bits, int flash_bits);

// -- MAV statistics -------------------------------------------------------

enum class MavAlgebra {
  AndProduct,    // input bit AND weight bit: Bernoulli(1/4) per column, MAV in [0, 1]
  SignedProduct  // input bit times +/-1 weight: {-1, 0, +1} per column, MAV in [-1, 1]
};

struct MavPmf {
  std::vector<double> p;  // over 2^B codes
  int bits = 0;

  void validate() const;
  std::size_t size() const { return p.size(); }
};

// Exact column-sum distribution binned into 2^B codes across the MAV range.
MavPmf mav_pmf(std::size_t n_cols, int bits, MavAlgebra algebra = MavAlgebra::AndProduct);
// Exact distribution of the column sum itself (index = sum - min_sum).
std::vector<double> column_sum_distribution(std::size_t n_cols, MavAlgebra algebra);

MavPmf uniform_pmf(int bits);
MavPmf point_pmf(int bits, std::uint32_t code);

// -- Asymmetric (order-preserving) search ---------------------------------

class SearchTree {
 public:
  struct Node {
    std::uint32_t lo = 0, hi = 0;  // code interval covered
    std::uint32_t threshold = 0;   // internal: go right iff code >= threshold
    int left = -1, right = -1;
    bool is_leaf() const { return left < 0; }
  };

  int bits() const { return bits_; }
  std::size_t num_codes() const { return std::size_t{1} << bits_; }
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  int root() const { return root_; }
  std::size_t num_nodes() const { return nodes_.size(); }

  int depth(std::uint32_t code) const;
  std::vector<int> depths() const;
  // e.g. "((0 <1> 1) <2> (2 <3> 3))"
  std::string to_parenthesized() const;

  static SearchTree balanced(int bits);
  // Tree from a split table: split[lo][hi] gives the threshold for [lo, hi].
  static SearchTree from_splits(int bits, const std::vector<std::vector<std::uint32_t>>& split);

 private:
  int build(std::uint32_t lo, std::uint32_t hi, const std::vector<std::vector<std::uint32_t>>& split);

  int bits_ = 0;
  int root_ = -1;
  std::vector<Node> nodes_;
};

struct AsymmetricTreeResult {
  SearchTree tree;
  double optimal_cost = 0.0;  // DP optimum, expected comparisons
};

// Optimal alphabetic tree by interval DP (minimum expected comparisons).
AsymmetricTreeResult build_asymmetric_tree(const MavPmf& pmf);

double expected_comparisons(const SearchTree& tree, const MavPmf& pmf);

AdcConversionTrace asymmetric_convert(double vin, const CapDac& dac, const AdcConfig& config);

// -- Static characterisation ------------------------------------------------

// Bundles the hardware for one converter so any mode can be swept.
struct MemoryImmersedAdc {
  AdcConfig config;
  AdcNetwork network;  // reference_arrays[0] is the SAR / asymmetric DAC

  AdcConversionTrace convert(double vin) const;
  double vdd() const { return network.reference_arrays.front().vdd; }
};

struct CurvePoint {
  double vin = 0.0;
  std::uint32_t code = 0;
};

std::vector<CurvePoint> transfer_curve(const MemoryImmersedAdc& adc, std::span<const double> sweep);
// n points evenly spaced over [0, vdd] inclusive.
std::vector<double> linear_sweep(double lo, double hi, std::size_t n);
// Inserts bisection-refined points around every code change so transitions
// are located to within `tol` volts.
std::vector<CurvePoint> refine_transitions(const MemoryImmersedAdc& adc, std::vector<CurvePoint> curve,
                                           double tol = 0.0);

struct Linearity {
  std::vector<double> width;  // measured width per code (volts)
  std::vector<double> dnl;
  std::vector<double> inl;
  std::vector<std::uint32_t> missing_codes;
  double ideal_width = 0.0;
};

// Transition T_k = smallest swept vin with code >= k; code widths use the
// sweep end points as outer edges; ideal width = sweep span / 2^B.
Linearity dnl_inl(std::span<const CurvePoint> curve, int bits);

// -- Common-mode mismatch experiment -----------------------------------------

struct CommonModeResult {
  long shared_error = 0;          // sum |code - ideal| with MAV and DAC on the same array
  long reference_only_error = 0;  // sum |code - ideal| with only the DAC perturbed
  int trials = 0;
};

// For each trial draws a mismatch vector, digitizes every column-sum level
// s = 0..n_units-1 (MAV = s / n_units ideal) and accumulates code error.
CommonModeResult common_mode_experiment(std::size_t n_units, int bits, double sigma, int trials, std::uint64_t seed);

}  // namespace fdcim::adc
