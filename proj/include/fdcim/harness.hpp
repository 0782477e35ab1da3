#pragma once

// Batch experiment driver shared by the `fdcim` CLI and the test suites.
//
// Configs are flat INI files:
//
//   [experiment]
//   name = baseline
//   seed = 0
//   [adc]
//   bits = 5
//   mode = hybrid
//
// Unknown sections or keys are rejected. Every run writes CSV artifacts plus
// manifest.json recording the canonical config text and its SHA-256.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fdcim/cost.hpp"
#include "fdcim/crossbar.hpp"

namespace fdcim::harness {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInvariant = 3;

inline constexpr const char* kOutDirEnv = "FDCIM_OUT_DIR";

// A computed self-check failed during an experiment.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WhtParams {
  int max_k = 10;
  std::vector<std::size_t> sizes{8, 96, 100};
  std::size_t min_block = wht::kDefaultMinBlock;
  int trials = 100;
};

struct CrossbarParams {
  int k = 3;
  int bits = 4;
  double noise_sigma = 0.0;
  int trials = 1000;
  std::vector<double> thresholds{0.0, 2.0, 4.0, 8.0, 16.0};
  crossbar::PlaneOrder plane_order = crossbar::PlaneOrder::MsbFirst;
};

struct AdcParams {
  int bits = 5;
  std::size_t n_units = 32;
  double vdd = 1.0;
  std::string mode = "sar";  // sar | flash | hybrid | asymmetric
  int flash_bits = 2;
  int n_arrays = 4;
  double mismatch_sigma = 0.0;
  std::uint64_t mismatch_seed = 0;
  double comparator_offset = 0.0;
  std::size_t sweep_points = 1024;
  int mismatch_trials = 10;
};

struct AsymParams {
  std::size_t n_cols = 32;
  int bits = 5;
  std::string algebra = "and";  // and | signed
};

struct CostParams {
  cost::CostTable table;
  int min_bits = 2;
  int max_bits = 8;
  int flash_bits = 2;
  std::vector<std::pair<std::int64_t, std::int64_t>> layers{{64, 128}, {64, 64}};
  std::int64_t input_len = 1;
};

struct ExperimentConfig {
  std::string name = "default";
  std::uint64_t seed = 0;
  std::string out;  // empty: flag, then environment, then ./fdcim_out
  WhtParams wht;
  CrossbarParams crossbar;
  AdcParams adc;
  AsymParams asym;
  CostParams cost;
};

ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
// Every effective value, fixed order, round-trips through parse_config_text.
std::string canonical_text(const ExperimentConfig& cfg);
std::string sha256_hex(std::string_view data);
std::string config_hash(const ExperimentConfig& cfg);

enum class Subcommand { Transform, Crossbar, Adc, AsymSearch, Cost, DnlInl, All };
Subcommand parse_subcommand(std::string_view name);
std::string to_string(Subcommand s);

// -- CSV ---------------------------------------------------------------------

using Cell = std::variant<std::int64_t, double, std::string>;

std::string format_number(double v);  // 6 significant digits

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<Cell> row);
  std::size_t size() const { return rows_.size(); }
  // Rows are ordered by the integer `case_id` column (stable) when present.
  std::string render() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

// -- Runs --------------------------------------------------------------------

struct Artifact {
  std::string file;
  std::size_t rows = 0;
};

struct RunResult {
  std::vector<Artifact> artifacts;
  std::filesystem::path manifest;
};

std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg, const std::string& flag_out);

// Throws ConfigError-family exceptions on invalid parameters and
// InvariantViolation when a self-check fails.
RunResult run(Subcommand cmd, const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// Exit code for an exception escaping run(): 2 for config-family errors, 3 for
// InvariantViolation, 1 otherwise.
int exit_code_for(const std::exception& e);

// Maps exceptions to exit codes and prints a diagnostic to stderr.
int run_guarded(Subcommand cmd, const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace fdcim::harness
