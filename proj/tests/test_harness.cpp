#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fdcim/harness.hpp"

using namespace fdcim;
using namespace fdcim::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("fdcim_test_" + name);
  fs::remove_all(p);
  return p;
}

ExperimentConfig small() {
  auto c = parse_config_text(R"(
[experiment]
name = small
seed = 3
[wht]
max_k = 6
trials = 5
[crossbar]
trials = 50
[adc]
sweep_points = 256
)");
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config_text("[adc]\nbits = 4\nmode = hybrid\n[crossbar]\nthresholds = 1, 2.5\n");
  CHECK(c.adc.bits == 4);
  CHECK(c.adc.mode == "hybrid");
  CHECK(c.crossbar.thresholds == std::vector<double>{1.0, 2.5});
  CHECK(c.seed == 0);
}

TEST_CASE("unknown keys are named") {
  try {
    parse_config_text("[adc]\nbitz = 4\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("adc.bitz") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_text("[nope]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[adc]\nbits = four\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[adc]\nmode = pipeline\n"), ConfigError);
}

TEST_CASE("canonical text round trips") {
  auto c = small();
  c.cost.table.sar.area_um2 = cost::parse_decimal("5235.25");
  c.adc.vdd = 0.9;
  const auto text = canonical_text(c);
  CHECK(canonical_text(parse_config_text(text)) == text);
  CHECK(config_hash(parse_config_text(text)) == config_hash(c));
  auto d = c;
  d.seed = 4;
  CHECK(config_hash(d) != config_hash(c));
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1234567) == "0.123457");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(25.1935) == "25.1935");
  CHECK(format_number(1e-20) == "1e-20");
}

TEST_CASE("csv rows sorted by case id") {
  CsvTable t({"experiment", "case_id", "v"});
  t.add({std::string("x"), std::int64_t{2}, 0.5});
  t.add({std::string("x"), std::int64_t{0}, std::string("a")});
  t.add({std::string("x"), std::int64_t{1}, std::int64_t{7}});
  CHECK(t.render() == "experiment,case_id,v\nx,0,a\nx,1,7\nx,2,0.5\n");
}

TEST_CASE("subcommand names") {
  for (auto s : {Subcommand::Transform, Subcommand::Crossbar, Subcommand::Adc, Subcommand::AsymSearch,
                 Subcommand::Cost, Subcommand::DnlInl, Subcommand::All}) {
    CHECK(parse_subcommand(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_subcommand("plot"), ConfigError);
}

TEST_CASE("output directory precedence") {
  ExperimentConfig c;
  CHECK(resolve_out_dir(c, "flag") == fs::path("flag"));
  c.out = "cfg";
  CHECK(resolve_out_dir(c, "") == fs::path("cfg"));
}

TEST_CASE("runs are byte-identical and manifests name the hash") {
  const auto cfg = small();
  const auto a = scratch("a");
  const auto b = scratch("b");
  const auto ra = run(Subcommand::All, cfg, a);
  run(Subcommand::All, cfg, b);
  REQUIRE(!ra.artifacts.empty());
  for (const auto& art : ra.artifacts) CHECK(slurp(a / art.file) == slurp(b / art.file));
  const auto manifest = slurp(ra.manifest);
  const auto hash = config_hash(cfg);
  std::size_t count = 0;
  for (auto pos = manifest.find(hash); pos != std::string::npos; pos = manifest.find(hash, pos + 1)) ++count;
  CHECK(count == ra.artifacts.size() + 1);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  auto cfg = small();
  CHECK(run_guarded(Subcommand::Cost, cfg, dir) == kExitOk);
  cfg.adc.bits = 12;
  CHECK(run_guarded(Subcommand::Adc, cfg, dir) == kExitConfig);
  cfg = small();
  cfg.adc.mode = "flash";
  CHECK(run_guarded(Subcommand::Adc, cfg, dir) == kExitConfig);  // 4 arrays cannot host 5-bit Flash
  fs::remove_all(dir);
}

TEST_CASE("adc staircase matches the quantizer") {
  const auto dir = scratch("adc");
  run(Subcommand::Adc, small(), dir);
  std::istringstream in(slurp(dir / "adc_transfer.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "experiment,case_id,vin,code,ideal_code,boundary");
  int rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string x; std::getline(ls, x, ',');) f.push_back(x);
    if (f[5] == "0") CHECK(f[3] == f[4]);
    ++rows;
  }
  CHECK(rows == 256);
  fs::remove_all(dir);
}

TEST_CASE("exception classification") {
  CHECK(exit_code_for(InvariantViolation("x")) == kExitInvariant);
  CHECK(exit_code_for(ConfigError("x")) == kExitConfig);
  CHECK(exit_code_for(ParameterError("x")) == kExitConfig);
  CHECK(exit_code_for(ShapeError("x")) == kExitConfig);
  CHECK(exit_code_for(ProgrammingError("x")) == kExitConfig);
  CHECK(exit_code_for(CapacityError("x")) == kExitConfig);
  CHECK(exit_code_for(std::runtime_error("x")) == 1);
}

TEST_CASE("inline comments") {
  const auto c = parse_config_text("; full-line comment\n[adc]\nbits = 4   ; resolution\nmode = flash # all at once\n");
  CHECK(c.adc.bits == 4);
  CHECK(c.adc.mode == "flash");
}
