#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>

#include "fdcim/adc.hpp"
#include "fdcim/harness.hpp"

namespace fdcim::harness {

namespace fs = std::filesystem;

namespace {

class Sink {
 public:
  Sink(fs::path dir, std::string hash) : dir_(std::move(dir)), hash_(std::move(hash)) {
    fs::create_directories(dir_);
  }

  void csv(const std::string& name, const CsvTable& table) { text(name, table.render(), table.size()); }

  void text(const std::string& name, const std::string& body, std::size_t rows = 0) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << body;
    entries_.push_back({name, rows});
    digests_.push_back(sha256_hex(body));
  }

  RunResult finish(const ExperimentConfig& cfg, Subcommand cmd) {
    nlohmann::json m;
    m["tool"] = "fdcim";
    m["version"] = FDCIM_VERSION;
    m["experiment"] = cfg.name;
    m["subcommand"] = to_string(cmd);
    m["seed"] = cfg.seed;
    m["config_hash"] = hash_;
    m["config"] = canonical_text(cfg);
    m["artifacts"] = nlohmann::json::array();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      m["artifacts"].push_back(
          {{"file", entries_[i].file}, {"rows", entries_[i].rows}, {"sha256", digests_[i]}, {"config_hash", hash_}});
    }
    const auto path = dir_ / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    out << m.dump(2) << "\n";
    return {entries_, path};
  }

 private:
  fs::path dir_;
  std::string hash_;
  std::vector<Artifact> entries_;
  std::vector<std::string> digests_;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw InvariantViolation(what);
}

void config_check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

// -- transform ------------------------------------------------------------------

void run_transform(const ExperimentConfig& cfg, Sink& sink) {
  const auto& p = cfg.wht;
  config_check(p.max_k >= 0 && p.max_k <= 12, "config key 'wht.max_k': must be in 0..12 for the orthogonality sweep");
  config_check(p.trials >= 1, "config key 'wht.trials': must be >= 1");
  config_check(!p.sizes.empty(), "config key 'wht.sizes': needs at least one length");

  CsvTable orth({"experiment", "case_id", "k", "ordering", "n", "orthogonal", "sequency_ok"});
  std::int64_t id = 0;
  for (int k = 0; k <= p.max_k; ++k) {
    for (auto o : {wht::Ordering::Natural, wht::Ordering::Sequency}) {
      const auto w = wht::make_matrix(k, o);
      const std::size_t n = w.size();
      bool orthogonal = true;
      bool seq_ok = true;
      for (std::size_t r = 0; r < n && orthogonal; ++r) {
        const auto row = w.row(r);
        std::vector<long long> x(row.begin(), row.end());
        const auto y = wht::fwht(x, o);
        for (std::size_t c = 0; c < n; ++c) orthogonal &= y[c] == (c == r ? static_cast<long long>(n) : 0);
        if (o == wht::Ordering::Sequency) seq_ok &= wht::sign_changes(row) == static_cast<int>(r);
      }
      require(orthogonal && seq_ok, fmt::format("transform: k={} {} matrix failed orthogonality/sequency", k,
                                                wht::to_string(o)));
      orth.add({cfg.name, id++, std::int64_t{k}, wht::to_string(o), static_cast<std::int64_t>(n),
                std::int64_t{orthogonal}, o == wht::Ordering::Sequency ? Cell{std::int64_t{seq_ok}} : Cell{"na"}});
    }
  }
  sink.csv("transform_orthogonality.csv", orth);

  using Q = boost::multiprecision::cpp_rational;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::int64_t> num(-100, 100);
  std::uniform_int_distribution<std::int64_t> den(1, 16);
  CsvTable bw({"experiment", "case_id", "m", "blocks", "padding", "padded_len", "trials", "roundtrip_exact"});
  id = 0;
  for (std::size_t m : p.sizes) {
    config_check(m >= 1 && m <= 4096, "config key 'wht.sizes': lengths must be in 1..4096");
    const auto plan = wht::bwht_plan(m, p.min_block);
    int exact = 0;
    for (int t = 0; t < p.trials; ++t) {
      std::vector<Q> x(m);
      for (auto& v : x) v = Q(num(rng)) / Q(den(rng));
      const auto y = wht::bwht_apply(plan, x, wht::Direction::Forward);
      exact += wht::bwht_apply(plan, y, wht::Direction::Inverse) == x;
    }
    require(exact == p.trials, fmt::format("transform: BWHT round trip failed for m={}", m));
    std::string blocks;
    for (std::size_t b = 0; b < plan.block_sizes.size(); ++b) {
      blocks += (b ? "+" : "") + std::to_string(plan.block_sizes[b]);
    }
    bw.add({cfg.name, id++, static_cast<std::int64_t>(m), blocks, static_cast<std::int64_t>(plan.total_padding()),
            static_cast<std::int64_t>(plan.padded_len()), std::int64_t{p.trials}, std::int64_t{exact}});
  }
  sink.csv("transform_bwht.csv", bw);
}

// -- crossbar -------------------------------------------------------------------

std::vector<std::int64_t> zero_rule(const crossbar::F0Result& full, const quant::ThresholdParams& T) {
  std::vector<std::int64_t> out = full.output.values;
  for (std::size_t r = 0; r < out.size(); ++r) {
    if (std::abs(static_cast<double>(out[r])) * full.output.scale <= T.at(r)) out[r] = 0;
  }
  return out;
}

void run_crossbar(const ExperimentConfig& cfg, Sink& sink) {
  const auto& p = cfg.crossbar;
  config_check(p.k >= 0 && p.k <= 10, "config key 'crossbar.k': must be in 0..10");
  config_check(p.bits >= 1 && p.bits <= quant::kMaxBits, "config key 'crossbar.bits': must be in 1..16");
  config_check(p.trials >= 1, "config key 'crossbar.trials': must be >= 1");
  config_check(p.noise_sigma >= 0.0, "config key 'crossbar.noise_sigma': must be >= 0");
  config_check(!p.thresholds.empty(), "config key 'crossbar.thresholds': needs at least one value");
  for (double t : p.thresholds) config_check(t >= 0.0, "config key 'crossbar.thresholds': values must be >= 0");

  crossbar::CrossbarConfig xc;
  xc.mav_noise_sigma = p.noise_sigma;
  xc.rng_seed = cfg.seed;
  xc.plane_order = p.plane_order;
  const auto array = crossbar::program(wht::walsh(p.k), xc);
  const std::size_t n = array.cols();

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::int64_t> val(0, (std::int64_t{1} << p.bits) - 1);
  std::vector<quant::BitplaneTensor> inputs;
  inputs.reserve(static_cast<std::size_t>(p.trials));
  for (int t = 0; t < p.trials; ++t) {
    quant::FixedPointVector v;
    v.total_bits = p.bits;
    v.signedness = quant::Signedness::Unsigned;
    for (std::size_t i = 0; i < n; ++i) v.values.push_back(val(rng));
    inputs.push_back(quant::to_bitplanes(v));
  }

  std::vector<double> sorted = p.thresholds;
  std::sort(sorted.begin(), sorted.end());
  CsvTable et({"experiment", "case_id", "T", "trials", "rows", "sound_mismatches", "heuristic_agreement",
               "mean_planes_full", "mean_planes_sound", "mean_planes_heuristic", "mean_cycles_sound",
               "comparator_ops_sound", "workload_saving_sound"});
  std::vector<std::vector<int>> prev_planes;
  std::int64_t id = 0;
  for (double tv : sorted) {
    const quant::ThresholdParams T(tv);
    long mismatches = 0;
    long agree = 0;
    double planes_full = 0, planes_sound = 0, planes_heur = 0, cycles_sound = 0;
    std::int64_t ops_sound = 0;
    std::vector<std::vector<int>> cur_planes;
    for (std::size_t t = 0; t < inputs.size(); ++t) {
      const auto full = crossbar::f0_transform(array, inputs[t], crossbar::EtMode::Full, T, t);
      const auto sound = crossbar::f0_transform(array, inputs[t], crossbar::EtMode::SoundET, T, t);
      const auto heur = crossbar::f0_transform(array, inputs[t], crossbar::EtMode::HeuristicET, T, t);
      const auto expect = zero_rule(full, T);
      for (std::size_t r = 0; r < n; ++r) {
        mismatches += sound.output.values[r] != expect[r];
        agree += heur.output.values[r] == sound.output.values[r];
        planes_full += full.planes_processed[r];
        planes_sound += sound.planes_processed[r];
        planes_heur += heur.planes_processed[r];
      }
      cycles_sound += static_cast<double>(sound.cycle_count);
      ops_sound += static_cast<std::int64_t>(sound.comparator_ops);
      cur_planes.push_back(sound.planes_processed);
    }
    require(mismatches == 0, fmt::format("crossbar: SoundET differs from thresholded Full output at T={}", tv));
    if (!prev_planes.empty()) {
      for (std::size_t t = 0; t < cur_planes.size(); ++t) {
        for (std::size_t r = 0; r < n; ++r) {
          require(cur_planes[t][r] <= prev_planes[t][r], "crossbar: SoundET workload increased with T");
        }
      }
    }
    prev_planes = std::move(cur_planes);
    const double cells = static_cast<double>(inputs.size() * n);
    et.add({cfg.name, id++, tv, std::int64_t{p.trials}, static_cast<std::int64_t>(n), std::int64_t{mismatches},
            static_cast<double>(agree) / cells, planes_full / cells, planes_sound / cells, planes_heur / cells,
            cycles_sound / static_cast<double>(inputs.size()), ops_sound, 1.0 - planes_sound / planes_full});
  }
  sink.csv("crossbar_et.csv", et);
}

// -- adc --------------------------------------------------------------------------

adc::MavAlgebra algebra_of(const std::string& s) {
  return s == "signed" ? adc::MavAlgebra::SignedProduct : adc::MavAlgebra::AndProduct;
}

struct AdcSetup {
  adc::MemoryImmersedAdc adc;
  std::unique_ptr<adc::SearchTree> tree;  // owned when mode is asymmetric
  bool ideal = false;
};

adc::AdcNetwork make_network(const AdcParams& a, std::size_t n_arrays) {
  adc::AdcNetwork net;
  for (std::size_t i = 1; i < n_arrays; ++i) {
    net.reference_arrays.push_back(a.mismatch_sigma > 0.0
                                       ? adc::random_mismatch_dac(a.n_units, a.mismatch_sigma, a.mismatch_seed + i, a.vdd)
                                       : adc::ideal_dac(a.n_units, a.vdd));
  }
  return net;
}

AdcSetup make_adc(const ExperimentConfig& cfg, const std::string& mode) {
  const auto& a = cfg.adc;
  config_check(a.bits >= 1 && a.bits <= 8, "config key 'adc.bits': must be in 1..8");
  config_check(a.n_units >= 2, "config key 'adc.n_units': must be >= 2");
  config_check(a.vdd > 0.0, "config key 'adc.vdd': must be positive");
  config_check(a.mismatch_sigma >= 0.0, "config key 'adc.mismatch_sigma': must be >= 0");
  config_check(a.n_arrays >= 2, "config key 'adc.n_arrays': must be >= 2");
  config_check(a.sweep_points >= 2, "config key 'adc.sweep_points': must be >= 2");

  AdcSetup s;
  auto& c = s.adc.config;
  c.bits = a.bits;
  c.comparator_offset = a.comparator_offset;
  std::size_t arrays = static_cast<std::size_t>(a.n_arrays);
  if (mode == "sar") {
    c.kind = adc::AdcConfig::Kind::Sar;
  } else if (mode == "hybrid") {
    c.kind = adc::AdcConfig::Kind::Hybrid;
    c.flash_bits = a.flash_bits;
    config_check(a.flash_bits >= 1 && a.flash_bits < a.bits, "config key 'adc.flash_bits': must be in 1..bits-1");
    config_check(arrays >= (std::size_t{1} << a.flash_bits),
                 "config key 'adc.n_arrays': too few arrays for the hybrid Flash stage");
  } else if (mode == "flash") {
    c.kind = adc::AdcConfig::Kind::Flash;
    config_check(arrays >= (std::size_t{1} << a.bits), "config key 'adc.n_arrays': Flash needs 2^bits arrays");
  } else {
    c.kind = adc::AdcConfig::Kind::Asymmetric;
    const auto pmf = adc::mav_pmf(cfg.asym.n_cols, a.bits, algebra_of(cfg.asym.algebra));
    s.tree = std::make_unique<adc::SearchTree>(adc::build_asymmetric_tree(pmf).tree);
    c.tree = s.tree.get();
  }
  s.adc.network = make_network(a, arrays);
  s.ideal = a.mismatch_sigma == 0.0 && a.comparator_offset == 0.0 && a.n_units % (std::size_t{1} << a.bits) == 0;
  return s;
}

std::uint32_t ideal_code(double vin, double vdd, int bits) {
  const double levels = std::ldexp(1.0, bits);
  return static_cast<std::uint32_t>(std::clamp(std::floor(vin / vdd * levels), 0.0, levels - 1.0));
}

bool on_boundary(double vin, double vdd, int bits) {
  const double x = vin / vdd * std::ldexp(1.0, bits);
  return std::abs(x - std::round(x)) < 1e-9;
}

void run_adc(const ExperimentConfig& cfg, Sink& sink) {
  const auto& a = cfg.adc;
  const auto setup = make_adc(cfg, a.mode);
  const auto sweep = adc::linear_sweep(0.0, a.vdd, a.sweep_points);
  const auto curve = adc::transfer_curve(setup.adc, sweep);

  CsvTable tr({"experiment", "case_id", "vin", "code", "ideal_code", "boundary"});
  std::string dat;
  std::int64_t id = 0;
  for (const auto& pt : curve) {
    const auto ideal = ideal_code(pt.vin, a.vdd, a.bits);
    const bool boundary = on_boundary(pt.vin, a.vdd, a.bits);
    if (setup.ideal && !boundary) {
      require(pt.code == ideal, fmt::format("adc: ideal converter code {} != quantizer {} at vin={}", pt.code, ideal,
                                            pt.vin));
    }
    tr.add({cfg.name, id++, pt.vin, std::int64_t{pt.code}, std::int64_t{ideal}, std::int64_t{boundary}});
    dat += format_number(pt.vin) + " " + std::to_string(pt.code) + "\n";
  }
  sink.csv("adc_transfer.csv", tr);
  sink.text("adc_transfer.dat", dat, curve.size());

  CsvTable trace({"experiment", "case_id", "vin", "cycle", "mode", "references", "decisions", "code", "comparisons"});
  id = 0;
  for (double frac : {0.1, 0.35, 0.6, 0.85}) {
    const auto t = setup.adc.convert(frac * a.vdd);
    for (const auto& rec : t.cycles) {
      std::string refs;
      std::string dec;
      for (std::size_t i = 0; i < rec.references.size(); ++i) {
        refs += (i ? ";" : "") + format_number(rec.references[i]);
        dec += rec.decisions[i] ? '1' : '0';
      }
      trace.add({cfg.name, id, t.input_v, std::int64_t{rec.cycle}, adc::to_string(rec.mode), refs, dec,
                 std::int64_t{t.code}, std::int64_t{t.comparisons}});
    }
    ++id;
  }
  sink.csv("adc_trace.csv", trace);

  if (a.flash_bits >= 1 && a.flash_bits < a.bits && a.n_arrays >= (1 << a.flash_bits)) {
    CsvTable tl({"experiment", "case_id", "cycle", "array", "role", "conversion"});
    for (const auto& e : adc::hybrid_timeline(static_cast<std::size_t>(a.n_arrays), a.bits, a.flash_bits)) {
      tl.add({cfg.name, std::int64_t{e.cycle}, std::int64_t{e.cycle}, std::int64_t{e.array}, adc::to_string(e.role),
              std::int64_t{e.conversion}});
    }
    sink.csv("adc_timeline.csv", tl);
  }

  // every mode the network can host, compared against SAR on the same sweep
  const auto sar = make_adc(cfg, "sar");
  CsvTable modes({"experiment", "case_id", "mode", "mean_comparisons", "mean_comparator_ops", "agreement_with_sar"});
  id = 0;
  for (const std::string m : {"sar", "hybrid", "asymmetric", "flash"}) {
    if (m == "hybrid" && !(a.flash_bits >= 1 && a.flash_bits < a.bits && a.n_arrays >= (1 << a.flash_bits))) continue;
    if (m == "flash" && a.n_arrays < (1 << a.bits)) continue;
    const auto s = make_adc(cfg, m);
    double comps = 0, ops = 0;
    long agree = 0;
    for (double v : sweep) {
      const auto t = s.adc.convert(v);
      comps += t.comparisons;
      ops += t.comparator_ops;
      agree += t.code == sar.adc.convert(v).code;
    }
    const double n = static_cast<double>(sweep.size());
    if (setup.ideal) require(agree == static_cast<long>(sweep.size()), "adc: ideal " + m + " disagrees with SAR");
    modes.add({cfg.name, id++, m, comps / n, ops / n, static_cast<double>(agree) / n});
  }
  sink.csv("adc_modes.csv", modes);
}

// -- asymsearch --------------------------------------------------------------------

void run_asym(const ExperimentConfig& cfg, Sink& sink) {
  const auto& p = cfg.asym;
  config_check(p.n_cols >= 1 && p.n_cols <= 4096, "config key 'asym.n_cols': must be in 1..4096");
  config_check(p.bits >= 1 && p.bits <= 8, "config key 'asym.bits': must be in 1..8");
  const auto pmf = adc::mav_pmf(p.n_cols, p.bits, algebra_of(p.algebra));
  const auto opt = adc::build_asymmetric_tree(pmf);
  const auto bal = adc::SearchTree::balanced(p.bits);
  const double e_asym = adc::expected_comparisons(opt.tree, pmf);
  const double e_bal = adc::expected_comparisons(bal, pmf);
  require(std::abs(e_asym - opt.optimal_cost) < 1e-9, "asymsearch: tree cost differs from DP optimum");
  require(e_asym <= e_bal + 1e-12, "asymsearch: optimal tree worse than balanced");

  CsvTable dist({"experiment", "case_id", "code", "probability", "depth_asymmetric", "depth_balanced"});
  const auto da = opt.tree.depths();
  const auto db = bal.depths();
  for (std::size_t c = 0; c < pmf.size(); ++c) {
    dist.add({cfg.name, static_cast<std::int64_t>(c), static_cast<std::int64_t>(c), pmf.p[c], std::int64_t{da[c]},
              std::int64_t{db[c]}});
  }
  sink.csv("asymsearch_pmf.csv", dist);

  CsvTable sum({"experiment", "case_id", "n_cols", "bits", "algebra", "expected_asymmetric", "expected_balanced",
                "reference_value", "energy_asymmetric_pj", "energy_sar_mode_pj"});
  sum.add({cfg.name, std::int64_t{0}, static_cast<std::int64_t>(p.n_cols), std::int64_t{p.bits}, p.algebra, e_asym,
           e_bal, 3.7, cost::asymmetric_energy(cfg.cost.table, p.bits, e_asym),
           cost::to_double(cfg.cost.table.in_memory.energy_pj)});
  sink.csv("asymsearch_summary.csv", sum);
  sink.text("asymsearch_tree.txt", opt.tree.to_parenthesized() + "\n", 1);
}

// -- cost ---------------------------------------------------------------------------

void run_cost(const ExperimentConfig& cfg, Sink& sink) {
  const auto& p = cfg.cost;
  try {
    p.table.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("config section 'cost': ") + e.what());
  }
  config_check(p.min_bits >= 1 && p.max_bits >= p.min_bits && p.max_bits <= 8,
               "config keys 'cost.min_bits'/'cost.max_bits': need 1 <= min <= max <= 8");
  config_check(p.input_len >= 1, "config key 'cost.input_len': must be >= 1");

  const auto rep = cost::ratio_report(p.table);
  CsvTable ratios({"experiment", "case_id", "metric", "numerator", "denominator", "exact", "value", "rounded"});
  std::int64_t id = 0;
  for (const auto& r : rep.ratios) {
    ratios.add({cfg.name, id++, r.metric, cost::to_string(r.numerator), cost::to_string(r.denominator),
                fmt::format("{}/{}", r.exact.numerator(), r.exact.denominator()), r.value, r.rounded});
  }
  sink.csv("cost_ratios.csv", ratios);

  CsvTable ds({"experiment", "case_id", "bits", "architecture", "area_um2", "energy_pj", "latency_cycles"});
  id = 0;
  for (const auto& d : cost::design_space(p.table, p.min_bits, p.max_bits, p.flash_bits)) {
    ds.add({cfg.name, id++, std::int64_t{d.bits}, cost::to_string(d.arch), d.area_um2, d.energy_pj, d.latency_cycles});
  }
  sink.csv("cost_design_space.csv", ds);

  CsvTable lat({"experiment", "case_id", "bits", "style", "cycles", "comparators"});
  id = 0;
  for (int b = p.min_bits; b <= p.max_bits; ++b) {
    const auto pmf = adc::mav_pmf(cfg.asym.n_cols, b, algebra_of(cfg.asym.algebra));
    const double depth = adc::build_asymmetric_tree(pmf).optimal_cost;
    for (auto style : {cost::AdcStyle::Sar, cost::AdcStyle::Flash, cost::AdcStyle::Hybrid, cost::AdcStyle::Asymmetric}) {
      if (style == cost::AdcStyle::Hybrid && !(p.flash_bits >= 1 && p.flash_bits < b)) continue;
      const auto est = cost::latency_model(style, b, p.flash_bits, depth);
      require(style != cost::AdcStyle::Asymmetric || est.cycles <= b + 1e-12, "cost: asymmetric latency above B");
      lat.add({cfg.name, id++, std::int64_t{b}, cost::to_string(style), est.cycles, std::int64_t{est.comparators}});
    }
  }
  sink.csv("cost_latency.csv", lat);

  CsvTable layers({"experiment", "case_id", "c_in", "c_out", "conv_params", "bwht_params", "param_reduction",
                   "conv_macs", "bwht_additions", "bwht_multiplies"});
  id = 0;
  for (const auto& [ci, co] : p.layers) {
    config_check(ci >= 1 && co >= 1, "config key 'cost.layers': channel counts must be positive");
    const auto c = cost::compare_replacement(ci, co, p.input_len);
    layers.add({cfg.name, id++, ci, co, c.conv_params, c.bwht_params, c.param_reduction, c.conv_ops.total.macs,
                c.bwht_ops.total.additions, c.bwht_ops.total.multiplies});
  }
  sink.csv("cost_layers.csv", layers);

  std::string txt;
  txt += fmt::format("{:<12}{:>8}{:>14}{:>14}\n", "Architecture", "Tech", "Area (um^2)", "Energy (pJ)");
  for (auto arch : {cost::Architecture::Sar, cost::Architecture::Flash, cost::Architecture::InMemory}) {
    const auto& e = p.table.get(arch);
    txt += fmt::format("{:<12}{:>6}nm{:>14}{:>14}\n", cost::to_string(arch), e.tech_nm,
                       format_number(cost::to_double(e.area_um2)), format_number(cost::to_double(e.energy_pj)));
  }
  txt += "\n";
  txt += fmt::format("{:<8}{:<20}{:>12}{:>10}\n", "Metric", "Ratio", "Value", "Rounded");
  for (const auto& r : rep.ratios) {
    txt += fmt::format("{:<8}{:<20}{:>12}{:>10.1f}\n", r.metric,
                       cost::to_string(r.numerator) + "/" + cost::to_string(r.denominator), format_number(r.value),
                       r.rounded);
  }
  txt += fmt::format("\nReported network-level parameter reduction (MobileNetV2, not recomputed): {:.0f}%\n",
                     cost::kReportedMobileNetV2ParamReduction * 100.0);
  sink.text("cost_report.txt", txt, rep.ratios.size());
}

// -- dnl-inl ------------------------------------------------------------------------

void run_dnl(const ExperimentConfig& cfg, Sink& sink) {
  const auto& a = cfg.adc;
  config_check(a.mismatch_trials >= 1, "config key 'adc.mismatch_trials': must be >= 1");
  const auto setup = make_adc(cfg, a.mode);
  const auto sweep = adc::linear_sweep(0.0, a.vdd, a.sweep_points);
  const auto curve = adc::refine_transitions(setup.adc, adc::transfer_curve(setup.adc, sweep));
  const auto lin = adc::dnl_inl(curve, a.bits);

  CsvTable t({"experiment", "case_id", "code", "width", "dnl", "inl", "missing"});
  std::string dat;
  double acc = 0.0;
  double max_dnl = 0.0, max_inl = 0.0;
  for (std::size_t k = 0; k < lin.dnl.size(); ++k) {
    acc += lin.dnl[k];
    require(std::abs(lin.inl[k] - acc) <= 1e-12, "dnl-inl: INL is not the running sum of DNL");
    if (setup.ideal) require(std::abs(lin.dnl[k]) <= 1e-12, fmt::format("dnl-inl: ideal DNL nonzero at code {}", k));
    max_dnl = std::max(max_dnl, std::abs(lin.dnl[k]));
    max_inl = std::max(max_inl, std::abs(lin.inl[k]));
    const bool missing = std::find(lin.missing_codes.begin(), lin.missing_codes.end(), k) != lin.missing_codes.end();
    t.add({cfg.name, static_cast<std::int64_t>(k), static_cast<std::int64_t>(k), lin.width[k], lin.dnl[k], lin.inl[k],
           std::int64_t{missing}});
    dat += fmt::format("{} {} {}\n", k, format_number(lin.dnl[k]), format_number(lin.inl[k]));
  }
  sink.csv("dnl_inl.csv", t);
  sink.text("dnl_inl.dat", dat, lin.dnl.size());

  CsvTable s({"experiment", "case_id", "mode", "max_abs_dnl", "max_abs_inl", "missing_codes"});
  s.add({cfg.name, std::int64_t{0}, a.mode, max_dnl, max_inl, static_cast<std::int64_t>(lin.missing_codes.size())});
  sink.csv("dnl_inl_summary.csv", s);

  // shared-array vs reference-only mismatch; a default spread when the config is ideal
  const double sigma = a.mismatch_sigma > 0.0 ? a.mismatch_sigma : 0.1;
  const auto cm = adc::common_mode_experiment(a.n_units, a.bits, sigma, a.mismatch_trials, a.mismatch_seed);
  CsvTable c({"experiment", "case_id", "sigma", "trials", "shared_error", "reference_only_error"});
  c.add({cfg.name, std::int64_t{0}, sigma, std::int64_t{cm.trials}, std::int64_t{cm.shared_error},
         std::int64_t{cm.reference_only_error}});
  sink.csv("dnl_common_mode.csv", c);
}

void dispatch(Subcommand cmd, const ExperimentConfig& cfg, Sink& sink) {
  switch (cmd) {
    case Subcommand::Transform: run_transform(cfg, sink); break;
    case Subcommand::Crossbar: run_crossbar(cfg, sink); break;
    case Subcommand::Adc: run_adc(cfg, sink); break;
    case Subcommand::AsymSearch: run_asym(cfg, sink); break;
    case Subcommand::Cost: run_cost(cfg, sink); break;
    case Subcommand::DnlInl: run_dnl(cfg, sink); break;
    case Subcommand::All:
      for (auto c : {Subcommand::Transform, Subcommand::Crossbar, Subcommand::Adc, Subcommand::AsymSearch,
                     Subcommand::Cost, Subcommand::DnlInl}) {
        dispatch(c, cfg, sink);
      }
      break;
  }
}

}  // namespace

fs::path resolve_out_dir(const ExperimentConfig& cfg, const std::string& flag_out) {
  if (!flag_out.empty()) return flag_out;
  if (!cfg.out.empty()) return cfg.out;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return "fdcim_out";
}

RunResult run(Subcommand cmd, const ExperimentConfig& cfg, const fs::path& out_dir) {
  Sink sink(out_dir, config_hash(cfg));
  dispatch(cmd, cfg, sink);
  return sink.finish(cfg, cmd);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InvariantViolation*>(&e) != nullptr) return kExitInvariant;
  // ConfigError, ParameterError, ShapeError, ProgrammingError, CapacityError
  if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) return kExitConfig;
  if (dynamic_cast<const std::length_error*>(&e) != nullptr) return kExitConfig;
  return 1;
}

int run_guarded(Subcommand cmd, const ExperimentConfig& cfg, const fs::path& out_dir) {
  try {
    run(cmd, cfg, out_dir);
    return kExitOk;
  } catch (const std::exception& e) {
    const int rc = exit_code_for(e);
    const char* kind = rc == kExitInvariant ? "invariant violation" : rc == kExitConfig ? "config error" : "error";
    std::cerr << "fdcim: " << kind << ": " << e.what() << "\n";
    return rc;
  }
}

}  // namespace fdcim::harness
