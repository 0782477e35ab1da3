#include <openssl/evp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fdcim/harness.hpp"

namespace fdcim::harness {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"experiment", {"name", "seed", "out"}},
      {"wht", {"max_k", "sizes", "min_block", "trials"}},
      {"crossbar", {"k", "bits", "noise_sigma", "trials", "thresholds", "plane_order"}},
      {"adc",
       {"bits", "n_units", "vdd", "mode", "flash_bits", "n_arrays", "mismatch_sigma", "mismatch_seed",
        "comparator_offset", "sweep_points", "mismatch_trials"}},
      {"asym", {"n_cols", "bits", "algebra"}},
      {"cost",
       {"sar_area", "sar_energy", "sar_tech", "flash_area", "flash_energy", "flash_tech", "inmem_area",
        "inmem_energy", "inmem_tech", "reference_bits", "min_bits", "max_bits", "flash_bits", "layers",
        "input_len"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    const auto piece = trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!piece.empty()) out.push_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_int(const std::string& key, const std::string& text) {
  T v{};
  const auto t = trim(text);
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || p != t.data() + t.size()) {
    throw ConfigError("config key '" + key + "': '" + text + "' is not a valid integer");
  }
  return v;
}

double parse_double(const std::string& key, const std::string& text) {
  const auto t = trim(text);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + text + "' is not a valid number");
  }
}

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

template <typename T, typename F>
std::string join(const std::vector<T>& v, F f) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += f(v[i]);
  }
  return out;
}

void apply(ExperimentConfig& cfg, const std::string& section, const std::string& k, const std::string& v) {
  const std::string key = section + "." + k;
  if (section == "experiment") {
    if (k == "name") cfg.name = trim(v);
    else if (k == "seed") cfg.seed = parse_int<std::uint64_t>(key, v);
    else if (k == "out") cfg.out = trim(v);
  } else if (section == "wht") {
    auto& w = cfg.wht;
    if (k == "max_k") w.max_k = parse_int<int>(key, v);
    else if (k == "min_block") w.min_block = parse_int<std::size_t>(key, v);
    else if (k == "trials") w.trials = parse_int<int>(key, v);
    else if (k == "sizes") {
      w.sizes.clear();
      for (const auto& s : split_list(v)) w.sizes.push_back(parse_int<std::size_t>(key, s));
    }
  } else if (section == "crossbar") {
    auto& x = cfg.crossbar;
    if (k == "k") x.k = parse_int<int>(key, v);
    else if (k == "bits") x.bits = parse_int<int>(key, v);
    else if (k == "noise_sigma") x.noise_sigma = parse_double(key, v);
    else if (k == "trials") x.trials = parse_int<int>(key, v);
    else if (k == "thresholds") {
      x.thresholds.clear();
      for (const auto& s : split_list(v)) x.thresholds.push_back(parse_double(key, s));
    } else if (k == "plane_order") {
      const auto t = trim(v);
      if (t == "msb_first") x.plane_order = crossbar::PlaneOrder::MsbFirst;
      else if (t == "lsb_first") x.plane_order = crossbar::PlaneOrder::LsbFirst;
      else throw ConfigError("config key '" + key + "': expected msb_first or lsb_first");
    }
  } else if (section == "adc") {
    auto& a = cfg.adc;
    if (k == "bits") a.bits = parse_int<int>(key, v);
    else if (k == "n_units") a.n_units = parse_int<std::size_t>(key, v);
    else if (k == "vdd") a.vdd = parse_double(key, v);
    else if (k == "mode") {
      a.mode = trim(v);
      if (a.mode != "sar" && a.mode != "flash" && a.mode != "hybrid" && a.mode != "asymmetric") {
        throw ConfigError("config key '" + key + "': unknown mode '" + a.mode + "'");
      }
    } else if (k == "flash_bits") a.flash_bits = parse_int<int>(key, v);
    else if (k == "n_arrays") a.n_arrays = parse_int<int>(key, v);
    else if (k == "mismatch_sigma") a.mismatch_sigma = parse_double(key, v);
    else if (k == "mismatch_seed") a.mismatch_seed = parse_int<std::uint64_t>(key, v);
    else if (k == "comparator_offset") a.comparator_offset = parse_double(key, v);
    else if (k == "sweep_points") a.sweep_points = parse_int<std::size_t>(key, v);
    else if (k == "mismatch_trials") a.mismatch_trials = parse_int<int>(key, v);
  } else if (section == "asym") {
    auto& s = cfg.asym;
    if (k == "n_cols") s.n_cols = parse_int<std::size_t>(key, v);
    else if (k == "bits") s.bits = parse_int<int>(key, v);
    else if (k == "algebra") {
      s.algebra = trim(v);
      if (s.algebra != "and" && s.algebra != "signed") {
        throw ConfigError("config key '" + key + "': expected and or signed");
      }
    }
  } else if (section == "cost") {
    auto& c = cfg.cost;
    auto dec = [&](const std::string& text) {
      try {
        return cost::parse_decimal(trim(text));
      } catch (const ParameterError& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
      }
    };
    if (k == "sar_area") c.table.sar.area_um2 = dec(v);
    else if (k == "sar_energy") c.table.sar.energy_pj = dec(v);
    else if (k == "sar_tech") c.table.sar.tech_nm = parse_int<int>(key, v);
    else if (k == "flash_area") c.table.flash.area_um2 = dec(v);
    else if (k == "flash_energy") c.table.flash.energy_pj = dec(v);
    else if (k == "flash_tech") c.table.flash.tech_nm = parse_int<int>(key, v);
    else if (k == "inmem_area") c.table.in_memory.area_um2 = dec(v);
    else if (k == "inmem_energy") c.table.in_memory.energy_pj = dec(v);
    else if (k == "inmem_tech") c.table.in_memory.tech_nm = parse_int<int>(key, v);
    else if (k == "reference_bits") c.table.reference_bits = parse_int<int>(key, v);
    else if (k == "min_bits") c.min_bits = parse_int<int>(key, v);
    else if (k == "max_bits") c.max_bits = parse_int<int>(key, v);
    else if (k == "flash_bits") c.flash_bits = parse_int<int>(key, v);
    else if (k == "input_len") c.input_len = parse_int<std::int64_t>(key, v);
    else if (k == "layers") {
      c.layers.clear();
      for (const auto& s : split_list(v)) {
        const auto x = s.find('x');
        if (x == std::string::npos) throw ConfigError("config key '" + key + "': layer '" + s + "' is not CINxCOUT");
        c.layers.emplace_back(parse_int<std::int64_t>(key, s.substr(0, x)),
                              parse_int<std::int64_t>(key, s.substr(x + 1)));
      }
    }
  }
}

std::string rational_text(const cost::Rational& r) {
  // smallest p with den | 10^p; table entries are always finite decimals
  std::int64_t pow10 = 1;
  int places = 0;
  while (pow10 % r.denominator() != 0) {
    if (places == 18) throw ConfigError("cost entry is not a finite decimal");
    pow10 *= 10;
    ++places;
  }
  const std::int64_t scaled = r.numerator() * (pow10 / r.denominator());
  if (places == 0) return std::to_string(scaled);
  const std::string sign = scaled < 0 ? "-" : "";
  std::string digits = std::to_string(scaled < 0 ? -scaled : scaled);
  if (digits.size() <= static_cast<std::size_t>(places)) digits.insert(0, places + 1 - digits.size(), '0');
  return sign + digits.substr(0, digits.size() - places) + "." + digits.substr(digits.size() - places);
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key '" + section + "': keys must live inside a [section]");
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError("config section '" + section + "' is not recognised");
    for (const auto& [key, val] : body) {
      if (!it->second.count(key)) throw ConfigError("config key '" + section + "." + key + "' is not recognised");
      auto v = val.get_value<std::string>();
      v = v.substr(0, v.find_first_of(";#"));  // inline comment
      apply(cfg, section, key, v);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string canonical_text(const ExperimentConfig& cfg) {
  std::string s;
  auto line = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
  s += "[experiment]\n";
  line("name", cfg.name);
  line("seed", std::to_string(cfg.seed));
  if (!cfg.out.empty()) line("out", cfg.out);

  s += "[wht]\n";
  line("max_k", std::to_string(cfg.wht.max_k));
  line("sizes", join(cfg.wht.sizes, [](std::size_t v) { return std::to_string(v); }));
  line("min_block", std::to_string(cfg.wht.min_block));
  line("trials", std::to_string(cfg.wht.trials));

  s += "[crossbar]\n";
  line("k", std::to_string(cfg.crossbar.k));
  line("bits", std::to_string(cfg.crossbar.bits));
  line("noise_sigma", fmt_double(cfg.crossbar.noise_sigma));
  line("trials", std::to_string(cfg.crossbar.trials));
  line("thresholds", join(cfg.crossbar.thresholds, fmt_double));
  line("plane_order", cfg.crossbar.plane_order == crossbar::PlaneOrder::MsbFirst ? "msb_first" : "lsb_first");

  const auto& a = cfg.adc;
  s += "[adc]\n";
  line("bits", std::to_string(a.bits));
  line("n_units", std::to_string(a.n_units));
  line("vdd", fmt_double(a.vdd));
  line("mode", a.mode);
  line("flash_bits", std::to_string(a.flash_bits));
  line("n_arrays", std::to_string(a.n_arrays));
  line("mismatch_sigma", fmt_double(a.mismatch_sigma));
  line("mismatch_seed", std::to_string(a.mismatch_seed));
  line("comparator_offset", fmt_double(a.comparator_offset));
  line("sweep_points", std::to_string(a.sweep_points));
  line("mismatch_trials", std::to_string(a.mismatch_trials));

  s += "[asym]\n";
  line("n_cols", std::to_string(cfg.asym.n_cols));
  line("bits", std::to_string(cfg.asym.bits));
  line("algebra", cfg.asym.algebra);

  const auto& c = cfg.cost;
  s += "[cost]\n";
  line("sar_area", rational_text(c.table.sar.area_um2));
  line("sar_energy", rational_text(c.table.sar.energy_pj));
  line("sar_tech", std::to_string(c.table.sar.tech_nm));
  line("flash_area", rational_text(c.table.flash.area_um2));
  line("flash_energy", rational_text(c.table.flash.energy_pj));
  line("flash_tech", std::to_string(c.table.flash.tech_nm));
  line("inmem_area", rational_text(c.table.in_memory.area_um2));
  line("inmem_energy", rational_text(c.table.in_memory.energy_pj));
  line("inmem_tech", std::to_string(c.table.in_memory.tech_nm));
  line("reference_bits", std::to_string(c.table.reference_bits));
  line("min_bits", std::to_string(c.min_bits));
  line("max_bits", std::to_string(c.max_bits));
  line("flash_bits", std::to_string(c.flash_bits));
  line("layers", join(c.layers, [](const auto& l) { return std::to_string(l.first) + "x" + std::to_string(l.second); }));
  line("input_len", std::to_string(c.input_len));
  return s;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string config_hash(const ExperimentConfig& cfg) { return sha256_hex(canonical_text(cfg)); }

Subcommand parse_subcommand(std::string_view name) {
  if (name == "transform") return Subcommand::Transform;
  if (name == "crossbar") return Subcommand::Crossbar;
  if (name == "adc") return Subcommand::Adc;
  if (name == "asymsearch") return Subcommand::AsymSearch;
  if (name == "cost") return Subcommand::Cost;
  if (name == "dnl-inl") return Subcommand::DnlInl;
  if (name == "all") return Subcommand::All;
  throw ConfigError("unknown subcommand '" + std::string(name) + "'");
}

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Transform: return "transform";
    case Subcommand::Crossbar: return "crossbar";
    case Subcommand::Adc: return "adc";
    case Subcommand::AsymSearch: return "asymsearch";
    case Subcommand::Cost: return "cost";
    case Subcommand::DnlInl: return "dnl-inl";
    case Subcommand::All: return "all";
  }
  return "?";
}

}  // namespace fdcim::harness
