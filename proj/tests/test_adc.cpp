#include <doctest.h>

#include <array>
#include <cmath>

#include "fdcim/adc.hpp"
#include "oracles.hpp"

using namespace fdcim;
using namespace fdcim::adc;

namespace {

MemoryImmersedAdc make(int bits, AdcConfig::Kind kind, std::size_t n_arrays = 4, std::size_t n_units = 32) {
  MemoryImmersedAdc a;
  a.config.bits = bits;
  a.config.kind = kind;
  a.network = AdcNetwork::ideal(n_arrays, n_units);
  return a;
}

}  // namespace

TEST_CASE("dac references") {
  const auto d = ideal_dac(32);
  CHECK(dac_reference_first(d, 16) == doctest::Approx(0.5));
  CHECK(dac_reference_first(d, 0) == 0.0);
  CHECK(dac_reference_first(d, 32) == doctest::Approx(1.0));

  auto m = ideal_dac(32);
  m.unit_mismatch.assign(32, 0.0);
  m.unit_mismatch[0] = 0.01;
  std::array<bool, 32> mask{};
  mask[0] = true;
  double charged = 0.0, total = 0.0;
  for (std::size_t i = 0; i < 32; ++i) {
    const double c = 1.0 + m.unit_mismatch[i];
    total += c;
    if (mask[i]) charged += c;
  }
  CHECK(dac_reference(m, mask) == doctest::Approx(charged / total).epsilon(1e-15));

  CapDac empty;
  empty.n_units = 0;
  CHECK_THROWS_AS(empty.validate(), ConfigError);
}

TEST_CASE("sar rails and comparison count") {
  const auto a = make(5, AdcConfig::Kind::Sar);
  CHECK(a.convert(0.0).code == 0);
  CHECK(a.convert(1.0 - 1e-9).code == 31);
  CHECK(a.convert(0.37).comparisons == 5);
  const auto sat = a.convert(1.5);
  CHECK(sat.code == 31);
  CHECK(sat.saturated);
  const auto t = a.convert(0.6);
  CHECK(t.cycles.front().references.front() == doctest::Approx(0.5));
}

TEST_CASE("ideal sar matches the quantizer") {
  for (int b : {3, 4, 5}) {
    const auto a = make(b, AdcConfig::Kind::Sar);
    const double step = std::ldexp(1.0, -b);
    for (double v : linear_sweep(0.0, 1.0, 2001)) {
      const double x = v / step;
      if (std::abs(x - std::round(x)) < 1e-9) continue;
      REQUIRE(a.convert(v).code == oracle::ideal_quantizer(v, 1.0, b));
    }
  }
}

TEST_CASE("flash msbs") {
  std::vector<CapDac> dacs(3, ideal_dac(32));
  CHECK(flash_convert_msbs(0.6, dacs, 2).msbs == 2);
  CHECK(flash_convert_msbs(0.2499, dacs, 2).msbs == 0);
  CHECK(flash_convert_msbs(0.6, dacs, 2).parallel_comparators == 3);
  std::vector<CapDac> two(2, ideal_dac(32));
  CHECK_THROWS_AS(flash_convert_msbs(0.6, two, 2), ConfigError);
}

TEST_CASE("hybrid equals sar per bin") {
  const auto sar = make(5, AdcConfig::Kind::Sar);
  auto hyb = make(5, AdcConfig::Kind::Hybrid);
  hyb.config.flash_bits = 2;
  for (int bin = 0; bin < 32; ++bin) {
    for (double f : {0.1, 0.5, 0.9}) {
      const double v = (bin + f) / 32.0;
      const auto h = hyb.convert(v);
      CHECK(h.code == sar.convert(v).code);
      CHECK(h.code == static_cast<std::uint32_t>(bin));
      CHECK(h.comparisons == 4);
    }
  }
}

TEST_CASE("full flash") {
  auto f = make(3, AdcConfig::Kind::Flash, 8);
  const auto t = f.convert(0.55);
  CHECK(t.code == 4);
  CHECK(t.comparisons == 1);
  CHECK(t.comparator_ops == 7);
}

TEST_CASE("hybrid timeline") {
  const auto tl = hybrid_timeline(4, 5, 2);
  int cycles = 0;
  for (const auto& e : tl) cycles = std::max(cycles, e.cycle + 1);
  CHECK(cycles == 4);
  int flash_refs = 0;
  for (const auto& e : tl) {
    if (e.cycle == 0 && e.role == ArrayRole::FlashReference) ++flash_refs;
    if (e.cycle > 0 && e.array == 2) CHECK(e.role == ArrayRole::SarReference);
    if (e.cycle > 0 && e.array >= 3) CHECK(e.conversion != 0);
  }
  CHECK(flash_refs == 3);
}

TEST_CASE("mav pmf matches the closed-form binomial") {
  const auto p1 = mav_pmf(1, 5);
  int nonzero = 0;
  for (double v : p1.p) nonzero += v > 0.0;
  CHECK(nonzero == 2);

  for (std::size_t n : {8u, 16u, 32u, 64u}) {
    const auto pmf = mav_pmf(n, 5);
    double s = 0.0;
    for (double v : pmf.p) s += v;
    CHECK(std::abs(s - 1.0) <= 1e-12);

    const auto bin = oracle::binomial_pmf(static_cast<unsigned>(n), 0.25);
    std::vector<double> expect(32, 0.0);
    for (std::size_t k = 0; k <= n; ++k) expect[std::min<std::size_t>(k * 32 / n, 31)] += bin[k];
    for (std::size_t c = 0; c < 32; ++c) CHECK(pmf.p[c] == doctest::Approx(expect[c]).epsilon(1e-12));
  }

  const auto pmf = mav_pmf(32, 5);
  const auto mode = std::max_element(pmf.p.begin(), pmf.p.end()) - pmf.p.begin();
  CHECK(mode < 16);
}

TEST_CASE("signed algebra is symmetric") {
  const auto d = column_sum_distribution(4, MavAlgebra::SignedProduct);
  REQUIRE(d.size() == 9);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i] == doctest::Approx(d[d.size() - 1 - i]));
}

TEST_CASE("transfer curve and linearity") {
  const auto a = make(5, AdcConfig::Kind::Sar);
  const auto curve = refine_transitions(a, transfer_curve(a, linear_sweep(0.0, 1.0, 1024)));
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].code >= curve[i - 1].code);
  const auto lin = dnl_inl(curve, 5);
  for (std::size_t k = 0; k < 32; ++k) {
    CHECK(std::abs(lin.dnl[k]) <= 1e-12);
    CHECK(std::abs(lin.inl[k]) <= 1e-12);
  }
  CHECK(lin.missing_codes.empty());

  auto m = a;
  m.network.reference_arrays[0].unit_mismatch.assign(32, 0.0);
  m.network.reference_arrays[0].unit_mismatch[15] = 0.05;
  const auto lm = dnl_inl(refine_transitions(m, transfer_curve(m, linear_sweep(0.0, 1.0, 1024))), 5);
  double worst = 0.0;
  for (double d : lm.dnl) worst = std::max(worst, std::abs(d));
  CHECK(worst > 1e-3);
}

TEST_CASE("dnl of a widened step") {
  // 3-bit staircase over [0, 8] with code 2 spanning 1.25 units
  std::vector<CurvePoint> c;
  const std::vector<double> edges{0, 1, 2, 3.25, 4.25, 5.25, 6.25, 7.25, 8};
  for (std::uint32_t k = 0; k < 8; ++k) c.push_back({edges[k], k});
  c.push_back({8.0, 7});
  const auto lin = dnl_inl(c, 3);
  CHECK(lin.dnl[2] == doctest::Approx(0.25));
  CHECK(lin.inl[2] == doctest::Approx(0.25));
  CHECK(lin.dnl[7] == doctest::Approx(-0.25));
  double acc = 0.0;
  for (std::size_t k = 0; k < 8; ++k) {
    acc += lin.dnl[k];
    CHECK(std::abs(lin.inl[k] - acc) <= 1e-12);
  }
}

TEST_CASE("inl is the running sum of dnl under random mismatch") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto a = make(5, AdcConfig::Kind::Sar);
    a.network.reference_arrays[0] = random_mismatch_dac(32, 0.05, seed);
    const auto lin = dnl_inl(transfer_curve(a, linear_sweep(0.0, 1.0, 4096)), 5);
    double acc = 0.0;
    for (std::size_t k = 0; k < lin.dnl.size(); ++k) {
      acc += lin.dnl[k];
      CHECK(std::abs(lin.inl[k] - acc) <= 1e-12);
    }
  }
}

TEST_CASE("shared-array mismatch is common mode") {
  const auto r = common_mode_experiment(32, 5, 0.1, 20, 1);
  CHECK(r.shared_error < r.reference_only_error);
  CHECK(r.trials == 20);
}

TEST_CASE("mismatched dac is reproducible") {
  const auto a = random_mismatch_dac(32, 0.1, 99);
  const auto b = random_mismatch_dac(32, 0.1, 99);
  CHECK(a.unit_mismatch == b.unit_mismatch);
  for (double m : a.unit_mismatch) CHECK(m > -1.0);
}
