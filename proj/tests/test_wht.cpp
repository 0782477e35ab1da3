#include <doctest.h>

#include <boost/rational.hpp>
#include <random>

#include "fdcim/wht.hpp"
#include "oracles.hpp"

using namespace fdcim;
using namespace fdcim::wht;

namespace {

oracle::Matrix as_matrix(const WalshMatrix& w) {
  oracle::Matrix m(w.size(), std::vector<long long>(w.size()));
  for (std::size_t r = 0; r < w.size(); ++r) {
    for (std::size_t c = 0; c < w.size(); ++c) m[r][c] = w.at(r, c);
  }
  return m;
}

}  // namespace

TEST_CASE("hadamard small orders") {
  CHECK(as_matrix(hadamard(0)) == oracle::Matrix{{1}});
  CHECK(as_matrix(hadamard(1)) == oracle::Matrix{{1, 1}, {1, -1}});
  const auto h2 = hadamard(2);
  std::vector<int> changes;
  for (std::size_t r = 0; r < 4; ++r) changes.push_back(sign_changes(h2.row(r)));
  CHECK(changes == std::vector<int>{0, 3, 1, 2});
}

TEST_CASE("hadamard matches the block recursion") {
  for (int k = 0; k <= 8; ++k) CHECK(as_matrix(hadamard(k)) == oracle::hadamard_recursive(k));
}

TEST_CASE("walsh is hadamard sorted by sign changes") {
  CHECK(as_matrix(walsh(2)) == oracle::Matrix{{1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, -1, 1}, {1, -1, 1, -1}});
  for (int k = 0; k <= 8; ++k) {
    const auto w = walsh(k);
    CHECK(as_matrix(w) == oracle::walsh_by_sorting(k));
    for (std::size_t r = 0; r < w.size(); ++r) CHECK(sign_changes(w.row(r)) == static_cast<int>(r));
  }
}

TEST_CASE("dense copy agrees with at()") {
  const auto w = walsh(4);
  const auto d = w.dense();
  for (std::size_t r = 0; r < 16; ++r) {
    for (std::size_t c = 0; c < 16; ++c) CHECK(d[r * 16 + c] == w.at(r, c));
  }
}

TEST_CASE("orthogonality by explicit product") {
  for (int k = 0; k <= 6; ++k) {
    for (auto o : {Ordering::Natural, Ordering::Sequency}) {
      const auto g = oracle::matmul_transpose(as_matrix(make_matrix(k, o)));
      const long long n = 1LL << k;
      for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) REQUIRE(g[i][j] == (i == j ? n : 0));
      }
    }
  }
}

TEST_CASE("order limits") {
  CHECK_THROWS_AS(hadamard(-1), ParameterError);
  CHECK_THROWS_AS(walsh(kMaxOrderLog2 + 1), CapacityError);
  CHECK_NOTHROW(walsh(kMaxOrderLog2));
  CHECK_THROWS_AS(walsh(13).dense(), CapacityError);
}

TEST_CASE("fwht examples") {
  CHECK(fwht(std::vector<int>{1, 0, 0, 0}, Ordering::Natural) == std::vector<int>{1, 1, 1, 1});
  CHECK(fwht(std::vector<int>{1, 1, 1, 1}, Ordering::Sequency) == std::vector<int>{4, 0, 0, 0});
  CHECK_THROWS_AS(fwht(std::vector<int>{1, 2, 3}), ShapeError);
  CHECK_THROWS_AS(fwht(std::vector<int>{}), ShapeError);
}

TEST_CASE("fwht equals the matrix product") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long long> d(-1000, 1000);
  for (int k = 0; k <= 8; ++k) {
    const auto nat = oracle::hadamard_recursive(k);
    const auto seq = oracle::walsh_by_sorting(k);
    for (int t = 0; t < 20; ++t) {
      std::vector<long long> x(std::size_t{1} << k);
      for (auto& v : x) v = d(rng);
      CHECK(fwht(x, Ordering::Natural) == oracle::matvec(nat, x));
      CHECK(fwht(x, Ordering::Sequency) == oracle::matvec(seq, x));
    }
  }
}

TEST_CASE("applying the transform twice scales by N") {
  std::vector<long long> x{3, -1, 4, 1, -5, 9, 2, -6};
  for (auto o : {Ordering::Natural, Ordering::Sequency}) {
    auto y = fwht(fwht(x, o), o);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == 8 * x[i]);
  }
}

TEST_CASE("sequency map is a permutation") {
  for (int k = 0; k <= 10; ++k) {
    std::vector<bool> seen(std::size_t{1} << k, false);
    for (std::size_t s = 0; s < seen.size(); ++s) seen[sequency_to_natural(s, k)] = true;
    CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
  }
}

TEST_CASE("bwht plans") {
  auto p = bwht_plan(8);
  CHECK(p.block_sizes == std::vector<std::size_t>{8});
  CHECK(p.total_padding() == 0);
  p = bwht_plan(96);
  CHECK(p.block_sizes == std::vector<std::size_t>{64, 32});
  CHECK(p.total_padding() == 0);
  p = bwht_plan(100);
  CHECK(p.block_sizes == std::vector<std::size_t>{64, 32, 4});
  CHECK(p.total_padding() == 0);
  p = bwht_plan(7);
  CHECK(p.block_sizes == std::vector<std::size_t>{4, 4});
  CHECK(p.pad == std::vector<std::size_t>{0, 1});
  p = bwht_plan(2);
  CHECK(p.block_sizes == std::vector<std::size_t>{2});
  p = bwht_plan(3);
  CHECK(p.block_sizes == std::vector<std::size_t>{4});
  CHECK(p.padded_len() == 4);
  CHECK(p.input_offset(0) == 0);
  CHECK_THROWS_AS(bwht_plan(0), ParameterError);
  CHECK_THROWS_AS(bwht_plan(10, 3), ParameterError);
}

TEST_CASE("bwht of e0 touches only block 0") {
  const auto plan = bwht_plan(96);
  std::vector<long long> x(96, 0);
  x[0] = 1;
  const auto y = bwht_apply(plan, x, Direction::Forward);
  REQUIRE(y.size() == 96);
  for (std::size_t i = 0; i < 64; ++i) CHECK(y[i] == 1);
  for (std::size_t i = 64; i < 96; ++i) CHECK(y[i] == 0);
}

TEST_CASE("bwht equals the block-diagonal product") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long long> d(-50, 50);
  for (std::size_t m : {1u, 3u, 5u, 13u, 96u, 100u, 127u}) {
    const auto plan = bwht_plan(m);
    const auto bd = oracle::block_diagonal(plan.block_sizes, plan.pad);
    std::vector<long long> x(m);
    for (auto& v : x) v = d(rng);
    CHECK(bwht_apply(plan, x, Direction::Forward) == oracle::matvec(bd, x));
  }
}

TEST_CASE("bwht round trip is exact in rationals") {
  using Q = boost::rational<long long>;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long long> num(-30, 30), den(1, 9);
  for (std::size_t m = 1; m <= 70; ++m) {
    const auto plan = bwht_plan(m);
    std::vector<Q> x(m);
    for (auto& v : x) v = Q(num(rng), den(rng));
    const auto y = bwht_apply(plan, x, Direction::Forward);
    CHECK(y.size() == plan.padded_len());
    CHECK(bwht_apply(plan, y, Direction::Inverse) == x);
  }
}

TEST_CASE("bwht length checks") {
  const auto plan = bwht_plan(6);
  CHECK_THROWS_AS(bwht_apply(plan, std::vector<double>(5), Direction::Forward), ShapeError);
  CHECK_THROWS_AS(bwht_apply(plan, std::vector<double>(6), Direction::Inverse), ShapeError);
}
