#include <cmath>
#include <limits>

#include "doctest.h"
#include "geofuse/potential.hpp"
#include "geofuse/random.hpp"

using namespace geofuse;

namespace {

std::vector<double> vec(std::initializer_list<double> v) { return v; }

double g_ref(double z, double gamma) { return z * std::exp(-gamma * z * z + 0.5) * std::sqrt(2 * gamma); }

}  // namespace

TEST_CASE("potential: peak, zero and reference value") {
  for (double gamma : default_gamma_grid()) {
    const double peak = 1.0 / std::sqrt(2.0 * gamma);
    CHECK(std::abs(potential_transform(peak, gamma) - 1.0) <= 1e-12);
    CHECK(std::abs(potential_transform(-peak, gamma) + 1.0) <= 1e-12);
    CHECK(PotentialParams(gamma).peak_location() == doctest::Approx(peak));
  }
  CHECK(potential_transform(0.0, 3.0) == 0.0);
  CHECK(potential_transform(2.0, 0.5) == doctest::Approx(0.44626032029685964).epsilon(1e-14));
}

TEST_CASE("potential: odd, bounded, sign-preserving even in the far tail") {
  const double gamma = std::exp(10.0);
  for (double z : {1e-300, 1e-8, 0.01, 0.5, 3.0, 50.0, 1e3, 1e300}) {
    const double g = potential_transform(z, gamma);
    CHECK(g > 0.0);
    CHECK(g <= 1.0);
    CHECK(potential_transform(-z, gamma) == -g);
  }
  CHECK(potential_transform(std::numeric_limits<double>::infinity(), 1.0) > 0.0);
  CHECK_THROWS_AS(PotentialParams(0.0), std::invalid_argument);
  CHECK_THROWS_AS(PotentialParams(-1.0), std::invalid_argument);
}

TEST_CASE("default gamma grid is e^2 .. e^10") {
  const auto grid = default_gamma_grid();
  REQUIRE(grid.size() == 9);
  for (int i = 0; i < 9; ++i) CHECK(grid[static_cast<std::size_t>(i)] == doctest::Approx(std::exp(2.0 + i)));
}

TEST_CASE("majority voting") {
  CHECK(combine_mv(vec({0.5, -0.2, -0.1})) == -1.0);
  CHECK(combine_mv(vec({0.3, 0.1, -0.9})) == 1.0);
  CHECK(combine_mv(vec({0.0, 0.0, 0.0})) == 3.0);
}

TEST_CASE("model averaging") {
  CHECK(combine_ma(vec({0.5, -0.2, -0.1})) == doctest::Approx(0.2 / 3));
  CHECK(combine_ma(vec({0.7, 0.7, 0.7, 0.7})) == doctest::Approx(0.7));
}

TEST_CASE("transformed averaging") {
  CHECK(combine_ta(vec({1, 1, 1})) == 1.0);
  CHECK(combine_ta(vec({0.8, -0.8})) == 0.0);
  const PotentialParams p(0.5);
  CHECK(fuse(CombinerKind::TA, vec({2, -1, 0.5}), p) == doctest::Approx(0.0579186758686534).epsilon(1e-13));
}

TEST_CASE("trimmed mean") {
  CHECK(combine_tme(vec({0.9, 0.1, -0.9})) == doctest::Approx(0.1));
  CHECK(combine_tme(vec({0.4, 0.4, 0.4, 0.4})) == doctest::Approx(0.4));
  CHECK(combine_tme(vec({1, 0.5, 0.2, -1})) == doctest::Approx(0.35));
  CHECK_THROWS_AS(combine_tme(vec({0.1, 0.2})), std::invalid_argument);
}

TEST_CASE("sign split") {
  auto s = split_outcomes(vec({0.5, -0.2, 0}));
  CHECK(s.g_plus == vec({0.5, 0}));
  CHECK(s.g_minus == vec({-0.2}));
  CHECK(split_outcomes(vec({0.1, 0.2})).g_minus.empty());
  s = split_outcomes(vec({-0.1}));
  CHECK(s.g_plus.empty());
  CHECK(s.g_minus == vec({-0.1}));
}

TEST_CASE("max, min and geometric mean rules") {
  CHECK(combine_max({vec({0.9, 0.2}), vec({-0.8})}) == doctest::Approx(0.1));
  CHECK(combine_max({vec({0.3}), {}}) == 0.3);
  CHECK(combine_max({vec({0.6}), vec({-0.6})}) == 0.0);

  CHECK(combine_min({vec({0.9, 0.2}), vec({-0.8, -0.1})}) == doctest::Approx(0.1));
  CHECK(combine_min({{}, vec({-0.5, -0.2})}) == -0.2);
  CHECK(combine_min({vec({0.7}), vec({-0.3})}) == doctest::Approx(0.4));

  CHECK(combine_gme({vec({0.5}), vec({-0.2, -0.1})}) == doctest::Approx(0.3585786437626905).epsilon(1e-14));
  CHECK(combine_gme({vec({0.0, 0.9}), {}}) == 0.0);
  CHECK(combine_gme({vec({0.35}), vec({-0.35})}) == 0.0);
}

TEST_CASE("geometric mean survives many tiny values") {
  std::vector<double> tiny(7, 1e-300);
  const double v = combine_gme({tiny, {}});
  CHECK(v > 0.0);
  CHECK(v == doctest::Approx(1e-300).epsilon(1e-9));
}

TEST_CASE("unanimity and N = 1") {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const double z = rng.uniform(-3, 3);
    const std::vector<double> same(5, z);
    for (auto rule : kAllCombiners) {
      CAPTURE(to_string(rule));
      const double fused = fuse(rule, same, PotentialParams(std::exp(2.0 + t % 9)));
      CHECK(sign_of(fused) == sign_of(z));
      if (rule != CombinerKind::TME) CHECK(sign_of(fuse(rule, std::vector<double>{z}, PotentialParams(1.0))) == sign_of(z));
    }
  }
}

TEST_CASE("fuse matches a direct formula on random inputs") {
  Rng rng(44);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 3 + rng.below(5);
    const double gamma = std::exp(rng.uniform(-1, 4));
    std::vector<double> z(n);
    for (auto& v : z) v = rng.uniform(-2, 2);
    std::vector<double> g;
    for (double v : z) g.push_back(g_ref(v, gamma));
    double sum = 0, mx = -2, mn = 2;
    for (double v : g) sum += v, mx = std::max(mx, v), mn = std::min(mn, v);
    const PotentialParams p(gamma);
    CHECK(fuse(CombinerKind::TA, z, p) == doctest::Approx(sum / static_cast<double>(n)).epsilon(1e-12));
    CHECK(fuse(CombinerKind::TME, z, p) ==
          doctest::Approx((sum - mx - mn) / static_cast<double>(n - 2)).epsilon(1e-12));
  }
}

TEST_CASE("rules are order invariant") {
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> z(6);
    for (auto& v : z) v = rng.uniform(-1, 1);
    auto w = z;
    rng.shuffle(w);
    for (auto rule : kAllCombiners) {
      CAPTURE(to_string(rule));
      CHECK(fuse(rule, z, PotentialParams(20.0)) == doctest::Approx(fuse(rule, w, PotentialParams(20.0))).epsilon(1e-14));
    }
  }
}

TEST_CASE("binary ensemble") {
  Hyperplane h;
  h.normal = Eigen::VectorXd::Unit(2, 0);
  h.offset = -1.0;
  const BinaryEnsemble e({h, h, h}, PotentialParams(1.0), CombinerKind::TME);
  Eigen::VectorXd x(2);
  x << 1.5, 0.0;
  const auto out = ensemble_predict(e, x);
  CHECK(out.label == 1);
  CHECK(out.score == doctest::Approx(potential_transform(0.5, 1.0)));
  x << 0.2, 3.0;
  CHECK(ensemble_predict(e, x).label == -1);

  CHECK_THROWS_AS(BinaryEnsemble({h, h}, PotentialParams(1.0), CombinerKind::TME), std::invalid_argument);
  Hyperplane other;
  other.normal = Eigen::VectorXd::Unit(3, 0);
  CHECK_THROWS_AS(BinaryEnsemble({h, other}, PotentialParams(1.0), CombinerKind::MV), std::invalid_argument);

  const auto back = ensemble_from_json(nlohmann::json::parse(to_json(e).dump()));
  CHECK(back.rule() == e.rule());
  CHECK(back.params() == e.params());
  CHECK(back.members().size() == 3);
}

TEST_CASE("combiner names") {
  for (auto rule : kAllCombiners) CHECK(parse_combiner(to_string(rule)) == rule);
  CHECK_THROWS(parse_combiner("median"));
}
