#include <chrono>
#include <cmath>
#include <set>

#include "doctest.h"
#include "geofuse/random.hpp"
#include "geofuse/stats.hpp"

using namespace geofuse;
using namespace geofuse::stats;

namespace {

ScoreTable table(const Eigen::MatrixXd& v, Orientation o = Orientation::LowerBetter) {
  ScoreTable t;
  t.values = v;
  t.orientation = o;
  for (Eigen::Index k = 0; k < v.cols(); ++k) t.algorithms.push_back("A" + std::to_string(k));
  for (Eigen::Index d = 0; d < v.rows(); ++d) t.datasets.push_back("D" + std::to_string(d));
  return t;
}

// Two-sided p from all 2^n sign assignments of the given ranks.
double enumeration_p(const std::vector<double>& ranks, double w_plus) {
  const std::size_t n = ranks.size();
  double total = 0.0;
  for (double r : ranks) total += r;
  const double mean = total / 2.0;
  const double obs_dev = std::abs(w_plus - mean);
  std::size_t hits = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) w += ranks[i];
    if (std::abs(w - mean) >= obs_dev - 1e-9) ++hits;
  }
  return std::min(1.0, static_cast<double>(hits) / std::ldexp(1.0, static_cast<int>(n)));
}

// Rejections for K = 3 worked out by hand: the exhaustive sets are the whole
// family and the three singletons.
std::vector<bool> bh3_oracle(const std::vector<double>& p, double alpha) {
  const double mn = std::min({p[0], p[1], p[2]});
  std::vector<bool> out;
  for (double v : p) out.push_back(v <= alpha && mn <= alpha / 3.0);
  return out;
}

// Exhaustive sets as the transitively closed subsets of all pairs.
std::set<std::vector<std::size_t>> closed_subsets(std::size_t K) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i + 1; j < K; ++j) pairs.emplace_back(i, j);
  const std::size_t m = pairs.size();
  std::set<std::vector<std::size_t>> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
    std::vector<std::vector<bool>> eq(K, std::vector<bool>(K, false));
    for (std::size_t h = 0; h < m; ++h)
      if (mask >> h & 1) eq[pairs[h].first][pairs[h].second] = eq[pairs[h].second][pairs[h].first] = true;
    bool closed = true;
    for (std::size_t a = 0; a < K && closed; ++a)
      for (std::size_t b = 0; b < K && closed; ++b)
        for (std::size_t c = 0; c < K && closed; ++c)
          if (a != c && eq[a][b] && eq[b][c] && !eq[a][c]) closed = false;
    if (!closed) continue;
    std::vector<std::size_t> set;
    for (std::size_t h = 0; h < m; ++h)
      if (mask >> h & 1) set.push_back(h);
    out.insert(set);
  }
  return out;
}

}  // namespace

TEST_CASE("ranks") {
  CHECK(rank_row(std::vector<double>{0.1, 0.2, 0.3}, Orientation::LowerBetter) == std::vector<double>{1, 2, 3});
  CHECK(rank_row(std::vector<double>{0.1, 0.2, 0.2}, Orientation::LowerBetter) == std::vector<double>{1, 2.5, 2.5});
  CHECK(rank_row(std::vector<double>{0.4, 0.4, 0.4, 0.4}, Orientation::LowerBetter) == std::vector<double>{2.5, 2.5, 2.5, 2.5});
  CHECK(rank_row(std::vector<double>{0.1, 0.2, 0.3}, Orientation::HigherBetter) == std::vector<double>{3, 2, 1});
}

TEST_CASE("rank rows sum to K(K+1)/2") {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t K = 2 + rng.below(8);
    std::vector<double> row(K);
    for (auto& v : row) v = static_cast<double>(rng.below(4)) / 4.0;
    double s = 0;
    for (double r : rank_row(row, Orientation::HigherBetter)) s += r;
    CHECK(s == static_cast<double>(K * (K + 1)) / 2.0);
  }
}

TEST_CASE("friedman: consistent ordering") {
  Eigen::MatrixXd v(4, 3);
  v << 0.1, 0.2, 0.3, 0.15, 0.25, 0.35, 0.0, 0.5, 0.9, 0.3, 0.31, 0.32;
  const auto t = table(v);
  CHECK(average_ranks(t) == std::vector<double>{1, 2, 3});
  const auto r = friedman_test(t);
  CHECK(std::abs(r.statistic - 8.0) <= 1e-9);
  CHECK(std::abs(r.p_value - 0.018315638888734182) <= 1e-12);
  CHECK(r.df1 == 2.0);
}

TEST_CASE("friedman: ties use the corrected statistic") {
  Eigen::MatrixXd v(5, 4);
  v << 0.1, 0.2, 0.2, 0.4,  //
      0.3, 0.3, 0.1, 0.5,  //
      0.2, 0.1, 0.3, 0.3,  //
      0.15, 0.25, 0.35, 0.05,  //
      0.4, 0.2, 0.2, 0.2;
  const auto r = friedman_test(table(v));
  CHECK(r.statistic == doctest::Approx(1.0465116279069668).epsilon(1e-12));
  CHECK(r.p_value == doctest::Approx(0.7899994873040288).epsilon(1e-10));
  const auto id = friedman_test(table(v), FriedmanVariant::ImanDavenport);
  CHECK(id.statistic == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(id.p_value == doctest::Approx(0.8248035702257605).epsilon(1e-10));
  CHECK(id.df2 == 12.0);
}

TEST_CASE("friedman: identical columns") {
  const auto r = friedman_test(table(Eigen::MatrixXd::Constant(6, 4, 0.3)));
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK_THROWS_AS(friedman_test(table(Eigen::MatrixXd::Zero(1, 3))), std::invalid_argument);
}

TEST_CASE("friedman: invariant under monotone transforms") {
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    Eigen::MatrixXd v(8, 5);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = static_cast<double>(rng.below(6)) / 10.0 + 0.05;
    Eigen::MatrixXd w = v.array().log() * 3.0 + 1.0;
    const auto a = table(v), b = table(w);
    CHECK(average_ranks(a) == average_ranks(b));
    CHECK(friedman_test(a).statistic == doctest::Approx(friedman_test(b).statistic).epsilon(1e-12));
  }
}

TEST_CASE("wilcoxon: small fixtures") {
  const std::vector<double> a{1, 2, 3, 4, 5}, z(5, 0.0);
  const auto r = wilcoxon_signed_rank(a, z);
  CHECK(r.w_minus == 0.0);
  CHECK(r.exact);
  CHECK(r.p_value == 0.0625);
  CHECK(wilcoxon_signed_rank(z, a).p_value == r.p_value);
  CHECK(wilcoxon_signed_rank(a, a).p_value == 1.0);
}

TEST_CASE("wilcoxon: exact p equals sign enumeration for n <= 12") {
  Rng rng(31);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + rng.below(12);
    std::vector<double> a(n), b(n, 0.0);
    // Coarse values force ties in magnitudes.
    for (auto& v : a) v = static_cast<double>(static_cast<int>(rng.below(9)) - 4) / 4.0;
    const auto r = wilcoxon_signed_rank(a, b);
    std::vector<double> mags, diffs;
    for (double v : a)
      if (v != 0.0) mags.push_back(std::abs(v)), diffs.push_back(v);
    if (mags.empty()) {
      CHECK(r.p_value == 1.0);
      continue;
    }
    const auto ranks = rank_row(mags, Orientation::LowerBetter);
    double wp = 0;
    for (std::size_t i = 0; i < diffs.size(); ++i)
      if (diffs[i] > 0) wp += ranks[i];
    CHECK(r.w_plus == wp);
    CHECK(r.p_value == doctest::Approx(enumeration_p(ranks, wp)).epsilon(1e-14));
  }
}

TEST_CASE("wilcoxon: normal approximation above the exact limit") {
  const std::vector<double> a{2.5, -2.1, 0.9, -0.1, 0.0, 0.3, -1.5, 0.3, -0.4, 3.8, 0.7, 0.1, 0.2, -0.2,
                              -0.6, 0.1, 1.0, 0.3, 1.5, 0.3, 0.5, 2.0, 1.0, -0.0, 0.3, 1.0, 2.4, 0.2,
                              0.3, 1.5, -0.4, 0.2, 1.4, 1.1, 0.6, 1.2, -2.3, 1.5, -0.5, -1.2};
  const std::vector<double> b(a.size(), 0.0);
  const auto r = wilcoxon_signed_rank(a, b);
  CHECK_FALSE(r.exact);
  CHECK(r.n == 38);
  CHECK(r.statistic == 197.5);
  CHECK(r.p_value == doctest::Approx(0.012285057007970623).epsilon(1e-10));
}

TEST_CASE("exhaustive sets match transitively closed subsets") {
  const std::size_t bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140, 21147};
  for (std::size_t K = 2; K <= 9; ++K) CHECK(pairwise_exhaustive_sets(K).size() == bell[K] - 1);
  for (std::size_t K = 2; K <= 5; ++K) {
    std::set<std::vector<std::size_t>> got;
    for (auto s : pairwise_exhaustive_sets(K)) {
      std::sort(s.begin(), s.end());
      got.insert(s);
    }
    CHECK(got == closed_subsets(K));
  }
}

TEST_CASE("bergmann-hommel: K = 3 against the hand oracle") {
  const std::vector<double> fixed{0.01, 0.02, 0.30};
  CHECK(bergmann_hommel_pairwise(fixed, 3, 0.05).rejected == bh3_oracle(fixed, 0.05));
  Rng rng(5);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> p(3);
    for (auto& v : p) v = std::pow(rng.uniform(), 3.0);
    const auto r = bergmann_hommel_pairwise(p, 3, 0.05);
    CHECK(r.rejected == bh3_oracle(p, 0.05));
    const double mn = std::min({p[0], p[1], p[2]});
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(r.adjusted[i] == doctest::Approx(std::min(1.0, std::max(p[i], 3 * mn))).epsilon(1e-14));
  }
}

TEST_CASE("bergmann-hommel: brute force over closed subsets for K = 4, 5") {
  Rng rng(6);
  for (std::size_t K : {4, 5}) {
    const auto sets = closed_subsets(K);
    const std::size_t m = K * (K - 1) / 2;
    for (int t = 0; t < 100; ++t) {
      std::vector<double> p(m);
      for (auto& v : p) v = std::pow(rng.uniform(), 4.0);
      std::vector<bool> expect(m, true);
      for (const auto& E : sets) {
        double mn = 1.0;
        for (auto h : E) mn = std::min(mn, p[h]);
        if (mn > 0.05 / static_cast<double>(E.size()))
          for (auto h : E) expect[h] = false;
      }
      CHECK(bergmann_hommel_pairwise(p, K, 0.05).rejected == expect);
    }
  }
}

TEST_CASE("bergmann-hommel: edge cases and Bonferroni superset") {
  CHECK(bergmann_hommel_pairwise(std::vector<double>{0.04}, 2, 0.05).rejected == std::vector<bool>{true});
  CHECK(bergmann_hommel_pairwise(std::vector<double>{0.06}, 2, 0.05).rejected == std::vector<bool>{false});
  const auto zeros = bergmann_hommel_pairwise(std::vector<double>(21, 0.0), 7, 0.05);
  for (bool r : zeros.rejected) CHECK(r);
  CHECK_THROWS_AS(bergmann_hommel_pairwise(std::vector<double>(45, 0.1), 10, 0.05), std::invalid_argument);

  Rng rng(12);
  for (std::size_t K : {3, 4}) {
    const std::size_t m = K * (K - 1) / 2;
    for (int t = 0; t < 300; ++t) {
      std::vector<double> p(m);
      for (auto& v : p) v = std::pow(rng.uniform(), 5.0);
      const auto r = bergmann_hommel_pairwise(p, K, 0.05);
      for (std::size_t h = 0; h < m; ++h) {
        if (p[h] <= 0.05 / static_cast<double>(m)) CHECK(r.rejected[h]);
        CHECK(r.rejected[h] == (r.adjusted[h] <= 0.05));
      }
    }
  }
}

TEST_CASE("bergmann-hommel: K = 7 is quick") {
  Rng rng(2);
  std::vector<double> p(21);
  for (auto& v : p) v = rng.uniform() * 0.1;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = bergmann_hommel_pairwise(p, 7, 0.05);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(r.adjusted.size() == 21);
  CHECK(secs < 10.0);
}

TEST_CASE("independent family equals Holm") {
  const std::vector<double> p{0.01, 0.04, 0.03, 0.2};
  const auto h = holm_adjust(p, 0.05);
  // Step-down by hand: 4*0.01, 3*0.03, max(2*0.04, .), 0.2
  CHECK(h.adjusted[0] == doctest::Approx(0.04));
  CHECK(h.adjusted[2] == doctest::Approx(0.09));
  CHECK(h.adjusted[1] == doctest::Approx(0.09));
  CHECK(h.adjusted[3] == doctest::Approx(0.2));
  CHECK(h.rejected == std::vector<bool>{true, false, false, false});

  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> q(1 + rng.below(7));
    for (auto& v : q) v = std::pow(rng.uniform(), 3.0);
    const auto a = bergmann_hommel_independent(q, 0.05);
    const auto b = holm_adjust(q, 0.05);
    CHECK(a.rejected == b.rejected);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(a.adjusted[i] == doctest::Approx(b.adjusted[i]).epsilon(1e-14));
    // Adjusted values follow the ordering of the raw values.
    for (std::size_t i = 0; i < q.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j)
        if (q[i] <= q[j]) CHECK(a.adjusted[i] <= a.adjusted[j]);
  }
}

TEST_CASE("two-step procedure: identical tables reject nothing") {
  std::map<std::string, ScoreTable> tables;
  tables["ZeroOne"] = table(Eigen::MatrixXd::Constant(10, 4, 0.2));
  tables["MaF1"] = table(Eigen::MatrixXd::Constant(10, 4, 0.8), Orientation::HigherBetter);
  const auto reports = two_step_procedure(tables);
  REQUIRE(reports.size() == 2);
  for (const auto& [name, r] : reports) {
    CHECK_FALSE(r.friedman_rejected);
    CHECK(r.pairwise_p.size() == 0);
    CHECK(validate_rank_report(to_json(r)).empty());
    CHECK(to_csv(r).find("n.s.") != std::string::npos);
  }
}

TEST_CASE("two-step procedure: one dominant algorithm") {
  Rng rng(10);
  Eigen::MatrixXd v(20, 7);
  for (Eigen::Index d = 0; d < 20; ++d) {
    for (Eigen::Index k = 1; k < 7; ++k) v(d, k) = 0.3 + 0.4 * rng.uniform();
    v(d, 0) = 0.1 * rng.uniform();
  }
  std::map<std::string, ScoreTable> tables{{"ZeroOne", table(v)}};
  const auto r = two_step_procedure(tables).at("ZeroOne");
  CHECK(r.friedman_rejected);
  CHECK(r.avg_ranks[0] == 1.0);
  REQUIRE(r.pairwise_p.rows() == 7);
  for (Eigen::Index k = 1; k < 7; ++k) CHECK(r.pairwise_p(0, k) < 0.05);
  CHECK(validate_rank_report(to_json(r)).empty());

  const auto csv = to_csv(r);
  CHECK(csv.rfind("Nam,ZeroOne", 0) == 0);
  CHECK(csv.find("\nFrd,") != std::string::npos);
  CHECK(csv.find("\nRnk,1.00,") != std::string::npos);
  CHECK(csv.find("\nA0,,") != std::string::npos);

  ProcedureOptions holm;
  holm.holm_fallback = true;
  CHECK(two_step_procedure(tables, holm).at("ZeroOne").pairwise_control == "holm");
}

TEST_CASE("two-step procedure: K above the pairwise limit needs the fallback") {
  Rng rng(4);
  Eigen::MatrixXd v(12, 10);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.uniform();
  std::map<std::string, ScoreTable> tables{{"ZeroOne", table(v)}};
  try {
    two_step_procedure(tables);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("--holm-fallback") != std::string::npos);
  }
  ProcedureOptions opts;
  opts.holm_fallback = true;
  CHECK_NOTHROW(two_step_procedure(tables, opts));
}

TEST_CASE("p-value formatting") {
  CHECK(format_p(0.0004) == "0.000");
  CHECK(format_p(0.9996) == "1.000");
  CHECK(format_p(0.0123) == "0.012");
  CHECK(format_p(0.5) == "0.500");
}

TEST_CASE("rank report validation catches problems") {
  Eigen::MatrixXd v(4, 3);
  v << 1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 2, 3;
  auto j = to_json(two_step_procedure({{"ZeroOne", table(v)}}).at("ZeroOne"));
  CHECK(validate_rank_report(j).empty());
  auto broken = j;
  broken["avg_ranks"][0] = 0.5;
  CHECK_FALSE(validate_rank_report(broken).empty());
  broken = j;
  broken.erase("friedman");
  CHECK_FALSE(validate_rank_report(broken).empty());
}
