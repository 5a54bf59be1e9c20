#include "geofuse/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

namespace geofuse::stats {

void ScoreTable::validate() const {
  if (values.rows() < 2) throw std::invalid_argument("score table needs at least 2 datasets");
  if (values.cols() < 2) throw std::invalid_argument("score table needs at least 2 algorithms");
  if (!values.allFinite()) throw std::invalid_argument("score table has non-finite entries");
  if (!algorithms.empty() && algorithms.size() != n_algorithms())
    throw std::invalid_argument("algorithm names do not match table width");
  if (!datasets.empty() && datasets.size() != n_datasets())
    throw std::invalid_argument("dataset names do not match table height");
}

std::vector<double> rank_row(std::span<const double> row, Orientation orientation) {
  const std::size_t K = row.size();
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), 0);
  auto better = [&](std::size_t a, std::size_t b) {
    return orientation == Orientation::LowerBetter ? row[a] < row[b] : row[a] > row[b];
  };
  std::stable_sort(order.begin(), order.end(), better);
  std::vector<double> ranks(K);
  for (std::size_t i = 0; i < K;) {
    std::size_t j = i + 1;
    while (j < K && row[order[j]] == row[order[i]]) ++j;
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = shared;
    i = j;
  }
  return ranks;
}

Eigen::MatrixXd rank_matrix(const ScoreTable& t) {
  Eigen::MatrixXd ranks(t.values.rows(), t.values.cols());
  for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
    const Eigen::VectorXd row = t.values.row(i).transpose();
    const auto r = rank_row(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())),
                            t.orientation);
    for (Eigen::Index j = 0; j < t.values.cols(); ++j) ranks(i, j) = r[static_cast<std::size_t>(j)];
  }
  return ranks;
}

std::vector<double> average_ranks(const ScoreTable& t) {
  t.validate();
  const Eigen::VectorXd mean = rank_matrix(t).colwise().mean().transpose();
  return {mean.data(), mean.data() + mean.size()};
}

FriedmanResult friedman_test(const ScoreTable& t, FriedmanVariant variant) {
  t.validate();
  const double D = static_cast<double>(t.n_datasets());
  const double K = static_cast<double>(t.n_algorithms());
  const Eigen::MatrixXd ranks = rank_matrix(t);
  const Eigen::VectorXd rank_sums = ranks.colwise().sum().transpose();

  // Tie-corrected form: (K-1) (sum R_j^2 - D^2 K (K+1)^2 / 4) / (sum r_ij^2 - D K (K+1)^2 / 4).
  const double numerator = (K - 1.0) * (rank_sums.squaredNorm() - D * D * K * (K + 1.0) * (K + 1.0) / 4.0);
  const double denominator = ranks.squaredNorm() - D * K * (K + 1.0) * (K + 1.0) / 4.0;

  FriedmanResult r;
  r.df1 = K - 1.0;
  if (denominator <= 1e-12 * D * K) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    if (variant == FriedmanVariant::ImanDavenport) r.df2 = (K - 1.0) * (D - 1.0);
    return r;
  }
  const double chi2 = std::max(0.0, numerator / denominator);
  if (variant == FriedmanVariant::ChiSquare) {
    r.statistic = chi2;
    r.p_value = chi2 > 0.0
                    ? boost::math::cdf(boost::math::complement(boost::math::chi_squared(r.df1), chi2))
                    : 1.0;
    return r;
  }
  r.df2 = (K - 1.0) * (D - 1.0);
  const double limit = D * (K - 1.0);
  if (chi2 >= limit) {
    r.statistic = std::numeric_limits<double>::infinity();
    r.p_value = 0.0;
    return r;
  }
  r.statistic = (D - 1.0) * chi2 / (limit - chi2);
  r.p_value = r.statistic > 0.0
                  ? boost::math::cdf(boost::math::complement(boost::math::fisher_f(r.df1, r.df2),
                                                             r.statistic))
                  : 1.0;
  return r;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("Wilcoxon samples differ in length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (!std::isfinite(d)) throw std::invalid_argument("non-finite Wilcoxon difference");
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult r;
  r.n = diffs.size();
  if (r.n == 0) return r;

  std::vector<double> magnitude(r.n);
  std::transform(diffs.begin(), diffs.end(), magnitude.begin(), [](double d) { return std::abs(d); });
  const auto ranks = rank_row(magnitude, Orientation::LowerBetter);
  for (std::size_t i = 0; i < r.n; ++i) (diffs[i] > 0 ? r.w_plus : r.w_minus) += ranks[i];
  r.statistic = std::min(r.w_plus, r.w_minus);

  if (r.n <= kWilcoxonExactLimit) {
    // Averaged ranks are multiples of 1/2, so doubled ranks are integers and
    // the null distribution of 2 W+ is a subset-sum count over them.
    std::vector<std::size_t> doubled(r.n);
    std::size_t total = 0;
    for (std::size_t i = 0; i < r.n; ++i) {
      doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
      total += doubled[i];
    }
    std::vector<double> count(total + 1, 0.0);
    count[0] = 1.0;
    std::size_t reach = 0;
    for (auto v : doubled) {
      for (std::size_t s = reach + 1; s-- > 0;) count[s + v] += count[s];
      reach += v;
    }
    const auto observed = static_cast<std::size_t>(std::llround(2.0 * r.w_plus));
    double lower = 0.0, upper = 0.0;
    for (std::size_t s = 0; s <= total; ++s) {
      if (s <= observed) lower += count[s];
      if (s >= observed) upper += count[s];
    }
    const double outcomes = std::ldexp(1.0, static_cast<int>(r.n));
    r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / outcomes);
    r.exact = true;
    return r;
  }

  const double n = static_cast<double>(r.n);
  const double mean = n * (n + 1.0) / 4.0;
  double tie_term = 0.0;
  {
    std::vector<double> sorted = magnitude;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i + 1;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
  }
  const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  r.exact = false;
  if (variance <= 0.0) return r;
  const double z = std::max(0.0, std::abs(r.w_plus - mean) - 0.5) / std::sqrt(variance);
  r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

// ---------------------------------------------------------------------------

std::size_t pair_index(std::size_t i, std::size_t j, std::size_t K) {
  if (i > j) std::swap(i, j);
  if (i == j || j >= K) throw std::out_of_range("invalid algorithm pair");
  // pairs before row i: sum_{r<i} (K-1-r)
  return i * (2 * K - i - 1) / 2 + (j - i - 1);
}

std::vector<std::vector<std::size_t>> pairwise_exhaustive_sets(std::size_t K) {
  if (K < 2) return {};
  if (K > kMaxPairwiseAlgorithms)
    throw std::invalid_argument("Bergmann-Hommel pairwise control supports at most " +
                                std::to_string(kMaxPairwiseAlgorithms) +
                                " algorithms; use the Holm fallback (--holm-fallback)");
  std::vector<std::vector<std::size_t>> sets;
  // Restricted growth strings enumerate set partitions: block[0] = 0 and
  // block[i] <= 1 + max(block[0..i-1]).
  std::vector<std::size_t> block(K, 0);
  std::vector<std::size_t> prefix_max(K, 0);
  while (true) {
    std::vector<std::size_t> e;
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = i + 1; j < K; ++j)
        if (block[i] == block[j]) e.push_back(pair_index(i, j, K));
    if (!e.empty()) sets.push_back(std::move(e));

    std::size_t pos = K - 1;
    while (pos > 0 && block[pos] == prefix_max[pos - 1] + 1) --pos;
    if (pos == 0) break;
    ++block[pos];
    prefix_max[pos] = std::max(prefix_max[pos - 1], block[pos]);
    for (std::size_t i = pos + 1; i < K; ++i) {
      block[i] = 0;
      prefix_max[i] = prefix_max[pos];
    }
  }
  return sets;
}

namespace {

void check_p(std::span<const double> p) {
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("p-values must lie in [0, 1]");
}

}  // namespace

Adjusted bergmann_hommel_pairwise(std::span<const double> p, std::size_t K, double alpha) {
  check_p(p);
  if (p.size() != K * (K - 1) / 2)
    throw std::invalid_argument("pairwise family over " + std::to_string(K) + " algorithms needs " +
                                std::to_string(K * (K - 1) / 2) + " p-values");
  const auto sets = pairwise_exhaustive_sets(K);
  Adjusted out{std::vector<double>(p.size(), 0.0), std::vector<bool>(p.size(), true)};
  for (const auto& e : sets) {
    double smallest = 1.0;
    for (auto j : e) smallest = std::min(smallest, p[j]);
    const double size = static_cast<double>(e.size());
    const bool accepted = smallest > alpha / size;
    for (auto j : e) {
      out.adjusted[j] = std::max(out.adjusted[j], std::min(1.0, size * smallest));
      if (accepted) out.rejected[j] = false;
    }
  }
  return out;
}

Adjusted holm_adjust(std::span<const double> p, double alpha) {
  check_p(p);
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });
  Adjusted out{std::vector<double>(m, 0.0), std::vector<bool>(m, false)};
  double running = 0.0;
  bool still_rejecting = true;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = order[k];
    const double factor = static_cast<double>(m - k);
    running = std::max(running, std::min(1.0, factor * p[i]));
    out.adjusted[i] = running;
    still_rejecting = still_rejecting && p[i] <= alpha / factor;
    out.rejected[i] = still_rejecting;
  }
  return out;
}

Adjusted bergmann_hommel_independent(std::span<const double> p, double alpha) {
  return holm_adjust(p, alpha);
}

// ---------------------------------------------------------------------------

std::map<std::string, RankReport> two_step_procedure(const std::map<std::string, ScoreTable>& tables,
                                                     const ProcedureOptions& options) {
  if (tables.empty()) throw std::invalid_argument("no score tables");
  if (!(options.alpha > 0.0 && options.alpha < 1.0))
    throw std::invalid_argument("alpha must lie in (0, 1)");
  const std::size_t K = tables.begin()->second.n_algorithms();
  for (const auto& [name, t] : tables) {
    t.validate();
    if (t.n_algorithms() != K)
      throw std::invalid_argument("criterion '" + name + "' has a different algorithm count");
  }
  if (K > kMaxPairwiseAlgorithms && !options.holm_fallback)
    throw std::invalid_argument("Bergmann-Hommel pairwise control supports at most " +
                                std::to_string(kMaxPairwiseAlgorithms) +
                                " algorithms; use the Holm fallback (--holm-fallback)");

  std::map<std::string, RankReport> reports;
  std::vector<double> friedman_p;
  for (const auto& [name, t] : tables) {
    RankReport r;
    r.criterion = name;
    r.algorithms = t.algorithms;
    if (r.algorithms.empty())
      for (std::size_t k = 0; k < K; ++k) r.algorithms.push_back("A" + std::to_string(k + 1));
    r.n_datasets = t.n_datasets();
    r.alpha = options.alpha;
    r.avg_ranks = average_ranks(t);
    const auto fr = friedman_test(t, options.friedman);
    r.friedman_variant =
        options.friedman == FriedmanVariant::ChiSquare ? "chi-square" : "iman-davenport";
    r.friedman_statistic = fr.statistic;
    r.friedman_p = fr.p_value;
    r.family_control = "bergmann-hommel-independent";
    r.pairwise_control = options.holm_fallback ? "holm" : "bergmann-hommel";
    friedman_p.push_back(fr.p_value);
    reports.emplace(name, std::move(r));
  }

  const auto family = bergmann_hommel_independent(friedman_p, options.alpha);
  std::size_t idx = 0;
  for (auto& [name, r] : reports) {
    r.friedman_p_adjusted = family.adjusted[idx];
    r.friedman_rejected = family.rejected[idx];
    ++idx;
    if (!r.friedman_rejected) continue;

    const auto& t = tables.at(name);
    std::vector<double> raw(K * (K - 1) / 2);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = i + 1; j < K; ++j) {
        const Eigen::VectorXd a = t.values.col(static_cast<Eigen::Index>(i));
        const Eigen::VectorXd b = t.values.col(static_cast<Eigen::Index>(j));
        raw[pair_index(i, j, K)] =
            wilcoxon_signed_rank({a.data(), static_cast<std::size_t>(a.size())},
                                 {b.data(), static_cast<std::size_t>(b.size())})
                .p_value;
      }
    const auto adj = options.holm_fallback ? holm_adjust(raw, options.alpha)
                                           : bergmann_hommel_pairwise(raw, K, options.alpha);
    const auto k = static_cast<Eigen::Index>(K);
    r.pairwise_p = Eigen::MatrixXd::Ones(k, k);
    r.pairwise_raw_p = Eigen::MatrixXd::Ones(k, k);
    for (std::size_t i = 0; i < K; ++i)
      for (std::size_t j = i + 1; j < K; ++j) {
        const auto h = pair_index(i, j, K);
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        r.pairwise_p(a, b) = r.pairwise_p(b, a) = adj.adjusted[h];
        r.pairwise_raw_p(a, b) = r.pairwise_raw_p(b, a) = raw[h];
      }
  }
  return reports;
}

std::string format_p(double p) {
  if (p < 1e-3) return "0.000";
  if (p > 0.999) return "1.000";
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.3f", p);
  return buf;
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

nlohmann::json to_json(const RankReport& r) {
  return {
      {"format", "geofuse.rank_report"},
      {"version", 1},
      {"criterion", r.criterion},
      {"algorithms", r.algorithms},
      {"n_datasets", r.n_datasets},
      {"alpha", r.alpha},
      {"avg_ranks", r.avg_ranks},
      {"friedman",
       {{"variant", r.friedman_variant},
        {"statistic", r.friedman_statistic},
        {"p_value", r.friedman_p},
        {"p_adjusted", r.friedman_p_adjusted},
        {"rejected", r.friedman_rejected}}},
      {"family_control", r.family_control},
      {"pairwise_control", r.pairwise_control},
      {"pairwise_significant", r.pairwise_p.size() > 0},
      {"pairwise_p", matrix_json(r.pairwise_p)},
      {"pairwise_raw_p", matrix_json(r.pairwise_raw_p)},
  };
}

std::string to_csv(const RankReport& r) {
  std::ostringstream os;
  os << "Nam," << r.criterion;
  for (std::size_t k = 1; k < r.algorithms.size(); ++k) os << ',';
  os << '\n';
  os << "Frd";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", r.friedman_p);
  os << ',' << buf;
  for (std::size_t k = 1; k < r.algorithms.size(); ++k) os << ',';
  os << '\n';
  os << "Alg";
  for (const auto& a : r.algorithms) os << ',' << a;
  os << '\n';
  os << "Rnk";
  for (double v : r.avg_ranks) {
    std::snprintf(buf, sizeof buf, "%.2f", v);
    os << ',' << buf;
  }
  os << '\n';
  const std::size_t K = r.algorithms.size();
  const bool have_pairs = r.pairwise_p.size() > 0;
  for (std::size_t i = 0; i + 1 < K; ++i) {
    os << r.algorithms[i];
    for (std::size_t j = 0; j < K; ++j) {
      os << ',';
      if (j > i) {
        os << (have_pairs ? format_p(r.pairwise_p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)))
                          : std::string("n.s."));
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string radar_csv(const std::map<std::string, RankReport>& reports) {
  std::ostringstream os;
  os.precision(17);
  os << "criterion,algorithm,avg_rank\n";
  for (const auto& [name, r] : reports)
    for (std::size_t k = 0; k < r.algorithms.size(); ++k)
      os << name << ',' << r.algorithms[k] << ',' << r.avg_ranks[k] << '\n';
  return os.str();
}

std::vector<std::string> validate_rank_report(const nlohmann::json& j) {
  std::vector<std::string> problems;
  auto need = [&](const char* key, auto pred, const char* what) {
    if (!j.contains(key) || !pred(j[key])) problems.push_back(std::string(key) + ": expected " + what);
  };
  auto is_prob = [](const nlohmann::json& v) {
    return v.is_number() && v.get<double>() >= 0.0 && v.get<double>() <= 1.0;
  };
  if (!j.is_object()) return {"document is not an object"};
  need("format", [](const auto& v) { return v == "geofuse.rank_report"; }, "\"geofuse.rank_report\"");
  need("version", [](const auto& v) { return v == 1; }, "1");
  need("criterion", [](const auto& v) { return v.is_string(); }, "string");
  need("algorithms", [](const auto& v) { return v.is_array() && v.size() >= 2; }, "array of >= 2 names");
  need("n_datasets", [](const auto& v) { return v.is_number_unsigned() && v.template get<std::size_t>() >= 2; },
       "integer >= 2");
  need("alpha", [](const auto& v) { return v.is_number() && v > 0.0 && v < 1.0; }, "number in (0,1)");
  need("family_control", [](const auto& v) { return v.is_string(); }, "string");
  need("pairwise_control", [](const auto& v) { return v.is_string(); }, "string");
  need("pairwise_significant", [](const auto& v) { return v.is_boolean(); }, "boolean");
  if (!problems.empty()) return problems;

  const std::size_t K = j["algorithms"].size();
  const auto& ranks = j.contains("avg_ranks") ? j["avg_ranks"] : nlohmann::json();
  if (!ranks.is_array() || ranks.size() != K) {
    problems.push_back("avg_ranks: expected one rank per algorithm");
  } else {
    double sum = 0.0;
    for (const auto& v : ranks) {
      if (!v.is_number() || v.get<double>() < 1.0 || v.get<double>() > static_cast<double>(K))
        problems.push_back("avg_ranks: entries must lie in [1, K]");
      else
        sum += v.get<double>();
    }
    if (std::abs(sum - static_cast<double>(K * (K + 1)) / 2.0) > 1e-9)
      problems.push_back("avg_ranks: must sum to K(K+1)/2");
  }
  const auto& fr = j.contains("friedman") ? j["friedman"] : nlohmann::json();
  if (!fr.is_object() || !fr.contains("p_value") || !is_prob(fr["p_value"]) ||
      !fr.contains("p_adjusted") || !is_prob(fr["p_adjusted"]) || !fr.contains("statistic") ||
      !fr["statistic"].is_number() || !fr.contains("rejected") || !fr["rejected"].is_boolean())
    problems.push_back("friedman: expected {statistic, p_value, p_adjusted, rejected}");

  for (const char* key : {"pairwise_p", "pairwise_raw_p"}) {
    const auto& m = j.contains(key) ? j[key] : nlohmann::json();
    if (!m.is_array()) {
      problems.push_back(std::string(key) + ": expected matrix");
      continue;
    }
    const bool significant = j["pairwise_significant"].get<bool>();
    if (!significant) {
      if (!m.empty()) problems.push_back(std::string(key) + ": must be empty when not significant");
      continue;
    }
    if (m.size() != K) {
      problems.push_back(std::string(key) + ": expected K rows");
      continue;
    }
    for (std::size_t a = 0; a < K; ++a) {
      if (!m[a].is_array() || m[a].size() != K) {
        problems.push_back(std::string(key) + ": expected K columns");
        break;
      }
      for (std::size_t b = 0; b < K; ++b) {
        if (!is_prob(m[a][b]) || m[a][b] != m[b][a]) {
          problems.push_back(std::string(key) + ": entries must be symmetric probabilities");
          a = K;
          break;
        }
      }
    }
  }
  return problems;
}

}  // namespace geofuse::stats
