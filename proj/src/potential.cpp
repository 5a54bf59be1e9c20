#include "geofuse/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace geofuse {

std::string to_string(CombinerKind kind) {
  switch (kind) {
    case CombinerKind::MV: return "MV";
    case CombinerKind::MA: return "MA";
    case CombinerKind::TA: return "TA";
    case CombinerKind::TME: return "TME";
    case CombinerKind::MAX: return "MAX";
    case CombinerKind::MIN: return "MIN";
    case CombinerKind::GME: return "GME";
  }
  return "?";
}

CombinerKind parse_combiner(const std::string& name) {
  for (auto k : kAllCombiners)
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown combiner '" + name + "'");
}

PotentialParams::PotentialParams(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("potential shape coefficient must be positive and finite");
}

double PotentialParams::peak_location() const noexcept { return 1.0 / std::sqrt(2.0 * gamma_); }

double potential_transform(double z, double gamma) {
  constexpr double tiny = std::numeric_limits<double>::denorm_min();
  if (!std::isfinite(z)) return std::copysign(tiny, z);
  const double g = (z * std::sqrt(2.0 * gamma)) * std::exp(-gamma * z * z + 0.5);
  if (g == 0.0 && z != 0.0) return std::copysign(tiny, z);
  return std::clamp(g, -1.0, 1.0);
}

Transform gaussian_potential(const PotentialParams& params) {
  return [gamma = params.gamma()](double z) { return potential_transform(z, gamma); };
}

std::vector<double> default_gamma_grid() {
  std::vector<double> grid;
  for (int i = 2; i <= 10; ++i) grid.push_back(std::exp(static_cast<double>(i)));
  return grid;
}

// ---------------------------------------------------------------------------

namespace {

void require_members(std::span<const double> v, std::size_t n, const char* rule) {
  if (v.size() < n)
    throw std::invalid_argument(std::string(rule) + " needs at least " + std::to_string(n) +
                                " ensemble members, got " + std::to_string(v.size()));
}

double mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double geometric_mean_abs(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double log_sum = 0.0;
  for (double x : v) {
    if (x == 0.0) return 0.0;
    log_sum += std::log(std::abs(x));
  }
  const double g = std::exp(log_sum / static_cast<double>(v.size()));
  // A geometric mean of non-zero values is non-zero.
  return g > 0.0 ? g : std::numeric_limits<double>::denorm_min();
}

}  // namespace

double combine_mv(std::span<const double> discriminants) {
  require_members(discriminants, 1, "MV");
  double votes = 0.0;
  for (double w : discriminants) votes += sign_of(w);
  return votes;
}

double combine_ma(std::span<const double> discriminants) {
  require_members(discriminants, 1, "MA");
  return mean(discriminants);
}

double combine_ta(std::span<const double> transformed) {
  require_members(transformed, 1, "TA");
  return mean(transformed);
}

double combine_tme(std::span<const double> transformed) {
  require_members(transformed, 3, "TME");
  double sum = 0.0;
  for (double g : transformed) sum += g;
  const auto [lo, hi] = std::minmax_element(transformed.begin(), transformed.end());
  return (sum - *hi - *lo) / static_cast<double>(transformed.size() - 2);
}

SplitOutcomes split_outcomes(std::span<const double> transformed) {
  SplitOutcomes s;
  for (double g : transformed) (g >= 0.0 ? s.g_plus : s.g_minus).push_back(g);
  return s;
}

double combine_max(const SplitOutcomes& s) {
  const double pos = s.g_plus.empty() ? 0.0 : *std::max_element(s.g_plus.begin(), s.g_plus.end());
  const double neg =
      s.g_minus.empty() ? 0.0 : *std::min_element(s.g_minus.begin(), s.g_minus.end());
  return pos + neg;
}

double combine_min(const SplitOutcomes& s) {
  const double pos = s.g_plus.empty() ? 0.0 : *std::min_element(s.g_plus.begin(), s.g_plus.end());
  const double neg =
      s.g_minus.empty() ? 0.0 : *std::max_element(s.g_minus.begin(), s.g_minus.end());
  return pos + neg;
}

double combine_gme(const SplitOutcomes& s) {
  return geometric_mean_abs(s.g_plus) - geometric_mean_abs(s.g_minus);
}

double fuse(CombinerKind rule, std::span<const double> discriminants, const Transform& transform) {
  switch (rule) {
    case CombinerKind::MV: return combine_mv(discriminants);
    case CombinerKind::MA: return combine_ma(discriminants);
    default: break;
  }
  std::vector<double> g(discriminants.size());
  std::transform(discriminants.begin(), discriminants.end(), g.begin(), transform);
  switch (rule) {
    case CombinerKind::TA: return combine_ta(g);
    case CombinerKind::TME: return combine_tme(g);
    case CombinerKind::MAX: require_members(g, 1, "MAX"); return combine_max(split_outcomes(g));
    case CombinerKind::MIN: require_members(g, 1, "MIN"); return combine_min(split_outcomes(g));
    case CombinerKind::GME: require_members(g, 1, "GME"); return combine_gme(split_outcomes(g));
    default: break;
  }
  throw std::logic_error("unhandled combiner");
}

double fuse(CombinerKind rule, std::span<const double> discriminants, const PotentialParams& params) {
  return fuse(rule, discriminants, gaussian_potential(params));
}

// ---------------------------------------------------------------------------

BinaryEnsemble::BinaryEnsemble(std::vector<Hyperplane> members, PotentialParams params,
                               CombinerKind rule)
    : members_(std::move(members)), params_(params), rule_(rule) {
  if (members_.size() < min_members(rule_))
    throw std::invalid_argument(to_string(rule_) + " ensemble needs at least " +
                                std::to_string(min_members(rule_)) + " members");
  for (const auto& m : members_)
    if (m.dim() != members_.front().dim())
      throw std::invalid_argument("ensemble members disagree on dimensionality");
}

std::vector<double> BinaryEnsemble::discriminants(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::vector<double> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(discriminant(m, x));
  return out;
}

EnsembleOutput ensemble_predict(const BinaryEnsemble& e, const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Transform& transform) {
  const auto w = e.discriminants(x);
  const double score = fuse(e.rule(), w, transform);
  return {sign_of(score), score};
}

EnsembleOutput ensemble_predict(const BinaryEnsemble& e, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return ensemble_predict(e, x, gaussian_potential(e.params()));
}

nlohmann::json to_json(const BinaryEnsemble& e) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : e.members()) members.push_back(to_json(m));
  return {{"members", members}, {"gamma", e.params().gamma()}, {"rule", to_string(e.rule())}};
}

BinaryEnsemble ensemble_from_json(const nlohmann::json& j) {
  std::vector<Hyperplane> members;
  for (const auto& m : j.at("members")) members.push_back(hyperplane_from_json(m));
  return BinaryEnsemble(std::move(members), PotentialParams(j.at("gamma").get<double>()),
                        parse_combiner(j.at("rule").get<std::string>()));
}

}  // namespace geofuse
