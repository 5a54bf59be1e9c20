#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "geofuse/linear.hpp"
#include "json.hpp"

namespace geofuse {

enum class CombinerKind { MV, MA, TA, TME, MAX, MIN, GME };

inline constexpr std::array<CombinerKind, 7> kAllCombiners = {
    CombinerKind::MV,  CombinerKind::MA,  CombinerKind::TA, CombinerKind::TME,
    CombinerKind::MAX, CombinerKind::MIN, CombinerKind::GME};

std::string to_string(CombinerKind kind);
CombinerKind parse_combiner(const std::string& name);

/// MV and MA fuse raw discriminants; the other five fuse potentials.
constexpr bool uses_potential(CombinerKind kind) noexcept {
  return kind != CombinerKind::MV && kind != CombinerKind::MA;
}

/// Smallest ensemble a rule accepts.
constexpr std::size_t min_members(CombinerKind kind) noexcept {
  return kind == CombinerKind::TME ? 3 : 1;
}

/// Shape coefficient shared by every ensemble member.
class PotentialParams {
 public:
  explicit PotentialParams(double gamma);
  double gamma() const noexcept { return gamma_; }
  /// Distance from the plane at which the potential peaks.
  double peak_location() const noexcept;

  friend bool operator==(const PotentialParams&, const PotentialParams&) = default;

 private:
  double gamma_;
};

/// g(z) = z * exp(-gamma z^2 + 1/2) * sqrt(2 gamma).
///
/// Odd, bounded by 1 in magnitude with extrema +-1 at z = +-1/sqrt(2 gamma),
/// zero only at z = 0. Where the exponential underflows the result keeps the
/// sign of z as the smallest subnormal magnitude.
double potential_transform(double z, double gamma);

/// A transform of discriminant values; potential_transform is the shipped one.
using Transform = std::function<double(double)>;

Transform gaussian_potential(const PotentialParams& params);

/// Default tuning grid {e^2, ..., e^10}.
std::vector<double> default_gamma_grid();

// ---------------------------------------------------------------------------
// Combination rules. Inputs are per-member values; all rules are invariant
// to member order.

/// Sum of signs, sign(0) = +1.
double combine_mv(std::span<const double> discriminants);
/// Mean of raw discriminants.
double combine_ma(std::span<const double> discriminants);
/// Mean of transformed values.
double combine_ta(std::span<const double> transformed);
/// Mean after dropping one occurrence each of the largest and smallest
/// transformed value. Needs at least three members.
double combine_tme(std::span<const double> transformed);

/// Transformed outputs split by sign; zero joins the non-negative side.
struct SplitOutcomes {
  std::vector<double> g_plus;
  std::vector<double> g_minus;
};

SplitOutcomes split_outcomes(std::span<const double> transformed);

// An empty side contributes 0 in the three rules below.
double combine_max(const SplitOutcomes& s);
double combine_min(const SplitOutcomes& s);
/// Geometric mean of |G+| minus geometric mean of |G-|.
double combine_gme(const SplitOutcomes& s);

/// Applies `rule` to raw member discriminants, transforming first when the
/// rule works on potentials.
double fuse(CombinerKind rule, std::span<const double> discriminants, const Transform& transform);
double fuse(CombinerKind rule, std::span<const double> discriminants, const PotentialParams& params);

// ---------------------------------------------------------------------------

struct EnsembleOutput {
  int label = 1;
  double score = 0.0;
};

/// Linear members fused by one rule under a shared potential.
class BinaryEnsemble {
 public:
  BinaryEnsemble(std::vector<Hyperplane> members, PotentialParams params, CombinerKind rule);

  const std::vector<Hyperplane>& members() const noexcept { return members_; }
  const PotentialParams& params() const noexcept { return params_; }
  CombinerKind rule() const noexcept { return rule_; }
  std::size_t dim() const noexcept { return members_.front().dim(); }

  std::vector<double> discriminants(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  std::vector<Hyperplane> members_;
  PotentialParams params_;
  CombinerKind rule_;
};

EnsembleOutput ensemble_predict(const BinaryEnsemble& e, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Same, with a caller-supplied transform in place of the Gaussian potential.
EnsembleOutput ensemble_predict(const BinaryEnsemble& e, const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Transform& transform);

nlohmann::json to_json(const BinaryEnsemble& e);
BinaryEnsemble ensemble_from_json(const nlohmann::json& j);

}  // namespace geofuse
