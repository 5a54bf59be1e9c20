#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "geofuse/dataset.hpp"
#include "geofuse/linear.hpp"
#include "geofuse/potential.hpp"
#include "json.hpp"

namespace geofuse {

/// Trained members for every class pair (a < b), before a fusion rule is
/// attached. Instances of class a are labelled -1 and of class b +1.
struct PairMembers {
  int class_a = 0;
  int class_b = 1;
  std::vector<Hyperplane> members;
};

struct OvoMembers {
  std::size_t n_classes = 0;
  std::vector<double> class_priors;
  std::vector<PairMembers> pairs;

  /// Discriminants of every member of every pair at x, pair-major.
  std::vector<std::vector<double>> discriminants(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Trains one copy of each base kind on each class pair.
OvoMembers train_ovo_members(const Dataset& ds, std::span<const BaseKind> kinds,
                             const TrainerConfig& cfg = {});

struct OvoPair {
  int class_a;
  int class_b;
  BinaryEnsemble ensemble;
};

struct OvoModel {
  std::size_t n_classes = 0;
  std::vector<double> class_priors;
  std::vector<OvoPair> pairs;
};

OvoModel assemble_ovo(const OvoMembers& members, CombinerKind rule, const PotentialParams& params);

OvoModel ovo_train(const Dataset& ds, CombinerKind rule, const PotentialParams& params,
                   std::span<const BaseKind> kinds = kAllBaseKinds, const TrainerConfig& cfg = {});

std::vector<std::size_t> ovo_votes(const OvoModel& m, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Most votes wins; ties go to the larger prior, then the lower index.
int resolve_votes(std::span<const std::size_t> votes, std::span<const double> priors);

int ovo_predict(const OvoModel& m, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Prediction from precomputed per-pair discriminants (see OvoMembers), so
/// one set of member outputs can be fused under several rules.
int ovo_predict(const OvoMembers& members, const std::vector<std::vector<double>>& discriminants,
                CombinerKind rule, const Transform& transform);

nlohmann::json to_json(const OvoModel& m);
OvoModel ovo_from_json(const nlohmann::json& j);

}  // namespace geofuse
