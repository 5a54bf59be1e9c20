#include "geofuse/ovo.hpp"

#include <stdexcept>

namespace geofuse {

std::vector<std::vector<double>> OvoMembers::discriminants(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  std::vector<std::vector<double>> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    std::vector<double> w;
    w.reserve(p.members.size());
    for (const auto& h : p.members) w.push_back(discriminant(h, x));
    out.push_back(std::move(w));
  }
  return out;
}

OvoMembers train_ovo_members(const Dataset& ds, std::span<const BaseKind> kinds,
                             const TrainerConfig& cfg) {
  if (kinds.empty()) throw std::invalid_argument("at least one base classifier kind is required");
  OvoMembers out;
  out.n_classes = ds.n_classes();
  const auto counts = ds.class_counts();
  for (auto c : counts)
    out.class_priors.push_back(static_cast<double>(c) / static_cast<double>(ds.size()));

  const auto& X = ds.features();
  const auto& labels = ds.labels();
  for (int a = 0; a < static_cast<int>(out.n_classes); ++a) {
    for (int b = a + 1; b < static_cast<int>(out.n_classes); ++b) {
      std::vector<Eigen::Index> rows;
      std::vector<int> y;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == a || labels[i] == b) {
          rows.push_back(static_cast<Eigen::Index>(i));
          y.push_back(labels[i] == a ? -1 : 1);
        }
      }
      const Eigen::MatrixXd Xp = X(rows, Eigen::all);
      PairMembers pm{a, b, {}};
      for (auto kind : kinds) pm.members.push_back(train_base(kind, Xp, y, cfg).plane);
      out.pairs.push_back(std::move(pm));
    }
  }
  return out;
}

OvoModel assemble_ovo(const OvoMembers& members, CombinerKind rule, const PotentialParams& params) {
  OvoModel m;
  m.n_classes = members.n_classes;
  m.class_priors = members.class_priors;
  for (const auto& p : members.pairs)
    m.pairs.push_back({p.class_a, p.class_b, BinaryEnsemble(p.members, params, rule)});
  return m;
}

OvoModel ovo_train(const Dataset& ds, CombinerKind rule, const PotentialParams& params,
                   std::span<const BaseKind> kinds, const TrainerConfig& cfg) {
  return assemble_ovo(train_ovo_members(ds, kinds, cfg), rule, params);
}

std::vector<std::size_t> ovo_votes(const OvoModel& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
  std::vector<std::size_t> votes(m.n_classes, 0);
  for (const auto& p : m.pairs) {
    const auto out = ensemble_predict(p.ensemble, x);
    ++votes[static_cast<std::size_t>(out.label > 0 ? p.class_b : p.class_a)];
  }
  return votes;
}

int resolve_votes(std::span<const std::size_t> votes, std::span<const double> priors) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < votes.size(); ++c) {
    if (votes[c] > votes[best] || (votes[c] == votes[best] && priors[c] > priors[best])) best = c;
  }
  return static_cast<int>(best);
}

int ovo_predict(const OvoModel& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto votes = ovo_votes(m, x);
  return resolve_votes(votes, m.class_priors);
}

int ovo_predict(const OvoMembers& members, const std::vector<std::vector<double>>& discriminants,
                CombinerKind rule, const Transform& transform) {
  std::vector<std::size_t> votes(members.n_classes, 0);
  for (std::size_t i = 0; i < members.pairs.size(); ++i) {
    const auto& p = members.pairs[i];
    const int label = sign_of(fuse(rule, discriminants[i], transform));
    ++votes[static_cast<std::size_t>(label > 0 ? p.class_b : p.class_a)];
  }
  return resolve_votes(votes, members.class_priors);
}

nlohmann::json to_json(const OvoModel& m) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : m.pairs)
    pairs.push_back({{"class_a", p.class_a}, {"class_b", p.class_b}, {"ensemble", to_json(p.ensemble)}});
  return {{"n_classes", m.n_classes}, {"class_priors", m.class_priors}, {"pairs", pairs}};
}

OvoModel ovo_from_json(const nlohmann::json& j) {
  OvoModel m;
  m.n_classes = j.at("n_classes").get<std::size_t>();
  m.class_priors = j.at("class_priors").get<std::vector<double>>();
  for (const auto& p : j.at("pairs"))
    m.pairs.push_back({p.at("class_a").get<int>(), p.at("class_b").get<int>(),
                       ensemble_from_json(p.at("ensemble"))});
  if (m.pairs.size() != m.n_classes * (m.n_classes - 1) / 2)
    throw std::invalid_argument("OvO model must hold one ensemble per class pair");
  return m;
}

}  // namespace geofuse
