#include "geofuse/preprocessing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "geofuse/json_util.hpp"

namespace geofuse {

namespace {

double abs_pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd ca = a.array() - a.mean();
  const Eigen::VectorXd cb = b.array() - b.mean();
  const double na = ca.squaredNorm();
  const double nb = cb.squaredNorm();
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return std::abs(ca.dot(cb)) / std::sqrt(na * nb);
}

struct CorrelationCache {
  std::vector<double> class_corr;
  Eigen::MatrixXd feature_corr;
};

CorrelationCache correlations(const Dataset& ds) {
  const auto& X = ds.features();
  const auto d = static_cast<std::size_t>(X.cols());
  const auto counts = ds.class_counts();
  const double S = static_cast<double>(ds.size());

  std::vector<Eigen::VectorXd> indicators;
  for (std::size_t c = 0; c < ds.n_classes(); ++c) {
    Eigen::VectorXd ind(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      ind(i) = ds.labels()[static_cast<std::size_t>(i)] == static_cast<int>(c) ? 1.0 : 0.0;
    indicators.push_back(std::move(ind));
  }

  CorrelationCache cache;
  cache.class_corr.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const Eigen::VectorXd col = X.col(static_cast<Eigen::Index>(j));
    for (std::size_t c = 0; c < indicators.size(); ++c)
      cache.class_corr[j] += static_cast<double>(counts[c]) / S * abs_pearson(col, indicators[c]);
  }
  cache.feature_corr = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d),
                                                 static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const double r = abs_pearson(X.col(static_cast<Eigen::Index>(i)),
                                   X.col(static_cast<Eigen::Index>(j)));
      cache.feature_corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r;
      cache.feature_corr(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r;
    }
  return cache;
}

double merit(const CorrelationCache& cc, const std::vector<std::size_t>& subset) {
  const double k = static_cast<double>(subset.size());
  double rcf = 0.0;
  for (auto j : subset) rcf += cc.class_corr[j];
  rcf /= k;
  double rff = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < subset.size(); ++a)
    for (std::size_t b = a + 1; b < subset.size(); ++b) {
      rff += cc.feature_corr(static_cast<Eigen::Index>(subset[a]),
                             static_cast<Eigen::Index>(subset[b]));
      ++pairs;
    }
  if (pairs) rff /= static_cast<double>(pairs);
  return k * rcf / std::sqrt(k + k * (k - 1.0) * rff);
}

constexpr double kMeritEpsilon = 1e-12;

}  // namespace

std::vector<std::size_t> cfs_select(const Dataset& ds) {
  const std::size_t d = ds.dim();
  if (d == 1) return {0};
  const auto cc = correlations(ds);

  std::vector<std::size_t> selected;
  std::vector<bool> used(d, false);
  double best = -std::numeric_limits<double>::infinity();
  while (selected.size() < d) {
    std::size_t pick = d;
    double pick_merit = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < d; ++j) {
      if (used[j]) continue;
      auto trial = selected;
      trial.push_back(j);
      const double m = merit(cc, trial);
      if (m > pick_merit) {
        pick_merit = m;
        pick = j;
      }
    }
    if (!(pick_merit > best + kMeritEpsilon)) break;
    best = pick_merit;
    used[pick] = true;
    selected.push_back(pick);
  }

  if (best <= kMeritEpsilon) {
    std::vector<std::size_t> all(d);
    std::iota(all.begin(), all.end(), 0);
    return all;
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

double PreprocessPipeline::explained_fraction() const {
  if (total_variance <= 0.0) return 1.0;
  return explained_variance.sum() / total_variance;
}

PreprocessPipeline fit_pipeline(const Dataset& ds, double variance_target) {
  if (!(variance_target > 0.0 && variance_target <= 1.0))
    throw std::invalid_argument("variance target must lie in (0, 1]");

  PreprocessPipeline p;
  p.input_dim = ds.dim();
  p.variance_target = variance_target;
  p.selected_features = cfs_select(ds);

  const auto& X = ds.features();
  const auto S = X.rows();
  const auto ds_sel = static_cast<Eigen::Index>(p.selected_features.size());
  Eigen::MatrixXd Z(S, ds_sel);
  for (Eigen::Index j = 0; j < ds_sel; ++j)
    Z.col(j) = X.col(static_cast<Eigen::Index>(p.selected_features[static_cast<std::size_t>(j)]));

  p.pca_mean = Z.colwise().mean().transpose();
  const Eigen::MatrixXd centered = Z.rowwise() - p.pca_mean.transpose();
  const double divisor = S > 1 ? static_cast<double>(S - 1) : 1.0;
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / divisor;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw std::runtime_error("PCA eigendecomposition failed");
  // Eigen sorts ascending; walk from the back.
  Eigen::VectorXd values = eig.eigenvalues().reverse().cwiseMax(0.0);
  Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
  p.total_variance = values.sum();

  Eigen::Index m = 1;
  if (p.total_variance > 0.0) {
    double cumulative = 0.0;
    for (m = 0; m < values.size();) {
      cumulative += values(m);
      ++m;
      if (cumulative / p.total_variance >= variance_target - kMeritEpsilon) break;
    }
  }

  p.pca_basis.resize(m, ds_sel);
  for (Eigen::Index c = 0; c < m; ++c) {
    Eigen::VectorXd v = vectors.col(c);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    p.pca_basis.row(c) = v.transpose();
  }
  p.explained_variance = values.head(m);

  const Eigen::MatrixXd scores = centered * p.pca_basis.transpose();
  p.minmax_lo = scores.colwise().minCoeff().transpose();
  p.minmax_hi = scores.colwise().maxCoeff().transpose();
  p.global_factor = 1.0 / static_cast<double>(m * m);
  return p;
}

Eigen::VectorXd apply_unscaled(const PreprocessPipeline& p, const Eigen::VectorXd& x) {
  if (static_cast<std::size_t>(x.size()) != p.input_dim)
    throw std::invalid_argument("dimension mismatch: pipeline expects " +
                                std::to_string(p.input_dim) + " features, got " +
                                std::to_string(x.size()));
  Eigen::VectorXd z(static_cast<Eigen::Index>(p.selected_features.size()));
  for (std::size_t j = 0; j < p.selected_features.size(); ++j)
    z(static_cast<Eigen::Index>(j)) = x(static_cast<Eigen::Index>(p.selected_features[j]));
  Eigen::VectorXd scores = p.pca_basis * (z - p.pca_mean);
  for (Eigen::Index c = 0; c < scores.size(); ++c) {
    const double span = p.minmax_hi(c) - p.minmax_lo(c);
    scores(c) = span > 0.0 ? (scores(c) - p.minmax_lo(c)) / span : 0.0;
  }
  return scores;
}

Eigen::VectorXd apply_pipeline(const PreprocessPipeline& p, const Eigen::VectorXd& x) {
  return apply_unscaled(p, x) * p.global_factor;
}

Eigen::MatrixXd apply_pipeline(const PreprocessPipeline& p, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(p.output_dim()));
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out.row(i) = apply_pipeline(p, Eigen::VectorXd(X.row(i).transpose())).transpose();
  return out;
}

Dataset transform(const PreprocessPipeline& p, const Dataset& ds) {
  std::vector<std::string> names;
  for (std::size_t c = 0; c < p.output_dim(); ++c) names.push_back("pc" + std::to_string(c + 1));
  return ds.with_features(apply_pipeline(p, ds.features()), std::move(names));
}

nlohmann::json to_json(const PreprocessPipeline& p) {
  return {
      {"format", "geofuse.pipeline"},
      {"version", PreprocessPipeline::kFormatVersion},
      {"stages", {"cfs", "pca", "minmax", "global_scale"}},
      {"input_dim", p.input_dim},
      {"variance_target", p.variance_target},
      {"selected_features", p.selected_features},
      {"pca_mean", json_util::vector(p.pca_mean)},
      {"pca_basis", json_util::matrix(p.pca_basis)},
      {"explained_variance", json_util::vector(p.explained_variance)},
      {"total_variance", p.total_variance},
      {"minmax_lo", json_util::vector(p.minmax_lo)},
      {"minmax_hi", json_util::vector(p.minmax_hi)},
      {"global_factor", p.global_factor},
  };
}

PreprocessPipeline pipeline_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "geofuse.pipeline")
    throw std::invalid_argument("not a pipeline document");
  if (j.at("version").get<int>() != PreprocessPipeline::kFormatVersion)
    throw std::invalid_argument("unsupported pipeline version");
  PreprocessPipeline p;
  p.input_dim = j.at("input_dim").get<std::size_t>();
  p.variance_target = j.at("variance_target").get<double>();
  p.selected_features = j.at("selected_features").get<std::vector<std::size_t>>();
  p.pca_mean = json_util::to_vector(j.at("pca_mean"));
  p.pca_basis = json_util::to_matrix(j.at("pca_basis"), p.pca_mean.size());
  p.explained_variance = json_util::to_vector(j.at("explained_variance"));
  p.total_variance = j.at("total_variance").get<double>();
  p.minmax_lo = json_util::to_vector(j.at("minmax_lo"));
  p.minmax_hi = json_util::to_vector(j.at("minmax_hi"));
  p.global_factor = j.at("global_factor").get<double>();
  if (p.minmax_lo.size() != p.pca_basis.rows() || p.minmax_hi.size() != p.pca_basis.rows())
    throw std::invalid_argument("pipeline bounds do not match PCA output dimension");
  return p;
}

}  // namespace geofuse
