#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "geofuse/dataset.hpp"
#include "json.hpp"

namespace geofuse {

/// Correlation-based feature selection with greedy forward search.
///
/// Feature-class correlation of a numeric feature is the prior-weighted mean
/// of |Pearson(feature, one-hot indicator of class c)| over classes; the
/// feature-feature term is |Pearson| between features. A subset S with k
/// members scores k*mean(r_cf) / sqrt(k + k(k-1)*mean(r_ff)). Search stops
/// as soon as adding the best candidate fails to raise the score. When no
/// feature carries any class correlation at all every feature is kept.
std::vector<std::size_t> cfs_select(const Dataset& ds);

/// Fitted CFS -> PCA -> min-max -> 1/d^2 transform. Everything is learned
/// on the training data passed to fit_pipeline and applied unchanged later.
struct PreprocessPipeline {
  static constexpr int kFormatVersion = 1;

  std::size_t input_dim = 0;
  double variance_target = 0.95;
  std::vector<std::size_t> selected_features;
  /// Centering vector over the selected features.
  Eigen::VectorXd pca_mean;
  /// Rows are orthonormal principal directions, largest variance first.
  Eigen::MatrixXd pca_basis;
  /// Eigenvalues of the kept components (covariance with divisor S-1).
  Eigen::VectorXd explained_variance;
  double total_variance = 0.0;
  Eigen::VectorXd minmax_lo;
  Eigen::VectorXd minmax_hi;
  double global_factor = 1.0;

  std::size_t output_dim() const noexcept { return static_cast<std::size_t>(pca_basis.rows()); }

  /// Fraction of total variance carried by the kept components (1 when the
  /// training matrix has no variance at all).
  double explained_fraction() const;
};

PreprocessPipeline fit_pipeline(const Dataset& ds, double variance_target = 0.95);

/// Stages up to and including min-max; no global scaling.
Eigen::VectorXd apply_unscaled(const PreprocessPipeline& p, const Eigen::VectorXd& x);

Eigen::VectorXd apply_pipeline(const PreprocessPipeline& p, const Eigen::VectorXd& x);

/// Row-wise application to an instance matrix.
Eigen::MatrixXd apply_pipeline(const PreprocessPipeline& p, const Eigen::MatrixXd& X);

/// Transformed copy of `ds` (labels and class names kept).
Dataset transform(const PreprocessPipeline& p, const Dataset& ds);

nlohmann::json to_json(const PreprocessPipeline& p);
PreprocessPipeline pipeline_from_json(const nlohmann::json& j);

}  // namespace geofuse
