#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace geofuse {

enum class BaseKind { FLDA, MLP, NC, SVM, LR };

inline constexpr std::array<BaseKind, 5> kAllBaseKinds = {BaseKind::FLDA, BaseKind::MLP,
                                                          BaseKind::NC, BaseKind::SVM,
                                                          BaseKind::LR};

std::string to_string(BaseKind kind);
BaseKind parse_base_kind(const std::string& name);

/// Raised when a trainer cannot produce a separating direction.
class DegenerateSeparator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decision hyperplane with unit normal, so the discriminant <n,x>+b is the
/// signed Euclidean distance from x to the plane.
struct Hyperplane {
  Eigen::VectorXd normal;
  double offset = 0.0;
  std::optional<BaseKind> kind;
  std::string config_digest;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(normal.size()); }
};

/// Scales (w, c) to unit normal. Throws DegenerateSeparator for w = 0.
Hyperplane normalize(const Eigen::VectorXd& w, double c);

double discriminant(const Hyperplane& h, const Eigen::Ref<const Eigen::VectorXd>& x);

/// sign(discriminant) with sign(0) = +1.
int predict(const Hyperplane& h, const Eigen::Ref<const Eigen::VectorXd>& x);

constexpr int sign_of(double v) noexcept { return v >= 0.0 ? 1 : -1; }

/// Hex digest of the exact normal/offset bit patterns.
std::string digest(const Hyperplane& h);

nlohmann::json to_json(const Hyperplane& h);
Hyperplane hyperplane_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Trainers. X has one instance per row; y holds -1/+1.

struct FldaConfig {
  double ridge = 1e-9;
};

struct LrConfig {
  double lambda = 1e-4;
  double tolerance = 1e-8;
  std::size_t max_iterations = 10000;
};

struct SvmConfig {
  double lambda = 1e-3;
  std::size_t steps = 100000;
  std::uint64_t seed = 0;
};

struct MlpConfig {
  std::size_t epochs = 500;
  double step = 0.1;
};

struct TrainerConfig {
  FldaConfig flda;
  LrConfig lr;
  SvmConfig svm;
  MlpConfig mlp;

  /// Digest of the settings that affect `kind`.
  std::string digest(BaseKind kind) const;
};

nlohmann::json to_json(const TrainerConfig& cfg);
TrainerConfig trainer_config_from_json(const nlohmann::json& j);

struct TrainResult {
  Hyperplane plane;
  Eigen::VectorXd raw_weights;
  double raw_offset = 0.0;
  bool converged = true;
  std::size_t iterations = 0;
  /// Objective value before the first and after every iteration (MLP only).
  std::vector<double> loss_history;
};

Hyperplane train_flda(const Eigen::MatrixXd& X, std::span<const int> y, const FldaConfig& cfg = {});
Hyperplane train_nc(const Eigen::MatrixXd& X, std::span<const int> y);
TrainResult train_lr(const Eigen::MatrixXd& X, std::span<const int> y, const LrConfig& cfg = {});
TrainResult train_svm(const Eigen::MatrixXd& X, std::span<const int> y, const SvmConfig& cfg = {});
TrainResult train_mlp(const Eigen::MatrixXd& X, std::span<const int> y, const MlpConfig& cfg = {});

TrainResult train_base(BaseKind kind, const Eigen::MatrixXd& X, std::span<const int> y,
                       const TrainerConfig& cfg = {});

/// Mean logistic loss plus lambda/2 |w|^2 (offset unpenalized).
double logistic_objective(const Eigen::MatrixXd& X, std::span<const int> y,
                          const Eigen::VectorXd& w, double c, double lambda);

/// Gradient of logistic_objective; the last entry is d/dc.
Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& X, std::span<const int> y,
                                  const Eigen::VectorXd& w, double c, double lambda);

}  // namespace geofuse
