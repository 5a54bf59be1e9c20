#include "geofuse/linear.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "geofuse/json_util.hpp"
#include "geofuse/random.hpp"

namespace geofuse {

std::string to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::FLDA: return "FLDA";
    case BaseKind::MLP: return "MLP";
    case BaseKind::NC: return "NC";
    case BaseKind::SVM: return "SVM";
    case BaseKind::LR: return "LR";
  }
  return "?";
}

BaseKind parse_base_kind(const std::string& name) {
  for (auto k : kAllBaseKinds)
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown base classifier '" + name + "'");
}

Hyperplane normalize(const Eigen::VectorXd& w, double c) {
  const double norm = w.norm();
  if (!(norm > 0.0) || !std::isfinite(norm) || !std::isfinite(c))
    throw DegenerateSeparator("degenerate separator: weight vector has zero or non-finite norm");
  Hyperplane h;
  h.normal = w / norm;
  h.offset = c / norm;
  return h;
}

double discriminant(const Hyperplane& h, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != h.normal.size())
    throw std::invalid_argument("dimension mismatch: hyperplane has " +
                                std::to_string(h.normal.size()) + " dimensions, point has " +
                                std::to_string(x.size()));
  return h.normal.dot(x) + h.offset;
}

int predict(const Hyperplane& h, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return sign_of(discriminant(h, x));
}

std::string digest(const Hyperplane& h) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&](double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int s = 0; s < 64; s += 8) {
      hash ^= (bits >> s) & 0xff;
      hash *= 0x100000001b3ULL;
    }
  };
  for (Eigen::Index i = 0; i < h.normal.size(); ++i) mix(h.normal(i));
  mix(h.offset);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

nlohmann::json to_json(const Hyperplane& h) {
  nlohmann::json j = {{"normal", json_util::vector(h.normal)},
                      {"offset", h.offset},
                      {"config_digest", h.config_digest}};
  j["kind"] = h.kind ? nlohmann::json(to_string(*h.kind)) : nlohmann::json(nullptr);
  return j;
}

Hyperplane hyperplane_from_json(const nlohmann::json& j) {
  Hyperplane h;
  h.normal = json_util::to_vector(j.at("normal"));
  h.offset = j.at("offset").get<double>();
  if (j.contains("kind") && !j["kind"].is_null()) h.kind = parse_base_kind(j["kind"]);
  h.config_digest = j.value("config_digest", "");
  return h;
}

std::string TrainerConfig::digest(BaseKind kind) const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind) << ':';
  switch (kind) {
    case BaseKind::FLDA: os << flda.ridge; break;
    case BaseKind::NC: break;
    case BaseKind::LR: os << lr.lambda << ',' << lr.tolerance << ',' << lr.max_iterations; break;
    case BaseKind::SVM: os << svm.lambda << ',' << svm.steps << ',' << svm.seed; break;
    case BaseKind::MLP: os << mlp.epochs << ',' << mlp.step; break;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(os.str())));
  return buf;
}

nlohmann::json to_json(const TrainerConfig& cfg) {
  return {
      {"flda", {{"ridge", cfg.flda.ridge}}},
      {"lr",
       {{"lambda", cfg.lr.lambda},
        {"tolerance", cfg.lr.tolerance},
        {"max_iterations", cfg.lr.max_iterations}}},
      {"svm", {{"lambda", cfg.svm.lambda}, {"steps", cfg.svm.steps}, {"seed", cfg.svm.seed}}},
      {"mlp", {{"epochs", cfg.mlp.epochs}, {"step", cfg.mlp.step}}},
  };
}

TrainerConfig trainer_config_from_json(const nlohmann::json& j) {
  TrainerConfig cfg;
  if (j.contains("flda")) cfg.flda.ridge = j["flda"].value("ridge", cfg.flda.ridge);
  if (j.contains("lr")) {
    const auto& s = j["lr"];
    cfg.lr.lambda = s.value("lambda", cfg.lr.lambda);
    cfg.lr.tolerance = s.value("tolerance", cfg.lr.tolerance);
    cfg.lr.max_iterations = s.value("max_iterations", cfg.lr.max_iterations);
  }
  if (j.contains("svm")) {
    const auto& s = j["svm"];
    cfg.svm.lambda = s.value("lambda", cfg.svm.lambda);
    cfg.svm.steps = s.value("steps", cfg.svm.steps);
    cfg.svm.seed = s.value("seed", cfg.svm.seed);
  }
  if (j.contains("mlp")) {
    const auto& s = j["mlp"];
    cfg.mlp.epochs = s.value("epochs", cfg.mlp.epochs);
    cfg.mlp.step = s.value("step", cfg.mlp.step);
  }
  return cfg;
}

// ---------------------------------------------------------------------------

namespace {

void check_problem(const Eigen::MatrixXd& X, std::span<const int> y) {
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw std::invalid_argument("feature rows and label count differ");
  if (X.cols() < 1) throw std::invalid_argument("no features");
  bool pos = false, neg = false;
  for (int v : y) {
    if (v == 1) pos = true;
    else if (v == -1) neg = true;
    else throw std::invalid_argument("binary trainers expect labels in {-1, +1}");
  }
  if (!pos || !neg) throw std::invalid_argument("both classes must be present");
}

struct ClassMeans {
  Eigen::VectorXd pos, neg;
  std::size_t n_pos = 0, n_neg = 0;
};

ClassMeans class_means(const Eigen::MatrixXd& X, std::span<const int> y) {
  ClassMeans m{Eigen::VectorXd::Zero(X.cols()), Eigen::VectorXd::Zero(X.cols())};
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (y[static_cast<std::size_t>(i)] > 0) {
      m.pos += X.row(i).transpose();
      ++m.n_pos;
    } else {
      m.neg += X.row(i).transpose();
      ++m.n_neg;
    }
  }
  m.pos /= static_cast<double>(m.n_pos);
  m.neg /= static_cast<double>(m.n_neg);
  return m;
}

double softplus(double u) { return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u))); }

double sigmoid(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

}  // namespace

Hyperplane train_flda(const Eigen::MatrixXd& X, std::span<const int> y, const FldaConfig& cfg) {
  check_problem(X, y);
  const auto m = class_means(X, y);
  const Eigen::VectorXd diff = m.pos - m.neg;
  if (diff.isZero(0.0)) throw DegenerateSeparator("degenerate separator: identical class means");

  const auto d = X.cols();
  Eigen::MatrixXd scatter_pos = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd scatter_neg = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    if (y[static_cast<std::size_t>(i)] > 0) {
      const Eigen::VectorXd r = X.row(i).transpose() - m.pos;
      scatter_pos.noalias() += r * r.transpose();
    } else {
      const Eigen::VectorXd r = X.row(i).transpose() - m.neg;
      scatter_neg.noalias() += r * r.transpose();
    }
  }
  Eigen::MatrixXd within = scatter_pos + scatter_neg;
  within.diagonal().array() += cfg.ridge;
  const Eigen::VectorXd w = within.ldlt().solve(diff);
  const double c = -w.dot((m.pos + m.neg) / 2.0);
  return normalize(w, c);
}

Hyperplane train_nc(const Eigen::MatrixXd& X, std::span<const int> y) {
  check_problem(X, y);
  const auto m = class_means(X, y);
  const Eigen::VectorXd diff = m.pos - m.neg;
  if (diff.isZero(0.0)) throw DegenerateSeparator("degenerate separator: equal centroids");
  Hyperplane h;
  h.normal = diff / diff.norm();
  h.offset = -h.normal.dot((m.pos + m.neg) / 2.0);
  return h;
}

double logistic_objective(const Eigen::MatrixXd& X, std::span<const int> y,
                          const Eigen::VectorXd& w, double c, double lambda) {
  const Eigen::VectorXd z = (X * w).array() + c;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i)
    loss += softplus(-y[static_cast<std::size_t>(i)] * z(i));
  return loss / static_cast<double>(z.size()) + 0.5 * lambda * w.squaredNorm();
}

Eigen::VectorXd logistic_gradient(const Eigen::MatrixXd& X, std::span<const int> y,
                                  const Eigen::VectorXd& w, double c, double lambda) {
  const auto d = X.cols();
  const Eigen::VectorXd z = (X * w).array() + c;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(d + 1);
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double yi = y[static_cast<std::size_t>(i)];
    const double coef = -yi * sigmoid(-yi * z(i));
    g.head(d) += coef * X.row(i).transpose();
    g(d) += coef;
  }
  g /= static_cast<double>(z.size());
  g.head(d) += lambda * w;
  return g;
}

TrainResult train_lr(const Eigen::MatrixXd& X, std::span<const int> y, const LrConfig& cfg) {
  check_problem(X, y);
  const auto d = X.cols();
  const double S = static_cast<double>(X.rows());
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d + 1);

  auto objective = [&](const Eigen::VectorXd& t) {
    return logistic_objective(X, y, t.head(d), t(d), cfg.lambda);
  };

  TrainResult result;
  double loss = objective(theta);
  Eigen::VectorXd best = theta;
  double best_loss = loss;
  result.converged = false;

  std::size_t it = 0;
  for (; it < cfg.max_iterations; ++it) {
    const Eigen::VectorXd grad = logistic_gradient(X, y, theta.head(d), theta(d), cfg.lambda);
    if (grad.norm() <= cfg.tolerance) {
      result.converged = true;
      break;
    }
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d + 1, d + 1);
    const Eigen::VectorXd z = (X * theta.head(d)).array() + theta(d);
    Eigen::VectorXd xt(d + 1);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double p = sigmoid(z(i));
      xt.head(d) = X.row(i).transpose();
      xt(d) = 1.0;
      H.noalias() += (p * (1.0 - p) / S) * xt * xt.transpose();
    }
    H.diagonal().head(d).array() += cfg.lambda;
    H.diagonal().array() += 1e-12;
    Eigen::VectorXd step = H.ldlt().solve(-grad);
    if (!step.allFinite()) step = -grad;

    // Armijo backtracking keeps every Newton iterate a descent step.
    double t = 1.0;
    const double slope = grad.dot(step);
    Eigen::VectorXd candidate = theta + step;
    double cand_loss = objective(candidate);
    while (cand_loss > loss + 1e-4 * t * slope && t > 1e-12) {
      t *= 0.5;
      candidate = theta + t * step;
      cand_loss = objective(candidate);
    }
    if (!(cand_loss <= loss)) break;  // no further progress possible in double precision
    theta = candidate;
    loss = cand_loss;
    if (loss < best_loss) {
      best_loss = loss;
      best = theta;
    }
  }
  if (!result.converged) {
    // Converged to working precision even if the gradient test is not met.
    const Eigen::VectorXd grad = logistic_gradient(X, y, best.head(d), best(d), cfg.lambda);
    result.converged = grad.norm() <= cfg.tolerance;
    theta = best;
  }
  result.iterations = it;
  result.raw_weights = theta.head(d);
  result.raw_offset = theta(d);
  result.plane = normalize(result.raw_weights, result.raw_offset);
  return result;
}

TrainResult train_svm(const Eigen::MatrixXd& X, std::span<const int> y, const SvmConfig& cfg) {
  check_problem(X, y);
  if (!(cfg.lambda > 0.0)) throw std::invalid_argument("SVM lambda must be positive");
  if (cfg.steps == 0) throw std::invalid_argument("SVM needs at least one step");
  const auto d = X.cols();
  const auto S = static_cast<std::uint64_t>(X.rows());
  const double radius = 1.0 / std::sqrt(cfg.lambda);

  Rng rng(cfg.seed);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double c = 0.0;
  Eigen::VectorXd w_sum = Eigen::VectorXd::Zero(d);
  double c_sum = 0.0;
  const std::size_t average_from = cfg.steps / 2 + 1;

  // Pegasos steps 1/(lambda t) with an unpenalized offset; the returned
  // model averages the second half of the iterates.
  for (std::size_t t = 1; t <= cfg.steps; ++t) {
    const auto i = static_cast<Eigen::Index>(rng.below(S));
    const double yi = y[static_cast<std::size_t>(i)];
    const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
    const double margin = yi * (X.row(i).dot(w) + c);
    w *= 1.0 - eta * cfg.lambda;
    if (margin < 1.0) {
      w += (eta * yi) * X.row(i).transpose();
      c += eta * yi;
    }
    const double norm = w.norm();
    if (norm > radius) w *= radius / norm;
    if (t >= average_from) {
      w_sum += w;
      c_sum += c;
    }
  }
  const double count = static_cast<double>(cfg.steps - average_from + 1);
  TrainResult result;
  result.raw_weights = w_sum / count;
  result.raw_offset = c_sum / count;
  result.iterations = cfg.steps;
  result.plane = normalize(result.raw_weights, result.raw_offset);
  return result;
}

TrainResult train_mlp(const Eigen::MatrixXd& X, std::span<const int> y, const MlpConfig& cfg) {
  check_problem(X, y);
  const auto d = X.cols();
  const double S = static_cast<double>(X.rows());

  // Start on the nearest-centroid direction at small scale. The start is
  // deterministic, non-degenerate and flips sign with the labels.
  const auto m = class_means(X, y);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double c = 0.0;
  const Eigen::VectorXd diff = m.pos - m.neg;
  if (diff.norm() > 0.0) {
    w = 1e-3 * diff / diff.norm();
    c = -w.dot((m.pos + m.neg) / 2.0);
  }

  auto loss_of = [&](const Eigen::VectorXd& ww, double cc) {
    const Eigen::VectorXd z = (X * ww).array() + cc;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i)
      loss += softplus(-y[static_cast<std::size_t>(i)] * z(i));
    return loss / S;
  };

  TrainResult result;
  result.loss_history.push_back(loss_of(w, c));
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    const Eigen::VectorXd z = (X * w).array() + c;
    Eigen::VectorXd gw = Eigen::VectorXd::Zero(d);
    double gc = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      const double target = y[static_cast<std::size_t>(i)] > 0 ? 1.0 : 0.0;
      const double err = sigmoid(z(i)) - target;
      gw += err * X.row(i).transpose();
      gc += err;
    }
    w -= cfg.step * gw / S;
    c -= cfg.step * gc / S;
    result.loss_history.push_back(loss_of(w, c));
  }
  result.iterations = cfg.epochs;
  result.raw_weights = w;
  result.raw_offset = c;
  result.plane = normalize(w, c);
  return result;
}

TrainResult train_base(BaseKind kind, const Eigen::MatrixXd& X, std::span<const int> y,
                       const TrainerConfig& cfg) {
  TrainResult r;
  switch (kind) {
    case BaseKind::FLDA:
      r.plane = train_flda(X, y, cfg.flda);
      break;
    case BaseKind::NC:
      r.plane = train_nc(X, y);
      break;
    case BaseKind::LR: r = train_lr(X, y, cfg.lr); break;
    case BaseKind::SVM: r = train_svm(X, y, cfg.svm); break;
    case BaseKind::MLP: r = train_mlp(X, y, cfg.mlp); break;
  }
  if (r.raw_weights.size() == 0) {
    r.raw_weights = r.plane.normal;
    r.raw_offset = r.plane.offset;
  }
  r.plane.kind = kind;
  r.plane.config_digest = cfg.digest(kind);
  return r;
}

}  // namespace geofuse
