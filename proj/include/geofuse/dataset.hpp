#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace geofuse {

/// Failure categories raised while reading or generating datasets.
enum class DataErrorKind {
  MissingFile,
  EmptyFile,
  NonNumericFeature,
  SingleClass,
  MalformedHeader,
  MalformedRow,
  UnsupportedAttribute,
  InvalidArgument,
};

class DataError : public std::runtime_error {
 public:
  DataError(DataErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  DataErrorKind kind() const noexcept { return kind_; }

 private:
  DataErrorKind kind_;
};

/// Immutable feature matrix (rows are instances) with class indices in
/// [0, C). The constructor enforces every structural invariant, so a
/// Dataset that exists is always valid.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd features, std::vector<int> labels,
          std::vector<std::string> attribute_names,
          std::vector<std::string> class_names, std::string name = {});

  const Eigen::MatrixXd& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& attribute_names() const noexcept { return attribute_names_; }
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  const std::string& name() const noexcept { return name_; }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(features_.cols()); }
  std::size_t n_classes() const noexcept { return class_names_.size(); }

  std::vector<std::size_t> class_counts() const;

  /// Rows selected by `rows`, keeping the full class roster. Throws if the
  /// selection leaves a class empty.
  Dataset subset(const std::vector<std::size_t>& rows) const;

  /// Same labels and names with a replacement feature matrix.
  Dataset with_features(Eigen::MatrixXd features,
                        std::vector<std::string> attribute_names) const;

  Dataset renamed(std::string name) const;

 private:
  Eigen::MatrixXd features_;
  std::vector<int> labels_;
  std::vector<std::string> attribute_names_;
  std::vector<std::string> class_names_;
  std::string name_;
};

struct DatasetMeta {
  std::size_t n_instances = 0;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  double imbalance_ratio = 1.0;
};

/// Mean over classes of (largest class size / class size).
DatasetMeta compute_meta(const Dataset& ds);

// ---------------------------------------------------------------------------
// Ingestion

/// Label column given by header name or by zero-based index; negative
/// indices count from the end (-1 is the last column).
using ColumnRef = std::variant<std::string, int>;

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column = -1);

/// Parses the numeric/nominal ARFF subset. The class attribute defaults to
/// the last declared attribute.
Dataset load_arff(const std::filesystem::path& path, const std::string& class_attribute = {});

/// Picks the loader from the file extension (.arff/.dat are ARFF).
Dataset load_dataset(const std::filesystem::path& path);

/// Writes a header row and one line per instance; values use 17 significant
/// digits so a reload is bit-exact.
void write_csv(const Dataset& ds, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Fold splitting

class FoldPlan {
 public:
  FoldPlan(std::size_t k, std::vector<std::size_t> assignments, std::uint64_t seed);

  std::size_t k() const noexcept { return k_; }
  const std::vector<std::size_t>& assignments() const noexcept { return assignments_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> test_indices(std::size_t fold) const;

 private:
  std::size_t k_;
  std::vector<std::size_t> assignments_;
  std::uint64_t seed_;
};

FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Synthetic data

enum class SyntheticKind { TwoGaussians, Banana, Spirals, Linear, Blobs };

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string to_string(SyntheticKind kind);

struct SyntheticOptions {
  /// Majority-to-minority size ratio for two-class kinds; 1 is balanced.
  double imbalance = 1.0;
  /// Class count for `Blobs` (ignored elsewhere).
  std::size_t classes = 3;
};

/// Two-dimensional generators:
///  - two-gaussians: isotropic clouds around (0,0) and (3,3), stddev `noise`
///  - banana: two interleaved unit arcs with radial noise
///  - spirals: interleaved Archimedean spirals with positional noise
///  - linear: uniform unit square split by a seeded line through the center;
///    `noise` jitters the signed distance before labelling
///  - blobs: `classes` clouds on a circle of radius 3
Dataset generate_synthetic(SyntheticKind kind, std::size_t n, double noise,
                           std::uint64_t seed, const SyntheticOptions& options = {});

Dataset generate_synthetic(const std::string& kind, std::size_t n, double noise,
                           std::uint64_t seed, const SyntheticOptions& options = {});

}  // namespace geofuse
