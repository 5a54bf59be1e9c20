#include "geofuse/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "geofuse/random.hpp"

namespace geofuse {

namespace {

std::string trim(std::string_view s) {
  auto b = s.begin();
  auto e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Splits on commas outside of quotes and trims each cell.
std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  char quote = 0;
  for (char c : line) {
    if (quote) {
      cur += c;
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
      cur += c;
    } else if (c == ',') {
      out.push_back(unquote(trim(cur)));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(unquote(trim(cur)));
  return out;
}

bool parses_as_number(const std::string& s, double& value) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  value = std::strtod(begin, &end);
  return end == begin + s.size();
}

double parse_feature(const std::string& cell, std::size_t row, std::size_t col) {
  double v = 0.0;
  if (!parses_as_number(cell, v) || !std::isfinite(v)) {
    throw DataError(DataErrorKind::NonNumericFeature,
                    "non-numeric feature '" + cell + "' at row " + std::to_string(row + 1) +
                        ", column " + std::to_string(col + 1));
  }
  return v;
}

struct LabelMap {
  std::map<std::string, int> index;
  std::vector<std::string> names;

  int operator()(const std::string& raw) {
    auto [it, inserted] = index.emplace(raw, static_cast<int>(names.size()));
    if (inserted) names.push_back(raw);
    return it->second;
  }
};

Dataset assemble(const std::vector<std::vector<double>>& rows, std::vector<int> labels,
                 std::vector<std::string> attributes, std::vector<std::string> classes,
                 std::string name) {
  if (rows.empty()) throw DataError(DataErrorKind::EmptyFile, "empty file: no data rows");
  if (classes.size() < 2)
    throw DataError(DataErrorKind::SingleClass, "single-class dataset: need at least 2 classes");
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(attributes.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < attributes.size(); ++j)
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return Dataset(std::move(X), std::move(labels), std::move(attributes), std::move(classes),
                 std::move(name));
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(DataErrorKind::MissingFile, "cannot open file: " + path.string());
  return in;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(Eigen::MatrixXd features, std::vector<int> labels,
                 std::vector<std::string> attribute_names,
                 std::vector<std::string> class_names, std::string name)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      attribute_names_(std::move(attribute_names)),
      class_names_(std::move(class_names)),
      name_(std::move(name)) {
  auto fail = [](const std::string& msg) {
    throw DataError(DataErrorKind::InvalidArgument, "invalid dataset: " + msg);
  };
  if (labels_.empty()) throw DataError(DataErrorKind::EmptyFile, "invalid dataset: no instances");
  if (features_.cols() < 1) fail("no features");
  if (static_cast<std::size_t>(features_.rows()) != labels_.size())
    fail("feature rows and label count differ");
  if (attribute_names_.size() != static_cast<std::size_t>(features_.cols()))
    fail("attribute name count differs from feature count");
  if (class_names_.size() < 2)
    throw DataError(DataErrorKind::SingleClass, "single-class dataset: need at least 2 classes");
  if (!features_.allFinite()) fail("non-finite feature value");
  std::vector<std::size_t> counts(class_names_.size(), 0);
  for (int y : labels_) {
    if (y < 0 || static_cast<std::size_t>(y) >= class_names_.size())
      fail("label " + std::to_string(y) + " out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] == 0) fail("class '" + class_names_[c] + "' has no instances");
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(n_classes(), 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::vector<int> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = features_.row(static_cast<Eigen::Index>(rows.at(i)));
    y[i] = labels_[rows[i]];
  }
  return Dataset(std::move(X), std::move(y), attribute_names_, class_names_, name_);
}

Dataset Dataset::with_features(Eigen::MatrixXd features,
                               std::vector<std::string> attribute_names) const {
  return Dataset(std::move(features), labels_, std::move(attribute_names), class_names_, name_);
}

Dataset Dataset::renamed(std::string name) const {
  Dataset copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

DatasetMeta compute_meta(const Dataset& ds) {
  const auto counts = ds.class_counts();
  const double largest = static_cast<double>(*std::max_element(counts.begin(), counts.end()));
  double sum = 0.0;
  for (auto c : counts) sum += largest / static_cast<double>(c);
  return {ds.size(), ds.dim(), ds.n_classes(), sum / static_cast<double>(counts.size())};
}

// ---------------------------------------------------------------------------
// CSV

Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column) {
  auto in = open_or_throw(path);
  std::vector<std::vector<std::string>> records;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    records.push_back(split_fields(line));
  }
  if (records.empty()) throw DataError(DataErrorKind::EmptyFile, "empty file: " + path.string());

  const std::size_t width = records.front().size();
  if (width < 2)
    throw DataError(DataErrorKind::MalformedHeader,
                    "CSV needs at least one feature column and a label column");

  std::size_t label_idx = 0;
  bool has_header = false;
  if (const auto* name = std::get_if<std::string>(&label_column)) {
    const auto& head = records.front();
    auto it = std::find(head.begin(), head.end(), *name);
    if (it == head.end())
      throw DataError(DataErrorKind::MalformedHeader, "label column '" + *name + "' not in header");
    label_idx = static_cast<std::size_t>(it - head.begin());
    has_header = true;
  } else {
    int idx = std::get<int>(label_column);
    if (idx < 0) idx += static_cast<int>(width);
    if (idx < 0 || idx >= static_cast<int>(width))
      throw DataError(DataErrorKind::InvalidArgument, "label column index out of range");
    label_idx = static_cast<std::size_t>(idx);
    // A header row is one where no feature cell looks like a number.
    has_header = true;
    double dummy = 0.0;
    for (std::size_t j = 0; j < width; ++j)
      if (j != label_idx && parses_as_number(records.front()[j], dummy)) has_header = false;
  }

  std::vector<std::string> attributes;
  for (std::size_t j = 0; j < width; ++j) {
    if (j == label_idx) continue;
    attributes.push_back(has_header ? records.front()[j] : "x" + std::to_string(attributes.size() + 1));
  }

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  LabelMap classes;
  for (std::size_t r = has_header ? 1 : 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != width)
      throw DataError(DataErrorKind::MalformedRow, "row " + std::to_string(r + 1) + " has " +
                                                       std::to_string(rec.size()) +
                                                       " fields, expected " + std::to_string(width));
    std::vector<double> row;
    row.reserve(width - 1);
    for (std::size_t j = 0; j < width; ++j)
      if (j != label_idx) row.push_back(parse_feature(rec[j], r, j));
    rows.push_back(std::move(row));
    labels.push_back(classes(rec[label_idx]));
  }
  return assemble(rows, std::move(labels), std::move(attributes), std::move(classes.names),
                  path.stem().string());
}

void write_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError(DataErrorKind::MissingFile, "cannot write file: " + path.string());
  for (const auto& a : ds.attribute_names()) out << a << ',';
  out << "class\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  const auto& X = ds.features();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) out << X(i, j) << ',';
    out << ds.class_names()[static_cast<std::size_t>(ds.labels()[static_cast<std::size_t>(i)])]
        << '\n';
  }
  if (!out) throw DataError(DataErrorKind::MissingFile, "write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// ARFF

namespace {

struct ArffAttribute {
  std::string name;
  bool nominal = false;
  std::vector<std::string> values;
};

// Pulls a possibly quoted token off the front of `s`.
std::string take_token(std::string& s) {
  s = trim(s);
  if (s.empty()) return {};
  std::size_t end = 0;
  if (s.front() == '\'' || s.front() == '"') {
    end = s.find(s.front(), 1);
    if (end == std::string::npos)
      throw DataError(DataErrorKind::MalformedHeader, "unterminated quote in: " + s);
    ++end;
  } else {
    while (end < s.size() && !std::isspace(static_cast<unsigned char>(s[end])) && s[end] != '{')
      ++end;
  }
  std::string tok = s.substr(0, end);
  s = s.substr(end);
  return unquote(tok);
}

std::string strip_comment(const std::string& line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '%') {
      return line.substr(0, i);
    }
  }
  return line;
}

ArffAttribute parse_attribute(std::string rest) {
  ArffAttribute attr;
  attr.name = take_token(rest);
  if (attr.name.empty()) throw DataError(DataErrorKind::MalformedHeader, "attribute without name");
  rest = trim(rest);
  if (rest.empty())
    throw DataError(DataErrorKind::MalformedHeader, "attribute '" + attr.name + "' has no type");
  if (rest.front() == '{') {
    const auto close = rest.rfind('}');
    if (close == std::string::npos)
      throw DataError(DataErrorKind::MalformedHeader,
                      "unterminated nominal list for '" + attr.name + "'");
    attr.nominal = true;
    attr.values = split_fields(rest.substr(1, close - 1));
    return attr;
  }
  std::string type = lower(take_token(rest));
  if (type == "numeric" || type == "real" || type == "integer") return attr;
  throw DataError(DataErrorKind::UnsupportedAttribute,
                  "unsupported attribute type '" + type + "' for '" + attr.name + "'");
}

}  // namespace

Dataset load_arff(const std::filesystem::path& path, const std::string& class_attribute) {
  auto in = open_or_throw(path);
  std::vector<ArffAttribute> attrs;
  std::string output_attribute;
  bool in_data = false;
  std::vector<std::vector<std::string>> records;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (in_data) {
      if (line.front() == '{')
        throw DataError(DataErrorKind::UnsupportedAttribute, "sparse ARFF rows are not supported");
      records.push_back(split_fields(line));
      continue;
    }
    if (line.front() != '@')
      throw DataError(DataErrorKind::MalformedHeader,
                      "unexpected line " + std::to_string(line_no) + " before @data");
    std::string rest = line.substr(1);
    const std::string keyword = lower(take_token(rest));
    if (keyword == "relation") {
      continue;
    } else if (keyword == "attribute") {
      attrs.push_back(parse_attribute(rest));
    } else if (keyword == "data") {
      in_data = true;
    } else if (keyword == "outputs" || keyword == "output") {
      // KEEL headers name the class attribute here.
      output_attribute = trim(rest);
    } else if (keyword == "inputs" || keyword == "input") {
      continue;
    } else {
      throw DataError(DataErrorKind::MalformedHeader, "unknown header keyword '@" + keyword + "'");
    }
  }
  if (!in_data) throw DataError(DataErrorKind::MalformedHeader, "missing @data section");
  if (attrs.size() < 2)
    throw DataError(DataErrorKind::MalformedHeader, "need at least one feature and a class attribute");

  std::string wanted = class_attribute.empty() ? output_attribute : class_attribute;
  std::size_t class_idx = attrs.size() - 1;
  if (!wanted.empty()) {
    auto it = std::find_if(attrs.begin(), attrs.end(),
                           [&](const ArffAttribute& a) { return a.name == wanted; });
    if (it == attrs.end())
      throw DataError(DataErrorKind::MalformedHeader, "class attribute '" + wanted + "' not declared");
    class_idx = static_cast<std::size_t>(it - attrs.begin());
  }
  std::vector<std::string> attribute_names;
  for (std::size_t j = 0; j < attrs.size(); ++j) {
    if (j == class_idx) {
      if (!attrs[j].nominal)
        throw DataError(DataErrorKind::UnsupportedAttribute,
                        "unsupported attribute type: class attribute '" + attrs[j].name +
                            "' must be nominal");
      continue;
    }
    if (attrs[j].nominal)
      throw DataError(DataErrorKind::UnsupportedAttribute,
                      "unsupported attribute type: nominal feature '" + attrs[j].name + "'");
    attribute_names.push_back(attrs[j].name);
  }

  const auto& declared = attrs[class_idx].values;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  LabelMap classes;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != attrs.size())
      throw DataError(DataErrorKind::MalformedRow, "data row " + std::to_string(r + 1) + " has " +
                                                       std::to_string(rec.size()) +
                                                       " values, expected " +
                                                       std::to_string(attrs.size()));
    std::vector<double> row;
    for (std::size_t j = 0; j < rec.size(); ++j)
      if (j != class_idx) row.push_back(parse_feature(rec[j], r, j));
    const std::string& label = rec[class_idx];
    if (std::find(declared.begin(), declared.end(), label) == declared.end())
      throw DataError(DataErrorKind::MalformedRow, "class value '" + label + "' at data row " +
                                                       std::to_string(r + 1) + " not declared");
    rows.push_back(std::move(row));
    labels.push_back(classes(label));
  }
  return assemble(rows, std::move(labels), std::move(attribute_names), std::move(classes.names),
                  path.stem().string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  const auto ext = lower(path.extension().string());
  if (ext == ".arff" || ext == ".dat") return load_arff(path);
  return load_csv(path);
}

// ---------------------------------------------------------------------------
// Folds

FoldPlan::FoldPlan(std::size_t k, std::vector<std::size_t> assignments, std::uint64_t seed)
    : k_(k), assignments_(std::move(assignments)), seed_(seed) {
  if (k_ < 2) throw DataError(DataErrorKind::InvalidArgument, "fold count must be at least 2");
  std::vector<std::size_t> sizes(k_, 0);
  for (auto f : assignments_) {
    if (f >= k_) throw DataError(DataErrorKind::InvalidArgument, "fold index out of range");
    ++sizes[f];
  }
  for (std::size_t f = 0; f < k_; ++f)
    if (sizes[f] == 0)
      throw DataError(DataErrorKind::InvalidArgument, "fold " + std::to_string(f) + " is empty");
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments_.size(); ++i)
    if (assignments_[i] != fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments_.size(); ++i)
    if (assignments_[i] == fold) out.push_back(i);
  return out;
}

FoldPlan stratified_kfold(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw DataError(DataErrorKind::InvalidArgument, "fold count must be at least 2");
  if (k > ds.size())
    throw DataError(DataErrorKind::InvalidArgument,
                    "fold count " + std::to_string(k) + " exceeds instance count " +
                        std::to_string(ds.size()));
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> by_class(ds.n_classes());
  for (std::size_t i = 0; i < ds.size(); ++i)
    by_class[static_cast<std::size_t>(ds.labels()[i])].push_back(i);

  // Dealing each class round-robin from a running offset keeps per-class
  // counts within one of each other and total fold sizes balanced too.
  std::vector<std::size_t> assignment(ds.size(), 0);
  std::size_t offset = 0;
  for (auto& members : by_class) {
    rng.shuffle(members);
    for (std::size_t j = 0; j < members.size(); ++j) assignment[members[j]] = (offset + j) % k;
    offset = (offset + members.size()) % k;
  }
  return FoldPlan(k, std::move(assignment), seed);
}

// ---------------------------------------------------------------------------
// Synthetic generators

SyntheticKind parse_synthetic_kind(const std::string& name) {
  const auto n = lower(name);
  if (n == "two-gaussians") return SyntheticKind::TwoGaussians;
  if (n == "banana") return SyntheticKind::Banana;
  if (n == "spirals") return SyntheticKind::Spirals;
  if (n == "linear") return SyntheticKind::Linear;
  if (n == "blobs") return SyntheticKind::Blobs;
  throw DataError(DataErrorKind::InvalidArgument, "unknown synthetic kind '" + name + "'");
}

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::TwoGaussians: return "two-gaussians";
    case SyntheticKind::Banana: return "banana";
    case SyntheticKind::Spirals: return "spirals";
    case SyntheticKind::Linear: return "linear";
    case SyntheticKind::Blobs: return "blobs";
  }
  return "unknown";
}

namespace {

// Class sizes decaying geometrically from the first (majority) class down to
// a last class `ratio` times smaller.
std::vector<std::size_t> class_sizes(std::size_t n, std::size_t classes, double ratio) {
  std::vector<double> w(classes);
  for (std::size_t c = 0; c < classes; ++c)
    w[c] = classes == 1 ? 1.0
                        : std::pow(ratio, -static_cast<double>(c) / static_cast<double>(classes - 1));
  double total = 0.0;
  for (double v : w) total += v;
  std::vector<std::size_t> sizes(classes);
  std::size_t assigned = 0;
  for (std::size_t c = 1; c < classes; ++c) {
    sizes[c] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n * w[c] / total)));
    assigned += sizes[c];
  }
  if (assigned >= n)
    throw DataError(DataErrorKind::InvalidArgument, "too few instances for the requested classes");
  sizes[0] = n - assigned;
  return sizes;
}

std::vector<int> shuffled_labels(const std::vector<std::size_t>& sizes, Rng& rng) {
  std::vector<int> labels;
  for (std::size_t c = 0; c < sizes.size(); ++c)
    labels.insert(labels.end(), sizes[c], static_cast<int>(c));
  rng.shuffle(labels);
  return labels;
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t count) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace

Dataset generate_synthetic(SyntheticKind kind, std::size_t n, double noise, std::uint64_t seed,
                           const SyntheticOptions& options) {
  if (n < 4) throw DataError(DataErrorKind::InvalidArgument, "synthetic sets need n >= 4");
  if (!(noise >= 0.0) || !std::isfinite(noise))
    throw DataError(DataErrorKind::InvalidArgument, "noise must be a finite value >= 0");
  if (!(options.imbalance >= 1.0))
    throw DataError(DataErrorKind::InvalidArgument, "imbalance ratio must be >= 1");

  constexpr double pi = std::numbers::pi;
  Rng rng(seed);
  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), 2);
  std::vector<int> labels;
  std::size_t classes = 2;

  switch (kind) {
    case SyntheticKind::TwoGaussians: {
      labels = shuffled_labels(class_sizes(n, 2, options.imbalance), rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double centre = labels[i] == 0 ? 0.0 : 3.0;
        X(static_cast<Eigen::Index>(i), 0) = centre + noise * rng.normal();
        X(static_cast<Eigen::Index>(i), 1) = centre + noise * rng.normal();
      }
      break;
    }
    case SyntheticKind::Banana: {
      labels = shuffled_labels(class_sizes(n, 2, options.imbalance), rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double theta = rng.uniform(0.0, pi);
        const double r = 1.0 + noise * rng.normal();
        const auto row = static_cast<Eigen::Index>(i);
        if (labels[i] == 0) {
          X(row, 0) = r * std::cos(theta);
          X(row, 1) = r * std::sin(theta);
        } else {
          X(row, 0) = 1.0 - r * std::cos(theta);
          X(row, 1) = 0.5 - r * std::sin(theta);
        }
      }
      break;
    }
    case SyntheticKind::Spirals: {
      labels = shuffled_labels(class_sizes(n, 2, options.imbalance), rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double theta = rng.uniform(0.5 * pi, 3.0 * pi);
        const double r = theta / (3.0 * pi);
        const double sign = labels[i] == 0 ? 1.0 : -1.0;
        const auto row = static_cast<Eigen::Index>(i);
        X(row, 0) = sign * r * std::cos(theta) + noise * rng.normal();
        X(row, 1) = sign * r * std::sin(theta) + noise * rng.normal();
      }
      break;
    }
    case SyntheticKind::Linear: {
      const double phi = rng.uniform(0.0, 2.0 * pi);
      const double nx = std::cos(phi), ny = std::sin(phi);
      const bool balanced = options.imbalance == 1.0;
      std::vector<std::size_t> quota = class_sizes(n, 2, options.imbalance);
      std::vector<std::size_t> filled(2, 0);
      std::size_t row = 0;
      while (row < n) {
        const double x = rng.uniform(), y = rng.uniform();
        const double score = nx * (x - 0.5) + ny * (y - 0.5) + noise * rng.normal();
        const int label = score >= 0.0 ? 0 : 1;
        if (!balanced) {
          auto& f = filled[static_cast<std::size_t>(label)];
          if (f >= quota[static_cast<std::size_t>(label)]) continue;
          ++f;
        }
        X(static_cast<Eigen::Index>(row), 0) = x;
        X(static_cast<Eigen::Index>(row), 1) = y;
        labels.push_back(label);
        ++row;
      }
      break;
    }
    case SyntheticKind::Blobs: {
      classes = options.classes;
      if (classes < 2) throw DataError(DataErrorKind::InvalidArgument, "blobs need >= 2 classes");
      labels = shuffled_labels(class_sizes(n, classes, options.imbalance), rng);
      for (std::size_t i = 0; i < n; ++i) {
        const double angle = 2.0 * pi * labels[i] / static_cast<double>(classes);
        X(static_cast<Eigen::Index>(i), 0) = 3.0 * std::cos(angle) + noise * rng.normal();
        X(static_cast<Eigen::Index>(i), 1) = 3.0 * std::sin(angle) + noise * rng.normal();
      }
      break;
    }
  }
  return Dataset(std::move(X), std::move(labels), {"x1", "x2"}, numbered("c", classes),
                 to_string(kind));
}

Dataset generate_synthetic(const std::string& kind, std::size_t n, double noise,
                           std::uint64_t seed, const SyntheticOptions& options) {
  return generate_synthetic(parse_synthetic_kind(kind), n, noise, seed, options);
}

}  // namespace geofuse
