#include "vark/learners.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "vark/error.hpp"

namespace vark {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view enum_name(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::KNN: return "KNN";
    case AlgorithmKind::SVM_RBF: return "SVM_RBF";
    case AlgorithmKind::DECISION_TREE: return "DECISION_TREE";
    case AlgorithmKind::RANDOM_FOREST: return "RANDOM_FOREST";
    case AlgorithmKind::MLP: return "MLP";
  }
  return "?";
}

const std::set<std::string>& integral_names() {
  static const std::set<std::string> names{"k", "max_iterations", "min_leaf", "max_depth", "prune",
                                           "trees", "max_features", "hidden_units", "epochs"};
  return names;
}

std::size_t as_count(const AlgorithmSpec& spec, const std::string& name) {
  return static_cast<std::size_t>(spec.get(name));
}

std::string mode_name(Mode m) { return m == Mode::Regression ? "regression" : "classification"; }

}  // namespace

std::string_view short_name(AlgorithmKind kind) noexcept {
  switch (kind) {
    case AlgorithmKind::KNN: return "kNN";
    case AlgorithmKind::SVM_RBF: return "SVM";
    case AlgorithmKind::DECISION_TREE: return "DT";
    case AlgorithmKind::RANDOM_FOREST: return "RF";
    case AlgorithmKind::MLP: return "NN";
  }
  return "?";
}

AlgorithmKind parse_algorithm(std::string_view name) {
  const std::string n = lower(name);
  for (AlgorithmKind k : kAlgorithms) {
    if (n == lower(short_name(k)) || n == lower(enum_name(k))) return k;
  }
  if (n == "svm_rbf" || n == "svm") return AlgorithmKind::SVM_RBF;
  if (n == "mlp" || n == "nn") return AlgorithmKind::MLP;
  throw Error(ErrorKind::InvalidConfig, "unknown algorithm '" + std::string(name) + "'");
}

const std::map<std::string, double>& default_hyperparameters(AlgorithmKind kind) {
  static const std::map<std::string, double> knn{{"k", 0.0}};
  static const std::map<std::string, double> svm{
      {"C", 1.0}, {"gamma", 1.0 / 16.0}, {"epsilon", 0.05}, {"tolerance", 1e-3}, {"max_iterations", 10000.0}};
  static const std::map<std::string, double> tree{
      {"min_leaf", 2.0}, {"max_depth", 16.0}, {"prune", 1.0}, {"confidence", 0.25}};
  static const std::map<std::string, double> forest{
      {"trees", 100.0}, {"max_features", 4.0}, {"min_leaf", 1.0}, {"max_depth", 16.0}};
  static const std::map<std::string, double> mlp{
      {"hidden_units", 10.0}, {"learning_rate", 0.1}, {"epochs", 1000.0}, {"init_scale", 0.5}};
  switch (kind) {
    case AlgorithmKind::KNN: return knn;
    case AlgorithmKind::SVM_RBF: return svm;
    case AlgorithmKind::DECISION_TREE: return tree;
    case AlgorithmKind::RANDOM_FOREST: return forest;
    case AlgorithmKind::MLP: return mlp;
  }
  return knn;
}

AlgorithmSpec AlgorithmSpec::make(AlgorithmKind kind, const std::map<std::string, double>& overrides,
                                  std::uint64_t seed) {
  AlgorithmSpec spec{kind, default_hyperparameters(kind), seed};
  for (const auto& [name, value] : overrides) {
    auto it = spec.hyperparameters.find(name);
    if (it == spec.hyperparameters.end()) {
      throw Error(ErrorKind::UnknownHyperparameter,
                  "'" + name + "' is not a hyperparameter of " + std::string(short_name(kind)));
    }
    if (!std::isfinite(value)) throw Error(ErrorKind::InvalidConfig, "hyperparameter '" + name + "' is not finite");
    if (integral_names().count(name) && (value < 0.0 || value != std::floor(value))) {
      throw Error(ErrorKind::InvalidConfig, "hyperparameter '" + name + "' must be a non-negative integer");
    }
    it->second = value;
  }
  const auto positive = [&](const char* name) {
    if (!(spec.get(name) > 0.0)) throw Error(ErrorKind::InvalidConfig, std::string(name) + " must be positive");
  };
  switch (kind) {
    case AlgorithmKind::SVM_RBF: positive("C"); positive("gamma"); positive("tolerance"); break;
    case AlgorithmKind::DECISION_TREE: positive("confidence"); break;
    case AlgorithmKind::RANDOM_FOREST: positive("trees"); break;
    case AlgorithmKind::MLP: positive("learning_rate"); break;
    case AlgorithmKind::KNN: break;
  }
  return spec;
}

double AlgorithmSpec::get(const std::string& name) const {
  auto it = hyperparameters.find(name);
  if (it == hyperparameters.end()) throw Error(ErrorKind::UnknownHyperparameter, "no hyperparameter '" + name + "'");
  return it->second;
}

TrainingSet TrainingSet::regression(FeatureMatrix features, std::vector<double> targets) {
  if (features.rows() < 2) throw Error(ErrorKind::DegenerateData, "training set needs at least 2 rows");
  if (targets.size() != features.rows()) throw Error(ErrorKind::LengthMismatch, "targets do not match rows");
  for (double t : targets) {
    if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::InvalidConfig, "regression targets must lie in [0, 1]");
  }
  TrainingSet s;
  s.mode_ = Mode::Regression;
  s.features_ = std::move(features);
  s.targets_ = std::move(targets);
  return s;
}

TrainingSet TrainingSet::classification(FeatureMatrix features, std::vector<Style> labels) {
  if (features.rows() < 2) throw Error(ErrorKind::DegenerateData, "training set needs at least 2 rows");
  if (labels.size() != features.rows()) throw Error(ErrorKind::LengthMismatch, "labels do not match rows");
  TrainingSet s;
  s.mode_ = Mode::Classification;
  s.features_ = std::move(features);
  s.labels_ = std::move(labels);
  return s;
}

TrainedModel::TrainedModel(AlgorithmSpec spec, Mode mode, Impl impl)
    : spec_(std::move(spec)), mode_(mode), impl_(std::move(impl)) {}

std::size_t TrainedModel::width() const {
  return std::visit([](const auto& m) { return m.width(); }, impl_);
}

bool TrainedModel::converged() const {
  if (const auto* svm = std::get_if<SvmModel>(&impl_)) return svm->converged();
  if (const auto* mlp = std::get_if<MlpModel>(&impl_)) return mlp->converged();
  return true;
}

double TrainedModel::predict_regression(std::span<const double> row) const {
  if (mode_ != Mode::Regression) throw Error(ErrorKind::ModeMismatch, "model was fitted for classification");
  check_width(row, width());
  return std::visit([&](const auto& m) { return m.predict_value(row); }, impl_);
}

ClassPrediction TrainedModel::predict_classification(std::span<const double> row) const {
  if (mode_ != Mode::Classification) throw Error(ErrorKind::ModeMismatch, "model was fitted for regression");
  check_width(row, width());
  return std::visit([&](const auto& m) { return m.predict_class(row); }, impl_);
}

nlohmann::json TrainedModel::to_json() const {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["algorithm"] = std::string(enum_name(spec_.kind));
  j["hyperparameters"] = spec_.hyperparameters;
  j["seed"] = spec_.seed;
  j["mode"] = mode_name(mode_);
  j["fitted"] = std::visit([](const auto& m) { return m.to_json(); }, impl_);
  return j;
}

TrainedModel TrainedModel::from_json(const nlohmann::json& j) {
  if (j.at("format_version").get<int>() != kFormatVersion) {
    throw Error(ErrorKind::InvalidConfig, "unsupported model format version");
  }
  const auto kind = parse_algorithm(j.at("algorithm").get<std::string>());
  auto spec = AlgorithmSpec::make(kind, j.at("hyperparameters").get<std::map<std::string, double>>(),
                                  j.at("seed").get<std::uint64_t>());
  const Mode mode = j.at("mode").get<std::string>() == "regression" ? Mode::Regression : Mode::Classification;
  const auto& f = j.at("fitted");
  switch (kind) {
    case AlgorithmKind::KNN: return {spec, mode, KnnModel::from_json(f)};
    case AlgorithmKind::SVM_RBF: return {spec, mode, SvmModel::from_json(f)};
    case AlgorithmKind::DECISION_TREE: return {spec, mode, TreeModel::from_json(f)};
    case AlgorithmKind::RANDOM_FOREST: return {spec, mode, ForestModel::from_json(f)};
    case AlgorithmKind::MLP: return {spec, mode, MlpModel::from_json(f)};
  }
  throw Error(ErrorKind::InvalidConfig, "unknown algorithm");
}

TrainedModel fit(const AlgorithmSpec& spec, const TrainingSet& data, Mode mode, Execution exec) {
  if (mode != data.mode()) {
    throw Error(ErrorKind::ModeMismatch, "training set is for " + mode_name(data.mode()) + ", asked to fit " +
                                             mode_name(mode));
  }
  const auto& x = data.features();
  const bool reg = mode == Mode::Regression;
  std::vector<std::size_t> all(x.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  switch (spec.kind) {
    case AlgorithmKind::KNN: {
      const auto k = as_count(spec, "k");
      return {spec, mode,
              reg ? KnnModel::fit_regression(x, data.targets(), k) : KnnModel::fit_classification(x, data.labels(), k)};
    }
    case AlgorithmKind::SVM_RBF: {
      SvmParams p{spec.get("C"), spec.get("gamma"), spec.get("epsilon"), spec.get("tolerance"),
                  as_count(spec, "max_iterations")};
      return {spec, mode,
              reg ? SvmModel::fit_regression(x, data.targets(), p) : SvmModel::fit_classification(x, data.labels(), p)};
    }
    case AlgorithmKind::DECISION_TREE: {
      TreeParams p;
      p.min_leaf = as_count(spec, "min_leaf");
      p.max_depth = as_count(spec, "max_depth");
      p.prune = spec.get("prune") != 0.0;
      p.confidence = spec.get("confidence");
      return {spec, mode,
              reg ? TreeModel::fit_regression(x, data.targets(), all, p)
                  : TreeModel::fit_classification(x, data.labels(), all, p)};
    }
    case AlgorithmKind::RANDOM_FOREST: {
      ForestParams p;
      p.trees = as_count(spec, "trees");
      p.max_features = as_count(spec, "max_features");
      p.min_leaf = as_count(spec, "min_leaf");
      p.max_depth = as_count(spec, "max_depth");
      return {spec, mode,
              reg ? ForestModel::fit_regression(x, data.targets(), p, spec.seed, exec)
                  : ForestModel::fit_classification(x, data.labels(), p, spec.seed, exec)};
    }
    case AlgorithmKind::MLP: {
      MlpParams p{as_count(spec, "hidden_units"), spec.get("learning_rate"), as_count(spec, "epochs"),
                  spec.get("init_scale")};
      return {spec, mode,
              reg ? MlpModel::fit_regression(x, data.targets(), p, spec.seed)
                  : MlpModel::fit_classification(x, data.labels(), p, spec.seed)};
    }
  }
  throw Error(ErrorKind::InvalidConfig, "unknown algorithm");
}

}  // namespace vark
