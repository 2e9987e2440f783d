#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "vark/learners/common.hpp"
#include "vark/learners/forest.hpp"
#include "vark/learners/knn.hpp"
#include "vark/learners/mlp.hpp"
#include "vark/learners/svm.hpp"
#include "vark/learners/tree.hpp"
#include "vark/matrix.hpp"

namespace vark {

enum class AlgorithmKind { KNN, SVM_RBF, DECISION_TREE, RANDOM_FOREST, MLP };

inline constexpr std::array<AlgorithmKind, 5> kAlgorithms{AlgorithmKind::MLP, AlgorithmKind::SVM_RBF,
                                                          AlgorithmKind::KNN, AlgorithmKind::DECISION_TREE,
                                                          AlgorithmKind::RANDOM_FOREST};

/// Short report names: NN, SVM, kNN, DT, RF.
std::string_view short_name(AlgorithmKind kind) noexcept;
/// Accepts short names and enum spellings, case-insensitive.
AlgorithmKind parse_algorithm(std::string_view name);

/// Every hyperparameter a kind accepts, with its default.
const std::map<std::string, double>& default_hyperparameters(AlgorithmKind kind);

struct AlgorithmSpec {
  AlgorithmKind kind = AlgorithmKind::KNN;
  std::map<std::string, double> hyperparameters;  // fully resolved, see make()
  std::uint64_t seed = 0;

  /// Merges overrides into the defaults. Unknown names and non-finite values throw.
  static AlgorithmSpec make(AlgorithmKind kind, const std::map<std::string, double>& overrides = {},
                            std::uint64_t seed = 0);

  double get(const std::string& name) const;

  friend bool operator==(const AlgorithmSpec&, const AlgorithmSpec&) = default;
};

/// N >= 2 rows with either real targets in [0,1] or style labels.
class TrainingSet {
 public:
  static TrainingSet regression(FeatureMatrix features, std::vector<double> targets);
  static TrainingSet classification(FeatureMatrix features, std::vector<Style> labels);

  Mode mode() const noexcept { return mode_; }
  const FeatureMatrix& features() const noexcept { return features_; }
  const std::vector<double>& targets() const noexcept { return targets_; }
  const std::vector<Style>& labels() const noexcept { return labels_; }

 private:
  Mode mode_ = Mode::Regression;
  FeatureMatrix features_;
  std::vector<double> targets_;
  std::vector<Style> labels_;
};

class TrainedModel {
 public:
  using Impl = std::variant<KnnModel, SvmModel, TreeModel, ForestModel, MlpModel>;

  TrainedModel(AlgorithmSpec spec, Mode mode, Impl impl);

  const AlgorithmSpec& spec() const noexcept { return spec_; }
  Mode mode() const noexcept { return mode_; }
  std::size_t width() const;
  /// False when an iterative solver hit its cap or diverged.
  bool converged() const;
  const Impl& impl() const noexcept { return impl_; }

  /// Raw output, never clamped.
  double predict_regression(std::span<const double> row) const;
  ClassPrediction predict_classification(std::span<const double> row) const;

  static constexpr int kFormatVersion = 1;
  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);

 private:
  AlgorithmSpec spec_;
  Mode mode_;
  Impl impl_;
};

/// Deterministic in (spec, data, mode). Forests build serially unless `exec` says otherwise.
TrainedModel fit(const AlgorithmSpec& spec, const TrainingSet& data, Mode mode, Execution exec = Execution::Serial);

}  // namespace vark
