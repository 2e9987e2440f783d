#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

#include "vark/learners/common.hpp"
#include "vark/matrix.hpp"
#include "vark/rng.hpp"

namespace vark {

struct TreeParams {
  std::size_t min_leaf = 2;   // minimum samples on each side of a split
  std::size_t max_depth = 16;
  bool prune = true;          // C4.5 error-based pruning, classification only
  double confidence = 0.25;
  std::size_t max_features = 0;  // 0 = consider every feature at every node
};

/// Candidate split of one node.
struct SplitCandidate {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;        // information gain (classification) or SSE reduction (regression)
  double gain_ratio = 0.0;  // classification only
};

/// Class-count entropy in bits.
double entropy(std::span<const double> counts);

/// Best gain-ratio split for one feature over the given sample, or nullopt if
/// no threshold leaves min_leaf samples on both sides with positive gain.
std::optional<SplitCandidate> best_classification_split(const FeatureMatrix& x, std::span<const Style> labels,
                                                        std::span<const std::size_t> sample, std::size_t feature,
                                                        std::size_t min_leaf);

std::optional<SplitCandidate> best_regression_split(const FeatureMatrix& x, std::span<const double> y,
                                                    std::span<const std::size_t> sample, std::size_t feature,
                                                    std::size_t min_leaf);

/// C4.5 gain-ratio choice among per-feature candidates: only splits whose gain
/// reaches the candidates' average gain compete; ties keep the earlier entry.
std::optional<SplitCandidate> choose_gain_ratio(std::span<const SplitCandidate> candidates);

/// Upper confidence bound on the number of errors among n cases of which
/// `errors` were misclassified (C4.5's pessimistic estimate, minus `errors`).
double pessimistic_extra_errors(double n, double errors, double confidence);

class TreeModel {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;     // x[feature] <= threshold
    int right = -1;
    double value = 0.0;                          // regression leaf output
    std::array<double, kNumStyles> counts{};     // classification class counts
    double n = 0.0;
  };

  /// `sample` lists training row indices and may repeat rows (bootstrap).
  /// `rng` is required when params.max_features > 0.
  static TreeModel fit_regression(const FeatureMatrix& x, std::span<const double> y,
                                  std::span<const std::size_t> sample, const TreeParams& params, Rng* rng = nullptr);
  static TreeModel fit_classification(const FeatureMatrix& x, std::span<const Style> labels,
                                      std::span<const std::size_t> sample, const TreeParams& params,
                                      Rng* rng = nullptr);

  double predict_value(std::span<const double> row) const;
  ClassPrediction predict_class(std::span<const double> row) const;
  /// Majority label at the reached leaf; used for forest voting.
  Style leaf_label(std::span<const double> row) const;

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::size_t leaf_count() const noexcept;
  std::size_t width() const noexcept { return width_; }
  Mode mode() const noexcept { return mode_; }

  nlohmann::json to_json() const;
  static TreeModel from_json(const nlohmann::json& j);

 private:
  const Node& leaf_for(std::span<const double> row) const;

  Mode mode_ = Mode::Regression;
  std::size_t width_ = 0;
  std::vector<Node> nodes_;

  friend class TreeBuilder;
};

}  // namespace vark
