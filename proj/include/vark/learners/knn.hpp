#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

#include "vark/learners/common.hpp"
#include "vark/matrix.hpp"

namespace vark {

/// k = round(sqrt(n)), at least 1 and at most n.
std::size_t default_k(std::size_t n_train) noexcept;

/// Brute-force k-nearest-neighbours over Euclidean distance. Equidistant
/// neighbours are ordered by training index.
class KnnModel {
 public:
  /// k == 0 selects default_k(n).
  static KnnModel fit_regression(FeatureMatrix x, std::vector<double> y, std::size_t k);
  static KnnModel fit_classification(FeatureMatrix x, std::vector<Style> labels, std::size_t k);

  /// Training indices of the k nearest rows, nearest first.
  std::vector<std::size_t> neighbors(std::span<const double> row) const;

  double predict_value(std::span<const double> row) const;
  ClassPrediction predict_class(std::span<const double> row) const;

  std::size_t k() const noexcept { return k_; }
  std::size_t width() const noexcept { return x_.cols(); }
  Mode mode() const noexcept { return mode_; }

  nlohmann::json to_json() const;
  static KnnModel from_json(const nlohmann::json& j);

 private:
  Mode mode_ = Mode::Regression;
  std::size_t k_ = 1;
  FeatureMatrix x_;
  std::vector<double> y_;
  std::vector<Style> labels_;
};

}  // namespace vark
