#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

#include "vark/learners/tree.hpp"

namespace vark {

struct ForestParams {
  std::size_t trees = 100;
  std::size_t max_features = 4;  // ceil(sqrt(16))
  std::size_t min_leaf = 1;
  std::size_t max_depth = 16;
};

enum class Execution { Serial, Parallel };

/// Bagged trees. Tree t draws its bootstrap sample and feature subsets from
/// the substream derive_seed(seed, {t}), so serial and OpenMP builds match.
class ForestModel {
 public:
  static ForestModel fit_regression(const FeatureMatrix& x, std::span<const double> y, const ForestParams& params,
                                    std::uint64_t seed, Execution exec = Execution::Parallel);
  static ForestModel fit_classification(const FeatureMatrix& x, std::span<const Style> labels,
                                        const ForestParams& params, std::uint64_t seed,
                                        Execution exec = Execution::Parallel);

  /// Mean of the tree outputs.
  double predict_value(std::span<const double> row) const;
  /// Scores are the fraction of trees voting for each style.
  ClassPrediction predict_class(std::span<const double> row) const;

  const std::vector<TreeModel>& trees() const noexcept { return trees_; }
  std::size_t width() const noexcept { return width_; }
  Mode mode() const noexcept { return mode_; }

  nlohmann::json to_json() const;
  static ForestModel from_json(const nlohmann::json& j);

 private:
  template <typename FitTree>
  static ForestModel build(std::size_t n_rows, std::size_t width, const ForestParams& params, std::uint64_t seed,
                           Execution exec, Mode mode, FitTree&& fit_tree);

  Mode mode_ = Mode::Regression;
  std::size_t width_ = 0;
  std::vector<TreeModel> trees_;
};

}  // namespace vark
