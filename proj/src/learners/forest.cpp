#include "vark/learners/forest.hpp"

#include <exception>

#include "vark/error.hpp"
#include "vark/rng.hpp"

namespace vark {

template <typename FitTree>
ForestModel ForestModel::build(std::size_t n_rows, std::size_t width, const ForestParams& params, std::uint64_t seed,
                               Execution exec, Mode mode, FitTree&& fit_tree) {
  if (params.trees == 0) throw Error(ErrorKind::InvalidConfig, "forest needs at least one tree");
  ForestModel forest;
  forest.mode_ = mode;
  forest.width_ = width;
  forest.trees_.resize(params.trees);

  TreeParams tp;
  tp.min_leaf = params.min_leaf;
  tp.max_depth = params.max_depth;
  tp.prune = false;
  tp.max_features = params.max_features;

  const auto n_trees = static_cast<std::ptrdiff_t>(params.trees);
  auto grow_one = [&](std::ptrdiff_t t) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
    std::vector<std::size_t> sample(n_rows);
    for (auto& s : sample) s = rng.below(n_rows);
    forest.trees_[static_cast<std::size_t>(t)] = fit_tree(sample, tp, rng);
  };

  if (exec == Execution::Parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < n_trees; ++t) {
      try {
        grow_one(t);
      } catch (...) {
#pragma omp critical(vark_forest_failure)
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (std::ptrdiff_t t = 0; t < n_trees; ++t) grow_one(t);
  }
  return forest;
}

ForestModel ForestModel::fit_regression(const FeatureMatrix& x, std::span<const double> y, const ForestParams& params,
                                        std::uint64_t seed, Execution exec) {
  return build(x.rows(), x.cols(), params, seed, exec, Mode::Regression,
               [&](std::span<const std::size_t> sample, const TreeParams& tp, Rng& rng) {
                 return TreeModel::fit_regression(x, y, sample, tp, &rng);
               });
}

ForestModel ForestModel::fit_classification(const FeatureMatrix& x, std::span<const Style> labels,
                                            const ForestParams& params, std::uint64_t seed, Execution exec) {
  return build(x.rows(), x.cols(), params, seed, exec, Mode::Classification,
               [&](std::span<const std::size_t> sample, const TreeParams& tp, Rng& rng) {
                 return TreeModel::fit_classification(x, labels, sample, tp, &rng);
               });
}

double ForestModel::predict_value(std::span<const double> row) const {
  if (mode_ != Mode::Regression) throw Error(ErrorKind::ModeMismatch, "forest was fitted for classification");
  check_width(row, width_);
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict_value(row);
  return sum / static_cast<double>(trees_.size());
}

ClassPrediction ForestModel::predict_class(std::span<const double> row) const {
  if (mode_ != Mode::Classification) throw Error(ErrorKind::ModeMismatch, "forest was fitted for regression");
  check_width(row, width_);
  std::array<double, kNumStyles> votes{};
  for (const auto& t : trees_) votes[index(t.leaf_label(row))] += 1.0;
  for (double& v : votes) v /= static_cast<double>(trees_.size());
  return from_scores(votes);
}

nlohmann::json ForestModel::to_json() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : trees_) trees.push_back(t.to_json());
  return {{"mode", mode_ == Mode::Regression ? "regression" : "classification"},
          {"width", width_},
          {"trees", std::move(trees)}};
}

ForestModel ForestModel::from_json(const nlohmann::json& j) {
  ForestModel f;
  f.mode_ = j.at("mode").get<std::string>() == "regression" ? Mode::Regression : Mode::Classification;
  f.width_ = j.at("width").get<std::size_t>();
  for (const auto& t : j.at("trees")) f.trees_.push_back(TreeModel::from_json(t));
  if (f.trees_.empty()) throw Error(ErrorKind::InvalidConfig, "forest document has no trees");
  return f;
}

}  // namespace vark
