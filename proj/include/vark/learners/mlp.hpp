#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

#include "vark/learners/common.hpp"
#include "vark/matrix.hpp"

namespace vark {

enum class HiddenActivation { Sigmoid, Identity };
enum class OutputLayer { Linear, Softmax };

struct MlpArchitecture {
  std::size_t inputs = 16;
  std::vector<std::size_t> hidden{10};
  std::size_t outputs = 1;
  HiddenActivation activation = HiddenActivation::Sigmoid;
  OutputLayer output = OutputLayer::Linear;

  /// Weights are stored layer by layer as [out][in] followed by [out] biases.
  std::size_t parameter_count() const;
};

/// Forward pass; returns the output layer (softmax probabilities when the
/// output layer is Softmax).
std::vector<double> mlp_forward(const MlpArchitecture& arch, std::span<const double> params,
                                std::span<const double> row);

/// Mean loss over the batch and its analytic gradient w.r.t. every parameter.
/// Linear outputs use mean squared error summed over outputs,
/// softmax outputs use cross-entropy; `targets` is rows x outputs (one-hot for softmax).
double mlp_loss_and_gradient(const MlpArchitecture& arch, std::span<const double> params, const FeatureMatrix& x,
                             const FeatureMatrix& targets, std::span<double> gradient);

struct MlpParams {
  std::size_t hidden_units = 10;
  double learning_rate = 0.1;
  std::size_t epochs = 1000;
  double init_scale = 0.5;
};

/// Multilayer perceptron trained by full-batch gradient descent.
class MlpModel {
 public:
  static MlpModel fit_regression(const FeatureMatrix& x, std::span<const double> y, const MlpParams& params,
                                 std::uint64_t seed);
  static MlpModel fit_classification(const FeatureMatrix& x, std::span<const Style> labels, const MlpParams& params,
                                     std::uint64_t seed);

  double predict_value(std::span<const double> row) const;
  ClassPrediction predict_class(std::span<const double> row) const;

  const MlpArchitecture& architecture() const noexcept { return arch_; }
  const std::vector<double>& parameters() const noexcept { return params_; }
  double final_loss() const noexcept { return final_loss_; }
  /// False when training produced a non-finite loss.
  bool converged() const noexcept { return converged_; }
  std::size_t width() const noexcept { return arch_.inputs; }
  Mode mode() const noexcept { return mode_; }

  nlohmann::json to_json() const;
  static MlpModel from_json(const nlohmann::json& j);

 private:
  static MlpModel train(const FeatureMatrix& x, const FeatureMatrix& targets, MlpArchitecture arch,
                        const MlpParams& params, std::uint64_t seed, Mode mode);

  Mode mode_ = Mode::Regression;
  MlpArchitecture arch_;
  std::vector<double> params_;
  double final_loss_ = 0.0;
  bool converged_ = true;
};

}  // namespace vark
