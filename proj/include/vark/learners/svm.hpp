#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

#include "vark/learners/common.hpp"
#include "vark/matrix.hpp"

namespace vark {

struct SvmParams {
  double c = 1.0;
  double gamma = 1.0 / 16.0;
  double epsilon = 0.05;  // epsilon-SVR tube width
  double tolerance = 1e-3;
  std::size_t max_iterations = 10000;
};

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

/// Dense RBF Gram matrix, row-major n x n.
std::vector<double> rbf_gram(const FeatureMatrix& x, double gamma);

/// Solution of  min 0.5 a'Qa + p'a  s.t.  y'a = const, 0 <= a <= C,
/// where Q[i][j] = y_i y_j K[i][j].
struct SmoSolution {
  std::vector<double> alpha;
  std::vector<double> gradient;
  double rho = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Sequential minimal optimisation with second-order working-set selection.
/// `q` is the dense row-major signed kernel matrix. Stops when the maximal
/// KKT violation drops below `tolerance` or after `max_iterations` updates.
SmoSolution solve_smo(std::span<const double> q, std::span<const double> p, std::span<const signed char> y,
                      double c, double tolerance, std::size_t max_iterations);

/// One kernel expansion f(x) = sum_i coef_i K(sv_i, x) - rho, or a constant
/// when the training problem had a single class.
class KernelMachine {
 public:
  static KernelMachine constant(double value, std::size_t width);

  /// Binary C-SVC on +1/-1 targets.
  static KernelMachine fit_binary(const FeatureMatrix& x, std::span<const signed char> y, const SvmParams& params);
  /// epsilon-SVR.
  static KernelMachine fit_regression(const FeatureMatrix& x, std::span<const double> y, const SvmParams& params);

  double decision(std::span<const double> row) const;

  bool converged() const noexcept { return converged_; }
  std::size_t iterations() const noexcept { return iterations_; }
  double rho() const noexcept { return rho_; }
  /// Per training row (alpha_i * y_i for SVC, alpha_i - alpha*_i for SVR).
  const std::vector<double>& dual_coefficients() const noexcept { return dual_; }
  std::size_t support_vector_count() const noexcept { return coef_.size(); }

  nlohmann::json to_json() const;
  static KernelMachine from_json(const nlohmann::json& j);

 private:
  void keep_support_vectors(const FeatureMatrix& x);

  double gamma_ = 1.0 / 16.0;
  double rho_ = 0.0;
  bool is_constant_ = false;
  double constant_ = 0.0;
  bool converged_ = true;
  std::size_t iterations_ = 0;
  std::size_t width_ = 0;
  FeatureMatrix sv_;
  std::vector<double> coef_;
  std::vector<double> dual_;
};

/// RBF SVM: epsilon-SVR for regression, one-vs-rest C-SVC for classification.
class SvmModel {
 public:
  static SvmModel fit_regression(const FeatureMatrix& x, std::span<const double> y, const SvmParams& params);
  static SvmModel fit_classification(const FeatureMatrix& x, std::span<const Style> labels, const SvmParams& params);

  double predict_value(std::span<const double> row) const;
  /// Scores are the four one-vs-rest decision values.
  ClassPrediction predict_class(std::span<const double> row) const;

  bool converged() const noexcept;
  const std::vector<KernelMachine>& machines() const noexcept { return machines_; }
  std::size_t width() const noexcept { return width_; }
  Mode mode() const noexcept { return mode_; }

  nlohmann::json to_json() const;
  static SvmModel from_json(const nlohmann::json& j);

 private:
  Mode mode_ = Mode::Regression;
  std::size_t width_ = 0;
  std::vector<KernelMachine> machines_;
};

}  // namespace vark
