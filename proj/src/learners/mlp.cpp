#include "vark/learners/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "vark/error.hpp"
#include "vark/rng.hpp"

namespace vark {
namespace {

std::vector<std::size_t> layer_sizes(const MlpArchitecture& arch) {
  std::vector<std::size_t> sizes{arch.inputs};
  sizes.insert(sizes.end(), arch.hidden.begin(), arch.hidden.end());
  sizes.push_back(arch.outputs);
  return sizes;
}

double activate(HiddenActivation act, double z) {
  return act == HiddenActivation::Sigmoid ? 1.0 / (1.0 + std::exp(-z)) : z;
}

double activation_slope(HiddenActivation act, double a) {
  return act == HiddenActivation::Sigmoid ? a * (1.0 - a) : 1.0;
}

// Activations of every layer; the last entry holds raw output pre-activations.
void forward_all(const MlpArchitecture& arch, const std::vector<std::size_t>& sizes, std::span<const double> params,
                 std::span<const double> row, std::vector<std::vector<double>>& acts) {
  acts.resize(sizes.size());
  acts[0].assign(row.begin(), row.end());
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const std::size_t in = sizes[l], out = sizes[l + 1];
    const double* w = params.data() + offset;
    const double* b = w + in * out;
    auto& next = acts[l + 1];
    next.resize(out);
    const bool is_output = l + 2 == sizes.size();
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      const double* wo = w + o * in;
      for (std::size_t i = 0; i < in; ++i) z += wo[i] * acts[l][i];
      next[o] = is_output ? z : activate(arch.activation, z);
    }
    offset += in * out + out;
  }
}

void softmax_inplace(std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

}  // namespace

std::size_t MlpArchitecture::parameter_count() const {
  const auto sizes = layer_sizes(*this);
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) count += sizes[l] * sizes[l + 1] + sizes[l + 1];
  return count;
}

std::vector<double> mlp_forward(const MlpArchitecture& arch, std::span<const double> params,
                                std::span<const double> row) {
  check_width(row, arch.inputs);
  const auto sizes = layer_sizes(arch);
  std::vector<std::vector<double>> acts;
  forward_all(arch, sizes, params, row, acts);
  auto out = acts.back();
  if (arch.output == OutputLayer::Softmax) softmax_inplace(out);
  return out;
}

double mlp_loss_and_gradient(const MlpArchitecture& arch, std::span<const double> params, const FeatureMatrix& x,
                             const FeatureMatrix& targets, std::span<double> gradient) {
  if (params.size() != arch.parameter_count() || gradient.size() != params.size()) {
    throw Error(ErrorKind::LengthMismatch, "mlp: parameter vector has the wrong size");
  }
  if (x.rows() == 0 || targets.rows() != x.rows() || targets.cols() != arch.outputs) {
    throw Error(ErrorKind::LengthMismatch, "mlp: batch and targets disagree");
  }
  const auto sizes = layer_sizes(arch);
  const std::size_t n_layers = sizes.size() - 1;
  std::vector<std::size_t> offsets(n_layers);
  for (std::size_t l = 0, off = 0; l < n_layers; ++l) {
    offsets[l] = off;
    off += sizes[l] * sizes[l + 1] + sizes[l + 1];
  }

  std::fill(gradient.begin(), gradient.end(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  double loss = 0.0;
  std::vector<std::vector<double>> acts;
  std::vector<double> delta, prev_delta;

  for (std::size_t r = 0; r < x.rows(); ++r) {
    forward_all(arch, sizes, params, x.row(r), acts);
    auto& out = acts.back();
    const auto t = targets.row(r);
    delta.assign(out.size(), 0.0);
    if (arch.output == OutputLayer::Softmax) {
      const double m = *std::max_element(out.begin(), out.end());
      double sum = 0.0;
      for (double z : out) sum += std::exp(z - m);
      const double log_sum = m + std::log(sum);
      for (std::size_t o = 0; o < out.size(); ++o) {
        const double p = std::exp(out[o] - log_sum);
        loss -= t[o] * (out[o] - log_sum);
        delta[o] = (p - t[o]) * inv_n;
      }
    } else {
      for (std::size_t o = 0; o < out.size(); ++o) {
        const double e = out[o] - t[o];
        loss += e * e;
        delta[o] = 2.0 * e * inv_n;
      }
    }

    for (std::size_t l = n_layers; l-- > 0;) {
      const std::size_t in = sizes[l], outs = sizes[l + 1];
      const double* w = params.data() + offsets[l];
      double* gw = gradient.data() + offsets[l];
      double* gb = gw + in * outs;
      const auto& a = acts[l];
      for (std::size_t o = 0; o < outs; ++o) {
        double* gwo = gw + o * in;
        for (std::size_t i = 0; i < in; ++i) gwo[i] += delta[o] * a[i];
        gb[o] += delta[o];
      }
      if (l == 0) break;
      prev_delta.assign(in, 0.0);
      for (std::size_t o = 0; o < outs; ++o) {
        const double* wo = w + o * in;
        for (std::size_t i = 0; i < in; ++i) prev_delta[i] += wo[i] * delta[o];
      }
      for (std::size_t i = 0; i < in; ++i) prev_delta[i] *= activation_slope(arch.activation, a[i]);
      std::swap(delta, prev_delta);
    }
  }
  return loss * inv_n;
}

MlpModel MlpModel::train(const FeatureMatrix& x, const FeatureMatrix& targets, MlpArchitecture arch,
                         const MlpParams& params, std::uint64_t seed, Mode mode) {
  MlpModel m;
  m.mode_ = mode;
  m.arch_ = std::move(arch);
  m.params_.resize(m.arch_.parameter_count());
  Rng rng(seed);
  for (double& w : m.params_) w = rng.uniform(-params.init_scale, params.init_scale);

  std::vector<double> grad(m.params_.size());
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    m.final_loss_ = mlp_loss_and_gradient(m.arch_, m.params_, x, targets, grad);
    if (!std::isfinite(m.final_loss_)) {
      m.converged_ = false;
      break;
    }
    for (std::size_t i = 0; i < grad.size(); ++i) m.params_[i] -= params.learning_rate * grad[i];
  }
  if (m.converged_) {
    m.final_loss_ = mlp_loss_and_gradient(m.arch_, m.params_, x, targets, grad);
    m.converged_ = std::isfinite(m.final_loss_) &&
                   std::all_of(m.params_.begin(), m.params_.end(), [](double w) { return std::isfinite(w); });
  }
  return m;
}

MlpModel MlpModel::fit_regression(const FeatureMatrix& x, std::span<const double> y, const MlpParams& params,
                                  std::uint64_t seed) {
  if (x.rows() != y.size()) throw Error(ErrorKind::LengthMismatch, "mlp: targets do not match rows");
  MlpArchitecture arch{x.cols(), {params.hidden_units}, 1, HiddenActivation::Sigmoid, OutputLayer::Linear};
  if (params.hidden_units == 0) arch.hidden.clear();
  FeatureMatrix t(y.size(), 1, std::vector<double>(y.begin(), y.end()));
  if (!y.empty() && std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
    // Constant target: zero weights and the value as output bias, exact everywhere.
    MlpModel m;
    m.mode_ = Mode::Regression;
    m.arch_ = std::move(arch);
    m.params_.assign(m.arch_.parameter_count(), 0.0);
    m.params_.back() = y[0];
    return m;
  }
  return train(x, t, std::move(arch), params, seed, Mode::Regression);
}

MlpModel MlpModel::fit_classification(const FeatureMatrix& x, std::span<const Style> labels, const MlpParams& params,
                                      std::uint64_t seed) {
  if (x.rows() != labels.size()) throw Error(ErrorKind::LengthMismatch, "mlp: labels do not match rows");
  MlpArchitecture arch{x.cols(), {params.hidden_units}, kNumStyles, HiddenActivation::Sigmoid, OutputLayer::Softmax};
  if (params.hidden_units == 0) arch.hidden.clear();
  FeatureMatrix t(labels.size(), kNumStyles);
  for (std::size_t i = 0; i < labels.size(); ++i) t(i, index(labels[i])) = 1.0;
  return train(x, t, std::move(arch), params, seed, Mode::Classification);
}

double MlpModel::predict_value(std::span<const double> row) const {
  if (mode_ != Mode::Regression) throw Error(ErrorKind::ModeMismatch, "mlp was fitted for classification");
  return mlp_forward(arch_, params_, row)[0];
}

ClassPrediction MlpModel::predict_class(std::span<const double> row) const {
  if (mode_ != Mode::Classification) throw Error(ErrorKind::ModeMismatch, "mlp was fitted for regression");
  const auto p = mlp_forward(arch_, params_, row);
  std::array<double, kNumStyles> scores{};
  std::copy_n(p.begin(), kNumStyles, scores.begin());
  return from_scores(scores);
}

nlohmann::json MlpModel::to_json() const {
  return {{"mode", mode_ == Mode::Regression ? "regression" : "classification"},
          {"inputs", arch_.inputs},
          {"hidden", arch_.hidden},
          {"outputs", arch_.outputs},
          {"activation", arch_.activation == HiddenActivation::Sigmoid ? "sigmoid" : "identity"},
          {"output_layer", arch_.output == OutputLayer::Softmax ? "softmax" : "linear"},
          {"final_loss", final_loss_},
          {"converged", converged_},
          {"parameters", params_}};
}

MlpModel MlpModel::from_json(const nlohmann::json& j) {
  MlpModel m;
  m.mode_ = j.at("mode").get<std::string>() == "regression" ? Mode::Regression : Mode::Classification;
  m.arch_.inputs = j.at("inputs").get<std::size_t>();
  m.arch_.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  m.arch_.outputs = j.at("outputs").get<std::size_t>();
  m.arch_.activation =
      j.at("activation").get<std::string>() == "sigmoid" ? HiddenActivation::Sigmoid : HiddenActivation::Identity;
  m.arch_.output = j.at("output_layer").get<std::string>() == "softmax" ? OutputLayer::Softmax : OutputLayer::Linear;
  m.final_loss_ = j.at("final_loss").get<double>();
  m.converged_ = j.at("converged").get<bool>();
  m.params_ = j.at("parameters").get<std::vector<double>>();
  if (m.params_.size() != m.arch_.parameter_count()) {
    throw Error(ErrorKind::InvalidConfig, "mlp document parameter count does not match architecture");
  }
  return m;
}

}  // namespace vark
