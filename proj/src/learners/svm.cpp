#include "vark/learners/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vark/error.hpp"

namespace vark {
namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return std::exp(-gamma * d);
}

std::vector<double> rbf_gram(const FeatureMatrix& x, double gamma) {
  const std::size_t n = x.rows();
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) k[i * n + j] = k[j * n + i] = rbf_kernel(x.row(i), x.row(j), gamma);
  }
  return k;
}

SmoSolution solve_smo(std::span<const double> q, std::span<const double> p, std::span<const signed char> y,
                      double c, double tolerance, std::size_t max_iterations) {
  const std::size_t n = p.size();
  SmoSolution s;
  s.alpha.assign(n, 0.0);
  s.gradient.assign(p.begin(), p.end());
  auto& alpha = s.alpha;
  auto& g = s.gradient;
  auto at_upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto at_lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
  auto qd = [&](std::size_t t) { return q[t * n + t]; };

  for (;;) {
    // Maximal violating i, then j by second-order gain.
    double gmax = -kInf;
    std::ptrdiff_t i_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] == +1) {
        if (!at_upper(t) && -g[t] >= gmax) {
          gmax = -g[t];
          i_sel = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!at_lower(t) && g[t] >= gmax) {
        gmax = g[t];
        i_sel = static_cast<std::ptrdiff_t>(t);
      }
    }
    double gmax2 = -kInf;
    double obj_min = kInf;
    std::ptrdiff_t j_sel = -1;
    if (i_sel >= 0) {
      const auto i = static_cast<std::size_t>(i_sel);
      const double* qi = q.data() + i * n;
      for (std::size_t t = 0; t < n; ++t) {
        if (y[t] == +1) {
          if (at_lower(t)) continue;
          const double grad_diff = gmax + g[t];
          gmax2 = std::max(gmax2, g[t]);
          if (grad_diff > 0.0) {
            double quad = qd(i) + qd(t) - 2.0 * y[i] * qi[t];
            if (quad <= 0.0) quad = kTau;
            const double obj = -(grad_diff * grad_diff) / quad;
            if (obj <= obj_min) {
              obj_min = obj;
              j_sel = static_cast<std::ptrdiff_t>(t);
            }
          }
        } else {
          if (at_upper(t)) continue;
          const double grad_diff = gmax - g[t];
          gmax2 = std::max(gmax2, -g[t]);
          if (grad_diff > 0.0) {
            double quad = qd(i) + qd(t) + 2.0 * y[i] * qi[t];
            if (quad <= 0.0) quad = kTau;
            const double obj = -(grad_diff * grad_diff) / quad;
            if (obj <= obj_min) {
              obj_min = obj;
              j_sel = static_cast<std::ptrdiff_t>(t);
            }
          }
        }
      }
    }
    if (gmax + gmax2 < tolerance || j_sel < 0) {
      s.converged = true;
      break;
    }
    if (s.iterations >= max_iterations) break;
    ++s.iterations;

    const auto i = static_cast<std::size_t>(i_sel);
    const auto j = static_cast<std::size_t>(j_sel);
    const double* qi = q.data() + i * n;
    const double* qj = q.data() + j * n;
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = qd(i) + qd(j) + 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-g[i] - g[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = qd(i) + qd(j) - 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (g[i] - g[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) g[t] += qi[t] * di + qj[t] * dj;
  }

  // Offset: average y*G over free variables, else midpoint of the feasible interval.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * g[t];
    if (at_upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (y[t] == +1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  if (n_free > 0) {
    s.rho = sum_free / static_cast<double>(n_free);
  } else if (std::isfinite(ub) && std::isfinite(lb)) {
    s.rho = 0.5 * (ub + lb);
  } else {
    s.rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
  }
  return s;
}

KernelMachine KernelMachine::constant(double value, std::size_t width) {
  KernelMachine m;
  m.is_constant_ = true;
  m.constant_ = value;
  m.width_ = width;
  return m;
}

void KernelMachine::keep_support_vectors(const FeatureMatrix& x) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < dual_.size(); ++i) {
    if (dual_[i] != 0.0) keep.push_back(i);
  }
  sv_ = x.select_rows(keep);
  coef_.clear();
  for (std::size_t i : keep) coef_.push_back(dual_[i]);
}

KernelMachine KernelMachine::fit_binary(const FeatureMatrix& x, std::span<const signed char> y,
                                        const SvmParams& params) {
  const std::size_t n = x.rows();
  const bool has_pos = std::find(y.begin(), y.end(), +1) != y.end();
  const bool has_neg = std::find(y.begin(), y.end(), -1) != y.end();
  if (!has_pos || !has_neg) return constant(has_pos ? 1.0 : -1.0, x.cols());

  const auto k = rbf_gram(x, params.gamma);
  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) q[i * n + j] = y[i] * y[j] * k[i * n + j];
  }
  const std::vector<double> p(n, -1.0);
  const auto sol = solve_smo(q, p, y, params.c, params.tolerance, params.max_iterations);

  KernelMachine m;
  m.gamma_ = params.gamma;
  m.rho_ = sol.rho;
  m.converged_ = sol.converged;
  m.iterations_ = sol.iterations;
  m.width_ = x.cols();
  m.dual_.resize(n);
  for (std::size_t i = 0; i < n; ++i) m.dual_[i] = sol.alpha[i] * y[i];
  m.keep_support_vectors(x);
  return m;
}

KernelMachine KernelMachine::fit_regression(const FeatureMatrix& x, std::span<const double> y,
                                            const SvmParams& params) {
  const std::size_t n = x.rows();
  const std::size_t m2 = 2 * n;
  const auto k = rbf_gram(x, params.gamma);
  std::vector<signed char> sign(m2);
  std::vector<double> p(m2);
  for (std::size_t i = 0; i < n; ++i) {
    sign[i] = +1;
    sign[i + n] = -1;
    p[i] = params.epsilon - y[i];
    p[i + n] = params.epsilon + y[i];
  }
  std::vector<double> q(m2 * m2);
  for (std::size_t i = 0; i < m2; ++i) {
    for (std::size_t j = 0; j < m2; ++j) q[i * m2 + j] = sign[i] * sign[j] * k[(i % n) * n + (j % n)];
  }
  const auto sol = solve_smo(q, p, sign, params.c, params.tolerance, params.max_iterations);

  KernelMachine m;
  m.gamma_ = params.gamma;
  m.rho_ = sol.rho;
  m.converged_ = sol.converged;
  m.iterations_ = sol.iterations;
  m.width_ = x.cols();
  m.dual_.resize(n);
  for (std::size_t i = 0; i < n; ++i) m.dual_[i] = sol.alpha[i] - sol.alpha[i + n];
  m.keep_support_vectors(x);
  return m;
}

double KernelMachine::decision(std::span<const double> row) const {
  check_width(row, width_);
  if (is_constant_) return constant_;
  double sum = 0.0;
  for (std::size_t i = 0; i < coef_.size(); ++i) sum += coef_[i] * rbf_kernel(sv_.row(i), row, gamma_);
  return sum - rho_;
}

nlohmann::json KernelMachine::to_json() const {
  if (is_constant_) return {{"constant", constant_}, {"width", width_}};
  return {{"gamma", gamma_},         {"rho", rho_},
          {"width", width_},         {"converged", converged_},
          {"iterations", iterations_}, {"coefficients", coef_},
          {"support_vectors", sv_.data()}};
}

KernelMachine KernelMachine::from_json(const nlohmann::json& j) {
  KernelMachine m;
  m.width_ = j.at("width").get<std::size_t>();
  if (j.contains("constant")) {
    m.is_constant_ = true;
    m.constant_ = j.at("constant").get<double>();
    return m;
  }
  m.gamma_ = j.at("gamma").get<double>();
  m.rho_ = j.at("rho").get<double>();
  m.converged_ = j.at("converged").get<bool>();
  m.iterations_ = j.at("iterations").get<std::size_t>();
  m.coef_ = j.at("coefficients").get<std::vector<double>>();
  m.sv_ = FeatureMatrix(m.coef_.size(), m.width_, j.at("support_vectors").get<std::vector<double>>());
  return m;
}

SvmModel SvmModel::fit_regression(const FeatureMatrix& x, std::span<const double> y, const SvmParams& params) {
  SvmModel m;
  m.mode_ = Mode::Regression;
  m.width_ = x.cols();
  m.machines_.push_back(KernelMachine::fit_regression(x, y, params));
  return m;
}

SvmModel SvmModel::fit_classification(const FeatureMatrix& x, std::span<const Style> labels,
                                      const SvmParams& params) {
  SvmModel m;
  m.mode_ = Mode::Classification;
  m.width_ = x.cols();
  std::vector<signed char> y(labels.size());
  for (Style s : kStyles) {
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == s ? +1 : -1;
    m.machines_.push_back(KernelMachine::fit_binary(x, y, params));
  }
  return m;
}

double SvmModel::predict_value(std::span<const double> row) const {
  if (mode_ != Mode::Regression) throw Error(ErrorKind::ModeMismatch, "svm was fitted for classification");
  return machines_.front().decision(row);
}

ClassPrediction SvmModel::predict_class(std::span<const double> row) const {
  if (mode_ != Mode::Classification) throw Error(ErrorKind::ModeMismatch, "svm was fitted for regression");
  std::array<double, kNumStyles> scores{};
  for (std::size_t c = 0; c < kNumStyles; ++c) scores[c] = machines_[c].decision(row);
  return from_scores(scores);
}

bool SvmModel::converged() const noexcept {
  return std::all_of(machines_.begin(), machines_.end(), [](const KernelMachine& m) { return m.converged(); });
}

nlohmann::json SvmModel::to_json() const {
  nlohmann::json machines = nlohmann::json::array();
  for (const auto& m : machines_) machines.push_back(m.to_json());
  return {{"mode", mode_ == Mode::Regression ? "regression" : "classification"},
          {"width", width_},
          {"machines", std::move(machines)}};
}

SvmModel SvmModel::from_json(const nlohmann::json& j) {
  SvmModel m;
  m.mode_ = j.at("mode").get<std::string>() == "regression" ? Mode::Regression : Mode::Classification;
  m.width_ = j.at("width").get<std::size_t>();
  for (const auto& mj : j.at("machines")) m.machines_.push_back(KernelMachine::from_json(mj));
  const std::size_t expected = m.mode_ == Mode::Regression ? 1 : kNumStyles;
  if (m.machines_.size() != expected) throw Error(ErrorKind::InvalidConfig, "svm document has wrong machine count");
  return m;
}

}  // namespace vark
