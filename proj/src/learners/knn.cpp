#include "vark/learners/knn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "vark/error.hpp"

namespace vark {

std::size_t default_k(std::size_t n_train) noexcept {
  const auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n_train))));
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(n_train, 1));
}

KnnModel KnnModel::fit_regression(FeatureMatrix x, std::vector<double> y, std::size_t k) {
  if (x.rows() != y.size()) throw Error(ErrorKind::LengthMismatch, "knn: targets do not match rows");
  KnnModel m;
  m.mode_ = Mode::Regression;
  m.k_ = k == 0 ? default_k(x.rows()) : std::min(k, x.rows());
  m.x_ = std::move(x);
  m.y_ = std::move(y);
  return m;
}

KnnModel KnnModel::fit_classification(FeatureMatrix x, std::vector<Style> labels, std::size_t k) {
  if (x.rows() != labels.size()) throw Error(ErrorKind::LengthMismatch, "knn: labels do not match rows");
  KnnModel m;
  m.mode_ = Mode::Classification;
  m.k_ = k == 0 ? default_k(x.rows()) : std::min(k, x.rows());
  m.x_ = std::move(x);
  m.labels_ = std::move(labels);
  return m;
}

std::vector<std::size_t> KnnModel::neighbors(std::span<const double> row) const {
  check_width(row, x_.cols());
  const std::size_t n = x_.rows();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = x_.row(i);
    double d = 0.0;
    for (std::size_t j = 0; j < xi.size(); ++j) {
      const double diff = xi[j] - row[j];
      d += diff * diff;
    }
    dist[i] = {d, i};
  }
  // Pair ordering compares distance first, then index.
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());
  std::vector<std::size_t> out(k_);
  for (std::size_t i = 0; i < k_; ++i) out[i] = dist[i].second;
  return out;
}

double KnnModel::predict_value(std::span<const double> row) const {
  if (mode_ != Mode::Regression) throw Error(ErrorKind::ModeMismatch, "knn model was fitted for classification");
  double sum = 0.0;
  for (std::size_t i : neighbors(row)) sum += y_[i];
  return sum / static_cast<double>(k_);
}

ClassPrediction KnnModel::predict_class(std::span<const double> row) const {
  if (mode_ != Mode::Classification) throw Error(ErrorKind::ModeMismatch, "knn model was fitted for regression");
  std::array<double, kNumStyles> votes{};
  for (std::size_t i : neighbors(row)) votes[index(labels_[i])] += 1.0;
  for (double& v : votes) v /= static_cast<double>(k_);
  return from_scores(votes);
}

nlohmann::json KnnModel::to_json() const {
  nlohmann::json j;
  j["k"] = k_;
  j["width"] = x_.cols();
  j["features"] = x_.data();
  if (mode_ == Mode::Regression) {
    j["targets"] = y_;
  } else {
    std::vector<int> labels;
    for (Style s : labels_) labels.push_back(static_cast<int>(index(s)));
    j["labels"] = labels;
  }
  return j;
}

KnnModel KnnModel::from_json(const nlohmann::json& j) {
  KnnModel m;
  m.k_ = j.at("k").get<std::size_t>();
  const auto width = j.at("width").get<std::size_t>();
  auto data = j.at("features").get<std::vector<double>>();
  const std::size_t rows = width == 0 ? 0 : data.size() / width;
  m.x_ = FeatureMatrix(rows, width, std::move(data));
  if (j.contains("targets")) {
    m.mode_ = Mode::Regression;
    m.y_ = j.at("targets").get<std::vector<double>>();
  } else {
    m.mode_ = Mode::Classification;
    for (int l : j.at("labels").get<std::vector<int>>()) m.labels_.push_back(kStyles.at(static_cast<std::size_t>(l)));
  }
  return m;
}

}  // namespace vark
