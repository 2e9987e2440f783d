#include "vark/learners/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vark/error.hpp"

namespace vark {
namespace {

constexpr double kMinGain = 1e-12;

std::vector<std::size_t> sorted_by_feature(const FeatureMatrix& x, std::span<const std::size_t> sample,
                                           std::size_t feature) {
  std::vector<std::size_t> order(sample.begin(), sample.end());
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x(a, feature) < x(b, feature); });
  return order;
}

double split_information(double n_left, double n_right) {
  const double n = n_left + n_right;
  double info = 0.0;
  for (double part : {n_left, n_right}) {
    if (part > 0.0) info -= (part / n) * std::log2(part / n);
  }
  return info;
}

}  // namespace

double entropy(std::span<const double> counts) {
  double n = 0.0;
  for (double c : counts) n += c;
  if (n <= 0.0) return 0.0;
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / n) * std::log2(c / n);
  }
  return h;
}

std::optional<SplitCandidate> best_classification_split(const FeatureMatrix& x, std::span<const Style> labels,
                                                        std::span<const std::size_t> sample, std::size_t feature,
                                                        std::size_t min_leaf) {
  const auto order = sorted_by_feature(x, sample, feature);
  std::array<double, kNumStyles> total{};
  for (std::size_t i : order) total[index(labels[i])] += 1.0;
  const double n = static_cast<double>(order.size());
  const double parent_h = entropy(total);

  std::optional<SplitCandidate> best;
  std::array<double, kNumStyles> left{};
  for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
    left[index(labels[order[pos]])] += 1.0;
    const double lo = x(order[pos], feature);
    const double hi = x(order[pos + 1], feature);
    if (!(lo < hi)) continue;
    const double n_left = static_cast<double>(pos + 1);
    const double n_right = n - n_left;
    if (n_left < static_cast<double>(min_leaf) || n_right < static_cast<double>(min_leaf)) continue;
    std::array<double, kNumStyles> right{};
    for (std::size_t c = 0; c < kNumStyles; ++c) right[c] = total[c] - left[c];
    const double gain = parent_h - (n_left / n) * entropy(left) - (n_right / n) * entropy(right);
    if (gain <= kMinGain) continue;
    if (!best || gain > best->gain) {
      best = SplitCandidate{feature, 0.5 * (lo + hi), gain, gain / split_information(n_left, n_right)};
    }
  }
  return best;
}

std::optional<SplitCandidate> best_regression_split(const FeatureMatrix& x, std::span<const double> y,
                                                    std::span<const std::size_t> sample, std::size_t feature,
                                                    std::size_t min_leaf) {
  const auto order = sorted_by_feature(x, sample, feature);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i : order) {
    sum += y[i];
    sum_sq += y[i] * y[i];
  }
  const double n = static_cast<double>(order.size());
  const double parent_sse = sum_sq - sum * sum / n;

  std::optional<SplitCandidate> best;
  double left_sum = 0.0, left_sq = 0.0;
  for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
    left_sum += y[order[pos]];
    left_sq += y[order[pos]] * y[order[pos]];
    const double lo = x(order[pos], feature);
    const double hi = x(order[pos + 1], feature);
    if (!(lo < hi)) continue;
    const double n_left = static_cast<double>(pos + 1);
    const double n_right = n - n_left;
    if (n_left < static_cast<double>(min_leaf) || n_right < static_cast<double>(min_leaf)) continue;
    const double right_sum = sum - left_sum;
    const double right_sq = sum_sq - left_sq;
    const double sse = (left_sq - left_sum * left_sum / n_left) + (right_sq - right_sum * right_sum / n_right);
    const double reduction = parent_sse - sse;
    if (reduction <= kMinGain) continue;
    if (!best || reduction > best->gain) best = SplitCandidate{feature, 0.5 * (lo + hi), reduction, 0.0};
  }
  return best;
}

std::optional<SplitCandidate> choose_gain_ratio(std::span<const SplitCandidate> candidates) {
  if (candidates.empty()) return std::nullopt;
  double avg = 0.0;
  for (const auto& c : candidates) avg += c.gain;
  avg /= static_cast<double>(candidates.size());
  std::optional<SplitCandidate> best;
  for (const auto& c : candidates) {
    if (c.gain < avg - 1e-9) continue;
    if (!best || c.gain_ratio > best->gain_ratio) best = c;
  }
  return best;
}

double pessimistic_extra_errors(double n, double errors, double confidence) {
  // Normal deviates for one-sided confidence levels, interpolated like C4.5.
  static constexpr std::array<double, 9> kVal{0, 0.001, 0.005, 0.01, 0.05, 0.10, 0.20, 0.40, 1.00};
  static constexpr std::array<double, 9> kDev{4.0, 3.09, 2.58, 2.33, 1.65, 1.28, 0.84, 0.25, 0.00};
  std::size_t i = 1;
  while (i + 1 < kVal.size() && confidence > kVal[i]) ++i;
  const double dev = kDev[i - 1] + (kDev[i] - kDev[i - 1]) * (confidence - kVal[i - 1]) / (kVal[i] - kVal[i - 1]);
  const double coeff = dev * dev;

  if (errors < 1e-6) return n * (1.0 - std::exp(std::log(confidence) / n));
  if (errors < 0.9999) {
    const double v0 = n * (1.0 - std::exp(std::log(confidence) / n));
    return v0 + errors * (pessimistic_extra_errors(n, 1.0, confidence) - v0);
  }
  if (errors + 0.5 >= n) return 0.67 * (n - errors);
  const double e = errors + 0.5;
  const double pr = (e + coeff / 2.0 + std::sqrt(coeff * (e * (1.0 - e / n) + coeff / 4.0))) / (n + coeff);
  return n * pr - errors;
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const double> y, std::span<const Style> labels,
              const TreeParams& params, Rng* rng, Mode mode)
      : x_(x), y_(y), labels_(labels), params_(params), rng_(rng), mode_(mode) {
    if (params_.max_features > 0 && params_.max_features < x_.cols() && rng_ == nullptr) {
      throw Error(ErrorKind::InvalidConfig, "feature subsampling requires a random source");
    }
  }

  TreeModel build(std::span<const std::size_t> sample) {
    if (sample.empty()) throw Error(ErrorKind::DegenerateData, "tree: empty training sample");
    TreeModel model;
    model.mode_ = mode_;
    model.width_ = x_.cols();
    nodes_ = &model.nodes_;
    std::vector<std::size_t> rows(sample.begin(), sample.end());
    grow(rows, 0);
    if (mode_ == Mode::Classification && params_.prune) prune(0);
    compact(model);
    return model;
  }

 private:
  int grow(std::vector<std::size_t>& rows, std::size_t depth) {
    const int id = static_cast<int>(nodes_->size());
    nodes_->push_back(make_leaf(rows));
    if (depth >= params_.max_depth || rows.size() < 2 * std::max<std::size_t>(params_.min_leaf, 1)) return id;
    if (is_pure(rows)) return id;

    const auto split = find_split(rows);
    if (!split) return id;

    std::vector<std::size_t> left, right;
    for (std::size_t r : rows) (x_(r, split->feature) <= split->threshold ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    const int l = grow(left, depth + 1);
    const int r = grow(right, depth + 1);
    auto& node = (*nodes_)[static_cast<std::size_t>(id)];
    node.feature = static_cast<int>(split->feature);
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  TreeModel::Node make_leaf(const std::vector<std::size_t>& rows) const {
    TreeModel::Node node;
    node.n = static_cast<double>(rows.size());
    if (mode_ == Mode::Regression) {
      double sum = 0.0;
      for (std::size_t r : rows) sum += y_[r];
      node.value = sum / node.n;
    } else {
      for (std::size_t r : rows) node.counts[index(labels_[r])] += 1.0;
    }
    return node;
  }

  bool is_pure(const std::vector<std::size_t>& rows) const {
    for (std::size_t r : rows) {
      if (mode_ == Mode::Regression ? y_[r] != y_[rows[0]] : labels_[r] != labels_[rows[0]]) return false;
    }
    return true;
  }

  bool is_constant(const std::vector<std::size_t>& rows, std::size_t f) const {
    for (std::size_t r : rows) {
      if (x_(r, f) != x_(rows[0], f)) return false;
    }
    return true;
  }

  std::optional<SplitCandidate> evaluate(const std::vector<std::size_t>& rows, std::size_t f) const {
    return mode_ == Mode::Regression ? best_regression_split(x_, y_, rows, f, params_.min_leaf)
                                     : best_classification_split(x_, labels_, rows, f, params_.min_leaf);
  }

  std::optional<SplitCandidate> find_split(const std::vector<std::size_t>& rows) {
    const std::size_t width = x_.cols();
    std::vector<std::size_t> features(width);
    std::iota(features.begin(), features.end(), std::size_t{0});
    const bool subsample = params_.max_features > 0 && params_.max_features < width;

    std::vector<SplitCandidate> candidates;
    std::size_t examined = 0;
    for (std::size_t i = 0; i < width; ++i) {
      if (subsample) {
        if (examined >= params_.max_features) break;
        // Lazy Fisher-Yates: draw the next feature from the unvisited tail.
        std::swap(features[i], features[i + rng_->below(width - i)]);
        if (is_constant(rows, features[i])) continue;
        ++examined;
      }
      if (auto c = evaluate(rows, features[i])) candidates.push_back(*c);
    }
    if (subsample) {
      // Present candidates in feature order so tie-breaking matches the full search.
      std::sort(candidates.begin(), candidates.end(),
                [](const SplitCandidate& a, const SplitCandidate& b) { return a.feature < b.feature; });
    }

    if (mode_ == Mode::Classification) return choose_gain_ratio(candidates);
    std::optional<SplitCandidate> best;
    for (const auto& c : candidates) {
      if (!best || c.gain > best->gain) best = c;
    }
    return best;
  }

  double leaf_errors(const TreeModel::Node& node) const {
    const double majority = *std::max_element(node.counts.begin(), node.counts.end());
    const double errors = node.n - majority;
    return errors + pessimistic_extra_errors(node.n, errors, params_.confidence);
  }

  // Returns the estimated error count of the (possibly pruned) subtree.
  double prune(int id) {
    auto& node = (*nodes_)[static_cast<std::size_t>(id)];
    if (node.feature < 0) return leaf_errors(node);
    const int l = node.left, r = node.right;
    const double subtree = prune(l) + prune(r);
    auto& same = (*nodes_)[static_cast<std::size_t>(id)];
    const double as_leaf = leaf_errors(same);
    if (as_leaf <= subtree + 0.1) {
      same.feature = -1;
      same.left = same.right = -1;
      return as_leaf;
    }
    return subtree;
  }

  // Drops nodes orphaned by pruning, keeping pre-order numbering.
  void compact(TreeModel& model) const {
    std::vector<TreeModel::Node> out;
    out.reserve(model.nodes_.size());
    auto copy = [&](auto&& self, int id) -> int {
      const auto node = model.nodes_[static_cast<std::size_t>(id)];
      const int new_id = static_cast<int>(out.size());
      out.push_back(node);
      if (node.feature >= 0) {
        const int l = self(self, node.left);
        const int r = self(self, node.right);
        out[static_cast<std::size_t>(new_id)].left = l;
        out[static_cast<std::size_t>(new_id)].right = r;
      }
      return new_id;
    };
    copy(copy, 0);
    model.nodes_ = std::move(out);
  }

  const FeatureMatrix& x_;
  std::span<const double> y_;
  std::span<const Style> labels_;
  TreeParams params_;
  Rng* rng_;
  Mode mode_;
  std::vector<TreeModel::Node>* nodes_ = nullptr;
};

TreeModel TreeModel::fit_regression(const FeatureMatrix& x, std::span<const double> y,
                                    std::span<const std::size_t> sample, const TreeParams& params, Rng* rng) {
  return TreeBuilder(x, y, {}, params, rng, Mode::Regression).build(sample);
}

TreeModel TreeModel::fit_classification(const FeatureMatrix& x, std::span<const Style> labels,
                                        std::span<const std::size_t> sample, const TreeParams& params, Rng* rng) {
  return TreeBuilder(x, {}, labels, params, rng, Mode::Classification).build(sample);
}

const TreeModel::Node& TreeModel::leaf_for(std::span<const double> row) const {
  check_width(row, width_);
  std::size_t id = 0;
  while (nodes_[id].feature >= 0) {
    const auto& n = nodes_[id];
    id = static_cast<std::size_t>(row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes_[id];
}

double TreeModel::predict_value(std::span<const double> row) const {
  if (mode_ != Mode::Regression) throw Error(ErrorKind::ModeMismatch, "tree was fitted for classification");
  return leaf_for(row).value;
}

ClassPrediction TreeModel::predict_class(std::span<const double> row) const {
  if (mode_ != Mode::Classification) throw Error(ErrorKind::ModeMismatch, "tree was fitted for regression");
  const auto& leaf = leaf_for(row);
  std::array<double, kNumStyles> freq{};
  for (std::size_t c = 0; c < kNumStyles; ++c) freq[c] = leaf.counts[c] / leaf.n;
  return from_scores(freq);
}

Style TreeModel::leaf_label(std::span<const double> row) const { return argmax_style(leaf_for(row).counts); }

std::size_t TreeModel::leaf_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
}

nlohmann::json TreeModel::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : nodes_) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", n.threshold},
                     {"left", n.left},
                     {"right", n.right},
                     {"value", n.value},
                     {"counts", n.counts},
                     {"n", n.n}});
  }
  return {{"mode", mode_ == Mode::Regression ? "regression" : "classification"},
          {"width", width_},
          {"nodes", std::move(nodes)}};
}

TreeModel TreeModel::from_json(const nlohmann::json& j) {
  TreeModel m;
  m.mode_ = j.at("mode").get<std::string>() == "regression" ? Mode::Regression : Mode::Classification;
  m.width_ = j.at("width").get<std::size_t>();
  for (const auto& n : j.at("nodes")) {
    Node node;
    node.feature = n.at("feature").get<int>();
    node.threshold = n.at("threshold").get<double>();
    node.left = n.at("left").get<int>();
    node.right = n.at("right").get<int>();
    node.value = n.at("value").get<double>();
    node.counts = n.at("counts").get<std::array<double, kNumStyles>>();
    node.n = n.at("n").get<double>();
    m.nodes_.push_back(node);
  }
  if (m.nodes_.empty()) throw Error(ErrorKind::InvalidConfig, "tree document has no nodes");
  return m;
}

}  // namespace vark
