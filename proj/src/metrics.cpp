#include "vark/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vark/error.hpp"

namespace vark {
namespace {

void require_samples(std::span<const ErrorSample> samples) {
  if (samples.empty()) throw Error(ErrorKind::EmptySample, "error metric over zero samples");
}

MetricValue ratio(double num, double den) {
  if (den == 0.0) return {0.0, true};
  return {num / den, false};
}

}  // namespace

double mae(std::span<const ErrorSample> samples) {
  require_samples(samples);
  double sum = 0.0;
  for (const auto& s : samples) sum += std::abs(s.actual - s.predicted);
  return sum / static_cast<double>(samples.size());
}

double mdae(std::span<const ErrorSample> samples) {
  require_samples(samples);
  std::vector<double> e(samples.size());
  std::transform(samples.begin(), samples.end(), e.begin(),
                 [](const ErrorSample& s) { return std::abs(s.actual - s.predicted); });
  std::sort(e.begin(), e.end());
  const std::size_t n = e.size();
  return n % 2 == 1 ? e[n / 2] : 0.5 * (e[n / 2 - 1] + e[n / 2]);
}

double rmse(std::span<const ErrorSample> samples) {
  require_samples(samples);
  double sum = 0.0;
  for (const auto& s : samples) {
    const double d = s.actual - s.predicted;
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

ConfusionCounts confusion(std::span<const Style> actual, std::span<const Style> predicted) {
  if (actual.size() != predicted.size()) throw Error(ErrorKind::LengthMismatch, "label sequences differ in length");
  if (actual.empty()) throw Error(ErrorKind::EmptySample, "confusion over zero labels");
  ConfusionCounts out;
  out.n = actual.size();
  for (std::size_t i = 0; i < actual.size(); ++i) ++out.matrix[index(actual[i])][index(predicted[i])];
  for (Style c : kStyles) {
    auto& cc = out.per_class[index(c)];
    for (std::size_t i = 0; i < actual.size(); ++i) {
      const bool pos = actual[i] == c;
      const bool pred = predicted[i] == c;
      if (pos && pred) ++cc.tp;
      else if (pos) ++cc.fn;
      else if (pred) ++cc.fp;
      else ++cc.tn;
    }
  }
  return out;
}

MetricValue recall(const ClassCounts& c) { return ratio(double(c.tp), double(c.tp + c.fn)); }
MetricValue precision(const ClassCounts& c) { return ratio(double(c.tp), double(c.tp + c.fp)); }

MetricValue f1(const ClassCounts& c) {
  const auto p = precision(c);
  const auto r = recall(c);
  auto out = ratio(2.0 * p.value * r.value, p.value + r.value);
  out.undefined = out.undefined || p.undefined || r.undefined;
  return out;
}

MetricValue accuracy(const ClassCounts& c) { return ratio(double(c.tp + c.tn), double(c.total())); }

ClassificationSummary summarize(const ConfusionCounts& counts) {
  ClassificationSummary s;
  std::size_t correct = 0;
  for (std::size_t c = 0; c < kNumStyles; ++c) {
    const auto& cc = counts.per_class[c];
    s.precision[c] = precision(cc);
    s.recall[c] = recall(cc);
    s.f1[c] = f1(cc);
    s.accuracy[c] = accuracy(cc);
    s.macro_precision += s.precision[c].value / kNumStyles;
    s.macro_recall += s.recall[c].value / kNumStyles;
    s.macro_f1 += s.f1[c].value / kNumStyles;
    s.macro_accuracy += s.accuracy[c].value / kNumStyles;
    correct += cc.tp;
  }
  s.fraction_correct = counts.n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(counts.n);
  return s;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> is_positive) {
  if (scores.size() != is_positive.size()) throw Error(ErrorKind::LengthMismatch, "scores and labels differ in length");
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw Error(ErrorKind::Numerical, "non-finite ROC score");
    if (is_positive[i]) ++n_pos;
  }
  const std::size_t n_neg = scores.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorKind::SingleClassSample, "ROC needs positives and negatives");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  // Integer counts keep the area exact up to the final division.
  std::size_t tp = 0, fp = 0;
  double twice_area = 0.0;  // in units of (1/n_pos)(1/n_neg)
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t dtp = 0, dfp = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (is_positive[order[j]] ? dtp : dfp) += 1;
      ++j;
    }
    twice_area += static_cast<double>(dfp) * static_cast<double>(2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    curve.points.push_back({static_cast<double>(fp) / n_neg, static_cast<double>(tp) / n_pos});
    i = j;
  }
  curve.auc = twice_area / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
  return curve;
}

RocCurve roc_auc(std::span<const Style> actual, std::span<const std::array<double, kNumStyles>> scores,
                 Style positive) {
  if (actual.size() != scores.size()) throw Error(ErrorKind::LengthMismatch, "labels and scores differ in length");
  std::vector<double> s(scores.size());
  std::vector<std::uint8_t> pos(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    s[i] = scores[i][index(positive)];
    pos[i] = actual[i] == positive;
  }
  return roc_curve(s, pos);
}

}  // namespace vark
