#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vark/style.hpp"

namespace vark {

struct ErrorSample {
  double actual;
  double predicted;
};

double mae(std::span<const ErrorSample> samples);
/// Even counts average the two middle absolute errors.
double mdae(std::span<const ErrorSample> samples);
double rmse(std::span<const ErrorSample> samples);

/// One-vs-rest counts for one class.
struct ClassCounts {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

struct ConfusionCounts {
  std::array<ClassCounts, kNumStyles> per_class{};
  /// matrix[actual][predicted]
  std::array<std::array<std::size_t, kNumStyles>, kNumStyles> matrix{};
  std::size_t n = 0;
};

ConfusionCounts confusion(std::span<const Style> actual, std::span<const Style> predicted);

/// A ratio whose denominator may be zero; then value is 0 and undefined is set.
struct MetricValue {
  double value = 0.0;
  bool undefined = false;
};

MetricValue recall(const ClassCounts& c);
MetricValue precision(const ClassCounts& c);
MetricValue f1(const ClassCounts& c);
MetricValue accuracy(const ClassCounts& c);

struct ClassificationSummary {
  std::array<MetricValue, kNumStyles> precision, recall, f1, accuracy;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double macro_accuracy = 0.0;   // one-vs-rest accuracy averaged over classes
  double fraction_correct = 0.0; // plain accuracy
};

ClassificationSummary summarize(const ConfusionCounts& counts);

struct RocPoint {
  double fpr;
  double tpr;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.5;
};

/// One-vs-rest ROC for `positive`. Tied scores form one diagonal segment, so
/// the trapezoidal area equals P(s+ > s-) + 0.5 P(s+ == s-).
RocCurve roc_auc(std::span<const Style> actual, std::span<const std::array<double, kNumStyles>> scores,
                 Style positive);

/// Binary form used by roc_auc.
RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> is_positive);

}  // namespace vark
