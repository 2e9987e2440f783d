#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vark/dataset.hpp"
#include "vark/learners.hpp"
#include "vark/metrics.hpp"
#include "vark/stats.hpp"

namespace vark {

enum class CvScheme { LOOCV, KFold };

struct CvConfig {
  CvScheme scheme = CvScheme::LOOCV;
  std::size_t k = 10;
  bool stratified = false;  // KFold classification only
  std::uint64_t seed = 0;
};

/// e.g. "LOOCV" or "10-fold stratified CV".
std::string protocol_name(const CvConfig& cv);

/// Held-out index sets. LOOCV yields {i} for every row; KFold shuffles with
/// the seed (per label group when stratified) and deals rows round-robin.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, const CvConfig& cv,
                                                 std::span<const Style> labels = {});

inline constexpr std::size_t kNumColumns = kNumStyles + 1;  // A, V, K, R, All
inline constexpr std::size_t kAllColumn = kNumStyles;
std::string_view column_name(std::size_t column);

struct RegressionMetrics {
  double mae = 0.0;
  double mdae = 0.0;
  double rmse = 0.0;
};

struct RegressionModelResult {
  std::string model;
  std::array<RegressionMetrics, kNumColumns> metrics{};
  /// Absolute residuals per column; the All column concatenates A, V, K, R.
  std::array<std::vector<double>, kNumColumns> residuals;
  std::array<IntervalSummary, kNumColumns> intervals{};
  /// [matrix][style][student] held-out predictions.
  std::array<std::array<std::vector<double>, kNumStyles>, kNumStyles> per_matrix;
  /// [style][student], mean over the four matrices.
  std::array<std::vector<double>, kNumStyles> aggregated;
  std::size_t nonconverged_fits = 0;
};

struct RegressionReport {
  std::string protocol;
  std::vector<std::string> ids;
  std::vector<StyleProbabilities> actual;
  std::vector<std::size_t> fold_of;  // fold index that held each student out
  std::vector<RegressionModelResult> models;
  /// Constant predictor: the training-fold mean of each target.
  RegressionModelResult baseline;
};

struct ClassificationModelResult {
  std::string model;
  std::vector<Style> predicted;
  std::vector<std::array<double, kNumStyles>> scores;
  ConfusionCounts confusion;
  ClassificationSummary summary;
  std::array<std::optional<RocCurve>, kNumStyles> roc;  // empty when a class never / always occurs
  double macro_auc = 0.5;  // over classes with a defined curve
  std::size_t single_class_folds = 0;
  std::size_t nonconverged_fits = 0;
};

struct ClassificationReport {
  std::string protocol;
  std::vector<std::string> ids;
  std::vector<Style> actual;
  std::vector<std::size_t> fold_of;
  /// [matrix][model]
  std::array<std::vector<ClassificationModelResult>, kNumStyles> matrices;
};

struct PairCell {
  double p_value = 1.0;
  double w = 0.0;
  std::size_t effective_n = 0;
  bool exact = true;
  bool all_zero = false;
};

struct PairRow {
  std::string model_a;
  std::string model_b;
  std::array<PairCell, kNumColumns> cells{};
};

struct PairTable {
  std::vector<PairRow> rows;
};

struct DescriptiveReport {
  std::size_t n = 0;
  std::array<BoxplotStats, kNumStyles> probability_stats{};
  std::array<std::size_t, kNumStyles> label_counts{};
  /// [question][style] selection counts.
  std::array<std::array<std::size_t, kNumStyles>, kNumQuestions> question_counts{};
};

struct RunOptions {
  Execution execution = Execution::Parallel;
};

/// Four matrices x four targets per model and fold; per-style predictions are
/// averaged over the matrices. Needs at least 10 records.
RegressionReport run_regression(const std::vector<StudentRecord>& records, const std::vector<AlgorithmSpec>& specs,
                                const CvConfig& cv, const RunOptions& options = {});

ClassificationReport run_classification(const std::vector<StudentRecord>& records,
                                        const std::vector<AlgorithmSpec>& specs, const CvConfig& cv,
                                        const RunOptions& options = {});

PairCell compare_residuals(std::span<const double> a, std::span<const double> b);

/// Every model pair (i < j in report order) over the five columns.
PairTable compare_models(const RegressionReport& report);

DescriptiveReport describe(const std::vector<StudentRecord>& records);

/// The five learners with default hyperparameters, in report order NN, SVM, kNN, DT, RF.
std::vector<AlgorithmSpec> default_specs(std::uint64_t seed = 0);

}  // namespace vark
