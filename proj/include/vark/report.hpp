#pragma once

#include <string>

#include "json.hpp"

#include "vark/experiment.hpp"
#include "vark/manifest.hpp"
#include "vark/selection.hpp"

namespace vark {

/// Pretty-printed JSON with sorted keys and every float as fixed 6-decimal
/// text, so identical reports serialize to identical bytes.
std::string dump_canonical(const nlohmann::json& j);

nlohmann::json to_json(const RegressionReport& report);
nlohmann::json to_json(const ClassificationReport& report);
nlohmann::json to_json(const PairTable& table);
nlohmann::json to_json(const DescriptiveReport& report);
nlohmann::json to_json(const Nomination& nomination);

/// Rebuilds per-model residual columns from a serialized regression report
/// (values carry the report's 6-decimal rounding).
RegressionReport regression_residuals_from_json(const nlohmann::json& j);

/// CSV table analogs. Each starts with a "# manifest: {...}" comment line.
/// Regression: one row per metric, columns grouped by style then model.
std::string regression_csv(const RegressionReport& report, const RunManifest& manifest);
/// Wilcoxon: model pair rows, p-value per column.
std::string wilcoxon_csv(const PairTable& table, const RunManifest& manifest);
/// One matrix: model rows with precision, recall, F1, accuracy, AUC.
std::string classification_csv(const ClassificationReport& report, std::size_t matrix, const RunManifest& manifest);
std::string label_counts_csv(const DescriptiveReport& report, const RunManifest& manifest);
std::string question_counts_csv(const DescriptiveReport& report, const RunManifest& manifest);
std::string probability_boxplot_csv(const DescriptiveReport& report, const RunManifest& manifest);

/// Standalone SVG charts.
std::string roc_svg(const ClassificationReport& report, std::size_t matrix, const RunManifest& manifest);
std::string boxplot_svg(const DescriptiveReport& report, const RunManifest& manifest);
std::string interval_svg(const RegressionReport& report, const RunManifest& manifest);

}  // namespace vark
