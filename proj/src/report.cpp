#include "vark/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "vark/error.hpp"

namespace vark {
namespace {

using nlohmann::json;

std::string fixed6(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

void emit(const json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(key).dump() + ": ";
        emit(value, out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        emit(e, out, depth + 1);
      }
      out += flat ? "]" : "\n" + close_pad + "]";
      return;
    }
    case json::value_t::number_float: out += fixed6(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

json metrics_json(const RegressionMetrics& m) { return {{"mae", m.mae}, {"mdae", m.mdae}, {"rmse", m.rmse}}; }

json model_json(const RegressionModelResult& r) {
  json metrics, residuals, intervals, aggregated, per_matrix;
  for (std::size_t c = 0; c < kNumColumns; ++c) {
    const std::string col(column_name(c));
    metrics[col] = metrics_json(r.metrics[c]);
    residuals[col] = r.residuals[c];
    intervals[col] = {{"mean", r.intervals[c].mean}, {"half_width", r.intervals[c].half_width}, {"n", r.intervals[c].n}};
  }
  for (std::size_t s = 0; s < kNumStyles; ++s) {
    const std::string st(1, to_char(kStyles[s]));
    aggregated[st] = r.aggregated[s];
    for (std::size_t j = 0; j < kNumStyles; ++j) per_matrix[std::string(1, to_char(kStyles[j]))][st] = r.per_matrix[j][s];
  }
  return {{"name", r.model},
          {"metrics", metrics},
          {"residuals", residuals},
          {"intervals", intervals},
          {"predictions", {{"aggregated", aggregated}, {"per_matrix", per_matrix}}},
          {"nonconverged_fits", r.nonconverged_fits}};
}

std::string csv_header(const RunManifest& manifest) { return "# manifest: " + manifest.to_json().dump() + "\n"; }

std::string svg_header(int width, int height, const RunManifest& manifest) {
  std::string m = manifest.to_json().dump();
  for (std::size_t pos; (pos = m.find("--")) != std::string::npos;) m.replace(pos, 2, "- -");
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<!-- manifest: " << m << " -->\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return os.str();
}

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string dump_canonical(const json& j) {
  std::string out;
  emit(j, out, 0);
  out += '\n';
  return out;
}

json to_json(const RegressionReport& report) {
  json models = json::array();
  for (const auto& m : report.models) models.push_back(model_json(m));
  json actual = json::array();
  for (const auto& p : report.actual) {
    actual.push_back({{"A", p[Style::A]}, {"V", p[Style::V]}, {"K", p[Style::K]}, {"R", p[Style::R]}});
  }
  return {{"kind", "regression"},
          {"protocol", report.protocol},
          {"ids", report.ids},
          {"fold_of", report.fold_of},
          {"actual", actual},
          {"models", models},
          {"baseline", model_json(report.baseline)}};
}

json to_json(const ClassificationReport& report) {
  json matrices;
  for (std::size_t j = 0; j < kNumStyles; ++j) {
    json rows = json::array();
    for (const auto& r : report.matrices[j]) {
      json per_class, roc;
      for (std::size_t c = 0; c < kNumStyles; ++c) {
        const std::string st(1, to_char(kStyles[c]));
        const auto& cc = r.confusion.per_class[c];
        per_class[st] = {{"tp", cc.tp},
                         {"tn", cc.tn},
                         {"fp", cc.fp},
                         {"fn", cc.fn},
                         {"precision", r.summary.precision[c].value},
                         {"precision_undefined", r.summary.precision[c].undefined},
                         {"recall", r.summary.recall[c].value},
                         {"recall_undefined", r.summary.recall[c].undefined},
                         {"f1", r.summary.f1[c].value},
                         {"f1_undefined", r.summary.f1[c].undefined},
                         {"accuracy", r.summary.accuracy[c].value},
                         {"auc", r.roc[c] ? json(r.roc[c]->auc) : json(nullptr)}};
        if (r.roc[c]) {
          json pts = json::array();
          for (const auto& p : r.roc[c]->points) pts.push_back({p.fpr, p.tpr});
          roc[st] = pts;
        }
      }
      std::string predicted;
      for (Style s : r.predicted) predicted += to_char(s);
      rows.push_back({{"model", r.model},
                      {"precision", r.summary.macro_precision},
                      {"recall", r.summary.macro_recall},
                      {"f1", r.summary.macro_f1},
                      {"accuracy", r.summary.macro_accuracy},
                      {"fraction_correct", r.summary.fraction_correct},
                      {"auc", r.macro_auc},
                      {"per_class", per_class},
                      {"confusion_matrix", r.confusion.matrix},
                      {"roc", roc},
                      {"predicted", predicted},
                      {"single_class_folds", r.single_class_folds},
                      {"nonconverged_fits", r.nonconverged_fits}});
    }
    matrices[std::string(1, to_char(kStyles[j]))] = rows;
  }
  std::string actual;
  for (Style s : report.actual) actual += to_char(s);
  return {{"kind", "classification"},
          {"protocol", report.protocol},
          {"ids", report.ids},
          {"fold_of", report.fold_of},
          {"actual", actual},
          {"matrices", matrices}};
}

json to_json(const PairTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    json cells;
    for (std::size_t c = 0; c < kNumColumns; ++c) {
      const auto& cell = r.cells[c];
      cells[std::string(column_name(c))] = {{"p_value", cell.all_zero ? json(nullptr) : json(cell.p_value)},
                                            {"w", cell.w},
                                            {"effective_n", cell.effective_n},
                                            {"exact", cell.exact},
                                            {"all_zero_differences", cell.all_zero}};
    }
    rows.push_back({{"model_1", r.model_a}, {"model_2", r.model_b}, {"columns", cells}});
  }
  return {{"kind", "wilcoxon"}, {"rows", rows}};
}

json to_json(const DescriptiveReport& report) {
  json box, labels, questions = json::array();
  for (std::size_t s = 0; s < kNumStyles; ++s) {
    const auto& b = report.probability_stats[s];
    const std::string st(1, to_char(kStyles[s]));
    box[st] = {{"min", b.min}, {"q1", b.q1}, {"median", b.median}, {"q3", b.q3}, {"max", b.max}, {"mean", b.mean}};
    labels[st] = report.label_counts[s];
  }
  for (std::size_t q = 0; q < kNumQuestions; ++q) {
    json row;
    for (std::size_t s = 0; s < kNumStyles; ++s) row[std::string(1, to_char(kStyles[s]))] = report.question_counts[q][s];
    questions.push_back(row);
  }
  return {{"kind", "describe"},
          {"n", report.n},
          {"probability_boxplots", box},
          {"label_counts", labels},
          {"question_counts", questions}};
}

json to_json(const Nomination& n) {
  std::string styles;
  json probs;
  for (std::size_t i = 0; i < n.styles.size(); ++i) {
    if (i) styles += ',';
    styles += to_char(n.styles[i]);
  }
  for (std::size_t s = 0; s < kNumStyles; ++s) probs[std::string(1, to_char(kStyles[s]))] = n.probabilities[s];
  return {{"styles", styles}, {"threshold", n.threshold}, {"probabilities", probs}, {"degenerate", n.degenerate}};
}

RegressionReport regression_residuals_from_json(const json& j) {
  if (j.value("kind", "") != "regression") throw Error(ErrorKind::InvalidConfig, "not a regression report");
  RegressionReport report;
  report.protocol = j.at("protocol").get<std::string>();
  for (const auto& m : j.at("models")) {
    RegressionModelResult r;
    r.model = m.at("name").get<std::string>();
    for (std::size_t c = 0; c < kNumColumns; ++c) {
      r.residuals[c] = m.at("residuals").at(std::string(column_name(c))).get<std::vector<double>>();
    }
    report.models.push_back(std::move(r));
  }
  return report;
}

std::string regression_csv(const RegressionReport& report, const RunManifest& manifest) {
  std::string out = csv_header(manifest);
  out += "# protocol: " + report.protocol + "\nmetric";
  for (std::size_t c = 0; c < kNumColumns; ++c) {
    for (const auto& m : report.models) out += "," + std::string(column_name(c)) + ":" + m.model;
  }
  out += '\n';
  const std::array<std::pair<const char*, double RegressionMetrics::*>, 3> rows{
      {{"MAE", &RegressionMetrics::mae}, {"MdAE", &RegressionMetrics::mdae}, {"RMSE", &RegressionMetrics::rmse}}};
  for (const auto& [name, field] : rows) {
    out += name;
    for (std::size_t c = 0; c < kNumColumns; ++c) {
      for (const auto& m : report.models) out += "," + fixed6(m.metrics[c].*field);
    }
    out += '\n';
  }
  return out;
}

std::string wilcoxon_csv(const PairTable& table, const RunManifest& manifest) {
  std::string out = csv_header(manifest) + "model_1,model_2";
  for (std::size_t c = 0; c < kNumColumns; ++c) out += "," + std::string(column_name(c));
  out += '\n';
  for (const auto& r : table.rows) {
    out += r.model_a + "," + r.model_b;
    for (const auto& cell : r.cells) out += "," + (cell.all_zero ? std::string("NA") : fixed6(cell.p_value));
    out += '\n';
  }
  return out;
}

std::string classification_csv(const ClassificationReport& report, std::size_t matrix, const RunManifest& manifest) {
  std::string out = csv_header(manifest);
  out += "# matrix: " + std::string(1, to_char(kStyles.at(matrix))) + ", protocol: " + report.protocol + "\n";
  out += "model,precision,recall,f1,accuracy,auc\n";
  for (const auto& r : report.matrices.at(matrix)) {
    out += r.model + "," + fixed6(r.summary.macro_precision) + "," + fixed6(r.summary.macro_recall) + "," +
           fixed6(r.summary.macro_f1) + "," + fixed6(r.summary.macro_accuracy) + "," + fixed6(r.macro_auc) + "\n";
  }
  return out;
}

std::string label_counts_csv(const DescriptiveReport& report, const RunManifest& manifest) {
  std::string out = csv_header(manifest) + "style,count\n";
  for (std::size_t s = 0; s < kNumStyles; ++s) {
    out += std::string(1, to_char(kStyles[s])) + "," + std::to_string(report.label_counts[s]) + "\n";
  }
  return out;
}

std::string question_counts_csv(const DescriptiveReport& report, const RunManifest& manifest) {
  std::string out = csv_header(manifest) + "question,A,V,K,R\n";
  for (std::size_t q = 0; q < kNumQuestions; ++q) {
    out += "Q" + std::to_string(q + 1);
    for (std::size_t s = 0; s < kNumStyles; ++s) out += "," + std::to_string(report.question_counts[q][s]);
    out += '\n';
  }
  return out;
}

std::string probability_boxplot_csv(const DescriptiveReport& report, const RunManifest& manifest) {
  std::string out = csv_header(manifest) + "style,min,q1,median,q3,max,mean\n";
  for (std::size_t s = 0; s < kNumStyles; ++s) {
    const auto& b = report.probability_stats[s];
    out += std::string(1, to_char(kStyles[s])) + "," + fixed6(b.min) + "," + fixed6(b.q1) + "," + fixed6(b.median) +
           "," + fixed6(b.q3) + "," + fixed6(b.max) + "," + fixed6(b.mean) + "\n";
  }
  return out;
}

std::string roc_svg(const ClassificationReport& report, std::size_t matrix, const RunManifest& manifest) {
  constexpr double x0 = 50, y0 = 20, size = 360;
  std::ostringstream os;
  os << svg_header(560, 420, manifest);
  os << "<text x=\"" << x0 << "\" y=\"14\">ROC, matrix " << to_char(kStyles.at(matrix))
     << " (one-vs-rest, macro AUC in legend)</text>\n";
  os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << size << "\" height=\"" << size
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 + size << "\" x2=\"" << x0 + size << "\" y2=\"" << y0
     << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
  const auto& rows = report.matrices.at(matrix);
  for (std::size_t m = 0; m < rows.size(); ++m) {
    const char* color = kPalette[m % kPalette.size()];
    for (const auto& curve : rows[m].roc) {
      if (!curve) continue;
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-opacity=\"0.8\" points=\"";
      for (const auto& p : curve->points) os << num(x0 + p.fpr * size) << ',' << num(y0 + size - p.tpr * size) << ' ';
      os << "\"/>\n";
    }
    os << "<text x=\"" << x0 + size + 15 << "\" y=\"" << y0 + 20 + 18 * static_cast<double>(m) << "\" fill=\"" << color
       << "\">" << rows[m].model << " AUC " << num(rows[m].macro_auc) << "</text>\n";
  }
  os << "<text x=\"" << x0 + size / 2 - 30 << "\" y=\"" << y0 + size + 16 << "\">false positive rate</text>\n";
  os << "</svg>\n";
  return os.str();
}

std::string boxplot_svg(const DescriptiveReport& report, const RunManifest& manifest) {
  constexpr double x0 = 50, y0 = 20, h = 300, slot = 90;
  std::ostringstream os;
  os << svg_header(440, 360, manifest);
  auto y = [&](double v) { return num(y0 + h - v * h); };
  os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y0 + h << "\" stroke=\"black\"/>\n";
  for (std::size_t s = 0; s < kNumStyles; ++s) {
    const auto& b = report.probability_stats[s];
    const double cx = x0 + slot * (static_cast<double>(s) + 0.5);
    os << "<line x1=\"" << cx << "\" y1=\"" << y(b.min) << "\" x2=\"" << cx << "\" y2=\"" << y(b.max)
       << "\" stroke=\"black\"/>\n";
    os << "<rect x=\"" << cx - 25 << "\" y=\"" << y(b.q3) << "\" width=\"50\" height=\"" << num((b.q3 - b.q1) * h)
       << "\" fill=\"" << kPalette[s] << "\" fill-opacity=\"0.5\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << cx - 25 << "\" y1=\"" << y(b.median) << "\" x2=\"" << cx + 25 << "\" y2=\"" << y(b.median)
       << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << cx - 4 << "\" y=\"" << y(b.mean) << "\">x</text>\n";
    os << "<text x=\"" << cx - 4 << "\" y=\"" << y0 + h + 16 << "\">" << to_char(kStyles[s]) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string interval_svg(const RegressionReport& report, const RunManifest& manifest) {
  constexpr double x0 = 50, y0 = 20, h = 300, group = 110;
  double top = 0.0;
  for (const auto& m : report.models) {
    for (const auto& iv : m.intervals) top = std::max(top, iv.mean + iv.half_width);
  }
  if (top <= 0.0) top = 1.0;
  auto y = [&](double v) { return num(y0 + h - v / top * h); };
  std::ostringstream os;
  os << svg_header(static_cast<int>(x0 + group * kNumColumns + 20), 360, manifest);
  os << "<text x=\"" << x0 << "\" y=\"14\">absolute residuals, mean and 95% t interval</text>\n";
  for (std::size_t c = 0; c < kNumColumns; ++c) {
    const double gx = x0 + group * static_cast<double>(c);
    os << "<text x=\"" << gx + group / 2 - 8 << "\" y=\"" << y0 + h + 16 << "\">" << column_name(c) << "</text>\n";
    for (std::size_t m = 0; m < report.models.size(); ++m) {
      const auto& iv = report.models[m].intervals[c];
      const double cx = gx + 15 + 18 * static_cast<double>(m);
      const char* color = kPalette[m % kPalette.size()];
      os << "<line x1=\"" << cx << "\" y1=\"" << y(iv.mean - iv.half_width) << "\" x2=\"" << cx << "\" y2=\""
         << y(iv.mean + iv.half_width) << "\" stroke=\"" << color << "\"/>\n";
      os << "<circle cx=\"" << cx << "\" cy=\"" << y(iv.mean) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
  }
  for (std::size_t m = 0; m < report.models.size(); ++m) {
    os << "<text x=\"" << x0 + 90 * static_cast<double>(m) << "\" y=\"" << y0 + h + 34 << "\" fill=\""
       << kPalette[m % kPalette.size()] << "\">" << report.models[m].model << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace vark
