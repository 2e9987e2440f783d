// vark: synthesize VARK cohorts, evaluate the five learners, nominate styles.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vark/dataset.hpp"
#include "vark/error.hpp"
#include "vark/experiment.hpp"
#include "vark/learners.hpp"
#include "vark/manifest.hpp"
#include "vark/report.hpp"
#include "vark/selection.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

int exit_code(vark::ErrorKind kind) {
  using vark::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::UnknownHyperparameter:
    case ErrorKind::InvalidThreshold:
    case ErrorKind::ModeMismatch:
      return kUsage;
    case ErrorKind::MissingQuestion:
    case ErrorKind::InvalidToken:
    case ErrorKind::EmptyAnswer:
    case ErrorKind::DuplicateId:
    case ErrorKind::MalformedCsv:
    case ErrorKind::EmptyDataset:
    case ErrorKind::TooFewRecords:
    case ErrorKind::WidthMismatch:
    case ErrorKind::LengthMismatch:
    case ErrorKind::Io:
      return kData;
    default:
      return kNumerical;
  }
}

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string format = "json";
  bool format_given = false;
  bool plots = false;

  std::uint64_t resolved_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("VARK_SEED"); env && *env) {
      try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used);
        if (used == std::string(env).size()) return v;
      } catch (const std::exception&) {
      }
      throw vark::Error(vark::ErrorKind::InvalidConfig, "VARK_SEED is not an unsigned integer");
    }
    return 0;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw vark::Error(vark::ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << content)) throw vark::Error(vark::ErrorKind::Io, "cannot write '" + path.string() + "'");
  std::cout << "wrote " << path.string() << '\n';
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_reals(const std::string& s, std::size_t expected, const char* what) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw vark::Error(vark::ErrorKind::InvalidConfig, std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (out.size() != expected) {
    throw vark::Error(vark::ErrorKind::InvalidConfig,
                      std::string(what) + " needs " + std::to_string(expected) + " comma-separated values");
  }
  return out;
}

std::string fmt_real(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct EvalOptions {
  std::string input;
  std::string mode = "both";
  std::string cv = "loocv";
  std::size_t folds = 10;
  bool stratified = false;
  std::string models = "NN,SVM,kNN,DT,RF";
  bool serial = false;
};

std::vector<vark::AlgorithmSpec> specs_for(const std::string& models, std::uint64_t seed) {
  std::vector<vark::AlgorithmSpec> specs;
  for (const auto& name : split_list(models)) specs.push_back(vark::AlgorithmSpec::make(vark::parse_algorithm(name), {}, seed));
  if (specs.empty()) throw vark::Error(vark::ErrorKind::InvalidConfig, "--models selects nothing");
  return specs;
}

vark::CvConfig cv_for(const EvalOptions& o, std::uint64_t seed) {
  vark::CvConfig cv;
  if (o.cv == "loocv") {
    cv.scheme = vark::CvScheme::LOOCV;
  } else if (o.cv == "kfold") {
    cv.scheme = vark::CvScheme::KFold;
    cv.k = o.folds;
    cv.stratified = o.stratified;
  } else {
    throw vark::Error(vark::ErrorKind::InvalidConfig, "--cv must be loocv or kfold");
  }
  cv.seed = seed;
  return cv;
}

vark::RunManifest manifest_for(const std::string& command, const GlobalOptions& g, std::uint64_t seed,
                               std::map<std::string, std::string> flags, const std::string& input_text) {
  flags["format"] = g.format;
  flags["plots"] = g.plots ? "true" : "false";
  flags["seed"] = std::to_string(seed);
  vark::RunManifest m;
  m.command = command;
  m.flags = std::move(flags);
  m.input_sha256 = input_text.empty() ? "" : vark::sha256_hex(input_text);
  m.seed = seed;
  return m;
}

std::map<std::string, std::string> eval_flags(const EvalOptions& o) {
  return {{"input", o.input}, {"mode", o.mode},       {"cv", o.cv},
          {"folds", std::to_string(o.folds)},         {"stratified", o.stratified ? "true" : "false"},
          {"models", o.models}, {"serial", o.serial ? "true" : "false"}};
}

json with_manifest(const vark::RunManifest& m, const std::string& key, json body) {
  return {{"manifest", m.to_json()}, {key, std::move(body)}};
}

void write_describe(const vark::DescriptiveReport& d, const GlobalOptions& g, const vark::RunManifest& m) {
  const fs::path dir(g.out_dir);
  if (g.format == "csv") {
    write_file(dir / "describe_labels.csv", vark::label_counts_csv(d, m));
    write_file(dir / "describe_questions.csv", vark::question_counts_csv(d, m));
    write_file(dir / "describe_probabilities.csv", vark::probability_boxplot_csv(d, m));
  } else {
    write_file(dir / "describe.json", vark::dump_canonical(with_manifest(m, "describe", vark::to_json(d))));
  }
  if (g.plots) write_file(dir / "probabilities_boxplot.svg", vark::boxplot_svg(d, m));
}

void write_wilcoxon(const vark::PairTable& t, const GlobalOptions& g, const vark::RunManifest& m) {
  const fs::path dir(g.out_dir);
  if (g.format == "csv") {
    write_file(dir / "wilcoxon.csv", vark::wilcoxon_csv(t, m));
  } else {
    write_file(dir / "wilcoxon.json", vark::dump_canonical(with_manifest(m, "wilcoxon", vark::to_json(t))));
  }
}

int cmd_synth(const GlobalOptions& g, std::size_t students, const std::string& concentration, double rate,
              const std::string& output) {
  const auto seed = g.resolved_seed();
  vark::SynthConfig cfg;
  cfg.n_students = students;
  const auto c = parse_reals(concentration, vark::kNumStyles, "--concentration");
  std::copy(c.begin(), c.end(), cfg.concentration.begin());
  cfg.multi_select_rate = rate;
  cfg.seed = seed;
  vark::validate(cfg);

  const std::string csv = vark::serialize_responses(vark::synthesize(cfg));
  const fs::path path = fs::path(output).is_absolute() ? fs::path(output) : fs::path(g.out_dir) / output;
  write_file(path, csv);
  auto m = manifest_for("synth", g, seed,
                        {{"students", std::to_string(students)},
                         {"concentration", concentration},
                         {"rate", fmt_real(rate)},
                         {"output", output}},
                        "");
  json doc = m.to_json();
  doc["output_sha256"] = vark::sha256_hex(csv);
  write_file(path.string() + ".manifest.json", vark::dump_canonical(doc));
  return kOk;
}

int cmd_eval(const GlobalOptions& g, const EvalOptions& o) {
  const auto seed = g.resolved_seed();
  if (o.mode != "regression" && o.mode != "classification" && o.mode != "both") {
    throw vark::Error(vark::ErrorKind::InvalidConfig, "--mode must be regression, classification or both");
  }
  const std::string text = read_file(o.input);
  const auto records = vark::parse_responses(text);
  const auto specs = specs_for(o.models, seed);
  const auto cv = cv_for(o, seed);
  const vark::RunOptions run{o.serial ? vark::Execution::Serial : vark::Execution::Parallel};
  const auto m = manifest_for("eval", g, seed, eval_flags(o), text);
  const fs::path dir(g.out_dir);

  write_describe(vark::describe(records), g, m);

  if (o.mode != "classification") {
    const auto report = vark::run_regression(records, specs, cv, run);
    const auto pairs = vark::compare_models(report);
    if (g.format == "csv") {
      write_file(dir / "regression.csv", vark::regression_csv(report, m));
    } else {
      write_file(dir / "regression.json", vark::dump_canonical(with_manifest(m, "regression", vark::to_json(report))));
    }
    write_wilcoxon(pairs, g, m);
    if (g.plots) write_file(dir / "residual_intervals.svg", vark::interval_svg(report, m));
  }
  if (o.mode != "regression") {
    const auto report = vark::run_classification(records, specs, cv, run);
    if (g.format == "csv") {
      for (std::size_t j = 0; j < vark::kNumStyles; ++j) {
        write_file(dir / ("classification_" + std::string(1, vark::to_char(vark::kStyles[j])) + ".csv"),
                   vark::classification_csv(report, j, m));
      }
    } else {
      write_file(dir / "classification.json",
                 vark::dump_canonical(with_manifest(m, "classification", vark::to_json(report))));
    }
    if (g.plots) {
      for (std::size_t j = 0; j < vark::kNumStyles; ++j) {
        write_file(dir / ("roc_" + std::string(1, vark::to_char(vark::kStyles[j])) + ".svg"), vark::roc_svg(report, j, m));
      }
    }
  }
  return kOk;
}

int cmd_describe(const GlobalOptions& g, const std::string& input) {
  const auto seed = g.resolved_seed();
  const std::string text = read_file(input);
  const auto records = vark::parse_responses(text);
  write_describe(vark::describe(records), g, manifest_for("describe", g, seed, {{"input", input}}, text));
  return kOk;
}

int cmd_compare(const GlobalOptions& g, const EvalOptions& o, const std::string& report_path) {
  const auto seed = g.resolved_seed();
  if (!report_path.empty()) {
    const std::string text = read_file(report_path);
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw vark::Error(vark::ErrorKind::MalformedCsv, "report is not valid JSON: " + std::string(e.what()));
    }
    const auto& body = doc.contains("regression") ? doc.at("regression") : doc;
    const auto report = vark::regression_residuals_from_json(body);
    write_wilcoxon(vark::compare_models(report), g,
                   manifest_for("compare", g, seed, {{"report", report_path}}, text));
    return kOk;
  }
  if (o.input.empty()) throw vark::Error(vark::ErrorKind::InvalidConfig, "compare needs --input or --report");
  const std::string text = read_file(o.input);
  const auto records = vark::parse_responses(text);
  const auto report = vark::run_regression(records, specs_for(o.models, seed), cv_for(o, seed),
                                           {o.serial ? vark::Execution::Serial : vark::Execution::Parallel});
  auto flags = eval_flags(o);
  flags.erase("mode");
  write_wilcoxon(vark::compare_models(report), g, manifest_for("compare", g, seed, flags, text));
  return kOk;
}

int cmd_train(const GlobalOptions& g, const std::string& input, const std::string& algorithm,
              const std::string& output) {
  const auto seed = g.resolved_seed();
  const std::string text = read_file(input);
  const auto records = vark::parse_responses(text);
  const auto matrices = vark::build_style_matrices(records);
  const auto kind = vark::parse_algorithm(algorithm);
  json models = json::array();
  for (std::size_t j = 0; j < vark::kNumStyles; ++j) {
    json per_target = json::array();
    for (std::size_t s = 0; s < vark::kNumStyles; ++s) {
      std::vector<double> y;
      for (const auto& p : matrices[j].prob_targets) y.push_back(p[s]);
      auto spec = vark::AlgorithmSpec::make(kind, {}, vark::derive_seed(seed, {j * vark::kNumStyles + s}));
      const auto model = vark::fit(spec, vark::TrainingSet::regression(matrices[j].features, std::move(y)),
                                   vark::Mode::Regression, vark::Execution::Parallel);
      per_target.push_back(model.to_json());
    }
    models.push_back(std::move(per_target));
  }
  const auto m = manifest_for("train", g, seed, {{"input", input}, {"algorithm", algorithm}, {"output", output}}, text);
  json doc{{"manifest", m.to_json()}, {"kind", "model_bundle"}, {"models", models}};
  const fs::path path = fs::path(output).is_absolute() ? fs::path(output) : fs::path(g.out_dir) / output;
  // Full double precision so reloaded models predict bit-for-bit.
  write_file(path, doc.dump(1) + "\n");
  return kOk;
}

std::array<double, vark::kNumStyles> predict_bundle(const std::string& path, const std::string& responses) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw vark::Error(vark::ErrorKind::MalformedCsv, "model bundle is not valid JSON: " + std::string(e.what()));
  }
  // Reuse the CSV parser to validate the response cells.
  std::string csv = "id";
  for (std::size_t q = 1; q <= vark::kNumQuestions; ++q) csv += ",Q" + std::to_string(q);
  csv += "\nquery," + responses + "\n";
  const auto record = vark::parse_responses(csv).at(0);
  const auto& models = doc.at("models");
  std::array<double, vark::kNumStyles> out{};
  for (std::size_t j = 0; j < vark::kNumStyles; ++j) {
    std::vector<double> row(vark::kNumQuestions);
    for (std::size_t q = 0; q < vark::kNumQuestions; ++q) row[q] = record.responses[q].has(vark::kStyles[j]) ? 1.0 : 0.0;
    for (std::size_t s = 0; s < vark::kNumStyles; ++s) {
      out[s] += vark::TrainedModel::from_json(models.at(j).at(s)).predict_regression(row) / 4.0;
    }
  }
  return out;
}

int cmd_nominate(const GlobalOptions& g, const std::string& probs, const std::string& model,
                 const std::string& responses, double threshold) {
  std::array<double, vark::kNumStyles> raw{};
  if (!probs.empty()) {
    const auto p = parse_reals(probs, vark::kNumStyles, "--probs");
    std::copy(p.begin(), p.end(), raw.begin());
  } else if (!model.empty() && !responses.empty()) {
    raw = predict_bundle(model, responses);
  } else {
    throw vark::Error(vark::ErrorKind::InvalidConfig, "nominate needs --probs or --model with --responses");
  }
  const auto n = vark::nominate(raw, threshold);
  if (g.format_given && g.format == "json") {
    auto m = manifest_for("nominate", g, g.resolved_seed(),
                          {{"probs", probs}, {"model", model}, {"responses", responses}, {"threshold", fmt_real(threshold)}},
                          "");
    std::cout << vark::dump_canonical(with_manifest(m, "nomination", vark::to_json(n)));
  } else {
    std::string line;
    for (std::size_t i = 0; i < n.styles.size(); ++i) {
      if (i) line += ',';
      line += vark::to_char(n.styles[i]);
    }
    std::cout << line << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"VARK learning-style prediction toolkit"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Random seed (overrides VARK_SEED)");
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  auto* format_opt = app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("--plots", g.plots, "Also write SVG charts");
  for (auto* opt : {seed_opt, format_opt}) opt->configurable();
  app.fallthrough();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic questionnaire cohort");
  std::size_t students = 72;
  std::string concentration = "2,2,2,2";
  double rate = 0.3;
  std::string synth_out = "cohort.csv";
  synth->add_option("--students", students, "Number of students")->capture_default_str();
  synth->add_option("--concentration", concentration, "Dirichlet concentration A,V,K,R")->capture_default_str();
  synth->add_option("--rate", rate, "Probability of a second style per answer")->capture_default_str();
  synth->add_option("-o,--output", synth_out, "Output CSV")->capture_default_str();

  EvalOptions eo;
  auto add_eval_options = [&](CLI::App* cmd, bool input_required) {
    auto* in = cmd->add_option("-i,--input", eo.input, "Questionnaire CSV");
    if (input_required) in->required();
    cmd->add_option("--cv", eo.cv, "loocv or kfold")->capture_default_str();
    cmd->add_option("--folds", eo.folds, "Folds for kfold")->capture_default_str();
    cmd->add_flag("--stratified", eo.stratified, "Stratify k-fold splits by label");
    cmd->add_option("--models", eo.models, "Comma-separated algorithms")->capture_default_str();
    cmd->add_flag("--serial", eo.serial, "Disable OpenMP parallelism");
  };
  auto* eval = app.add_subcommand("eval", "Cross-validated regression and classification reports");
  add_eval_options(eval, true);
  eval->add_option("--mode", eo.mode, "regression, classification or both")->capture_default_str();

  auto* desc = app.add_subcommand("describe", "Descriptive statistics of a cohort");
  std::string desc_input;
  desc->add_option("-i,--input", desc_input, "Questionnaire CSV")->required();

  auto* compare = app.add_subcommand("compare", "Wilcoxon signed-rank table of regression residuals");
  add_eval_options(compare, false);
  std::string report_path;
  compare->add_option("--report", report_path, "Existing regression.json to read residuals from");

  auto* nominate = app.add_subcommand("nominate", "Select favoured styles from predicted probabilities");
  std::string probs, model, responses;
  double threshold = 0.15;
  nominate->add_option("--probs", probs, "Predicted A,V,K,R values");
  nominate->add_option("--model", model, "Model bundle written by 'train'");
  nominate->add_option("--responses", responses, "16 comma-separated answers, e.g. AV,K,...");
  nominate->add_option("--threshold", threshold, "Maximum gap below the top style")->capture_default_str();

  auto* train = app.add_subcommand("train", "Fit one algorithm on a full cohort and save a model bundle");
  std::string train_input, algorithm = "RF", train_out = "model.json";
  train->add_option("-i,--input", train_input, "Questionnaire CSV")->required();
  train->add_option("--algorithm", algorithm, "NN, SVM, kNN, DT or RF")->capture_default_str();
  train->add_option("-o,--output", train_out, "Bundle path")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;
  g.format_given = format_opt->count() > 0;

  try {
    if (*synth) return cmd_synth(g, students, concentration, rate, synth_out);
    if (*eval) return cmd_eval(g, eo);
    if (*desc) return cmd_describe(g, desc_input);
    if (*compare) return cmd_compare(g, eo, report_path);
    if (*nominate) return cmd_nominate(g, probs, model, responses, threshold);
    if (*train) return cmd_train(g, train_input, algorithm, train_out);
  } catch (const vark::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
