#include "vark/experiment.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <set>

#include "vark/error.hpp"
#include "vark/rng.hpp"

namespace vark {
namespace {

constexpr std::size_t kMinRecords = 10;

// Runs job(i) for i in [0, n); the first failure is rethrown after the loop.
template <typename Job>
void run_jobs(std::size_t n, Execution exec, Job&& job) {
  const auto count = static_cast<std::ptrdiff_t>(n);
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t i = 0; i < count; ++i) job(static_cast<std::size_t>(i));
    return;
  }
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      job(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(vark_experiment_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& test) {
  std::vector<char> held(n, 0);
  for (std::size_t t : test) held[t] = 1;
  std::vector<std::size_t> train;
  train.reserve(n - test.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!held[i]) train.push_back(i);
  }
  return train;
}

std::vector<std::size_t> fold_membership(std::size_t n, const std::vector<std::vector<std::size_t>>& folds) {
  std::vector<std::size_t> fold_of(n, 0);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    for (std::size_t t : folds[f]) fold_of[t] = f;
  }
  return fold_of;
}

[[noreturn]] void rethrow_annotated(const Error& e, std::string_view model, std::string_view where, std::size_t fold) {
  throw Error(e.kind(), std::string(e.what()) + " [model " + std::string(model) + ", " + std::string(where) +
                            ", fold " + std::to_string(fold) + "]");
}

void check_inputs(const std::vector<StudentRecord>& records, const std::vector<AlgorithmSpec>& specs,
                  const CvConfig& cv) {
  if (records.size() < kMinRecords) {
    throw Error(ErrorKind::TooFewRecords, "experiments need at least " + std::to_string(kMinRecords) + " records, got " +
                                              std::to_string(records.size()));
  }
  if (specs.empty()) throw Error(ErrorKind::InvalidConfig, "no algorithms selected");
  if (cv.scheme == CvScheme::KFold && (cv.k < 2 || cv.k > records.size())) {
    throw Error(ErrorKind::InvalidConfig, "k-fold needs 2 <= k <= number of records");
  }
}

RegressionModelResult finish_regression(std::string name, const std::vector<StyleProbabilities>& actual,
                                        RegressionModelResult r) {
  r.model = std::move(name);
  const std::size_t n = actual.size();
  std::vector<ErrorSample> all;
  all.reserve(n * kNumStyles);
  for (std::size_t s = 0; s < kNumStyles; ++s) {
    auto& agg = r.aggregated[s];
    agg.assign(n, 0.0);
    std::vector<ErrorSample> samples(n);
    for (std::size_t t = 0; t < n; ++t) {
      agg[t] = (r.per_matrix[0][s][t] + r.per_matrix[1][s][t] + r.per_matrix[2][s][t] + r.per_matrix[3][s][t]) / 4.0;
      samples[t] = {actual[t][s], agg[t]};
    }
    r.metrics[s] = {mae(samples), mdae(samples), rmse(samples)};
    auto& res = r.residuals[s];
    res.resize(n);
    for (std::size_t t = 0; t < n; ++t) res[t] = std::abs(samples[t].actual - samples[t].predicted);
    all.insert(all.end(), samples.begin(), samples.end());
    r.residuals[kAllColumn].insert(r.residuals[kAllColumn].end(), res.begin(), res.end());
  }
  r.metrics[kAllColumn] = {mae(all), mdae(all), rmse(all)};
  for (std::size_t c = 0; c < kNumColumns; ++c) r.intervals[c] = interval_summary(r.residuals[c]);
  return r;
}

}  // namespace

std::string protocol_name(const CvConfig& cv) {
  if (cv.scheme == CvScheme::LOOCV) return "LOOCV";
  return std::to_string(cv.k) + "-fold" + (cv.stratified ? " stratified" : "") + " CV";
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, const CvConfig& cv, std::span<const Style> labels) {
  std::vector<std::vector<std::size_t>> folds;
  if (cv.scheme == CvScheme::LOOCV) {
    for (std::size_t i = 0; i < n; ++i) folds.push_back({i});
    return folds;
  }
  if (cv.k < 2 || cv.k > n) throw Error(ErrorKind::InvalidConfig, "k-fold needs 2 <= k <= n");
  if (cv.stratified && labels.size() != n) throw Error(ErrorKind::LengthMismatch, "stratification needs one label per row");
  Rng rng(derive_seed(cv.seed, {0xf01dULL}));
  auto shuffle = [&](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  };
  folds.resize(cv.k);
  std::size_t dealt = 0;
  auto deal = [&](std::vector<std::size_t> group) {
    shuffle(group);
    for (std::size_t i : group) folds[dealt++ % cv.k].push_back(i);
  };
  if (cv.stratified) {
    for (Style s : kStyles) {
      std::vector<std::size_t> group;
      for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] == s) group.push_back(i);
      }
      deal(std::move(group));
    }
  } else {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    deal(std::move(all));
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::string_view column_name(std::size_t column) {
  static constexpr std::array<std::string_view, kNumColumns> names{"A", "V", "K", "R", "All"};
  return names.at(column);
}

std::vector<AlgorithmSpec> default_specs(std::uint64_t seed) {
  std::vector<AlgorithmSpec> specs;
  for (AlgorithmKind k : kAlgorithms) specs.push_back(AlgorithmSpec::make(k, {}, seed));
  return specs;
}

RegressionReport run_regression(const std::vector<StudentRecord>& records, const std::vector<AlgorithmSpec>& specs,
                                const CvConfig& cv, const RunOptions& options) {
  check_inputs(records, specs, cv);
  const std::size_t n = records.size();
  const auto matrices = build_style_matrices(records);
  const auto& probs = matrices[0].prob_targets;
  const auto folds = make_folds(n, cv, matrices[0].labels);

  RegressionReport report;
  report.protocol = protocol_name(cv);
  for (const auto& r : records) report.ids.push_back(r.id);
  report.actual = probs;
  report.fold_of = fold_membership(n, folds);

  std::vector<RegressionModelResult> raw(specs.size());
  for (auto& r : raw) {
    for (auto& per_style : r.per_matrix) {
      for (auto& v : per_style) v.assign(n, 0.0);
    }
  }
  RegressionModelResult base;
  for (auto& per_style : base.per_matrix) {
    for (auto& v : per_style) v.assign(n, 0.0);
  }
  std::vector<std::size_t> nonconverged(folds.size() * specs.size(), 0);

  // Job (fold, model); each writes only its held-out rows.
  run_jobs(folds.size() * specs.size(), options.execution, [&](std::size_t job) {
    const std::size_t f = job / specs.size();
    const std::size_t m = job % specs.size();
    const auto train = complement(n, folds[f]);
    for (std::size_t j = 0; j < kNumStyles; ++j) {
      const auto x_train = matrices[j].features.select_rows(train);
      for (std::size_t s = 0; s < kNumStyles; ++s) {
        std::vector<double> y(train.size());
        for (std::size_t i = 0; i < train.size(); ++i) y[i] = probs[train[i]][s];
        AlgorithmSpec spec = specs[m];
        spec.seed = derive_seed(cv.seed, {specs[m].seed, f, m, j * kNumStyles + s});
        try {
          const auto model = fit(spec, TrainingSet::regression(x_train, std::move(y)), Mode::Regression);
          if (!model.converged()) ++nonconverged[job];
          for (std::size_t t : folds[f]) {
            raw[m].per_matrix[j][s][t] = model.predict_regression(matrices[j].features.row(t));
          }
        } catch (const Error& e) {
          rethrow_annotated(e, short_name(spec.kind),
                            "matrix " + std::string(1, to_char(kStyles[j])) + " target " + to_char(kStyles[s]), f);
        }
      }
    }
  });

  for (std::size_t f = 0; f < folds.size(); ++f) {
    const auto train = complement(n, folds[f]);
    for (std::size_t s = 0; s < kNumStyles; ++s) {
      double sum = 0.0;
      for (std::size_t i : train) sum += probs[i][s];
      const double mean = sum / static_cast<double>(train.size());
      for (std::size_t j = 0; j < kNumStyles; ++j) {
        for (std::size_t t : folds[f]) base.per_matrix[j][s][t] = mean;
      }
    }
  }

  for (std::size_t m = 0; m < specs.size(); ++m) {
    raw[m].nonconverged_fits = 0;
    for (std::size_t f = 0; f < folds.size(); ++f) raw[m].nonconverged_fits += nonconverged[f * specs.size() + m];
    report.models.push_back(finish_regression(std::string(short_name(specs[m].kind)), probs, std::move(raw[m])));
  }
  report.baseline = finish_regression("Mean", probs, std::move(base));
  return report;
}

ClassificationReport run_classification(const std::vector<StudentRecord>& records,
                                        const std::vector<AlgorithmSpec>& specs, const CvConfig& cv,
                                        const RunOptions& options) {
  check_inputs(records, specs, cv);
  const std::size_t n = records.size();
  const auto matrices = build_style_matrices(records);
  const auto& labels = matrices[0].labels;
  const auto folds = make_folds(n, cv, labels);

  ClassificationReport report;
  report.protocol = protocol_name(cv);
  for (const auto& r : records) report.ids.push_back(r.id);
  report.actual = labels;
  report.fold_of = fold_membership(n, folds);

  std::array<std::vector<ClassificationModelResult>, kNumStyles> raw;
  for (auto& per_matrix : raw) {
    per_matrix.resize(specs.size());
    for (auto& r : per_matrix) {
      r.predicted.assign(n, Style::A);
      r.scores.assign(n, {});
    }
  }
  const std::size_t jobs_per_matrix = specs.size() * folds.size();
  std::vector<std::size_t> nonconverged(kNumStyles * jobs_per_matrix, 0);
  std::vector<char> single_class(kNumStyles * jobs_per_matrix, 0);

  run_jobs(kNumStyles * jobs_per_matrix, options.execution, [&](std::size_t job) {
    const std::size_t j = job / jobs_per_matrix;
    const std::size_t m = (job % jobs_per_matrix) / folds.size();
    const std::size_t f = job % folds.size();
    const auto train = complement(n, folds[f]);
    std::vector<Style> y(train.size());
    std::set<Style> distinct;
    for (std::size_t i = 0; i < train.size(); ++i) {
      y[i] = labels[train[i]];
      distinct.insert(y[i]);
    }
    single_class[job] = distinct.size() == 1;
    AlgorithmSpec spec = specs[m];
    spec.seed = derive_seed(cv.seed, {specs[m].seed, f, m, 16 + j});
    try {
      const auto model = fit(spec, TrainingSet::classification(matrices[j].features.select_rows(train), std::move(y)),
                             Mode::Classification);
      if (!model.converged()) ++nonconverged[job];
      for (std::size_t t : folds[f]) {
        const auto pred = model.predict_classification(matrices[j].features.row(t));
        raw[j][m].predicted[t] = pred.label;
        raw[j][m].scores[t] = pred.scores;
      }
    } catch (const Error& e) {
      rethrow_annotated(e, short_name(spec.kind), "matrix " + std::string(1, to_char(kStyles[j])), f);
    }
  });

  for (std::size_t j = 0; j < kNumStyles; ++j) {
    for (std::size_t m = 0; m < specs.size(); ++m) {
      auto& r = raw[j][m];
      r.model = std::string(short_name(specs[m].kind));
      for (std::size_t f = 0; f < folds.size(); ++f) {
        const std::size_t job = j * jobs_per_matrix + m * folds.size() + f;
        r.nonconverged_fits += nonconverged[job];
        r.single_class_folds += single_class[job];
      }
      r.confusion = confusion(labels, r.predicted);
      r.summary = summarize(r.confusion);
      double auc_sum = 0.0;
      std::size_t defined = 0;
      for (Style c : kStyles) {
        const auto& cc = r.confusion.per_class[index(c)];
        if (cc.tp + cc.fn == 0 || cc.tn + cc.fp == 0) continue;
        r.roc[index(c)] = roc_auc(labels, r.scores, c);
        auc_sum += r.roc[index(c)]->auc;
        ++defined;
      }
      r.macro_auc = defined > 0 ? auc_sum / static_cast<double>(defined) : 0.5;
    }
    report.matrices[j] = std::move(raw[j]);
  }
  return report;
}

PairCell compare_residuals(std::span<const double> a, std::span<const double> b) {
  PairCell cell;
  try {
    const auto w = wilcoxon_signed_rank(a, b);
    cell.p_value = w.p_value;
    cell.w = w.w;
    cell.effective_n = w.effective_n;
    cell.exact = w.exact;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AllZeroDifferences) throw;
    cell.all_zero = true;
    cell.p_value = 1.0;
  }
  return cell;
}

PairTable compare_models(const RegressionReport& report) {
  PairTable table;
  for (std::size_t i = 0; i < report.models.size(); ++i) {
    for (std::size_t j = i + 1; j < report.models.size(); ++j) {
      PairRow row{report.models[i].model, report.models[j].model, {}};
      for (std::size_t c = 0; c < kNumColumns; ++c) {
        row.cells[c] = compare_residuals(report.models[i].residuals[c], report.models[j].residuals[c]);
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

DescriptiveReport describe(const std::vector<StudentRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::EmptyDataset, "cannot describe zero records");
  DescriptiveReport d;
  d.n = records.size();
  std::array<std::vector<double>, kNumStyles> probs;
  for (const auto& r : records) {
    const auto p = compute_probabilities(r);
    for (std::size_t s = 0; s < kNumStyles; ++s) probs[s].push_back(p[s]);
    ++d.label_counts[index(derive_label(p))];
    for (std::size_t q = 0; q < kNumQuestions; ++q) {
      for (Style s : kStyles) {
        if (r.responses[q].has(s)) ++d.question_counts[q][index(s)];
      }
    }
  }
  for (std::size_t s = 0; s < kNumStyles; ++s) d.probability_stats[s] = boxplot_stats(probs[s]);
  return d;
}

}  // namespace vark
