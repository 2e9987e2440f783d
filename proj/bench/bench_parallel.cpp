// Serial vs OpenMP: forest construction and a full regression CV run.

#include <benchmark/benchmark.h>

#include "vark/dataset.hpp"
#include "vark/experiment.hpp"
#include "vark/learners.hpp"

namespace {

const std::vector<vark::StudentRecord>& cohort() {
  static const auto records = [] {
    vark::SynthConfig cfg;
    cfg.seed = 42;
    return vark::synthesize(cfg);
  }();
  return records;
}

void forest_build(benchmark::State& state, vark::Execution exec) {
  const auto matrices = vark::build_style_matrices(cohort());
  std::vector<double> y;
  for (const auto& p : matrices[0].prob_targets) y.push_back(p[0]);
  vark::ForestParams params;
  for (auto _ : state) {
    vark::ForestModel model;
    model.fit_regression(matrices[0].features, y, params, 7, exec);
    benchmark::DoNotOptimize(model);
  }
}

void regression_cv(benchmark::State& state, vark::Execution exec) {
  vark::CvConfig cv;
  cv.scheme = vark::CvScheme::KFold;
  cv.k = 10;
  cv.seed = 1;
  const std::vector<vark::AlgorithmSpec> specs{
      vark::AlgorithmSpec::make(vark::AlgorithmKind::KNN, {}, 1),
      vark::AlgorithmSpec::make(vark::AlgorithmKind::DECISION_TREE, {}, 1),
      vark::AlgorithmSpec::make(vark::AlgorithmKind::SVM_RBF, {}, 1)};
  for (auto _ : state) {
    auto report = vark::run_regression(cohort(), specs, cv, {exec});
    benchmark::DoNotOptimize(report);
  }
}

}  // namespace

BENCHMARK_CAPTURE(forest_build, serial, vark::Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(forest_build, parallel, vark::Execution::Parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(regression_cv, serial, vark::Execution::Serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(regression_cv, parallel, vark::Execution::Parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
