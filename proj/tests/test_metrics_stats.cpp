#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"
#include "vark/error.hpp"
#include "vark/metrics.hpp"
#include "vark/rng.hpp"
#include "vark/selection.hpp"
#include "vark/stats.hpp"

using namespace vark;

namespace {

std::vector<ErrorSample> samples(const std::vector<double>& errors) {
  std::vector<ErrorSample> s;
  for (double e : errors) s.push_back({0.0, e});
  return s;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("regression metric examples") {
  CHECK(mae(samples({0.1, -0.3})) == doctest::Approx(0.2));
  CHECK(mae(samples({0, 0, 0})) == 0.0);
  CHECK(mdae(samples({0.1, 0.2, 0.9})) == doctest::Approx(0.2));
  CHECK(mdae(samples({0.1, 0.3})) == doctest::Approx(0.2));
  CHECK(rmse(samples({0, 0.2})) == doctest::Approx(std::sqrt(0.02)));
  CHECK(rmse(samples({-0.3, 0.3, 0.3})) == doctest::Approx(0.3));
  CHECK(kind_of([] { mae({}); }) == ErrorKind::EmptySample);
  CHECK(kind_of([] { rmse({}); }) == ErrorKind::EmptySample);
}

TEST_CASE("confusion examples") {
  const std::vector<Style> actual{Style::A, Style::A, Style::V}, pred{Style::A, Style::V, Style::V};
  const auto c = confusion(actual, pred);
  CHECK(c.per_class[0] == ClassCounts{1, 1, 0, 1});
  CHECK(c.matrix[0][1] == 1);
  const auto same = confusion(actual, actual);
  for (const auto& k : same.per_class) {
    CHECK(k.fp == 0);
    CHECK(k.fn == 0);
  }
  const std::vector<Style> shorter{Style::A};
  CHECK(kind_of([&] { confusion(actual, shorter); }) == ErrorKind::LengthMismatch);
}

TEST_CASE("ratio metric conventions") {
  CHECK(recall({5, 0, 0, 5}).value == 0.5);
  const auto p = precision({0, 7, 0, 3});
  CHECK(p.value == 0.0);
  CHECK(p.undefined);
  const std::vector<Style> labels{Style::A, Style::V, Style::K, Style::R, Style::A};
  const auto s = summarize(confusion(labels, labels));
  CHECK(s.macro_precision == 1.0);
  CHECK(s.macro_recall == 1.0);
  CHECK(s.macro_f1 == 1.0);
  CHECK(s.macro_accuracy == 1.0);
}

TEST_CASE("macro one-vs-rest accuracy relates to fraction correct") {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<Style> a(n), p(n);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = kStyles[rng.below(4)];
      p[i] = rng.uniform() < 0.5 ? a[i] : kStyles[rng.below(4)];
      hits += a[i] == p[i];
    }
    const auto c = confusion(a, p);
    const auto s = summarize(c);
    const double frac = static_cast<double>(hits) / n;
    CHECK(s.fraction_correct == doctest::Approx(frac).epsilon(1e-12));
    std::size_t tp = 0;
    for (const auto& k : c.per_class) tp += k.tp;
    CHECK(tp == hits);
    // Each miss costs one FP and one FN in two different classes.
    CHECK(s.macro_accuracy == doctest::Approx(1.0 - 2.0 * (1.0 - frac) / 4.0).epsilon(1e-12));
  }
}

TEST_CASE("ROC examples and invariants") {
  const std::vector<double> sep{0.1, 0.2, 0.8, 0.9};
  const std::vector<std::uint8_t> lab{0, 0, 1, 1};
  CHECK(roc_curve(sep, lab).auc == 1.0);
  const std::vector<double> flat(4, 0.3);
  const auto c = roc_curve(flat, lab);
  CHECK(c.auc == 0.5);
  CHECK(c.points.front().fpr == 0.0);
  CHECK(c.points.back().tpr == 1.0);
  const std::vector<std::uint8_t> one{1, 1, 1, 1};
  CHECK(kind_of([&] { roc_curve(sep, one); }) == ErrorKind::SingleClassSample);

  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 4 + rng.below(50);
    std::vector<double> s(n), mono(n), rev(n);
    std::vector<std::uint8_t> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = std::round(rng.uniform() * 8) / 8;
      mono[i] = std::exp(3 * s[i]) + 1;
      rev[i] = -s[i];
      y[i] = i < 2 ? static_cast<std::uint8_t>(i) : rng.uniform() < 0.4;
    }
    const auto r = roc_curve(s, y);
    CHECK(roc_curve(mono, y).auc == doctest::Approx(r.auc).epsilon(1e-12));
    CHECK(roc_curve(rev, y).auc == doctest::Approx(1.0 - r.auc).epsilon(1e-12));
    for (std::size_t i = 1; i < r.points.size(); ++i) {
      CHECK(r.points[i].fpr >= r.points[i - 1].fpr);
      CHECK(r.points[i].tpr >= r.points[i - 1].tpr);
    }
  }
}

TEST_CASE("Wilcoxon examples") {
  const std::vector<double> a{1, 2, 3, 4, 5}, zero(5, 0.0);
  const auto r = wilcoxon_signed_rank(a, zero);
  CHECK(r.w == 0.0);
  CHECK(r.w_plus == 15.0);
  CHECK(r.p_value == 0.0625);
  CHECK(r.exact);
  CHECK(kind_of([&] { wilcoxon_signed_rank(a, a); }) == ErrorKind::AllZeroDifferences);

  const std::vector<double> d{1, -1, 2, -2, 3, -3};
  CHECK(wilcoxon_signed_rank(d, std::vector<double>(6, 0.0)).p_value == 1.0);

  const auto swapped = wilcoxon_signed_rank(zero, a);
  CHECK(swapped.p_value == r.p_value);
  CHECK(swapped.w_minus == r.w_plus);
}

TEST_CASE("Wilcoxon zeros and ties") {
  // Differences 0, 1, -1, 2, 2: zero dropped, |1| ties share rank 1.5, |2| share 3.5.
  const std::vector<double> a{3, 1, 0, 2, 2}, b{3, 0, 1, 0, 0};
  const auto r = wilcoxon_signed_rank(a, b);
  CHECK(r.effective_n == 4);
  CHECK(r.w_plus == 8.5);
  CHECK(r.w_minus == 1.5);
  const std::vector<double> v{3, 1, 3, 2};
  CHECK(average_ranks(v) == std::vector<double>{3.5, 1, 3.5, 2});
}

TEST_CASE("Wilcoxon exact p equals enumeration with ties") {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = 1 + rng.below(12);
    std::vector<double> mag(m);
    for (auto& v : mag) v = 1 + rng.below(4);
    const auto ranks = average_ranks(mag);
    double w = 0;
    for (double r : ranks)
      if (rng.uniform() < 0.5) w += r;
    CHECK(wilcoxon_exact_p(ranks, w) == oracle::wilcoxon_enumerated_p(ranks, w));
  }
}

TEST_CASE("normal approximation tracks the exact test at m = 20") {
  Rng rng(4);
  std::vector<double> ranks(20);
  std::iota(ranks.begin(), ranks.end(), 1.0);
  for (int t = 0; t < 200; ++t) {
    double w = 0;
    for (double r : ranks)
      if (rng.uniform() < 0.5) w += r;
    CHECK(std::fabs(wilcoxon_normal_p(ranks, w) - wilcoxon_exact_p(ranks, w)) < 0.01);
  }
}

TEST_CASE("Wilcoxon switches to the normal approximation above 20 pairs") {
  Rng rng(5);
  std::vector<double> a(72), b(72);
  for (std::size_t i = 0; i < 72; ++i) {
    a[i] = rng.uniform();
    b[i] = a[i] + 0.2 + 0.01 * rng.uniform();
  }
  const auto r = wilcoxon_signed_rank(a, b);
  CHECK_FALSE(r.exact);
  CHECK(r.p_value < 0.01);
}

TEST_CASE("t quantile and interval summary") {
  CHECK(student_t_quantile(0.975, 1) == doctest::Approx(12.7062047).epsilon(1e-8));
  CHECK(student_t_quantile(0.975, 10) == doctest::Approx(2.228138852).epsilon(1e-8));
  const std::vector<double> two{0, 1};
  const auto s = interval_summary(two);
  CHECK(s.mean == 0.5);
  // sd = 1/sqrt(2), se = 0.5.
  CHECK(s.half_width == doctest::Approx(12.7062047 * 0.5).epsilon(1e-8));
  const std::vector<double> flat(5, 0.3);
  CHECK(interval_summary(flat).half_width == 0.0);
  const std::vector<double> v{0.1, 0.5, 0.2, 0.9}, shifted{1.1, 1.5, 1.2, 1.9};
  CHECK(interval_summary(shifted).mean == doctest::Approx(interval_summary(v).mean + 1));
  CHECK(interval_summary(shifted).half_width == doctest::Approx(interval_summary(v).half_width).epsilon(1e-12));
  CHECK(kind_of([] { interval_summary(std::vector<double>{1.0}); }) == ErrorKind::TooFewValues);
}

TEST_CASE("boxplot statistics") {
  const std::vector<double> v{4, 1, 3, 2};
  const auto b = boxplot_stats(v);
  CHECK(b.median == 2.5);
  CHECK(b.q1 == 1.75);
  CHECK(b.q3 == 3.25);
  CHECK(b.min == 1);
  CHECK(b.max == 4);
  const std::vector<double> one{0.7};
  const auto o = boxplot_stats(one);
  CHECK((o.min == 0.7 && o.q1 == 0.7 && o.median == 0.7 && o.q3 == 0.7 && o.max == 0.7 && o.mean == 0.7));

  Rng rng(6);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(1 + rng.below(30));
    for (auto& e : x) e = rng.uniform();
    auto sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const auto q = [&](double p) {
      const double h = (sorted.size() - 1) * p;
      const auto lo = static_cast<std::size_t>(std::floor(h));
      const auto hi = std::min(lo + 1, sorted.size() - 1);
      return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
    };
    const auto s = boxplot_stats(x);
    CHECK(s.q1 == doctest::Approx(q(0.25)).epsilon(1e-12));
    CHECK(s.median == doctest::Approx(q(0.5)).epsilon(1e-12));
    CHECK(s.q3 == doctest::Approx(q(0.75)).epsilon(1e-12));
  }
}

TEST_CASE("nomination worked examples") {
  const std::array<double, 4> p{0.3, 0.22, 0.08, 0.4};
  CHECK(nominate(p, 0.2).styles == std::vector<Style>{Style::R, Style::A, Style::V});
  CHECK(nominate(p, 0.1).styles == std::vector<Style>{Style::R, Style::A});
  CHECK(nominate(p, 1.0).styles == std::vector<Style>{Style::R, Style::A, Style::V, Style::K});
  CHECK(nominate(p, 0.0).styles == std::vector<Style>{Style::R});
  CHECK(kind_of([&] { nominate(p, 1.5); }) == ErrorKind::InvalidThreshold);
  CHECK(kind_of([&] { nominate(p, -0.1); }) == ErrorKind::InvalidThreshold);
}

TEST_CASE("nomination clamping and degeneracy") {
  const auto n = nominate({1.3, -0.2, 0.9, 0.95}, 0.04);
  CHECK(n.probabilities[0] == 1.0);
  CHECK(n.probabilities[1] == 0.0);
  CHECK(n.styles == std::vector<Style>{Style::A});
  const auto d = nominate({-0.1, -0.5, 0.0, -2.0}, 0.1);
  CHECK(d.degenerate);
  CHECK(d.styles.size() == 4);
}

TEST_CASE("nomination properties") {
  Rng rng(7);
  for (int t = 0; t < 500; ++t) {
    std::array<double, 4> p;
    for (auto& v : p) v = std::round(rng.uniform(0.05, 0.7) * 20) / 20;
    const double t1 = rng.uniform(), t2 = rng.uniform();
    const auto lo = nominate(p, std::min(t1, t2)).styles, hi = nominate(p, std::max(t1, t2)).styles;
    REQUIRE(lo.size() <= hi.size());
    CHECK(std::equal(lo.begin(), lo.end(), hi.begin()));
    // theta 0 keeps exactly the maximal styles.
    const double top = *std::max_element(p.begin(), p.end());
    std::vector<Style> argmax;
    for (std::size_t s = 0; s < 4; ++s)
      if (p[s] == top) argmax.push_back(kStyles[s]);
    CHECK(nominate(p, 0.0).styles == argmax);
    // A common shift that keeps everything inside [0,1] changes nothing.
    auto shifted = p;
    for (auto& v : shifted) v += 0.25;
    CHECK(nominate(shifted, t1).styles == nominate(p, t1).styles);
  }
}
