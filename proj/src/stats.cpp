#include "vark/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "vark/error.hpp"

namespace vark {

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

double wilcoxon_exact_p(std::span<const double> ranks, double w_plus) {
  // Average ranks are multiples of 1/2, so doubled ranks are integers and the
  // null distribution of 2W+ is a subset-sum count.
  std::vector<std::size_t> doubled(ranks.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    doubled[i] = static_cast<std::size_t>(std::llround(2.0 * ranks[i]));
    total += doubled[i];
  }
  std::vector<std::uint64_t> ways(total + 1, 0);
  ways[0] = 1;
  for (std::size_t r : doubled) {
    for (std::size_t s = total; s >= r; --s) {
      ways[s] += ways[s - r];
      if (s == r) break;
    }
  }
  const auto observed = static_cast<std::size_t>(std::llround(2.0 * w_plus));
  std::uint64_t le = 0, ge = 0;
  for (std::size_t s = 0; s <= total; ++s) {
    if (s <= observed) le += ways[s];
    if (s >= observed) ge += ways[s];
  }
  const double n_patterns = std::ldexp(1.0, static_cast<int>(ranks.size()));
  return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / n_patterns);
}

double wilcoxon_normal_p(std::span<const double> ranks, double w_plus) {
  const double m = static_cast<double>(ranks.size());
  const double mean = m * (m + 1.0) / 4.0;
  double var = m * (m + 1.0) * (2.0 * m + 1.0) / 24.0;
  std::vector<double> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    var -= (t * t * t - t) / 48.0;
    i = j;
  }
  if (var <= 0.0) return 1.0;
  const double z = std::max(0.0, std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "paired samples differ in length");
  if (a.empty()) throw Error(ErrorKind::EmptySample, "wilcoxon over zero pairs");
  std::vector<double> magnitude;
  std::vector<bool> positive;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i])) throw Error(ErrorKind::Numerical, "non-finite residual");
    const double d = a[i] - b[i];
    if (d == 0.0) continue;
    magnitude.push_back(std::abs(d));
    positive.push_back(d > 0.0);
  }
  if (magnitude.empty()) throw Error(ErrorKind::AllZeroDifferences, "every paired difference is zero");

  const auto ranks = average_ranks(magnitude);
  WilcoxonResult r;
  r.effective_n = ranks.size();
  for (std::size_t i = 0; i < ranks.size(); ++i) (positive[i] ? r.w_plus : r.w_minus) += ranks[i];
  r.w = std::min(r.w_plus, r.w_minus);
  r.exact = r.effective_n <= kWilcoxonExactLimit;
  r.p_value = r.exact ? wilcoxon_exact_p(ranks, r.w_plus) : wilcoxon_normal_p(ranks, r.w_plus);
  return r;
}

double student_t_quantile(double p, double dof) {
  if (!(p > 0.0 && p < 1.0) || !(dof > 0.0)) throw Error(ErrorKind::InvalidConfig, "t quantile outside its domain");
  return boost::math::quantile(boost::math::students_t(dof), p);
}

IntervalSummary interval_summary(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorKind::TooFewValues, "interval summary needs at least 2 values");
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, student_t_quantile(0.975, n - 1.0) * sd / std::sqrt(n), values.size()};
}

double sorted_quantile(std::span<const double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

BoxplotStats boxplot_stats(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptySample, "boxplot over zero values");
  std::vector<double> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  BoxplotStats b;
  b.min = s.front();
  b.max = s.back();
  b.q1 = sorted_quantile(s, 0.25);
  b.median = sorted_quantile(s, 0.5);
  b.q3 = sorted_quantile(s, 0.75);
  b.mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  return b;
}

}  // namespace vark
