#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vark {

struct WilcoxonResult {
  double w = 0.0;       // min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0; // two-sided
  std::size_t effective_n = 0;  // pairs left after discarding zero differences
  bool exact = true;
};

/// Largest effective sample size that still uses the exact null distribution.
inline constexpr std::size_t kWilcoxonExactLimit = 20;

/// Signed-rank test on a - b. Zero differences are dropped, tied magnitudes
/// share their average rank. Throws Error(AllZeroDifferences) if nothing is left.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

/// Average ranks (1-based) of the values, ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> values);

/// Exact two-sided p for the observed W+ given the (possibly tied) ranks:
/// 2 * min(P(W+ <= w), P(W+ >= w)) capped at 1, over all 2^m sign patterns.
double wilcoxon_exact_p(std::span<const double> ranks, double w_plus);

/// Normal approximation with tie-corrected variance and 0.5 continuity correction.
double wilcoxon_normal_p(std::span<const double> ranks, double w_plus);

struct IntervalSummary {
  double mean = 0.0;
  double half_width = 0.0;  // 95% Student-t half interval
  std::size_t n = 0;
};

/// Two-sided Student t quantile, e.g. student_t_quantile(0.975, 1) = 12.7062...
double student_t_quantile(double p, double dof);

IntervalSummary interval_summary(std::span<const double> values);

/// Quartiles use linear interpolation between order statistics at (n-1)p.
struct BoxplotStats {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

BoxplotStats boxplot_stats(std::span<const double> values);

/// Linear-interpolation quantile of already sorted data.
double sorted_quantile(std::span<const double> sorted, double p);

}  // namespace vark
