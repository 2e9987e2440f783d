#pragma once
// Independent reference implementations. Deliberately naive; none of them
// call into the library code they are compared against.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

inline double mae(const std::vector<double>& a, const std::vector<double>& p) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - p[i]);
  return s / a.size();
}

inline double rmse(const std::vector<double>& a, const std::vector<double>& p) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - p[i]) * (a[i] - p[i]);
  return std::sqrt(s / a.size());
}

inline double mdae(const std::vector<double>& a, const std::vector<double>& p) {
  std::vector<double> e;
  for (std::size_t i = 0; i < a.size(); ++i) e.push_back(std::fabs(a[i] - p[i]));
  std::sort(e.begin(), e.end());
  const std::size_t n = e.size();
  return n % 2 ? e[n / 2] : (e[n / 2 - 1] + e[n / 2]) / 2.0;
}

// Pair counting: P(s+ > s-) + 0.5 P(s+ == s-).
inline double mann_whitney_auc(const std::vector<double>& scores, const std::vector<std::uint8_t>& pos) {
  double wins = 0;
  std::size_t np = 0, nn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!pos[i]) continue;
    ++np;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (pos[j]) continue;
      if (scores[i] > scores[j]) wins += 1;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  nn = scores.size() - np;
  return wins / (static_cast<double>(np) * static_cast<double>(nn));
}

// Two-sided exact signed-rank p by walking every sign pattern.
inline double wilcoxon_enumerated_p(const std::vector<double>& ranks, double w_plus) {
  const std::size_t m = ranks.size();
  const std::uint64_t total = std::uint64_t{1} << m;
  std::uint64_t le = 0, ge = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double w = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) w += ranks[i];
    if (w <= w_plus + 1e-9) ++le;
    if (w >= w_plus - 1e-9) ++ge;
  }
  return std::min(1.0, 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total));
}

// Nearest-first training indices via stable sort on squared distance.
inline std::vector<std::size_t> knn_order(const std::vector<std::vector<double>>& train, const std::vector<double>& q) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < train.size(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < q.size(); ++j) s += (train[i][j] - q[j]) * (train[i][j] - q[j]);
    d.emplace_back(s, i);
  }
  std::stable_sort(d.begin(), d.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::size_t> out;
  for (const auto& [dist, i] : d) out.push_back(i);
  return out;
}

inline double entropy_bits(const std::array<double, 4>& c) {
  double n = 0, h = 0;
  for (double v : c) n += v;
  for (double v : c)
    if (v > 0) h -= v / n * std::log2(v / n);
  return h;
}

struct Split {
  std::size_t feature;
  double gain;
  double ratio;
};

// Every binary feature split of a labelled toy set with >= min_leaf on each side.
inline std::vector<Split> binary_splits(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                                        std::size_t min_leaf) {
  std::array<double, 4> all{};
  for (int l : y) all[l] += 1;
  const double n = static_cast<double>(y.size());
  std::vector<Split> out;
  for (std::size_t f = 0; f < x[0].size(); ++f) {
    std::array<double, 4> lo{}, hi{};
    for (std::size_t i = 0; i < y.size(); ++i) (x[i][f] <= 0.5 ? lo : hi)[y[i]] += 1;
    const double nl = std::accumulate(lo.begin(), lo.end(), 0.0);
    const double nh = n - nl;
    if (nl < min_leaf || nh < min_leaf) continue;
    const double gain = entropy_bits(all) - nl / n * entropy_bits(lo) - nh / n * entropy_bits(hi);
    if (gain <= 0) continue;
    const double split_info = -(nl / n) * std::log2(nl / n) - (nh / n) * std::log2(nh / n);
    out.push_back({f, gain, gain / split_info});
  }
  return out;
}

// C4.5 choice: among splits with gain >= mean gain, highest ratio, first wins.
inline int c45_choice(const std::vector<Split>& s) {
  if (s.empty()) return -1;
  double mean = 0;
  for (const auto& c : s) mean += c.gain;
  mean /= s.size();
  int best = -1;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].gain < mean - 1e-9) continue;
    if (best < 0 || s[i].ratio > s[best].ratio) best = static_cast<int>(i);
  }
  return static_cast<int>(s[best].feature);
}

}  // namespace oracle
