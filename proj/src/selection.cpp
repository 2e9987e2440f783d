#include "vark/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vark/error.hpp"

namespace vark {

Nomination nominate(const std::array<double, kNumStyles>& raw_predictions, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(ErrorKind::InvalidThreshold, "threshold must lie in [0, 1]");
  Nomination out;
  out.threshold = threshold;
  for (std::size_t s = 0; s < kNumStyles; ++s) {
    if (!std::isfinite(raw_predictions[s])) throw Error(ErrorKind::Numerical, "non-finite prediction");
    out.probabilities[s] = std::clamp(raw_predictions[s], 0.0, 1.0);
  }

  std::array<std::size_t, kNumStyles> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return out.probabilities[a] > out.probabilities[b]; });

  const double top = out.probabilities[order[0]];
  out.degenerate = top == 0.0;
  for (std::size_t s : order) {
    if (out.degenerate || top - out.probabilities[s] <= threshold + kNominationSlack) out.styles.push_back(kStyles[s]);
  }
  return out;
}

}  // namespace vark
