#pragma once

#include <array>
#include <vector>

#include "vark/style.hpp"

namespace vark {

/// Gap comparisons allow this much floating-point slack, so a style whose
/// printed distance to the top equals the threshold is still included.
inline constexpr double kNominationSlack = 1e-12;

struct Nomination {
  std::vector<Style> styles;                  // descending probability, canonical tie-break
  double threshold = 0.0;
  std::array<double, kNumStyles> probabilities{};  // clamped to [0, 1]
  bool degenerate = false;                    // every clamped prediction was 0
};

/// Clamps the raw predictions to [0,1] and keeps every style within
/// `threshold` of the top one. Throws Error(InvalidThreshold) outside [0,1].
Nomination nominate(const std::array<double, kNumStyles>& raw_predictions, double threshold);

}  // namespace vark
