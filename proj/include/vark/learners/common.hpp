#pragma once

#include <array>
#include <span>
#include <vector>

#include "vark/style.hpp"

namespace vark {

enum class Mode { Regression, Classification };

/// Classification output: the winning label plus one decision value per style.
struct ClassPrediction {
  Style label;
  std::array<double, kNumStyles> scores;
};

inline ClassPrediction from_scores(const std::array<double, kNumStyles>& scores) {
  return {argmax_style(scores), scores};
}

void check_width(std::span<const double> row, std::size_t expected);

}  // namespace vark
