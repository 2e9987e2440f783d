#pragma once

#include <string>
#include <utility>

#include "vark/dataset.hpp"

// Record whose 16 answers are all `mask`; tests overwrite what they need.
inline vark::StudentRecord blank_record(std::string id, std::uint8_t mask = 1) {
  const auto v = vark::ResponseVector::from_mask(mask);
  return [&]<std::size_t... I>(std::index_sequence<I...>) {
    return vark::StudentRecord{std::move(id), {((void)I, v)...}};
  }(std::make_index_sequence<vark::kNumQuestions>{});
}
