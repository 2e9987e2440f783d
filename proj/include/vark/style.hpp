#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace vark {

/// The four VARK styles. The enumerator order is the canonical layout used
/// for every per-style vector and for all tie-breaking.
enum class Style : std::uint8_t { A = 0, V = 1, K = 2, R = 3 };

inline constexpr std::size_t kNumStyles = 4;
inline constexpr std::array<Style, kNumStyles> kStyles{Style::A, Style::V, Style::K, Style::R};

constexpr std::size_t index(Style s) noexcept { return static_cast<std::size_t>(s); }

constexpr char to_char(Style s) noexcept {
  constexpr std::array<char, kNumStyles> letters{'A', 'V', 'K', 'R'};
  return letters[index(s)];
}

constexpr std::string_view style_name(Style s) noexcept {
  constexpr std::array<std::string_view, kNumStyles> names{"Auditory", "Visual", "Kinesthetic",
                                                           "Reading/Writing"};
  return names[index(s)];
}

/// Case-insensitive letter lookup.
constexpr std::optional<Style> style_from_char(char c) noexcept {
  switch (c) {
    case 'A': case 'a': return Style::A;
    case 'V': case 'v': return Style::V;
    case 'K': case 'k': return Style::K;
    case 'R': case 'r': return Style::R;
    default: return std::nullopt;
  }
}

/// First maximal element in canonical order.
template <typename Array>
Style argmax_style(const Array& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kNumStyles; ++i) {
    if (values[i] > values[best]) best = i;
  }
  return kStyles[best];
}

}  // namespace vark
