#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "vark/matrix.hpp"
#include "vark/style.hpp"

namespace vark {

inline constexpr std::size_t kNumQuestions = 16;

/// One answer: the subset of styles a student ticked for one question.
class ResponseVector {
 public:
  /// Throws Error(EmptyAnswer) when no flag is set.
  ResponseVector(bool a, bool v, bool k, bool r);

  static ResponseVector from_mask(std::uint8_t mask);

  bool has(Style s) const noexcept { return (mask_ >> index(s)) & 1U; }
  std::uint8_t mask() const noexcept { return mask_; }
  int count() const noexcept { return __builtin_popcount(mask_); }

  /// Letters in canonical order, e.g. "AVR".
  std::string letters() const;

  friend bool operator==(ResponseVector, ResponseVector) = default;

 private:
  explicit ResponseVector(std::uint8_t mask) : mask_(mask) {}
  std::uint8_t mask_;
};

struct StudentRecord {
  std::string id;
  std::array<ResponseVector, kNumQuestions> responses;

  friend bool operator==(const StudentRecord&, const StudentRecord&) = default;
};

/// A point on the unit simplex, one component per style.
class StyleProbabilities {
 public:
  /// Throws Error(InvalidConfig) if a component is negative or the sum is off by more than 1e-9.
  explicit StyleProbabilities(const std::array<double, kNumStyles>& p);

  double operator[](Style s) const noexcept { return p_[index(s)]; }
  double operator[](std::size_t i) const noexcept { return p_[i]; }
  const std::array<double, kNumStyles>& values() const noexcept { return p_; }

  friend bool operator==(const StyleProbabilities&, const StyleProbabilities&) = default;

 private:
  std::array<double, kNumStyles> p_;
};

/// Per-style design matrix: cell (i, q) is 1 when student i ticked `style` on
/// question q. All four matrices of one dataset share the outputs.
struct StyleMatrix {
  Style style;
  FeatureMatrix features;
  std::vector<StyleProbabilities> prob_targets;
  std::vector<Style> labels;
};

struct SynthConfig {
  std::size_t n_students = 72;
  std::array<double, kNumStyles> concentration{2.0, 2.0, 2.0, 2.0};
  double multi_select_rate = 0.3;
  std::uint64_t seed = 0;
};

/// Parses the `id,Q1,...,Q16` CSV. Errors carry 1-based row/column positions.
std::vector<StudentRecord> parse_responses(std::string_view csv_text);

/// Canonical CSV: letters in A,V,K,R order inside each cell, LF line endings.
std::string serialize_responses(const std::vector<StudentRecord>& records);

/// p[s] = (questions where s was ticked) / (total ticks).
StyleProbabilities compute_probabilities(const StudentRecord& record);

/// Argmax with ties going to the earliest style in canonical order.
Style derive_label(const StyleProbabilities& p);

std::array<StyleMatrix, kNumStyles> build_style_matrices(const std::vector<StudentRecord>& records);

/// Dirichlet-propensity cohort generator; a pure function of the config.
std::vector<StudentRecord> synthesize(const SynthConfig& config);

void validate(const SynthConfig& config);

}  // namespace vark
