#include "vark/dataset.hpp"

#include <cctype>
#include <cmath>
#include <numeric>
#include <optional>
#include <unordered_set>
#include <utility>

#include "vark/error.hpp"
#include "vark/rng.hpp"

namespace vark {
namespace {

std::string at(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

template <std::size_t... I>
std::array<ResponseVector, kNumQuestions> to_array(const std::vector<ResponseVector>& v,
                                                   std::index_sequence<I...>) {
  return {v[I]...};
}

std::array<ResponseVector, kNumQuestions> to_array(const std::vector<ResponseVector>& v) {
  return to_array(v, std::make_index_sequence<kNumQuestions>{});
}

ResponseVector parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  cell = trim(cell);
  std::uint8_t mask = 0;
  for (char c : cell) {
    if (c == '|') continue;
    const auto style = style_from_char(c);
    if (!style) {
      throw Error(ErrorKind::InvalidToken, at(row, col) + ": unexpected character '" + std::string(1, c) + "'");
    }
    mask |= static_cast<std::uint8_t>(1U << index(*style));
  }
  if (mask == 0) throw Error(ErrorKind::EmptyAnswer, at(row, col) + ": no style selected");
  return ResponseVector::from_mask(mask);
}

// Index into weights (length 4) drawn proportionally, skipping excluded entries.
std::size_t sample_style(Rng& rng, const std::array<double, kNumStyles>& weights, int excluded) {
  double total = 0.0;
  for (std::size_t s = 0; s < kNumStyles; ++s) {
    if (static_cast<int>(s) != excluded) total += weights[s];
  }
  if (!(total > 0.0)) {
    // All remaining mass underflowed; fall back to uniform over the allowed styles.
    std::size_t pick = rng.below(excluded >= 0 ? kNumStyles - 1 : kNumStyles);
    for (std::size_t s = 0; s < kNumStyles; ++s) {
      if (static_cast<int>(s) == excluded) continue;
      if (pick-- == 0) return s;
    }
  }
  const double u = rng.uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t s = 0; s < kNumStyles; ++s) {
    if (static_cast<int>(s) == excluded) continue;
    acc += weights[s];
    last = s;
    if (u < acc) return s;
  }
  return last;
}

}  // namespace

ResponseVector::ResponseVector(bool a, bool v, bool k, bool r)
    : mask_(static_cast<std::uint8_t>(a | (v << 1) | (k << 2) | (r << 3))) {
  if (mask_ == 0) throw Error(ErrorKind::EmptyAnswer, "response vector selects no style");
}

ResponseVector ResponseVector::from_mask(std::uint8_t mask) {
  if ((mask & 0x0F) == 0 || (mask & 0xF0) != 0) {
    throw Error(ErrorKind::EmptyAnswer, "response mask must be a non-empty subset of 4 styles");
  }
  return ResponseVector(mask);
}

std::string ResponseVector::letters() const {
  std::string out;
  for (Style s : kStyles) {
    if (has(s)) out.push_back(to_char(s));
  }
  return out;
}

StyleProbabilities::StyleProbabilities(const std::array<double, kNumStyles>& p) : p_(p) {
  double sum = 0.0;
  for (double x : p_) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorKind::InvalidConfig, "negative or non-finite probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorKind::InvalidConfig, "probabilities do not sum to 1");
}

std::vector<StudentRecord> parse_responses(std::string_view csv_text) {
  std::vector<std::string_view> lines = split(csv_text, '\n');
  std::size_t line_no = 0;
  std::size_t next = 0;
  auto next_line = [&]() -> std::optional<std::string_view> {
    while (next < lines.size()) {
      std::string_view line = lines[next++];
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!trim(line).empty()) return line;
    }
    return std::nullopt;
  };

  const auto header = next_line();
  if (!header) throw Error(ErrorKind::MalformedCsv, "missing header row");
  const auto columns = split(*header, ',');
  if (columns.empty() || !iequals(trim(columns[0]), "id")) {
    throw Error(ErrorKind::MalformedCsv, at(line_no, 1) + ": header must start with 'id'");
  }
  for (std::size_t q = 0; q < kNumQuestions; ++q) {
    const std::string expected = "Q" + std::to_string(q + 1);
    if (q + 1 >= columns.size() || !iequals(trim(columns[q + 1]), expected)) {
      throw Error(ErrorKind::MissingQuestion, at(line_no, q + 2) + ": header lacks " + expected);
    }
  }
  if (columns.size() > kNumQuestions + 1) {
    throw Error(ErrorKind::MalformedCsv, at(line_no, kNumQuestions + 2) + ": unexpected extra header column");
  }

  std::vector<StudentRecord> records;
  std::unordered_set<std::string> seen;
  while (const auto line = next_line()) {
    const auto cells = split(*line, ',');
    const std::string id(trim(cells[0]));
    if (id.empty()) throw Error(ErrorKind::MalformedCsv, at(line_no, 1) + ": empty student id");
    if (cells.size() < kNumQuestions + 1) {
      throw Error(ErrorKind::MissingQuestion,
                  at(line_no, cells.size() + 1) + ": row lacks Q" + std::to_string(cells.size()));
    }
    if (cells.size() > kNumQuestions + 1) {
      throw Error(ErrorKind::MalformedCsv, at(line_no, kNumQuestions + 2) + ": too many cells");
    }
    std::vector<ResponseVector> responses;
    responses.reserve(kNumQuestions);
    for (std::size_t q = 0; q < kNumQuestions; ++q) responses.push_back(parse_cell(cells[q + 1], line_no, q + 2));
    if (!seen.insert(id).second) throw Error(ErrorKind::DuplicateId, at(line_no, 1) + ": duplicate id '" + id + "'");
    records.push_back({id, to_array(responses)});
  }
  return records;
}

std::string serialize_responses(const std::vector<StudentRecord>& records) {
  std::string out = "id";
  for (std::size_t q = 1; q <= kNumQuestions; ++q) out += ",Q" + std::to_string(q);
  out += '\n';
  for (const auto& r : records) {
    out += r.id;
    for (const auto& resp : r.responses) {
      out += ',';
      out += resp.letters();
    }
    out += '\n';
  }
  return out;
}

StyleProbabilities compute_probabilities(const StudentRecord& record) {
  std::array<int, kNumStyles> counts{};
  int total = 0;
  for (const auto& resp : record.responses) {
    for (Style s : kStyles) {
      if (resp.has(s)) {
        ++counts[index(s)];
        ++total;
      }
    }
  }
  std::array<double, kNumStyles> p{};
  for (std::size_t s = 0; s < kNumStyles; ++s) p[s] = static_cast<double>(counts[s]) / total;
  return StyleProbabilities(p);
}

Style derive_label(const StyleProbabilities& p) { return argmax_style(p.values()); }

std::array<StyleMatrix, kNumStyles> build_style_matrices(const std::vector<StudentRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::EmptyDataset, "cannot build style matrices from zero records");
  std::vector<StyleProbabilities> probs;
  std::vector<Style> labels;
  probs.reserve(records.size());
  labels.reserve(records.size());
  for (const auto& r : records) {
    probs.push_back(compute_probabilities(r));
    labels.push_back(derive_label(probs.back()));
  }
  auto make = [&](Style style) {
    FeatureMatrix features(records.size(), kNumQuestions);
    for (std::size_t i = 0; i < records.size(); ++i) {
      for (std::size_t q = 0; q < kNumQuestions; ++q) features(i, q) = records[i].responses[q].has(style) ? 1.0 : 0.0;
    }
    return StyleMatrix{style, std::move(features), probs, labels};
  };
  return {make(Style::A), make(Style::V), make(Style::K), make(Style::R)};
}

void validate(const SynthConfig& config) {
  if (config.n_students < 2) throw Error(ErrorKind::InvalidConfig, "n_students must be at least 2");
  for (double c : config.concentration) {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::InvalidConfig, "concentration components must be positive");
  }
  if (!(config.multi_select_rate >= 0.0 && config.multi_select_rate <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "multi_select_rate must lie in [0, 1]");
  }
}

std::vector<StudentRecord> synthesize(const SynthConfig& config) {
  validate(config);
  Rng rng(config.seed);
  std::vector<StudentRecord> records;
  records.reserve(config.n_students);
  std::vector<ResponseVector> responses;
  for (std::size_t i = 0; i < config.n_students; ++i) {
    std::array<double, kNumStyles> propensity{};
    double total = 0.0;
    for (std::size_t s = 0; s < kNumStyles; ++s) {
      propensity[s] = rng.gamma(config.concentration[s]);
      total += propensity[s];
    }
    for (double& p : propensity) p = total > 0.0 ? p / total : 0.25;

    responses.clear();
    for (std::size_t q = 0; q < kNumQuestions; ++q) {
      const std::size_t primary = sample_style(rng, propensity, -1);
      std::uint8_t mask = static_cast<std::uint8_t>(1U << primary);
      if (rng.uniform() < config.multi_select_rate) {
        mask |= static_cast<std::uint8_t>(1U << sample_style(rng, propensity, static_cast<int>(primary)));
      }
      responses.push_back(ResponseVector::from_mask(mask));
    }
    records.push_back({"S" + std::to_string(i + 1), to_array(responses)});
  }
  return records;
}

}  // namespace vark
