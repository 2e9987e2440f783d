#include <algorithm>
#include <string>

#include "doctest.h"
#include "support.hpp"
#include "vark/dataset.hpp"
#include "vark/error.hpp"
#include "vark/rng.hpp"

using namespace vark;

namespace {

std::string header() {
  std::string h = "id";
  for (int q = 1; q <= 16; ++q) h += ",Q" + std::to_string(q);
  return h + "\n";
}

std::string row(const std::string& id, const std::string& cell, int n = 16) {
  std::string r = id;
  for (int q = 0; q < n; ++q) r += "," + cell;
  return r + "\n";
}

ErrorKind kind_of(const std::string& csv) {
  try {
    parse_responses(csv);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

StudentRecord random_record(Rng& rng, const std::string& id) {
  StudentRecord r = blank_record(id);
  for (auto& v : r.responses) v = ResponseVector::from_mask(static_cast<std::uint8_t>(1 + rng.below(15)));
  return r;
}

}  // namespace

TEST_CASE("ResponseVector encodes flags in A,V,K,R order") {
  const ResponseVector v(true, false, true, false);
  CHECK(v.has(Style::A));
  CHECK(v.has(Style::K));
  CHECK_FALSE(v.has(Style::V));
  CHECK(v.letters() == "AK");
  CHECK(v.count() == 2);
  CHECK_THROWS_AS(ResponseVector(false, false, false, false), Error);
}

TEST_CASE("parse accepts pipes, case and CRLF") {
  const auto recs = parse_responses(header() + "s1,a|k,V,R,AVKR,a,a,a,a,a,a,a,a,a,a,a,a\r\n\n");
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].responses[0] == ResponseVector(true, false, true, false));
  CHECK(recs[0].responses[3].count() == 4);
}

TEST_CASE("parse error kinds") {
  CHECK(kind_of(header() + row("s1", "AX")) == ErrorKind::InvalidToken);
  CHECK(kind_of(header() + row("s1", "")) == ErrorKind::EmptyAnswer);
  CHECK(kind_of(header() + row("s1", "A", 15)) == ErrorKind::MissingQuestion);
  CHECK(kind_of(header() + row("s1", "A", 17)) == ErrorKind::MalformedCsv);
  CHECK(kind_of(header() + row("s1", "A") + row("s1", "V")) == ErrorKind::DuplicateId);
  CHECK(kind_of("id,Q1,Q2\n") == ErrorKind::MissingQuestion);
  CHECK(parse_responses(header()).empty());
  CHECK_THROWS_AS(build_style_matrices({}), Error);
}

TEST_CASE("S1 row of the processed dataset") {
  const auto recs = parse_responses(header() + "S1,AVR,AKR,A,A,A,A,A,A,A,A,A,A,A,A,A,KR\n");
  const auto& r = recs.at(0).responses;
  CHECK(r[0] == ResponseVector(true, true, false, true));
  CHECK(r[1] == ResponseVector(true, false, true, true));
  CHECK(r[2] == ResponseVector(true, false, false, false));
  CHECK(r[15] == ResponseVector(false, false, true, true));
  const auto m = build_style_matrices(recs);
  CHECK(m[3].features(0, 0) == 1.0);
  CHECK(m[3].features(0, 1) == 1.0);
  CHECK(m[3].features(0, 2) == 0.0);
  CHECK(m[3].features(0, 15) == 1.0);
}

TEST_CASE("parse errors report row and column") {
  try {
    parse_responses(header() + row("s1", "A") + "s2,A,A,Z,A,A,A,A,A,A,A,A,A,A,A,A,A\n");
    FAIL("no throw");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("column 4") != std::string::npos);
  }
}

TEST_CASE("probabilities count ticks over total ticks") {
  StudentRecord r = blank_record("x");
  for (std::size_t q = 0; q < 16; ++q) r.responses[q] = ResponseVector::from_mask(q < 8 ? 0b0001 : 0b1010);
  // A: 8, V: 8, R: 8 ticks out of 24.
  const auto p = compute_probabilities(r);
  CHECK(p[Style::A] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(p[Style::K] == 0.0);
  CHECK(derive_label(p) == Style::A);  // three-way tie resolves to the earliest style
}

TEST_CASE("flag counts 9,6,6,4 give 0.36,0.24,0.24,0.16") {
  StudentRecord r = blank_record("x");
  const char* cells[16] = {"AVKR", "AVKR", "AVKR", "A", "A", "A", "A", "A", "A", "V", "V", "V", "K", "K", "K", "R"};
  for (std::size_t q = 0; q < 16; ++q) {
    const std::string c = cells[q];
    r.responses[q] = ResponseVector(c.find('A') != std::string::npos, c.find('V') != std::string::npos,
                                    c.find('K') != std::string::npos, c.find('R') != std::string::npos);
  }
  const auto p = compute_probabilities(r);
  CHECK(p[0] == doctest::Approx(0.36).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(0.24).epsilon(1e-12));
  CHECK(p[3] == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(derive_label(StyleProbabilities({0.25, 0.25, 0.25, 0.25})) == Style::A);
}

TEST_CASE("reference rows map probabilities to labels") {
  CHECK(derive_label(StyleProbabilities({0.36, 0.24, 0.25, 0.15})) == Style::A);
  CHECK(derive_label(StyleProbabilities({0.14, 0.25, 0.19, 0.42})) == Style::R);
  CHECK(derive_label(StyleProbabilities({0.42, 0.49, 0.07, 0.02})) == Style::V);
}

TEST_CASE("StyleProbabilities rejects points off the simplex") {
  CHECK_THROWS_AS(StyleProbabilities({0.5, 0.5, 0.5, 0.0}), Error);
  CHECK_THROWS_AS(StyleProbabilities({1.1, -0.1, 0.0, 0.0}), Error);
}

TEST_CASE("serialize/parse round-trip and matrix reassembly") {
  Rng rng(5);
  std::vector<StudentRecord> recs;
  for (int i = 0; i < 30; ++i) recs.push_back(random_record(rng, "id" + std::to_string(i)));
  CHECK(parse_responses(serialize_responses(recs)) == recs);
  const auto m = build_style_matrices(recs);
  for (std::size_t i = 0; i < recs.size(); ++i)
    for (std::size_t q = 0; q < 16; ++q)
      for (std::size_t s = 0; s < 4; ++s)
        CHECK(m[s].features(i, q) == (recs[i].responses[q].has(kStyles[s]) ? 1.0 : 0.0));
}

TEST_CASE("synth is a pure function of its config") {
  SynthConfig cfg;
  cfg.seed = 9;
  cfg.n_students = 40;
  const auto a = synthesize(cfg);
  CHECK(a == synthesize(cfg));
  CHECK(a.size() == 40);
  CHECK(a.front().id == "S1");
  cfg.seed = 10;
  CHECK_FALSE(a == synthesize(cfg));
}

TEST_CASE("synth concentration skews labels") {
  SynthConfig cfg;
  cfg.seed = 3;
  cfg.n_students = 500;
  cfg.concentration = {1000, 1, 1, 1};
  std::size_t a = 0;
  for (const auto& r : synthesize(cfg)) a += derive_label(compute_probabilities(r)) == Style::A;
  CHECK(a > 450);
}

TEST_CASE("synth multi-select rate") {
  SynthConfig cfg;
  cfg.seed = 4;
  cfg.n_students = 200;
  cfg.multi_select_rate = 0.0;
  for (const auto& r : synthesize(cfg))
    for (const auto& v : r.responses) CHECK(v.count() == 1);
  cfg.multi_select_rate = 0.3;
  double multi = 0;
  for (const auto& r : synthesize(cfg))
    for (const auto& v : r.responses) multi += v.count() > 1;
  CHECK(multi / (200 * 16) == doctest::Approx(0.3).epsilon(0.1));
}

TEST_CASE("synth config validation") {
  SynthConfig cfg;
  cfg.n_students = 1;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = {};
  cfg.concentration[2] = 0.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = {};
  cfg.multi_select_rate = 1.5;
  CHECK_THROWS_AS(validate(cfg), Error);
}
