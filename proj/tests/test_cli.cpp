#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "vark/manifest.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + VARK_CLI_PATH + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t got = fread(buf, 1, sizeof buf, p)) out.append(buf, got);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("vark_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("nominate prints the worked examples") {
  CHECK(run("nominate --probs 0.3,0.22,0.08,0.4 --threshold 0.2").out == "R,A,V\n");
  CHECK(run("nominate --probs 0.3,0.22,0.08,0.4 --threshold 0.1").out == "R,A\n");
  CHECK(run("nominate --probs 0.3,0.22,0.08,0.4 --threshold 1.0").out == "R,A,V,K\n");
  CHECK(run("nominate --probs 0.3,0.22,0.08,0.4 --threshold 1.5").code == 2);
  CHECK(run("nominate --probs 0.3,0.22").code == 2);
  const auto j = run("--format json nominate --probs 0.3,0.22,0.08,0.4 --threshold 0.2");
  CHECK(j.code == 0);
  CHECK(nlohmann::json::parse(j.out).at("nomination").at("styles") == "R,A,V");
}

TEST_CASE("synth is reproducible and validated") {
  const auto dir = scratch("synth");
  const std::string base = "--out-dir " + dir.string() + " ";
  REQUIRE(run(base + "--seed 42 synth --students 72 -o a.csv").code == 0);
  REQUIRE(run(base + "--seed 42 synth --students 72 -o b.csv").code == 0);
  CHECK(vark::sha256_hex(slurp(dir / "a.csv")) == vark::sha256_hex(slurp(dir / "b.csv")));
  CHECK(fs::exists(dir / "a.csv.manifest.json"));
  CHECK(run(base + "synth --students 1").code == 2);
  CHECK(run(base + "synth --concentration 1,2,3").code == 2);
  CHECK(run(base + "bogus").code == 2);

  REQUIRE(run(base + "--seed 7 synth --rate 0 -o r0.csv").code == 0);
  std::istringstream lines(slurp(dir / "r0.csv"));
  std::string line;
  std::getline(lines, line);
  while (std::getline(lines, line)) {
    std::stringstream cells(line);
    std::string cell;
    std::getline(cells, cell, ',');
    while (std::getline(cells, cell, ',')) CHECK(cell.size() == 1);
  }
}

TEST_CASE("seed precedence: flag, then VARK_SEED, then 0") {
  const auto dir = scratch("seed");
  const std::string base = "--out-dir " + dir.string() + " ";
  run(base + "--seed 5 synth -o flag.csv", "VARK_SEED=9");
  run(base + "synth -o env.csv", "VARK_SEED=9");
  run(base + "--seed 9 synth -o nine.csv");
  run(base + "synth -o none.csv", "env -u VARK_SEED");
  run(base + "--seed 0 synth -o zero.csv");
  CHECK(slurp(dir / "env.csv") == slurp(dir / "nine.csv"));
  CHECK(slurp(dir / "flag.csv") != slurp(dir / "nine.csv"));
  CHECK(slurp(dir / "none.csv") == slurp(dir / "zero.csv"));
  CHECK(run(base + "synth -o bad.csv", "VARK_SEED=abc").code == 2);
}

TEST_CASE("data errors exit 3 with a position") {
  const auto dir = scratch("bad");
  std::ofstream(dir / "bad.csv") << "id,Q1,Q2,Q3,Q4,Q5,Q6,Q7,Q8,Q9,Q10,Q11,Q12,Q13,Q14,Q15,Q16\n"
                                    "S9,X,A,A,A,A,A,A,A,A,A,A,A,A,A,A,A\n";
  const auto r = run("describe -i " + (dir / "bad.csv").string());
  CHECK(r.code == 3);
  CHECK(r.out.find("row 2") != std::string::npos);
  CHECK(run("describe -i " + (dir / "missing.csv").string()).code == 3);
}

TEST_CASE("eval writes every report, deterministically") {
  const auto dir = scratch("eval");
  const std::string base = "--out-dir " + dir.string() + " --seed 3 ";
  REQUIRE(run(base + "synth --students 20 -o c.csv").code == 0);
  const std::string input = (dir / "c.csv").string();
  const std::string eval = "eval -i " + input + " --cv kfold --folds 4 --models kNN,DT,SVM";

  REQUIRE(run(base + "--format csv --plots " + eval).code == 0);
  for (const char* f : {"regression.csv", "wilcoxon.csv", "classification_A.csv", "classification_V.csv",
                        "classification_K.csv", "classification_R.csv", "describe_labels.csv",
                        "describe_questions.csv", "describe_probabilities.csv", "roc_A.svg",
                        "probabilities_boxplot.svg", "residual_intervals.svg"}) {
    CAPTURE(f);
    CHECK(fs::exists(dir / f));
  }
  const auto first = slurp(dir / "regression.csv");
  CHECK(first.rfind("# manifest: ", 0) == 0);
  REQUIRE(run(base + "--format csv --plots " + eval).code == 0);
  CHECK(slurp(dir / "regression.csv") == first);

  REQUIRE(run(base + eval + " --mode regression").code == 0);
  const auto rep = nlohmann::json::parse(slurp(dir / "regression.json"));
  CHECK(rep.at("manifest").at("input_sha256") == vark::sha256_hex(slurp(dir / "c.csv")));
  CHECK(rep.at("regression").at("models").size() == 3);
  const auto w = nlohmann::json::parse(slurp(dir / "wilcoxon.json"));
  CHECK(w.at("wilcoxon").at("rows").size() == 3);

  REQUIRE(run("--out-dir " + (dir / "cmp").string() + " compare --report " + (dir / "regression.json").string()).code ==
          0);
  CHECK(fs::exists(dir / "cmp" / "wilcoxon.json"));
  CHECK(run(base + eval + " --mode sideways").code == 2);
}

TEST_CASE("train then nominate from responses") {
  const auto dir = scratch("train");
  const std::string base = "--out-dir " + dir.string() + " --seed 1 ";
  REQUIRE(run(base + "synth --students 15 -o c.csv").code == 0);
  REQUIRE(run(base + "train -i " + (dir / "c.csv").string() + " --algorithm kNN -o m.json").code == 0);
  const auto r = run("nominate --model " + (dir / "m.json").string() +
                     " --responses A,A,A,A,A,A,A,A,A,A,A,A,A,A,A,AV --threshold 0.05");
  CHECK(r.code == 0);
  CHECK(r.out.size() >= 2);
  CHECK(run("nominate --model " + (dir / "m.json").string() + " --responses A,A").code == 3);
}
