#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pes/harness.hpp"

using namespace pes;
namespace fs = std::filesystem;

namespace {

const char* kMinimalSpec = R"(# smoke experiment
[problem]
kind = quadratic
d = 3
dp = 3
sv_min = 0.5
sv_max = 1.0
q = -0.2
mu_y = 0.7
sigma = 0
seed = 5

[solver ogda]
kind = pes-ogda
schedule = manual
eta0 = 0.2
gamma = 0.4
decay = 0.9
growth = 1.2
T0 = 50
K = 3

[run]
seeds = 1, 2, 3
)";

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("spec parsing: happy path") {
  ExperimentSpec spec = parse_spec(kMinimalSpec);
  CHECK(spec.problem.kind == "quadratic");
  CHECK(spec.problem.d == 3);
  CHECK(spec.problem.q == doctest::Approx(-0.2));
  REQUIRE(spec.solvers.size() == 1);
  CHECK(spec.solvers[0].name == "ogda");
  CHECK(spec.solvers[0].kind == "pes-ogda");
  CHECK(spec.solvers[0].T0 == 50);
  CHECK(spec.seeds == std::vector<std::uint64_t>{1, 2, 3});
}

TEST_CASE("spec parsing: strictness") {
  SUBCASE("misspelled key names the line") {
    std::string bad = kMinimalSpec;
    bad += "\n[solver extra]\nkind = pes-sgda\nett0 = 0.1\n";
    try {
      parse_spec(bad);
      FAIL("expected a parse error");
    } catch (const std::exception& e) {
      const std::string msg = e.what();
      CHECK(msg.find("ett0") != std::string::npos);
      CHECK(msg.find("line") != std::string::npos);
    }
  }
  SUBCASE("duplicate solver names rejected") {
    std::string bad = kMinimalSpec;
    bad += "\n[solver ogda]\nkind = pes-ogda\n";
    CHECK_THROWS(parse_spec(bad));
  }
  SUBCASE("unknown section rejected") {
    CHECK_THROWS(parse_spec(std::string(kMinimalSpec) + "\n[extras]\n"));
  }
  SUBCASE("missing pieces rejected") {
    CHECK_THROWS(parse_spec("[problem]\nkind = quadratic\n"));
    CHECK_THROWS(parse_spec(
        "[problem]\nkind = quadratic\n[solver s]\nkind = pes-ogda\n"
        "schedule = manual\neta0 = 0.1\nT0 = 10\nK = 2\n[run]\n"));
  }
  SUBCASE("type mismatch rejected") {
    std::string bad = kMinimalSpec;
    const auto pos = bad.find("d = 3");
    bad.replace(pos, 5, "d = a");
    CHECK_THROWS(parse_spec(bad));
  }
}

TEST_CASE("experiment grid and CSV emission") {
  std::string text = kMinimalSpec;
  text +=
      "\n[solver sgda]\nkind = pes-sgda\nschedule = manual\neta0 = 0.2\n"
      "gamma = 0.4\ndecay = 0.9\ngrowth = 1.2\nT0 = 50\nK = 3\n";
  ExperimentSpec spec = parse_spec(text);

  auto records = run_experiment(spec, 4);
  REQUIRE(records.size() == 6);  // 2 solvers x 3 seeds
  for (const auto& rec : records) {
    CHECK(!rec.failed);
    CHECK(rec.rows.size() == 3);
    CHECK(rec.total_oracle_calls == rec.rows.back().oracle_calls);
  }

  TempDir dir1("pes_test_out1"), dir2("pes_test_out2");
  emit_csv(records, dir1.path.string());
  auto again = run_experiment(spec, 1);
  emit_csv(again, dir2.path.string());

  SUBCASE("per-record trace files with one line per epoch") {
    const fs::path trace = dir1.path / "trace_ogda_1.csv";
    REQUIRE(fs::exists(trace));
    std::ifstream in(trace);
    std::string line;
    int lines = 0;
    std::getline(in, line);
    CHECK(line ==
          "epoch,eta,T,oracle_calls,objective_gap,gap_k,delta_k,elapsed_s");
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 3);
  }

  SUBCASE("outputs are deterministic across runs and worker counts") {
    // Wall-clock columns are the single nondeterministic field; everything
    // before the last comma must match byte for byte.
    auto strip_elapsed = [](const std::string& text) {
      std::stringstream in(text), out;
      std::string line;
      while (std::getline(in, line)) {
        out << line.substr(0, line.rfind(',')) << '\n';
      }
      return out.str();
    };
    for (const auto& entry : fs::directory_iterator(dir1.path)) {
      const fs::path name = entry.path().filename();
      if (name == "summary.csv") continue;  // wall-time medians differ
      CHECK(strip_elapsed(read_file(entry.path())) ==
            strip_elapsed(read_file(dir2.path / name)));
    }
    CHECK(fs::exists(dir2.path / "summary.csv"));
  }

  SUBCASE("trace values round-trip at full precision") {
    const fs::path trace = dir1.path / "trace_sgda_2.csv";
    const RunRecord* rec = nullptr;
    for (const auto& r : records) {
      if (r.solver == "sgda" && r.seed == 2) rec = &r;
    }
    REQUIRE(rec != nullptr);
    std::ifstream in(trace);
    std::string line;
    std::getline(in, line);  // header
    size_t i = 0;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      REQUIRE(cells.size() >= 7);
      CHECK(std::stod(cells[4]) == rec->rows[i].objective_gap);
      CHECK(std::stod(cells[5]) == rec->rows[i].gap_k);
      ++i;
    }
    CHECK(i == rec->rows.size());
  }
}

TEST_CASE("a failing solver does not poison its siblings") {
  std::string text = kMinimalSpec;
  // theorem2 needs rho <= mu_pl/8, which this problem violates.
  text +=
      "\n[solver broken]\nkind = pes-ogda\nschedule = theorem2\n";
  ExperimentSpec spec = parse_spec(text);
  auto records = run_experiment(spec, 2);
  int failed = 0, ok = 0;
  for (const auto& rec : records) {
    if (rec.failed) {
      ++failed;
      CHECK(rec.solver == "broken");
      CHECK(!rec.error.empty());
    } else {
      ++ok;
    }
  }
  CHECK(failed == 3);
  CHECK(ok == 3);
}

TEST_CASE("run seeds are stable under grid growth") {
  const auto a = derive_run_seed(5, "ogda", 1);
  CHECK(a == derive_run_seed(5, "ogda", 1));
  CHECK(a != derive_run_seed(5, "ogda", 2));
  CHECK(a != derive_run_seed(5, "sgda", 1));
  CHECK(a != derive_run_seed(6, "ogda", 1));
}

TEST_CASE("ranking evaluation") {
  SyntheticImbalancedDataset holdout;
  holdout.features.resize(4, 1);
  holdout.labels.resize(4);
  AucLinearProblem prob = make_synthetic_auc(100, 1, 0.3, 1, 8);

  Vector w(3);
  w << 1.0, 0.0, 0.0;  // scorer = first feature

  SUBCASE("hand example with one tie") {
    holdout.features << 2, 3, 1, 2;
    holdout.labels << 1, 1, -1, -1;
    CHECK(auc_eval(prob, w, holdout) == doctest::Approx(0.875));
  }
  SUBCASE("perfect separation") {
    holdout.features << 5, 6, 1, 2;
    holdout.labels << 1, 1, -1, -1;
    CHECK(auc_eval(prob, w, holdout) == 1.0);
  }
  SUBCASE("constant scores are chance level") {
    holdout.features << 3, 3, 3, 3;
    holdout.labels << 1, 1, -1, -1;
    CHECK(auc_eval(prob, w, holdout) == 0.5);
  }
  SUBCASE("single-class holdout rejected") {
    holdout.features << 1, 2, 3, 4;
    holdout.labels << 1, 1, 1, 1;
    CHECK_THROWS(auc_eval(prob, w, holdout));
  }
}

TEST_CASE("class-mean direction scores well on the synthetic sample") {
  auto data = make_synthetic_dataset(1000, 20, 0.09, 7);
  Vector mean_pos = Vector::Zero(20), mean_neg = Vector::Zero(20);
  Eigen::Index n_pos = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    if (data.labels(i) > 0) {
      mean_pos += data.features.row(i).transpose();
      ++n_pos;
    } else {
      mean_neg += data.features.row(i).transpose();
    }
  }
  mean_pos /= static_cast<double>(n_pos);
  mean_neg /= static_cast<double>(data.size() - n_pos);
  Vector w(22);
  w.setZero();
  w.head(20) = mean_pos - mean_neg;
  AucLinearProblem prob(data);
  CHECK(auc_eval(prob, w, data) >= 0.8);
}

TEST_CASE("theorem schedules derive an initial gap bound when needed") {
  ExperimentSpec spec = parse_spec(kMinimalSpec);
  spec.solvers[0].schedule = "theorem1";
  spec.solvers[0].eps = 0.5;  // generous target to keep K small
  spec.seeds = {1};
  auto records = run_experiment(spec, 1);
  REQUIRE(records.size() == 1);
  CHECK(!records[0].failed);
  CHECK(!records[0].rows.empty());
}
