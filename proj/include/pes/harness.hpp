#ifndef PES_HARNESS_HPP
#define PES_HARNESS_HPP

#include <memory>
#include <string>
#include <vector>

#include "pes/solvers.hpp"

namespace pes {

/// Problem block of an experiment file.
struct ProblemSpec {
  std::string kind;  // "quadratic" | "auc"
  std::uint64_t seed = 0;
  // quadratic
  Eigen::Index d = 10;
  Eigen::Index dp = 10;
  double sv_min = 0.5;
  double sv_max = 1.0;
  double q = -0.3;
  double mu_y = 0.5;
  double sigma = 0.0;
  // auc
  Eigen::Index n = 2000;
  double ratio = 0.1;
  int batch_size = 128;
};

/// One solver block. kind selects the algorithm, schedule how its epoch
/// plan is built ("theorem1" | "theorem2" | "adagrad" | "manual"; ignored
/// for the baseline).
struct SolverSpec {
  std::string name;
  std::string kind;  // "pes-ogda" | "pes-sgda" | "pes-adagrad" | "stoc-agda"
  std::string schedule = "theorem1";
  double eta0 = 0.0;  // 0 = variant default cap
  double eps = 1e-3;
  double slack = 1.0;
  int batch_size = 0;  // 0 = problem default (1 for quadratic)
  // manual schedule fields
  double gamma = 0.0;
  double decay = 1.0;
  double growth = 1.0;
  std::int64_t T0 = 0;
  int K = 0;
  // adaptive-variant parameters
  AdaGradParams adagrad;
  // baseline parameters; grid = true sweeps the default tuning ranges and
  // keeps the best final objective gap per seed
  double tau1 = 1.0;
  double tau2 = 5.0;
  double lambda = 1e3;
  std::int64_t iters = 10000;
  std::int64_t stride = 100;
  bool grid = false;
};

struct ExperimentSpec {
  ProblemSpec problem;
  std::vector<SolverSpec> solvers;
  std::vector<std::uint64_t> seeds;
  std::int64_t budget = 0;  // max oracle calls per run, 0 = unlimited
  std::string output_dir = ".";
};

/// Strict parser for the plain-text experiment format: bracketed section
/// headers ([problem], [solver NAME], [run]) followed by key = value
/// lines; '#' starts a comment. Unknown keys, unknown sections, duplicate
/// solver names, and type mismatches are errors naming the line.
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::string& path);

struct RunRecord {
  std::string solver;
  std::uint64_t seed = 0;
  std::vector<EpochTrace> rows;
  double final_objective_gap = std::numeric_limits<double>::quiet_NaN();
  double final_gap_k = std::numeric_limits<double>::quiet_NaN();
  std::int64_t total_oracle_calls = 0;
  double wall_s = 0.0;
  bool failed = false;
  std::string error;
};

/// Stable per-run stream id: mixing the experiment seed, solver name and
/// run seed so adding a solver never perturbs existing runs.
std::uint64_t derive_run_seed(std::uint64_t spec_seed,
                              const std::string& solver_name,
                              std::uint64_t run_seed);

/// Builds the problem described by the spec. Exposed for tests and the CLI.
std::unique_ptr<SaddleProblem> make_problem(const ProblemSpec& spec);

/// Executes every (solver, seed) pair on a bounded worker pool. A failing
/// run is reported in its record; siblings are unaffected.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec,
                                      int workers = 1);

/// Writes trace_<solver>_<seed>.csv per record plus summary.csv with
/// per-solver medians over seeds. Floats carry 17 significant digits;
/// unavailable metrics are empty cells.
void emit_csv(const std::vector<RunRecord>& records,
              const std::string& output_dir);

/// Empirical AUC of the linear scorer packed in x over a holdout sample:
/// fraction of (positive, negative) pairs ranked correctly, ties 0.5.
/// Sort-based, O(n log n).
double auc_eval(const AucLinearProblem& prob, const Vector& x,
                const SyntheticImbalancedDataset& holdout);

}  // namespace pes

#endif  // PES_HARNESS_HPP
