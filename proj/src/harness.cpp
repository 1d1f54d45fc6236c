#include "pes/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

namespace pes {

namespace {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, int line, const std::string& key) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    fail(line, "key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::int64_t to_int(const std::string& v, int line, const std::string& key) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    fail(line, "key '" + key + "': expected an integer, got '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& v, int line, const std::string& key) {
  try {
    size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    fail(line, "key '" + key + "': expected an unsigned integer, got '" + v +
                   "'");
  }
}

bool to_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(line, "key '" + key + "': expected true/false, got '" + v + "'");
}

void set_problem_key(ProblemSpec& p, const std::string& key,
                     const std::string& value, int line) {
  if (key == "kind") {
    p.kind = value;
  } else if (key == "seed") {
    p.seed = to_uint(value, line, key);
  } else if (key == "d") {
    p.d = to_int(value, line, key);
  } else if (key == "dp") {
    p.dp = to_int(value, line, key);
  } else if (key == "sv_min") {
    p.sv_min = to_double(value, line, key);
  } else if (key == "sv_max") {
    p.sv_max = to_double(value, line, key);
  } else if (key == "q") {
    p.q = to_double(value, line, key);
  } else if (key == "mu_y") {
    p.mu_y = to_double(value, line, key);
  } else if (key == "sigma") {
    p.sigma = to_double(value, line, key);
  } else if (key == "n") {
    p.n = to_int(value, line, key);
  } else if (key == "ratio") {
    p.ratio = to_double(value, line, key);
  } else if (key == "batch_size") {
    p.batch_size = static_cast<int>(to_int(value, line, key));
  } else {
    fail(line, "unknown key '" + key + "' in [problem]");
  }
}

void set_solver_key(SolverSpec& s, const std::string& key,
                    const std::string& value, int line) {
  if (key == "kind") {
    s.kind = value;
  } else if (key == "schedule") {
    s.schedule = value;
  } else if (key == "eta0") {
    s.eta0 = to_double(value, line, key);
  } else if (key == "eps") {
    s.eps = to_double(value, line, key);
  } else if (key == "slack") {
    s.slack = to_double(value, line, key);
  } else if (key == "batch_size") {
    s.batch_size = static_cast<int>(to_int(value, line, key));
  } else if (key == "gamma") {
    s.gamma = to_double(value, line, key);
  } else if (key == "decay") {
    s.decay = to_double(value, line, key);
  } else if (key == "growth") {
    s.growth = to_double(value, line, key);
  } else if (key == "T0") {
    s.T0 = to_int(value, line, key);
  } else if (key == "K") {
    s.K = static_cast<int>(to_int(value, line, key));
  } else if (key == "delta") {
    s.adagrad.delta = to_double(value, line, key);
  } else if (key == "alpha_growth") {
    s.adagrad.alpha_growth = to_double(value, line, key);
  } else if (key == "m") {
    s.adagrad.m = to_double(value, line, key);
  } else if (key == "cap_T") {
    s.adagrad.cap_T = to_int(value, line, key);
  } else if (key == "tau1") {
    s.tau1 = to_double(value, line, key);
  } else if (key == "tau2") {
    s.tau2 = to_double(value, line, key);
  } else if (key == "lambda") {
    s.lambda = to_double(value, line, key);
  } else if (key == "iters") {
    s.iters = to_int(value, line, key);
  } else if (key == "stride") {
    s.stride = to_int(value, line, key);
  } else if (key == "grid") {
    s.grid = to_bool(value, line, key);
  } else {
    fail(line, "unknown key '" + key + "' in [solver " + s.name + "]");
  }
}

void set_run_key(ExperimentSpec& spec, const std::string& key,
                 const std::string& value, int line) {
  if (key == "seeds") {
    std::stringstream ss(value);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      spec.seeds.push_back(to_uint(tok, line, key));
    }
  } else if (key == "budget") {
    spec.budget = to_int(value, line, key);
  } else if (key == "output_dir") {
    spec.output_dir = value;
  } else {
    fail(line, "unknown key '" + key + "' in [run]");
  }
}

}  // namespace

ExperimentSpec parse_spec(const std::string& text) {
  ExperimentSpec spec;
  enum class Section { kNone, kProblem, kSolver, kRun };
  Section section = Section::kNone;
  SolverSpec* solver = nullptr;
  bool saw_problem = false, saw_run = false;

  std::stringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find('#');
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;

    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header");
      const std::string header = trim(s.substr(1, s.size() - 2));
      if (header == "problem") {
        if (saw_problem) fail(line, "duplicate [problem] section");
        saw_problem = true;
        section = Section::kProblem;
      } else if (header == "run") {
        if (saw_run) fail(line, "duplicate [run] section");
        saw_run = true;
        section = Section::kRun;
      } else if (header.rfind("solver ", 0) == 0) {
        const std::string name = trim(header.substr(7));
        if (name.empty()) fail(line, "solver section needs a name");
        for (const auto& existing : spec.solvers) {
          if (existing.name == name) {
            fail(line, "duplicate solver name '" + name + "'");
          }
        }
        spec.solvers.emplace_back();
        spec.solvers.back().name = name;
        solver = &spec.solvers.back();
        section = Section::kSolver;
      } else {
        fail(line, "unknown section [" + header + "]");
      }
      continue;
    }

    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    switch (section) {
      case Section::kNone:
        fail(line, "key outside any section");
      case Section::kProblem:
        set_problem_key(spec.problem, key, value, line);
        break;
      case Section::kSolver:
        set_solver_key(*solver, key, value, line);
        break;
      case Section::kRun:
        set_run_key(spec, key, value, line);
        break;
    }
  }

  if (!saw_problem) throw ParseError("missing [problem] section");
  if (spec.problem.kind != "quadratic" && spec.problem.kind != "auc") {
    throw ParseError("problem kind must be 'quadratic' or 'auc', got '" +
                     spec.problem.kind + "'");
  }
  if (spec.solvers.empty()) throw ParseError("no solver sections");
  if (spec.seeds.empty()) throw ParseError("no seeds in [run]");
  for (const auto& s : spec.solvers) {
    if (s.kind != "pes-ogda" && s.kind != "pes-sgda" &&
        s.kind != "pes-adagrad" && s.kind != "stoc-agda") {
      throw ParseError("solver '" + s.name + "': unknown kind '" + s.kind +
                       "'");
    }
    if (s.kind != "stoc-agda") {
      if (s.schedule != "theorem1" && s.schedule != "theorem2" &&
          s.schedule != "adagrad" && s.schedule != "manual") {
        throw ParseError("solver '" + s.name + "': unknown schedule '" +
                         s.schedule + "'");
      }
      if (s.schedule == "manual" &&
          (s.T0 < 1 || s.K < 1 || !(s.eta0 > 0.0))) {
        throw ParseError("solver '" + s.name +
                         "': manual schedule requires eta0, T0 and K");
      }
    }
  }
  return spec;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

std::uint64_t derive_run_seed(std::uint64_t spec_seed,
                              const std::string& solver_name,
                              std::uint64_t run_seed) {
  // FNV-1a over all inputs, then a splitmix finalizer for diffusion.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix_byte = [&](unsigned char b) {
    h ^= b;
    h *= 1099511628211ULL;
  };
  for (int i = 0; i < 8; ++i) mix_byte((spec_seed >> (8 * i)) & 0xff);
  for (const char c : solver_name) mix_byte(static_cast<unsigned char>(c));
  for (int i = 0; i < 8; ++i) mix_byte((run_seed >> (8 * i)) & 0xff);
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

std::unique_ptr<SaddleProblem> make_problem(const ProblemSpec& spec) {
  if (spec.kind == "quadratic") {
    return std::make_unique<QuadraticGame>(
        make_quadratic_game(spec.d, spec.dp, spec.sv_min, spec.sv_max, spec.q,
                            spec.mu_y, spec.sigma, spec.seed));
  }
  if (spec.kind == "auc") {
    return std::make_unique<AucLinearProblem>(
        make_synthetic_auc(spec.n, spec.d, spec.ratio, spec.seed,
                           spec.batch_size));
  }
  throw std::invalid_argument("make_problem: unknown kind '" + spec.kind +
                              "'");
}

namespace {

// Bound on the initial Lyapunov value at the default starting point, used
// when the problem cannot declare it up front.
double initial_gap_bound(const SaddleProblem& prob, double gamma) {
  PrimalDualPoint z{Vector::Ones(prob.dim_x()), Vector::Zero(prob.dim_y())};
  z.y = prob.domain_y().project(z.y);
  double bound = primal_gap(prob, z.x);
  bound += gap_k(prob, z, z.x, gamma);
  return std::max(bound, 1e-12);
}

Schedule build_schedule(const SolverSpec& s, const SaddleProblem& prob,
                        UpdateVariant variant) {
  if (s.schedule == "manual") {
    Schedule sched;
    sched.gamma = s.gamma;
    sched.eta0 = s.eta0;
    sched.decay = s.decay;
    sched.growth = s.growth;
    sched.T0 = s.T0;
    sched.K = s.K;
    sched.regime = Regime::kManual;
    return sched;
  }
  ProblemConstants c = prob.constants();
  const double eta0 = s.eta0 > 0.0 ? s.eta0 : default_eta0(variant, c);
  if (s.schedule == "theorem2" && !(c.rho <= c.mu_pl / 8.0)) {
    // fail with the real precondition before the gap probe can trip over
    // a non-convex regularized subproblem
    throw std::invalid_argument(
        "schedule_from_theorem2: requires rho <= mu_pl / 8");
  }
  if (c.eps0 <= 0.0) {
    const double gamma = s.schedule == "theorem2" ? c.mu_pl / 4.0
                                                  : 2.0 * c.rho;
    c.eps0 = initial_gap_bound(prob, gamma);
  }
  if (s.schedule == "theorem1") return schedule_from_theorem1(c, eta0, s.eps);
  if (s.schedule == "theorem2") return schedule_from_theorem2(c, eta0, s.eps);
  if (s.schedule == "adagrad") {
    return schedule_adagrad(c, eta0, s.eps, prob.dim_x() + prob.dim_y(),
                            s.adagrad.m);
  }
  throw std::invalid_argument("unknown schedule '" + s.schedule + "'");
}

int effective_batch(const SolverSpec& s, const SaddleProblem& prob) {
  if (s.batch_size > 0) return s.batch_size;
  if (const auto* auc = dynamic_cast<const AucLinearProblem*>(&prob)) {
    return auc->default_batch_size();
  }
  return 1;
}

RunRecord run_baseline(const SaddleProblem& prob, const SolverSpec& s,
                       const ExperimentSpec& spec, std::uint64_t seed) {
  RunRecord rec;
  rec.solver = s.name;
  rec.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();

  StocAgdaConfig base;
  base.tau1 = s.tau1;
  base.tau2 = s.tau2;
  base.lambda = s.lambda;
  base.T = s.iters;
  base.stride = s.stride;
  base.batch_size = effective_batch(s, prob);
  base.seed = derive_run_seed(spec.problem.seed, s.name, seed);
  if (spec.budget > 0) base.T = std::min(base.T, spec.budget / 2);
  if (base.T < 1) base.T = 1;

  std::vector<StocAgdaConfig> grid;
  if (s.grid) {
    for (const double tau1 : {1.0, 5.0, 10.0, 15.0}) {
      for (const double tau2 : {5.0, 10.0, 15.0, 20.0}) {
        for (const double lambda : {1e3, 1e4}) {
          StocAgdaConfig cfg = base;
          cfg.tau1 = tau1;
          cfg.tau2 = tau2;
          cfg.lambda = lambda;
          grid.push_back(cfg);
        }
      }
    }
  } else {
    grid.push_back(base);
  }

  bool have_best = false;
  StocAgdaResult best;
  for (const auto& cfg : grid) {
    StocAgdaResult res = stoc_agda(prob, cfg);
    const double gap = res.samples.empty()
                           ? std::numeric_limits<double>::quiet_NaN()
                           : res.samples.back().objective_gap;
    const double best_gap = (!have_best || best.samples.empty())
                                ? std::numeric_limits<double>::infinity()
                                : best.samples.back().objective_gap;
    if (!have_best || (std::isfinite(gap) && gap < best_gap)) {
      best = std::move(res);
      have_best = true;
    }
  }

  for (size_t i = 0; i < best.samples.size(); ++i) {
    const auto& sample = best.samples[i];
    EpochTrace row;
    row.epoch = static_cast<int>(i + 1);
    row.eta = base.tau2 / (base.lambda + static_cast<double>(sample.t));
    row.T = sample.t;
    row.oracle_calls = sample.oracle_calls;
    row.objective_gap = sample.objective_gap;
    rec.rows.push_back(std::move(row));
  }
  rec.final_objective_gap =
      best.samples.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : best.samples.back().objective_gap;
  rec.total_oracle_calls = best.oracle_calls;
  rec.wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rec;
}

RunRecord run_single(const SaddleProblem& prob, const SolverSpec& s,
                     const ExperimentSpec& spec, std::uint64_t seed) {
  RunRecord rec;
  rec.solver = s.name;
  rec.seed = seed;
  try {
    if (s.kind == "stoc-agda") return run_baseline(prob, s, spec, seed);

    UpdateVariant variant = UpdateVariant::kOgda;
    if (s.kind == "pes-sgda") variant = UpdateVariant::kSgda;
    if (s.kind == "pes-adagrad") variant = UpdateVariant::kAdagrad;

    PesConfig config;
    config.variant = variant;
    config.schedule = build_schedule(s, prob, variant);
    config.batch_size = effective_batch(s, prob);
    config.seed = derive_run_seed(spec.problem.seed, s.name, seed);
    config.slack_T = s.slack;
    config.budget = spec.budget;
    if (variant == UpdateVariant::kAdagrad) {
      config.has_adagrad = true;
      config.adagrad = s.adagrad;
    }

    const auto t0 = std::chrono::steady_clock::now();
    rec.rows = pes_solve(prob, config);
    rec.wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    if (!rec.rows.empty()) {
      rec.final_objective_gap = rec.rows.back().objective_gap;
      rec.final_gap_k = rec.rows.back().gap_k;
      rec.total_oracle_calls = rec.rows.back().oracle_calls;
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec,
                                      int workers) {
  std::unique_ptr<SaddleProblem> prob = make_problem(spec.problem);

  struct Job {
    const SolverSpec* solver;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& s : spec.solvers) {
    for (const std::uint64_t seed : spec.seeds) jobs.push_back({&s, seed});
  }
  std::vector<RunRecord> records(jobs.size());

  const int n_workers = std::max(
      1, std::min<int>(workers, static_cast<int>(jobs.size())));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      records[i] = run_single(*prob, *jobs[i].solver, spec, jobs[i].seed);
    }
  };
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double median(std::vector<double> v) {
  v.erase(std::remove_if(v.begin(), v.end(),
                         [](double x) { return !std::isfinite(x); }),
          v.end());
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void emit_csv(const std::vector<RunRecord>& records,
              const std::string& output_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) {
    throw std::runtime_error("emit_csv: cannot create directory " +
                             output_dir + ": " + ec.message());
  }

  for (const auto& rec : records) {
    if (rec.failed) continue;
    const fs::path path = fs::path(output_dir) /
                          ("trace_" + rec.solver + "_" +
                           std::to_string(rec.seed) + ".csv");
    std::ofstream out(path);
    if (!out) {
      throw std::runtime_error("emit_csv: cannot open " + path.string());
    }
    out << "epoch,eta,T,oracle_calls,objective_gap,gap_k,delta_k,elapsed_s\n";
    for (const auto& row : rec.rows) {
      out << row.epoch << ',' << fmt(row.eta) << ',' << row.T << ','
          << row.oracle_calls << ',' << fmt(row.objective_gap) << ','
          << fmt(row.gap_k) << ',' << fmt(row.delta_k) << ','
          << fmt(row.elapsed_s) << '\n';
    }
  }

  // Per-solver medians over seeds, in first-appearance order.
  std::vector<std::string> order;
  for (const auto& rec : records) {
    if (std::find(order.begin(), order.end(), rec.solver) == order.end()) {
      order.push_back(rec.solver);
    }
  }
  const fs::path path = fs::path(output_dir) / "summary.csv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit_csv: cannot open " + path.string());
  out << "solver,runs,failures,median_final_objective_gap,"
         "median_final_gap_k,median_oracle_calls,median_wall_s\n";
  for (const auto& name : order) {
    std::vector<double> gaps, gapks, calls, walls;
    int runs = 0, failures = 0;
    for (const auto& rec : records) {
      if (rec.solver != name) continue;
      ++runs;
      if (rec.failed) {
        ++failures;
        continue;
      }
      gaps.push_back(rec.final_objective_gap);
      gapks.push_back(rec.final_gap_k);
      calls.push_back(static_cast<double>(rec.total_oracle_calls));
      walls.push_back(rec.wall_s);
    }
    out << name << ',' << runs << ',' << failures << ',' << fmt(median(gaps))
        << ',' << fmt(median(gapks)) << ',' << fmt(median(calls)) << ','
        << fmt(median(walls)) << '\n';
  }
}

double auc_eval(const AucLinearProblem& prob, const Vector& x,
                const SyntheticImbalancedDataset& holdout) {
  if (x.size() < holdout.dim()) {
    throw std::invalid_argument("auc_eval: scorer dimension mismatch");
  }
  const Eigen::Index n = holdout.size();
  std::vector<std::pair<double, bool>> scored(n);
  Eigen::Index n_pos = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = holdout.features.row(i).dot(x.head(holdout.dim()));
    const bool pos = holdout.labels(i) > 0;
    scored[i] = {s, pos};
    if (pos) ++n_pos;
  }
  if (n_pos == 0 || n_pos == n) {
    throw std::invalid_argument("auc_eval: single-class holdout");
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Rank-sum with average ranks over tied scores.
  double rank_sum_pos = 0.0;
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j < n && scored[j].first == scored[i].first) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (Eigen::Index k = i; k < j; ++k) {
      if (scored[k].second) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n - n_pos);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

}  // namespace pes
