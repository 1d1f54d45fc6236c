// Experiment runner CLI.
//
//   pes_cli run <spec-file> [--out DIR] [--workers N] [--budget CALLS]
//   pes_cli check <spec-file>
//   pes_cli regress
//
// Exit codes: 0 success, 1 any run failure, 2 spec error.
// PES_OUTPUT_DIR overrides the default output directory.
#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>

#include "pes/harness.hpp"
#include "pes/regress.hpp"

int main(int argc, char** argv) {
  CLI::App app{"stochastic min-max experiment runner"};
  app.require_subcommand(1);

  std::string spec_path, out_dir;
  int workers = 1;
  long long budget = -1;

  auto* run = app.add_subcommand("run", "execute an experiment file");
  run->add_option("spec-file", spec_path, "experiment description")
      ->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--workers", workers, "worker threads")
      ->check(CLI::PositiveNumber);
  run->add_option("--budget", budget, "max oracle calls per run");

  std::string check_path;
  auto* check = app.add_subcommand("check", "parse and validate only");
  check->add_option("spec-file", check_path, "experiment description")
      ->required();

  auto* regress = app.add_subcommand("regress", "run the acceptance suite");

  CLI11_PARSE(app, argc, argv);

  if (regress->parsed()) {
    const auto results = pes::run_regression_suite();
    int failures = 0;
    for (const auto& r : results) {
      std::printf("[%s] %-28s (%.2fs) %s\n", r.pass ? "PASS" : "FAIL",
                  r.name.c_str(), r.elapsed_s, r.detail.c_str());
      if (!r.pass) ++failures;
    }
    std::printf("%zu criteria, %d failing\n", results.size(), failures);
    return failures == 0 ? 0 : 1;
  }

  if (check->parsed()) {
    try {
      pes::load_spec(check_path);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "spec error: %s\n", e.what());
      return 2;
    }
    std::printf("ok\n");
    return 0;
  }

  // run
  pes::ExperimentSpec spec;
  try {
    spec = pes::load_spec(spec_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "spec error: %s\n", e.what());
    return 2;
  }
  if (budget >= 0) spec.budget = budget;
  if (!out_dir.empty()) {
    spec.output_dir = out_dir;
  } else if (const char* env = std::getenv("PES_OUTPUT_DIR")) {
    spec.output_dir = env;
  }

  try {
    const auto records = pes::run_experiment(spec, workers);
    pes::emit_csv(records, spec.output_dir);
    int failures = 0;
    for (const auto& rec : records) {
      if (rec.failed) {
        ++failures;
        std::fprintf(stderr, "run failed: %s seed %llu: %s\n",
                     rec.solver.c_str(),
                     static_cast<unsigned long long>(rec.seed),
                     rec.error.c_str());
      }
    }
    std::printf("%zu runs, %d failed, traces in %s\n", records.size(),
                failures, spec.output_dir.c_str());
    return failures == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
