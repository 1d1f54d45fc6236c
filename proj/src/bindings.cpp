// Python bindings for the main operations: problem construction, epoch
// schedules, the proximal epoch solver, the baseline, gap diagnostics and
// ranking evaluation.
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pes/harness.hpp"
#include "pes/metrics.hpp"
#include "pes/regress.hpp"

namespace py = pybind11;
using namespace pes;

PYBIND11_MODULE(_pes, m) {
  m.doc() = "stochastic min-max optimization: proximal epoch methods";

  py::class_<PrimalDualPoint>(m, "PrimalDualPoint")
      .def(py::init<>())
      .def(py::init([](Vector x, Vector y) {
             return PrimalDualPoint{std::move(x), std::move(y)};
           }),
           py::arg("x"), py::arg("y"))
      .def_readwrite("x", &PrimalDualPoint::x)
      .def_readwrite("y", &PrimalDualPoint::y)
      .def("squared_norm", &PrimalDualPoint::squared_norm);

  py::class_<ProblemConstants>(m, "ProblemConstants")
      .def(py::init<>())
      .def_readwrite("ell", &ProblemConstants::ell)
      .def_readwrite("mu_y", &ProblemConstants::mu_y)
      .def_readwrite("rho", &ProblemConstants::rho)
      .def_readwrite("L_primal", &ProblemConstants::L_primal)
      .def_readwrite("mu_pl", &ProblemConstants::mu_pl)
      .def_readwrite("sigma", &ProblemConstants::sigma)
      .def_readwrite("eps0", &ProblemConstants::eps0);

  py::class_<SaddleProblem>(m, "SaddleProblem")
      .def("dim_x", &SaddleProblem::dim_x)
      .def("dim_y", &SaddleProblem::dim_y)
      .def("constants", &SaddleProblem::constants,
           py::return_value_policy::copy)
      .def("value", &SaddleProblem::value)
      .def("gradient",
           [](const SaddleProblem& p, const PrimalDualPoint& z) {
             const auto g = p.exact_gradient(z);
             return std::make_pair(g.gx, g.gy);
           })
      .def("stochastic_gradient",
           [](const SaddleProblem& p, const PrimalDualPoint& z,
              std::uint64_t seed, int batch_size) {
             std::mt19937_64 rng(seed);
             const auto g = p.stochastic_gradient(z, rng, batch_size);
             return std::make_pair(g.gx, g.gy);
           },
           py::arg("z"), py::arg("seed"), py::arg("batch_size") = 1)
      .def("primal_value", &SaddleProblem::primal_value)
      .def("primal_optimum", &SaddleProblem::primal_optimum)
      .def("best_response_y", &SaddleProblem::best_response_y);

  py::class_<QuadraticGame, SaddleProblem>(m, "QuadraticGame")
      .def(py::init<Eigen::MatrixXd, double, double, double>(),
           py::arg("coupling"), py::arg("q"), py::arg("mu_y"),
           py::arg("noise_sigma") = 0.0)
      .def("coupling", &QuadraticGame::coupling,
           py::return_value_policy::reference_internal);

  m.def("make_quadratic_game", &make_quadratic_game, py::arg("d"),
        py::arg("dp"), py::arg("sv_min"), py::arg("sv_max"), py::arg("q"),
        py::arg("mu_y"), py::arg("noise_sigma"), py::arg("seed"));

  py::class_<SyntheticImbalancedDataset>(m, "Dataset")
      .def_readonly("features", &SyntheticImbalancedDataset::features)
      .def_readonly("labels", &SyntheticImbalancedDataset::labels)
      .def_readonly("positive_ratio",
                    &SyntheticImbalancedDataset::positive_ratio)
      .def("size", &SyntheticImbalancedDataset::size)
      .def("dim", &SyntheticImbalancedDataset::dim);

  m.def("make_synthetic_dataset", &make_synthetic_dataset, py::arg("n"),
        py::arg("d"), py::arg("positive_ratio"), py::arg("seed"));
  m.def("write_dataset_csv", &write_dataset_csv);
  m.def("read_dataset_csv", &read_dataset_csv);

  py::class_<AucLinearProblem, SaddleProblem>(m, "AucLinearProblem")
      .def(py::init<SyntheticImbalancedDataset, int>(), py::arg("data"),
           py::arg("batch_size") = 128)
      .def("positive_fraction", &AucLinearProblem::positive_fraction);

  m.def("make_synthetic_auc", &make_synthetic_auc, py::arg("n"), py::arg("d"),
        py::arg("positive_ratio"), py::arg("seed"),
        py::arg("batch_size") = 128);

  py::enum_<UpdateVariant>(m, "UpdateVariant")
      .value("OGDA", UpdateVariant::kOgda)
      .value("SGDA", UpdateVariant::kSgda)
      .value("ADAGRAD", UpdateVariant::kAdagrad);

  py::enum_<Regime>(m, "Regime")
      .value("THEOREM1", Regime::kTheorem1)
      .value("THEOREM2", Regime::kTheorem2)
      .value("MANUAL", Regime::kManual);

  py::class_<Schedule>(m, "Schedule")
      .def(py::init<>())
      .def_readwrite("gamma", &Schedule::gamma)
      .def_readwrite("eta0", &Schedule::eta0)
      .def_readwrite("decay", &Schedule::decay)
      .def_readwrite("T0", &Schedule::T0)
      .def_readwrite("growth", &Schedule::growth)
      .def_readwrite("K", &Schedule::K)
      .def_readwrite("regime", &Schedule::regime)
      .def("eta", &Schedule::eta)
      .def("length", &Schedule::length);

  m.def("default_eta0", &default_eta0);
  m.def("schedule_from_theorem1", &schedule_from_theorem1,
        py::arg("constants"), py::arg("eta0"), py::arg("eps"));
  m.def("schedule_from_theorem2", &schedule_from_theorem2,
        py::arg("constants"), py::arg("eta0"), py::arg("eps"));
  m.def("schedule_adagrad", &schedule_adagrad, py::arg("constants"),
        py::arg("eta0"), py::arg("eps"), py::arg("dim_total"),
        py::arg("m") = 0.0);

  py::class_<AdaGradParams>(m, "AdaGradParams")
      .def(py::init<>())
      .def_readwrite("delta", &AdaGradParams::delta)
      .def_readwrite("alpha_growth", &AdaGradParams::alpha_growth)
      .def_readwrite("m", &AdaGradParams::m)
      .def_readwrite("cap_T", &AdaGradParams::cap_T);

  py::class_<PesConfig>(m, "PesConfig")
      .def(py::init<>())
      .def_readwrite("variant", &PesConfig::variant)
      .def_readwrite("schedule", &PesConfig::schedule)
      .def_readwrite("batch_size", &PesConfig::batch_size)
      .def_readwrite("seed", &PesConfig::seed)
      .def_readwrite("has_adagrad", &PesConfig::has_adagrad)
      .def_readwrite("adagrad", &PesConfig::adagrad)
      .def_readwrite("slack_T", &PesConfig::slack_T)
      .def_readwrite("budget", &PesConfig::budget)
      .def_readwrite("init", &PesConfig::init);

  py::class_<EpochTrace>(m, "EpochTrace")
      .def_readonly("epoch", &EpochTrace::epoch)
      .def_readonly("eta", &EpochTrace::eta)
      .def_readonly("T", &EpochTrace::T)
      .def_readonly("oracle_calls", &EpochTrace::oracle_calls)
      .def_readonly("objective_gap", &EpochTrace::objective_gap)
      .def_readonly("gap_k", &EpochTrace::gap_k)
      .def_readonly("delta_k", &EpochTrace::delta_k)
      .def_readonly("early_stop", &EpochTrace::early_stop)
      .def_readonly("capped", &EpochTrace::capped)
      .def_readonly("point", &EpochTrace::point);

  m.def("pes_solve", &pes_solve, py::arg("problem"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<StocAgdaConfig>(m, "StocAgdaConfig")
      .def(py::init<>())
      .def_readwrite("tau1", &StocAgdaConfig::tau1)
      .def_readwrite("tau2", &StocAgdaConfig::tau2)
      .def_readwrite("lambda_", &StocAgdaConfig::lambda)
      .def_readwrite("T", &StocAgdaConfig::T)
      .def_readwrite("stride", &StocAgdaConfig::stride)
      .def_readwrite("seed", &StocAgdaConfig::seed)
      .def_readwrite("batch_size", &StocAgdaConfig::batch_size)
      .def_readwrite("init", &StocAgdaConfig::init);

  py::class_<StocAgdaSample>(m, "StocAgdaSample")
      .def_readonly("t", &StocAgdaSample::t)
      .def_readonly("oracle_calls", &StocAgdaSample::oracle_calls)
      .def_readonly("objective_gap", &StocAgdaSample::objective_gap);

  py::class_<StocAgdaResult>(m, "StocAgdaResult")
      .def_readonly("samples", &StocAgdaResult::samples)
      .def_readonly("final_point", &StocAgdaResult::final_point)
      .def_readonly("oracle_calls", &StocAgdaResult::oracle_calls);

  m.def("stoc_agda", &stoc_agda, py::arg("problem"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  m.def("primal_gap", &primal_gap);
  m.def("gap_k", &gap_k, py::arg("problem"), py::arg("z"), py::arg("x0"),
        py::arg("gamma"));
  m.def("lyapunov_delta", &lyapunov_delta);
  m.def("numeric_inner_solve_gap", &numeric_inner_solve_gap,
        py::arg("problem"), py::arg("z"), py::arg("x0"), py::arg("gamma"),
        py::arg("tol") = 1e-10, py::arg("max_iters") = 1000000);
  m.def("estimate_pl_constant",
        [](const SaddleProblem& prob, int sample_count, double radius,
           std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          return estimate_pl_constant(prob, sample_count, radius, rng);
        },
        py::arg("problem"), py::arg("sample_count"), py::arg("radius"),
        py::arg("seed"));

  m.def("auc_eval", &auc_eval, py::arg("problem"), py::arg("x"),
        py::arg("holdout"));

  m.def("run_experiment_file",
        [](const std::string& path, const std::string& out_dir, int workers,
           std::int64_t budget) {
          ExperimentSpec spec = load_spec(path);
          if (budget >= 0) spec.budget = budget;
          if (!out_dir.empty()) spec.output_dir = out_dir;
          const auto records = run_experiment(spec, workers);
          emit_csv(records, spec.output_dir);
          py::list out;
          for (const auto& rec : records) {
            py::dict d;
            d["solver"] = rec.solver;
            d["seed"] = rec.seed;
            d["failed"] = rec.failed;
            d["error"] = rec.error;
            d["final_objective_gap"] = rec.final_objective_gap;
            d["final_gap_k"] = rec.final_gap_k;
            d["total_oracle_calls"] = rec.total_oracle_calls;
            out.append(std::move(d));
          }
          return out;
        },
        py::arg("path"), py::arg("out_dir") = std::string("."),
        py::arg("workers") = 1, py::arg("budget") = -1);
}
