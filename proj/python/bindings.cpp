#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bansap/estimators.hpp"
#include "bansap/fog.hpp"
#include "bansap/geometry.hpp"
#include "bansap/harness.hpp"
#include "bansap/metrics.hpp"
#include "bansap/solver.hpp"

namespace py = pybind11;
using namespace bansap;

namespace {

using PyLoss = std::function<double(long, const Eigen::VectorXd&)>;

struct RunSummary {
  std::vector<double> avg_cost;
  std::vector<double> cum_fit;
  std::vector<double> dual_norm;
  double fit = 0.0;
};

Algorithm make_algorithm(const std::string& name, int feedback, const std::string& scheme) {
  if (name == "bansap") return BanSaPAlgo{feedback, sampling_scheme_from_string(scheme)};
  if (name == "mosp") return MospAlgo{};
  if (name == "cloud_only") return CloudOnlyAlgo{};
  if (name == "fog_only") return FogOnlyAlgo{};
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

RunSummary run_fog(const FogProblem& problem, const std::string& algorithm, int feedback,
                   const std::string& scheme, long horizon, std::uint64_t seed, double alpha,
                   double mu, double delta, double gamma, const std::string& start) {
  Rng tmp(0);
  const auto bounds = problem.estimate_bounds(0, tmp);
  FogLossOracle oracle(problem, bounds.value_bound, bounds.gradient_bound);
  FogConstraintOracle cons(problem);
  FogFullInfoOracle full_info(problem);
  ProblemBundle bundle{&oracle, &full_info, &cons, &problem, problem.box()};

  HyperParams hp;
  hp.primal_step = alpha;
  hp.dual_step = mu;
  hp.exploration_radius = delta;
  hp.shrink_factor = gamma >= 0.0 ? gamma : delta / problem.box().inner_radius();
  hp.horizon = horizon;
  if (start == "origin") {
    hp.start = StartPoint::ProjectedOrigin;
  } else if (start != "center") {
    throw std::invalid_argument("start must be center or origin");
  }

  const Trajectory traj = run(bundle, make_algorithm(algorithm, feedback, scheme), hp, seed);
  const FitSeries fit = dynamic_fit(traj);
  RunSummary out;
  out.avg_cost.reserve(traj.records.size());
  out.dual_norm.reserve(traj.records.size());
  for (const auto& rec : traj.records) {
    out.avg_cost.push_back(rec.average_loss());
    out.dual_norm.push_back(rec.multiplier_norm);
  }
  out.cum_fit = fit.cumulative_norm;
  out.fit = fit.fit;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bandit online saddle-point optimization with long-term constraints";

  py::class_<BoxSet>(m, "BoxSet")
      .def(py::init<Eigen::VectorXd, Eigen::VectorXd>(), py::arg("lower"), py::arg("upper"))
      .def_property_readonly("dim", &BoxSet::dim)
      .def_property_readonly("lower", &BoxSet::lower)
      .def_property_readonly("upper", &BoxSet::upper)
      .def("center", &BoxSet::center)
      .def("half_widths", &BoxSet::half_widths)
      .def("inner_radius", &BoxSet::inner_radius)
      .def("outer_radius", &BoxSet::outer_radius)
      .def("project", &BoxSet::project, py::arg("point"))
      .def("shrink", &BoxSet::shrink, py::arg("gamma"))
      .def("contains", &BoxSet::contains, py::arg("point"), py::arg("tol") = 0.0);

  m.def(
      "sample_direction",
      [](const std::string& scheme, Eigen::Index d, std::uint64_t seed) {
        Rng rng(seed);
        return sample_direction(sampling_scheme_from_string(scheme), d, rng).vec();
      },
      py::arg("scheme"), py::arg("dim"), py::arg("seed"));
  m.def(
      "sample_ball",
      [](Eigen::Index d, std::uint64_t seed) {
        Rng rng(seed);
        return sample_ball(d, rng);
      },
      py::arg("dim"), py::arg("seed"));

  py::class_<GradientEstimate>(m, "GradientEstimate")
      .def_readonly("g", &GradientEstimate::g)
      .def_readonly("points_queried", &GradientEstimate::points_queried)
      .def_readonly("values_observed", &GradientEstimate::values_observed);

  m.def(
      "one_point_grad",
      [](const PyLoss& f, long t, const Eigen::VectorXd& x_hat, double delta,
         const Eigen::VectorXd& u) {
        FunctionLossOracle oracle(f);
        return one_point_grad(oracle, t, x_hat, delta, Direction(u));
      },
      py::arg("loss"), py::arg("t"), py::arg("x_hat"), py::arg("delta"), py::arg("direction"));
  m.def(
      "two_point_grad",
      [](const PyLoss& f, long t, const Eigen::VectorXd& x_hat, double delta,
         const Eigen::VectorXd& u) {
        FunctionLossOracle oracle(f);
        return two_point_grad(oracle, t, x_hat, delta, Direction(u));
      },
      py::arg("loss"), py::arg("t"), py::arg("x_hat"), py::arg("delta"), py::arg("direction"));
  m.def(
      "m_point_grad",
      [](const PyLoss& f, long t, const Eigen::VectorXd& x_hat, double delta, int feedback,
         const std::string& scheme, std::uint64_t seed) {
        FunctionLossOracle oracle(f);
        Rng rng(seed);
        return m_point_grad(oracle, t, x_hat, delta, feedback,
                            sampling_scheme_from_string(scheme), rng);
      },
      py::arg("loss"), py::arg("t"), py::arg("x_hat"), py::arg("delta"), py::arg("feedback"),
      py::arg("scheme"), py::arg("seed"));
  m.def(
      "smoothed_value",
      [](const PyLoss& f, long t, const Eigen::VectorXd& x, double delta, long n_samples,
         std::uint64_t seed) {
        FunctionLossOracle oracle(f);
        Rng rng(seed);
        return smoothed_value(oracle, t, x, delta, n_samples, rng);
      },
      py::arg("loss"), py::arg("t"), py::arg("x"), py::arg("delta"), py::arg("n_samples"),
      py::arg("seed"));

  py::class_<HyperParams>(m, "HyperParams")
      .def(py::init<>())
      .def_readwrite("primal_step", &HyperParams::primal_step)
      .def_readwrite("dual_step", &HyperParams::dual_step)
      .def_readwrite("exploration_radius", &HyperParams::exploration_radius)
      .def_readwrite("shrink_factor", &HyperParams::shrink_factor)
      .def_readwrite("feedback_count", &HyperParams::feedback_count)
      .def_readwrite("horizon", &HyperParams::horizon);

  m.def(
      "schedule",
      [](long horizon, const std::string& mode, std::optional<double> rho, const BoxSet& box,
         double c_alpha, double c_delta) {
        FeedbackMode fb;
        if (mode == "one_point") {
          fb = FeedbackMode::OnePoint;
        } else if (mode == "two_point") {
          fb = FeedbackMode::TwoPoint;
        } else {
          throw std::invalid_argument("mode must be one_point or two_point");
        }
        return schedule(horizon, fb, rho, box, ScheduleConstants{c_alpha, c_delta});
      },
      py::arg("horizon"), py::arg("mode"), py::arg("rho"), py::arg("box"),
      py::arg("c_alpha") = 1.0, py::arg("c_delta") = 1.0);

  py::class_<FogInstanceConfig>(m, "FogInstanceConfig")
      .def(py::init<>())
      .def_readwrite("nodes", &FogInstanceConfig::nodes)
      .def_readwrite("neighbor_links", &FogInstanceConfig::neighbor_links)
      .def_readwrite("cloud_capacity", &FogInstanceConfig::cloud_capacity)
      .def_readwrite("link_capacity", &FogInstanceConfig::link_capacity)
      .def_readwrite("local_capacity", &FogInstanceConfig::local_capacity)
      .def_readwrite("half_period", &FogInstanceConfig::half_period);

  py::class_<FogProblem>(m, "FogProblem")
      .def_property_readonly("dimension",
                             [](const FogProblem& p) { return p.network().dimension(); })
      .def_property_readonly("nodes",
                             [](const FogProblem& p) { return p.network().num_nodes(); })
      .def("box", &FogProblem::box)
      .def("loss", &FogProblem::loss, py::arg("t"), py::arg("x"))
      .def("loss_gradient", &FogProblem::loss_gradient, py::arg("t"), py::arg("x"))
      .def("constraints", &FogProblem::constraints, py::arg("t"), py::arg("x"))
      .def("arrival_vector", &FogProblem::arrival_vector, py::arg("t"))
      .def(
          "per_slot_optimum",
          [](const FogProblem& p, long t, double tol) {
            FogConstraintOracle cons(p);
            const KktPoint point = per_slot_optimum(
                [&p](long tt, const Eigen::VectorXd& x) { return p.loss(tt, x); },
                [&p](long tt, const Eigen::VectorXd& x) { return p.loss_gradient(tt, x); },
                cons, p.box(), t, tol);
            return point.x;
          },
          py::arg("t"), py::arg("tol") = 1e-6)
      .def("to_json", &instance_to_json, py::arg("horizon"), py::arg("seed"),
           py::arg("config_text") = std::string());

  m.def("generate_instance", &generate_instance, py::arg("config"), py::arg("seed"));

  py::class_<RunSummary>(m, "RunSummary")
      .def_readonly("avg_cost", &RunSummary::avg_cost)
      .def_readonly("cum_fit", &RunSummary::cum_fit)
      .def_readonly("dual_norm", &RunSummary::dual_norm)
      .def_readonly("fit", &RunSummary::fit);

  m.def("run_fog", &run_fog, py::arg("problem"), py::arg("algorithm"), py::arg("feedback") = 2,
        py::arg("scheme") = "uniform", py::arg("horizon") = 2000, py::arg("seed") = 1,
        py::arg("alpha") = 0.0224, py::arg("mu") = 0.0224, py::arg("delta") = 0.05,
        py::arg("gamma") = -1.0, py::arg("start") = "center",
        "Run one algorithm on a fog instance; gamma < 0 couples it to delta.");

  m.def(
      "run_experiment_file",
      [](const std::string& config_path, const std::string& output_dir) {
        ExperimentConfig config = load_config(config_path);
        if (!output_dir.empty()) config.output_dir = output_dir;
        const ResultTable table = run_experiment(config);
        if (!table.empty()) emit_outputs(table, config.output_dir);
        std::vector<std::tuple<std::string, std::string, std::string, double, double>> rows;
        for (const auto& row : table.summary) {
          rows.emplace_back(row.algorithm, row.axis, row.metric, row.mean, row.stddev);
        }
        if (!table.errors.empty()) {
          throw std::runtime_error("experiment finished with " +
                                   std::to_string(table.errors.size()) + " failed run(s)");
        }
        return rows;
      },
      py::arg("config_path"), py::arg("output_dir") = std::string());
}
