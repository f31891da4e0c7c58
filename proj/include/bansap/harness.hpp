#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bansap/fog.hpp"
#include "bansap/metrics.hpp"
#include "bansap/solver.hpp"

namespace bansap {

/// Closure-backed constraint oracle, for synthetic problems and tests.
class FunctionConstraintOracle final : public ConstraintOracle {
 public:
  using ValueFn = std::function<Eigen::VectorXd(long, const Eigen::VectorXd&)>;
  using JacFn = std::function<Eigen::MatrixXd(long, const Eigen::VectorXd&)>;

  FunctionConstraintOracle(ValueFn value, JacFn jacobian, Eigen::Index count)
      : value_(std::move(value)), jacobian_(std::move(jacobian)), count_(count) {}

  Eigen::VectorXd value(long t, const Eigen::VectorXd& x) const override { return value_(t, x); }
  Eigen::MatrixXd jacobian(long t, const Eigen::VectorXd& x) const override {
    return jacobian_(t, x);
  }
  Eigen::Index count() const override { return count_; }

 private:
  ValueFn value_;
  JacFn jacobian_;
  Eigen::Index count_;
};

class FunctionGradientOracle final : public GradientOracle {
 public:
  using ValueFn = std::function<double(long, const Eigen::VectorXd&)>;
  using GradFn = std::function<Eigen::VectorXd(long, const Eigen::VectorXd&)>;

  FunctionGradientOracle(ValueFn value, GradFn grad)
      : value_(std::move(value)), grad_(std::move(grad)) {}

  double value(long t, const Eigen::VectorXd& x) const override { return value_(t, x); }
  Eigen::VectorXd gradient(long t, const Eigen::VectorXd& x) const override {
    return grad_(t, x);
  }

 private:
  ValueFn value_;
  GradFn grad_;
};

struct SyntheticConfig {
  Eigen::Index dim = 2;
  double box_halfwidth = 1.0;
  double target_amplitude = 0.5;   // the tracked minimizer oscillates this far
  double target_period = 50.0;     // slots per cycle
  double budget_base = 0.5;        // g_t(x) = sum(x) - budget_t
  double budget_amplitude = 0.25;
};

/// Small moving-target quadratic with one time-varying budget constraint.
/// Cheap enough that per-slot optima are exact on a laptop; used for fast
/// configs and the regret-metric plumbing.
class SyntheticProblem {
 public:
  explicit SyntheticProblem(const SyntheticConfig& config);

  const BoxSet& box() const { return box_; }
  Eigen::VectorXd target(long t) const;
  double budget(long t) const;

  double loss(long t, const Eigen::VectorXd& x) const;
  Eigen::VectorXd loss_gradient(long t, const Eigen::VectorXd& x) const;
  Eigen::VectorXd constraints(long t, const Eigen::VectorXd& x) const;
  Eigen::MatrixXd constraint_jacobian() const;

  double value_bound() const;      // F over the box
  double lipschitz_bound() const;  // G over the box

 private:
  SyntheticConfig config_;
  BoxSet box_;
};

struct AlgorithmSpec {
  Algorithm algo;
  std::string label;  // CSV key; defaults to the canonical algorithm name
  std::optional<double> primal_step, dual_step, exploration_radius, shrink_factor;
  std::optional<double> c_alpha, c_delta;
  std::optional<StartPoint> start;
};

struct ExperimentConfig {
  enum class ProblemKind { Fog, Synthetic };

  ProblemKind problem = ProblemKind::Fog;
  FogInstanceConfig fog;
  SyntheticConfig synthetic;
  long horizon = 2000;
  int runs = 100;
  std::uint64_t base_seed = 1;
  std::string output_dir = "out";
  int threads = 0;  // 0 = one per hardware thread, capped by the run count
  bool write_snapshots = false;
  std::vector<AlgorithmSpec> algorithms;
  ScheduleConstants schedule_constants;
  std::optional<double> variation_exponent;
  bool compute_regret = false;
  double kkt_tol = 1e-6;
  long kkt_budget = 100000;
  std::string config_text;  // raw file contents, embedded into snapshots
};

/// Parse the key = value experiment format (see configs/ for the schema by
/// example). Unknown keys and malformed values raise std::invalid_argument.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Full validation: ranges, nonempty algorithm list, resolvable stepsizes.
/// Throws std::invalid_argument with every problem listed.
void validate_config(const ExperimentConfig& config);

/// Resolved per-algorithm hyper-parameters (schedule defaults plus overrides).
/// Emits a warning on stderr when an override decouples the shrink factor
/// from exploration_radius / inner_radius.
HyperParams resolve_hyper(const ExperimentConfig& config, const AlgorithmSpec& spec,
                          const BoxSet& box);

struct RunRow {
  std::string algorithm;
  std::uint64_t seed;
  long t;
  double avg_cost;
  double cum_fit;
  double dual_norm;
};

struct RegretRow {
  std::string algorithm;
  std::uint64_t seed;
  long t;
  double regret;
  double cum_regret;
};

struct SummaryRow {
  std::string algorithm;
  std::string axis;   // sweep value, empty for plain runs
  std::string metric; // avg_cost | fit | fit_per_node_slot
  double mean;
  double stddev;
};

struct RunError {
  std::string algorithm;
  std::uint64_t seed;
  std::string message;
};

struct ResultTable {
  struct Block {
    std::string axis_value;  // empty for plain runs
    std::vector<RunRow> rows;
    std::vector<RegretRow> regret_rows;
  };
  std::vector<Block> blocks;
  std::vector<SummaryRow> summary;
  std::vector<RunError> errors;

  bool empty() const;
};

/// Run every (algorithm x seed) pair: seed i is base_seed + i, the instance is
/// shared by all algorithms on a seed, and per-slot optima (when regret is on)
/// are computed once per seed. Failures are recorded per (algorithm, seed) and
/// surfaced in the table; completed rows are kept.
ResultTable run_experiment(const ExperimentConfig& config);

enum class SweepAxis { FeedbackCount, Scheme, NetworkSize };
SweepAxis sweep_axis_from_string(const std::string& name);

/// Clone the config per axis value, run each, and return one table keyed by
/// the axis value.
ResultTable sweep(const ExperimentConfig& config, SweepAxis axis,
                  const std::vector<std::string>& values);

/// Write raw per-slot CSVs, the summary CSV, and the plot script. Throws on
/// an empty table or an unwritable directory.
void emit_outputs(const ResultTable& table, const std::string& dir);

/// Re-run the experiment embedded in an instance snapshot on its exact
/// arrival realization.
ResultTable replay_snapshot(const InstanceSnapshot& snapshot);

}  // namespace bansap
