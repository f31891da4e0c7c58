#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bansap/estimators.hpp"
#include "bansap/geometry.hpp"

namespace bansap {

class FogProblem;

/// Where a run initializes its primal iterate. Center is the default; the
/// projected origin is the no-action point of resource-allocation problems,
/// where one-point feedback starts from small loss values instead of
/// mid-scale ones.
enum class StartPoint { ShrunkenCenter, ProjectedOrigin };

struct HyperParams {
  double primal_step = 0.0;       // alpha
  double dual_step = 0.0;         // mu
  double exploration_radius = 0;  // delta
  double shrink_factor = 0.0;     // gamma
  int feedback_count = 1;         // M, loss queries per slot
  SamplingScheme scheme = SamplingScheme::UniformSphere;
  long horizon = 0;               // T
  std::optional<double> variation_exponent;  // rho
  StartPoint start = StartPoint::ShrunkenCenter;

  /// Common validity checks. Horizon 0 is allowed and produces an empty run.
  void validate_basic() const;
  /// Bandit-specific checks; in particular the perturbation-feasibility
  /// coupling shrink_factor * inner_radius >= exploration_radius.
  void validate_for_bandit(const BoxSet& box) const;
};

/// Primal learning iterate and nonnegative multipliers.
struct PrimalDualState {
  Eigen::VectorXd iterate;       // x_hat, lives in the shrunken set
  Eigen::VectorXd multipliers;   // lambda >= 0
  long slot = 1;
};

/// Per-slot constraint function g_t: value in R^N and N x d Jacobian.
/// Revealed to the learner after the slot's actions are played.
class ConstraintOracle {
 public:
  virtual ~ConstraintOracle() = default;
  virtual Eigen::VectorXd value(long t, const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd jacobian(long t, const Eigen::VectorXd& x) const = 0;
  virtual Eigen::Index count() const = 0;
};

/// Full-information interface (value plus exact gradient); only the
/// gradient-fed baseline sees this.
class GradientOracle {
 public:
  virtual ~GradientOracle() = default;
  virtual double value(long t, const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(long t, const Eigen::VectorXd& x) const = 0;
};

struct SlotRecord {
  std::vector<Eigen::VectorXd> actions;            // M played points
  std::vector<double> losses;                      // f_t at each action
  std::vector<Eigen::VectorXd> constraint_at_actions;
  Eigen::VectorXd constraint_at_iterate;           // g_t(x_hat_t)
  double multiplier_norm = 0.0;                    // ||lambda|| after the dual update
  Eigen::VectorXd iterate;                         // x_hat_t

  double average_loss() const;
  Eigen::VectorXd average_constraint() const;
};

struct Trajectory {
  std::vector<SlotRecord> records;
  HyperParams hyper;
  std::uint64_t seed = 0;
};

/// Shared primal-dual core: projected primal descent followed by the dual
/// ascent along the first-order approximation of g_t at the new primal point,
///   x+  = P_feasible(x - alpha (grad_f + J^T lambda))
///   l+  = [lambda + mu (g + J (x+ - x))]^+
std::pair<Eigen::VectorXd, Eigen::VectorXd> primal_dual_update(
    const Eigen::VectorXd& x, const Eigen::VectorXd& lambda, const Eigen::VectorXd& grad_f,
    const Eigen::VectorXd& g_value, const Eigen::MatrixXd& g_jacobian, double alpha, double mu,
    const BoxSet& feasible);

struct StepResult {
  PrimalDualState next;
  SlotRecord record;
};

/// One bandit saddle-point slot: draw direction(s), play perturbed actions,
/// estimate the loss gradient from the observed values, then run the
/// primal-dual core on the shrunken set.
StepResult bansap_step(const PrimalDualState& state, LossOracle& loss,
                       const ConstraintOracle& cons, const HyperParams& hp, const BoxSet& box,
                       Rng& rng);

/// Same update structure with the exact gradient; the action is the iterate
/// itself (no perturbation, no shrinkage).
StepResult mosp_step(const PrimalDualState& state, const GradientOracle& full_info,
                     const ConstraintOracle& cons, const HyperParams& hp, const BoxSet& box);

/// Deterministic variant of bansap_step used by differential tests: the
/// gradient estimate is supplied instead of sampled.
StepResult bansap_step_with_estimate(const PrimalDualState& state, const GradientEstimate& est,
                                     const ConstraintOracle& cons, const HyperParams& hp,
                                     const BoxSet& box);

enum class FeedbackMode { OnePoint, TwoPoint };

struct ScheduleConstants {
  double c_alpha = 1.0;
  double c_delta = 1.0;
};

/// Stepsize schedules:
///   one-point            alpha = mu = c_a T^(-3/4),        delta = c_d T^(-1/4)
///   two-point            alpha = mu = c_a T^(-1/2),        delta = c_d T^(-1)
///   one-point, rho given alpha = mu = c_a T^(3(rho-1)/4),  delta = c_d T^((rho-1)/4)
///   two-point, rho given alpha = mu = delta exponents all (rho-1)/2
/// and always gamma = delta / inner_radius.
HyperParams schedule(long horizon, FeedbackMode mode, std::optional<double> rho,
                     const BoxSet& geometry, ScheduleConstants constants = {});

struct BanSaPAlgo {
  int feedback_count = 2;
  SamplingScheme scheme = SamplingScheme::UniformSphere;
};
struct MospAlgo {};
struct CloudOnlyAlgo {};
struct FogOnlyAlgo {};

using Algorithm = std::variant<BanSaPAlgo, MospAlgo, CloudOnlyAlgo, FogOnlyAlgo>;

std::string algorithm_name(const Algorithm& algo);

/// Everything a run needs. The bandit side sees only value queries; the
/// full-information oracle exists for the gradient-fed baseline, and the fog
/// pointer only for the two heuristics.
struct ProblemBundle {
  LossOracle* bandit = nullptr;
  const GradientOracle* full_info = nullptr;
  const ConstraintOracle* constraints = nullptr;
  const FogProblem* fog = nullptr;
  BoxSet box;
};

/// Execute hp.horizon slots from the center of the shrunken set with zero
/// multipliers. Deterministic given (bundle, algo, hp, seed). Step failures
/// are rethrown with the slot index attached.
Trajectory run(const ProblemBundle& problem, const Algorithm& algo, const HyperParams& hp,
               std::uint64_t seed);

}  // namespace bansap
