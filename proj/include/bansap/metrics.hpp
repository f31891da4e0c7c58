#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "bansap/convex.hpp"
#include "bansap/solver.hpp"

namespace bansap {

/// Exact loss as seen by the benchmark side. Algorithms never receive this.
using LossFn = std::function<double(long, const Eigen::VectorXd&)>;
using LossGradFn = std::function<Eigen::VectorXd(long, const Eigen::VectorXd&)>;

/// Per-slot clairvoyant minimizers and their loss values.
struct OptimaSeries {
  std::vector<Eigen::VectorXd> x_star;
  std::vector<double> f_star;
  double solver_tolerance = 1e-6;
};

struct RegretSeries {
  std::vector<double> per_slot;
  std::vector<double> cumulative;
  double total = 0.0;
};

struct FitSeries {
  std::vector<double> cumulative_norm;  // fit of the prefix up to each slot
  Eigen::VectorXd total_violation;      // time-summed M-averaged constraint vector
  double fit = 0.0;                     // || [total_violation]^+ ||
};

/// Solve the slot-t constrained program to KKT tolerance and return the
/// certified point. grad may be empty, in which case central differences on
/// the exact loss are used. Throws InfeasibleError / NoConvergenceError from
/// the underlying solve.
KktPoint per_slot_optimum(const LossFn& loss, const LossGradFn& grad,
                          const ConstraintOracle& cons, const BoxSet& set, long t, double tol,
                          const ConvexSolveOptions& options = {});

/// Per-slot optima for t = 1..horizon (independent solves).
OptimaSeries compute_optima(const LossFn& loss, const LossGradFn& grad,
                            const ConstraintOracle& cons, const BoxSet& set, long horizon,
                            double tol, const ConvexSolveOptions& options = {});

/// Cumulative gap between the M-averaged played losses and the per-slot
/// optimal losses.
RegretSeries dynamic_regret(const Trajectory& traj, const OptimaSeries& optima,
                            const LossFn& loss);

/// Norm of the positive part of the time-summed, M-averaged constraint values
/// at the played actions.
FitSeries dynamic_fit(const Trajectory& traj);

struct StaticBenchmark {
  Eigen::VectorXd x_star;
  double f_total = 0.0;  // summed loss of the best fixed feasible point
  double regret = 0.0;
};

/// Best fixed point feasible for every slot's constraints, via the same
/// certified solver on the time-stacked program.
StaticBenchmark static_optimum_and_regret(const Trajectory& traj, const LossFn& loss,
                                          const LossGradFn& grad, const ConstraintOracle& cons,
                                          const BoxSet& set, double tol,
                                          const ConvexSolveOptions& options = {});

/// Path length of the minimizer sequence, with the slot-0 point taken equal
/// to the first minimizer so the t = 1 term vanishes.
double variation(const OptimaSeries& optima);

}  // namespace bansap
