#include "bansap/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bansap {

namespace {

LossGradFn finite_difference_grad(const LossFn& loss) {
  return [loss](long t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const double h = 1e-6;
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      probe[i] = x[i] + h;
      const double up = loss(t, probe);
      probe[i] = x[i] - h;
      const double down = loss(t, probe);
      probe[i] = x[i];
      grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
  };
}

}  // namespace

KktPoint per_slot_optimum(const LossFn& loss, const LossGradFn& grad,
                          const ConstraintOracle& cons, const BoxSet& set, long t, double tol,
                          const ConvexSolveOptions& options) {
  const LossGradFn gradient = grad ? grad : finite_difference_grad(loss);
  ConvexSolveOptions opts = options;
  opts.kkt_tol = tol;
  try {
    return solve_box_constrained(
        [&](const Eigen::VectorXd& x) { return loss(t, x); },
        [&](const Eigen::VectorXd& x) { return gradient(t, x); },
        [&](const Eigen::VectorXd& x) { return cons.value(t, x); },
        [&](const Eigen::VectorXd& x) { return cons.jacobian(t, x); }, set, opts);
  } catch (const InfeasibleError& e) {
    throw InfeasibleError("slot " + std::to_string(t) + ": " + e.what());
  } catch (const NoConvergenceError& e) {
    throw NoConvergenceError("slot " + std::to_string(t) + ": " + e.what());
  }
}

OptimaSeries compute_optima(const LossFn& loss, const LossGradFn& grad,
                            const ConstraintOracle& cons, const BoxSet& set, long horizon,
                            double tol, const ConvexSolveOptions& options) {
  OptimaSeries out;
  out.solver_tolerance = tol;
  out.x_star.reserve(static_cast<std::size_t>(horizon));
  out.f_star.reserve(static_cast<std::size_t>(horizon));
  for (long t = 1; t <= horizon; ++t) {
    KktPoint point = per_slot_optimum(loss, grad, cons, set, t, tol, options);
    out.f_star.push_back(loss(t, point.x));
    out.x_star.push_back(std::move(point.x));
  }
  return out;
}

RegretSeries dynamic_regret(const Trajectory& traj, const OptimaSeries& optima,
                            const LossFn& loss) {
  if (traj.records.size() != optima.x_star.size()) {
    throw std::invalid_argument("dynamic_regret: trajectory and optima lengths differ");
  }
  RegretSeries out;
  out.per_slot.reserve(traj.records.size());
  out.cumulative.reserve(traj.records.size());
  double running = 0.0;
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const SlotRecord& rec = traj.records[i];
    const long t = static_cast<long>(i) + 1;
    double avg = 0.0;
    for (const auto& action : rec.actions) avg += loss(t, action);
    avg /= static_cast<double>(rec.actions.size());
    const double gap = avg - optima.f_star[i];
    running += gap;
    out.per_slot.push_back(gap);
    out.cumulative.push_back(running);
  }
  out.total = running;
  return out;
}

FitSeries dynamic_fit(const Trajectory& traj) {
  FitSeries out;
  if (traj.records.empty()) {
    out.total_violation = Eigen::VectorXd();
    return out;
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(traj.records.front().constraint_at_iterate.size());
  out.cumulative_norm.reserve(traj.records.size());
  for (const SlotRecord& rec : traj.records) {
    sum += rec.average_constraint();
    out.cumulative_norm.push_back(sum.cwiseMax(0.0).norm());
  }
  out.total_violation = sum;
  out.fit = out.cumulative_norm.back();
  return out;
}

StaticBenchmark static_optimum_and_regret(const Trajectory& traj, const LossFn& loss,
                                          const LossGradFn& grad, const ConstraintOracle& cons,
                                          const BoxSet& set, double tol,
                                          const ConvexSolveOptions& options) {
  const long horizon = static_cast<long>(traj.records.size());
  if (horizon == 0) throw std::invalid_argument("static benchmark needs a nonempty trajectory");
  const LossGradFn gradient = grad ? grad : nullptr;

  const auto total_loss = [&](const Eigen::VectorXd& x) {
    double sum = 0.0;
    for (long t = 1; t <= horizon; ++t) sum += loss(t, x);
    return sum;
  };
  const auto total_grad_fn = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(x.size());
    if (gradient) {
      for (long t = 1; t <= horizon; ++t) sum += gradient(t, x);
    } else {
      const LossGradFn fd = finite_difference_grad(loss);
      for (long t = 1; t <= horizon; ++t) sum += fd(t, x);
    }
    return sum;
  };
  const Eigen::Index n = cons.count();
  const auto stacked = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd all(n * horizon);
    for (long t = 1; t <= horizon; ++t) {
      all.segment((t - 1) * n, n) = cons.value(t, x);
    }
    return all;
  };
  const auto stacked_jac = [&](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd all(n * horizon, x.size());
    for (long t = 1; t <= horizon; ++t) {
      all.middleRows((t - 1) * n, n) = cons.jacobian(t, x);
    }
    return all;
  };

  ConvexSolveOptions opts = options;
  opts.kkt_tol = tol;
  try {
    KktPoint point = solve_box_constrained(total_loss, total_grad_fn, stacked, stacked_jac, set,
                                           opts);
    StaticBenchmark out;
    out.f_total = total_loss(point.x);
    out.x_star = std::move(point.x);
    double played = 0.0;
    for (std::size_t i = 0; i < traj.records.size(); ++i) {
      const long t = static_cast<long>(i) + 1;
      double avg = 0.0;
      for (const auto& action : traj.records[i].actions) avg += loss(t, action);
      played += avg / static_cast<double>(traj.records[i].actions.size());
    }
    out.regret = played - out.f_total;
    return out;
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(std::string("no common feasible point across slots: ") + e.what());
  }
}

double variation(const OptimaSeries& optima) {
  double total = 0.0;
  for (std::size_t i = 1; i < optima.x_star.size(); ++i) {
    total += (optima.x_star[i] - optima.x_star[i - 1]).norm();
  }
  return total;
}

}  // namespace bansap
