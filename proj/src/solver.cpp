#include "bansap/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bansap/fog.hpp"

namespace bansap {

void HyperParams::validate_basic() const {
  if (horizon < 0) throw std::invalid_argument("HyperParams: horizon must be >= 0");
  if (!(primal_step > 0.0)) throw std::invalid_argument("HyperParams: primal step must be > 0");
  if (!(dual_step > 0.0)) throw std::invalid_argument("HyperParams: dual step must be > 0");
  if (variation_exponent && !(*variation_exponent >= 0.0 && *variation_exponent < 1.0)) {
    throw std::invalid_argument("HyperParams: variation exponent must lie in [0, 1)");
  }
}

void HyperParams::validate_for_bandit(const BoxSet& box) const {
  validate_basic();
  if (!(exploration_radius > 0.0)) {
    throw std::invalid_argument("HyperParams: exploration radius must be > 0");
  }
  if (!(shrink_factor >= 0.0 && shrink_factor < 1.0)) {
    throw std::invalid_argument("HyperParams: shrink factor must lie in [0, 1)");
  }
  if (feedback_count < 1) throw std::invalid_argument("HyperParams: feedback count must be >= 1");
  if (shrink_factor * box.inner_radius() + 1e-12 < exploration_radius) {
    throw std::invalid_argument(
        "HyperParams: perturbation feasibility requires shrink_factor * inner_radius >= "
        "exploration_radius");
  }
}

double SlotRecord::average_loss() const {
  double sum = 0.0;
  for (double v : losses) sum += v;
  return losses.empty() ? 0.0 : sum / static_cast<double>(losses.size());
}

Eigen::VectorXd SlotRecord::average_constraint() const {
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(constraint_at_iterate.size());
  for (const auto& g : constraint_at_actions) avg += g;
  if (!constraint_at_actions.empty()) avg /= static_cast<double>(constraint_at_actions.size());
  return avg;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> primal_dual_update(
    const Eigen::VectorXd& x, const Eigen::VectorXd& lambda, const Eigen::VectorXd& grad_f,
    const Eigen::VectorXd& g_value, const Eigen::MatrixXd& g_jacobian, double alpha, double mu,
    const BoxSet& feasible) {
  const Eigen::VectorXd grad_lagrangian = grad_f + g_jacobian.transpose() * lambda;
  Eigen::VectorXd x_next = feasible.project(x - alpha * grad_lagrangian);
  Eigen::VectorXd lambda_next =
      (lambda + mu * (g_value + g_jacobian * (x_next - x))).cwiseMax(0.0);
  return {std::move(x_next), std::move(lambda_next)};
}

namespace {

void require_finite(const Eigen::VectorXd& v, const char* what, long t) {
  if (!v.allFinite()) {
    throw std::runtime_error(std::string("non-finite ") + what + " at slot " +
                             std::to_string(t));
  }
}

void require_finite(double v, const char* what, long t) {
  if (!std::isfinite(v)) {
    throw std::runtime_error(std::string("non-finite ") + what + " at slot " +
                             std::to_string(t));
  }
}

StepResult finish_bandit_step(const PrimalDualState& state, const GradientEstimate& est,
                              const ConstraintOracle& cons, const HyperParams& hp,
                              const BoxSet& shrunken) {
  const long t = state.slot;
  for (double v : est.values_observed) require_finite(v, "loss value", t);
  require_finite(est.g, "gradient estimate", t);

  const Eigen::VectorXd g0 = cons.value(t, state.iterate);
  require_finite(g0, "constraint value", t);
  const Eigen::MatrixXd jac = cons.jacobian(t, state.iterate);

  auto [x_next, lambda_next] =
      primal_dual_update(state.iterate, state.multipliers, est.g, g0, jac, hp.primal_step,
                         hp.dual_step, shrunken);

  StepResult out;
  out.record.actions = est.points_queried;
  out.record.losses = est.values_observed;
  out.record.constraint_at_actions.reserve(est.points_queried.size());
  for (const auto& a : est.points_queried) {
    out.record.constraint_at_actions.push_back(cons.value(t, a));
  }
  out.record.constraint_at_iterate = g0;
  out.record.multiplier_norm = lambda_next.norm();
  out.record.iterate = state.iterate;
  out.next = PrimalDualState{std::move(x_next), std::move(lambda_next), t + 1};
  return out;
}

}  // namespace

StepResult bansap_step(const PrimalDualState& state, LossOracle& loss,
                       const ConstraintOracle& cons, const HyperParams& hp, const BoxSet& box,
                       Rng& rng) {
  const BoxSet shrunken = box.shrink(hp.shrink_factor);
  GradientEstimate est;
  if (hp.feedback_count == 1) {
    const Direction u = sample_direction(hp.scheme, box.dim(), rng);
    est = one_point_grad(loss, state.slot, state.iterate, hp.exploration_radius, u);
  } else if (hp.feedback_count == 2) {
    const Direction u = sample_direction(hp.scheme, box.dim(), rng);
    est = two_point_grad(loss, state.slot, state.iterate, hp.exploration_radius, u);
  } else {
    est = m_point_grad(loss, state.slot, state.iterate, hp.exploration_radius,
                       hp.feedback_count, hp.scheme, rng);
  }
  return finish_bandit_step(state, est, cons, hp, shrunken);
}

StepResult bansap_step_with_estimate(const PrimalDualState& state, const GradientEstimate& est,
                                     const ConstraintOracle& cons, const HyperParams& hp,
                                     const BoxSet& box) {
  return finish_bandit_step(state, est, cons, hp, box.shrink(hp.shrink_factor));
}

StepResult mosp_step(const PrimalDualState& state, const GradientOracle& full_info,
                     const ConstraintOracle& cons, const HyperParams& hp, const BoxSet& box) {
  const long t = state.slot;
  const double f_val = full_info.value(t, state.iterate);
  const Eigen::VectorXd grad = full_info.gradient(t, state.iterate);
  require_finite(f_val, "loss value", t);
  require_finite(grad, "loss gradient", t);

  const Eigen::VectorXd g0 = cons.value(t, state.iterate);
  require_finite(g0, "constraint value", t);
  const Eigen::MatrixXd jac = cons.jacobian(t, state.iterate);

  auto [x_next, lambda_next] = primal_dual_update(
      state.iterate, state.multipliers, grad, g0, jac, hp.primal_step, hp.dual_step, box);

  StepResult out;
  out.record.actions = {state.iterate};
  out.record.losses = {f_val};
  out.record.constraint_at_actions = {g0};
  out.record.constraint_at_iterate = g0;
  out.record.multiplier_norm = lambda_next.norm();
  out.record.iterate = state.iterate;
  out.next = PrimalDualState{std::move(x_next), std::move(lambda_next), t + 1};
  return out;
}

HyperParams schedule(long horizon, FeedbackMode mode, std::optional<double> rho,
                     const BoxSet& geometry, ScheduleConstants constants) {
  if (horizon < 1) throw std::invalid_argument("schedule: horizon must be >= 1");
  if (rho && !(*rho >= 0.0 && *rho < 1.0)) {
    throw std::invalid_argument("schedule: variation exponent must lie in [0, 1)");
  }
  const double t_d = static_cast<double>(horizon);
  double step_exp = 0.0;
  double radius_exp = 0.0;
  if (mode == FeedbackMode::OnePoint) {
    step_exp = rho ? 0.75 * (*rho - 1.0) : -0.75;
    radius_exp = rho ? 0.25 * (*rho - 1.0) : -0.25;
  } else {
    step_exp = rho ? 0.5 * (*rho - 1.0) : -0.5;
    radius_exp = rho ? 0.5 * (*rho - 1.0) : -1.0;
  }

  HyperParams hp;
  hp.primal_step = constants.c_alpha * std::pow(t_d, step_exp);
  hp.dual_step = hp.primal_step;
  hp.exploration_radius = constants.c_delta * std::pow(t_d, radius_exp);
  hp.shrink_factor = hp.exploration_radius / geometry.inner_radius();
  if (!(hp.shrink_factor < 1.0)) {
    throw std::invalid_argument(
        "schedule: exploration radius reaches the inscribed radius; reduce c_delta or grow the "
        "horizon");
  }
  hp.feedback_count = mode == FeedbackMode::OnePoint ? 1 : 2;
  hp.horizon = horizon;
  hp.variation_exponent = rho;
  return hp;
}

std::string algorithm_name(const Algorithm& algo) {
  if (const auto* b = std::get_if<BanSaPAlgo>(&algo)) {
    return "bansap_m" + std::to_string(b->feedback_count) + "_" + to_string(b->scheme);
  }
  if (std::holds_alternative<MospAlgo>(algo)) return "mosp";
  if (std::holds_alternative<CloudOnlyAlgo>(algo)) return "cloud_only";
  return "fog_only";
}

namespace {

Trajectory run_heuristic(const ProblemBundle& problem, bool cloud, const HyperParams& hp,
                         std::uint64_t seed) {
  if (problem.fog == nullptr) {
    throw std::invalid_argument("heuristic baselines require a fog problem");
  }
  if (problem.bandit == nullptr || problem.constraints == nullptr) {
    throw std::invalid_argument("run: missing oracles");
  }
  const FogProblem& fog = *problem.fog;
  problem.bandit->set_query_budget(1);

  Trajectory traj;
  traj.hyper = hp;
  traj.hyper.feedback_count = 1;
  traj.seed = seed;
  traj.records.reserve(static_cast<std::size_t>(hp.horizon));

  Eigen::VectorXd backlog = Eigen::VectorXd::Zero(fog.network().num_nodes());
  for (long t = 1; t <= hp.horizon; ++t) {
    const Eigen::VectorXd arrivals = fog.arrival_vector(t);
    auto [action, next_backlog] = cloud ? cloud_only_step(backlog, arrivals, fog.network())
                                        : fog_only_step(backlog, arrivals, fog.network());
    backlog = std::move(next_backlog);

    SlotRecord rec;
    rec.actions = {action};
    rec.losses = {problem.bandit->value(t, action)};
    rec.constraint_at_actions = {problem.constraints->value(t, action)};
    rec.constraint_at_iterate = rec.constraint_at_actions.front();
    rec.multiplier_norm = 0.0;
    rec.iterate = action;
    traj.records.push_back(std::move(rec));
  }
  return traj;
}

}  // namespace

Trajectory run(const ProblemBundle& problem, const Algorithm& algo, const HyperParams& hp,
               std::uint64_t seed) {
  if (std::holds_alternative<CloudOnlyAlgo>(algo) || std::holds_alternative<FogOnlyAlgo>(algo)) {
    if (hp.horizon < 0) throw std::invalid_argument("run: horizon must be >= 0");
    return run_heuristic(problem, std::holds_alternative<CloudOnlyAlgo>(algo), hp, seed);
  }
  if (problem.constraints == nullptr) throw std::invalid_argument("run: missing constraint oracle");

  HyperParams eff = hp;
  const bool bandit = std::holds_alternative<BanSaPAlgo>(algo);
  if (bandit) {
    const auto& b = std::get<BanSaPAlgo>(algo);
    eff.feedback_count = b.feedback_count;
    eff.scheme = b.scheme;
    if (problem.bandit == nullptr) throw std::invalid_argument("run: missing loss oracle");
    if (eff.horizon > 0) eff.validate_for_bandit(problem.box);
    problem.bandit->set_query_budget(eff.feedback_count);
  } else {
    eff.feedback_count = 1;
    eff.shrink_factor = 0.0;
    eff.exploration_radius = 0.0;
    if (problem.full_info == nullptr) {
      throw std::invalid_argument("run: the full-information baseline needs a gradient oracle");
    }
    if (eff.horizon > 0) eff.validate_basic();
  }

  Trajectory traj;
  traj.hyper = eff;
  traj.seed = seed;
  traj.records.reserve(static_cast<std::size_t>(std::max<long>(eff.horizon, 0)));

  const BoxSet start_set = bandit ? problem.box.shrink(eff.shrink_factor) : problem.box;
  const Eigen::VectorXd x0 = eff.start == StartPoint::ProjectedOrigin
                                 ? start_set.project(Eigen::VectorXd::Zero(start_set.dim()))
                                 : start_set.center();
  PrimalDualState state{x0, Eigen::VectorXd::Zero(problem.constraints->count()), 1};
  Rng rng = derive_stream(seed, stream_tag::kActions);

  for (long t = 1; t <= eff.horizon; ++t) {
    try {
      StepResult step = bandit
                            ? bansap_step(state, *problem.bandit, *problem.constraints, eff,
                                          problem.box, rng)
                            : mosp_step(state, *problem.full_info, *problem.constraints, eff,
                                        problem.box);
      traj.records.push_back(std::move(step.record));
      state = std::move(step.next);
    } catch (const std::exception& e) {
      throw std::runtime_error("run failed at slot " + std::to_string(t) + ": " + e.what());
    }
  }
  return traj;
}

}  // namespace bansap
