#include "bansap/estimators.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bansap {

namespace {

constexpr double kDomainTol = 1e-9;

// Queries must stay inside the declared domain (the shrunken-set guarantee).
// Points within floating tolerance are snapped onto the box so recorded
// actions are feasible bit-exactly; anything farther out is a contract
// violation on the caller's side.
Eigen::VectorXd checked_query_point(const LossOracle& oracle, const Eigen::VectorXd& x) {
  const BoxSet* domain = oracle.domain();
  if (domain == nullptr) return x;
  if (!domain->contains(x, kDomainTol)) {
    throw std::domain_error("loss query outside the feasible set");
  }
  return domain->project(x);
}

void require_positive_delta(double delta) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("gradient estimator: delta must be positive");
  }
}

}  // namespace

double LossOracle::value(long t, const Eigen::VectorXd& x) {
  if (t != current_slot_) {
    current_slot_ = t;
    in_slot_ = 0;
  }
  if (budget_ && in_slot_ >= *budget_) {
    throw std::runtime_error("loss oracle query budget exceeded at slot " + std::to_string(t));
  }
  ++in_slot_;
  ++total_;
  const double v = eval(t, x);
  assert(!value_bound() || std::abs(v) <= *value_bound() + 1e-9);
  return v;
}

GradientEstimate one_point_grad(LossOracle& oracle, long t, const Eigen::VectorXd& x_hat,
                                double delta, const Direction& u) {
  require_positive_delta(delta);
  if (u.dim() != x_hat.size()) {
    throw std::invalid_argument("one_point_grad: direction dimension mismatch");
  }
  const double d = static_cast<double>(x_hat.size());
  const Eigen::VectorXd x_play = checked_query_point(oracle, x_hat + delta * u.vec());
  const double f_val = oracle.value(t, x_play);

  GradientEstimate est;
  est.kind = EstimatorKind::OnePoint;
  est.g = (d / delta) * f_val * u.vec();
  est.points_queried = {x_play};
  est.values_observed = {f_val};
  assert(!oracle.value_bound() ||
         est.g.norm() <= d * *oracle.value_bound() / delta + 1e-9);
  return est;
}

GradientEstimate two_point_grad(LossOracle& oracle, long t, const Eigen::VectorXd& x_hat,
                                double delta, const Direction& u) {
  require_positive_delta(delta);
  if (u.dim() != x_hat.size()) {
    throw std::invalid_argument("two_point_grad: direction dimension mismatch");
  }
  const double d = static_cast<double>(x_hat.size());
  const Eigen::VectorXd x_plus = checked_query_point(oracle, x_hat + delta * u.vec());
  const Eigen::VectorXd x_minus = checked_query_point(oracle, x_hat - delta * u.vec());
  const double f_plus = oracle.value(t, x_plus);
  const double f_minus = oracle.value(t, x_minus);

  GradientEstimate est;
  est.kind = EstimatorKind::TwoPoint;
  est.g = (d / (2.0 * delta)) * (f_plus - f_minus) * u.vec();
  est.points_queried = {x_plus, x_minus};
  est.values_observed = {f_plus, f_minus};
  assert(!oracle.lipschitz_bound() ||
         est.g.norm() <= d * *oracle.lipschitz_bound() + 1e-9);
  return est;
}

GradientEstimate m_point_grad(LossOracle& oracle, long t, const Eigen::VectorXd& x_hat,
                              double delta, int m, SamplingScheme scheme, Rng& rng) {
  require_positive_delta(delta);
  if (m < 3) {
    throw std::invalid_argument(
        "m_point_grad requires M >= 3; use the one- or two-point estimators");
  }
  const Eigen::Index dim = x_hat.size();
  const double d = static_cast<double>(dim);

  GradientEstimate est;
  est.kind = EstimatorKind::MPoint;
  est.g = Eigen::VectorXd::Zero(dim);
  est.points_queried.reserve(static_cast<std::size_t>(m));
  est.values_observed.reserve(static_cast<std::size_t>(m));

  const Eigen::VectorXd x_center = checked_query_point(oracle, x_hat);
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(static_cast<std::size_t>(m - 1));
  for (int i = 0; i + 1 < m; ++i) {
    const Direction u = sample_direction(scheme, dim, rng);
    const Eigen::VectorXd x_play = checked_query_point(oracle, x_hat + delta * u.vec());
    est.points_queried.push_back(x_play);
    est.values_observed.push_back(oracle.value(t, x_play));
    dirs.push_back(u.vec());
  }
  // The learning iterate itself is the M-th played action.
  est.points_queried.push_back(x_center);
  const double f_center = oracle.value(t, x_center);
  est.values_observed.push_back(f_center);

  const double scale = d / (delta * static_cast<double>(m - 1));
  for (int i = 0; i + 1 < m; ++i) {
    est.g += scale * (est.values_observed[static_cast<std::size_t>(i)] - f_center) * dirs[static_cast<std::size_t>(i)];
  }
  return est;
}

double smoothed_value(LossOracle& oracle, long t, const Eigen::VectorXd& x, double delta,
                      long n_samples, Rng& rng) {
  require_positive_delta(delta);
  if (n_samples < 1) {
    throw std::invalid_argument("smoothed_value: n_samples must be >= 1");
  }
  double sum = 0.0;
  for (long i = 0; i < n_samples; ++i) {
    const Eigen::VectorXd v = sample_ball(x.size(), rng);
    sum += oracle.value(t, x + delta * v);
  }
  return sum / static_cast<double>(n_samples);
}

}  // namespace bansap
