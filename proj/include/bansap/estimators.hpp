#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "bansap/geometry.hpp"
#include "bansap/rng.hpp"

namespace bansap {

/// Value-query interface to a loss. Algorithms only ever see this side of a
/// problem; the exact function stays with the metrics code. Queries are
/// counted per slot and checked against the feasible region when one is
/// declared.
class LossOracle {
 public:
  virtual ~LossOracle() = default;

  /// Loss value at the queried point. Throws std::domain_error if the point
  /// lies outside the declared domain, std::runtime_error if a per-slot query
  /// budget is set and exceeded.
  double value(long t, const Eigen::VectorXd& x);

  /// Feasible region of queries, nullptr when unconstrained.
  virtual const BoxSet* domain() const { return nullptr; }
  /// Declared bound F with |f_t| <= F on the domain, if known.
  virtual std::optional<double> value_bound() const { return std::nullopt; }
  /// Declared Lipschitz constant G of f_t, if known.
  virtual std::optional<double> lipschitz_bound() const { return std::nullopt; }

  /// Cap on queries within one slot (set by the run loop, disabled by default).
  void set_query_budget(std::optional<int> budget) { budget_ = budget; }

  long long total_queries() const { return total_; }
  int queries_in_current_slot() const { return in_slot_; }

 private:
  virtual double eval(long t, const Eigen::VectorXd& x) const = 0;

  std::optional<int> budget_;
  long long total_ = 0;
  long current_slot_ = -1;
  int in_slot_ = 0;
};

/// Adapts any callable to a LossOracle.
class FunctionLossOracle final : public LossOracle {
 public:
  using Fn = std::function<double(long, const Eigen::VectorXd&)>;

  explicit FunctionLossOracle(Fn fn, const BoxSet* domain = nullptr,
                              std::optional<double> value_bound = std::nullopt,
                              std::optional<double> lipschitz_bound = std::nullopt)
      : fn_(std::move(fn)), domain_(domain), f_bound_(value_bound), g_bound_(lipschitz_bound) {}

  const BoxSet* domain() const override { return domain_; }
  std::optional<double> value_bound() const override { return f_bound_; }
  std::optional<double> lipschitz_bound() const override { return g_bound_; }

 private:
  double eval(long t, const Eigen::VectorXd& x) const override { return fn_(t, x); }

  Fn fn_;
  const BoxSet* domain_;
  std::optional<double> f_bound_, g_bound_;
};

enum class EstimatorKind { OnePoint, TwoPoint, MPoint };

/// A zeroth-order gradient estimate together with the actions it played.
/// The solver records played actions straight from here so metrics never
/// re-derive them.
struct GradientEstimate {
  Eigen::VectorXd g;
  std::vector<Eigen::VectorXd> points_queried;
  std::vector<double> values_observed;
  EstimatorKind kind = EstimatorKind::OnePoint;
};

/// (d / delta) * f_t(x_hat + delta u) * u from a single query.
GradientEstimate one_point_grad(LossOracle& oracle, long t, const Eigen::VectorXd& x_hat,
                                double delta, const Direction& u);

/// (d / 2 delta) * (f_t(x_hat + delta u) - f_t(x_hat - delta u)) * u.
GradientEstimate two_point_grad(LossOracle& oracle, long t, const Eigen::VectorXd& x_hat,
                                double delta, const Direction& u);

/// Averaged forward differences over M - 1 fresh directions; the M queried
/// actions are the perturbed points plus x_hat itself. Requires M >= 3.
GradientEstimate m_point_grad(LossOracle& oracle, long t, const Eigen::VectorXd& x_hat,
                              double delta, int m, SamplingScheme scheme, Rng& rng);

/// Monte-Carlo value of the ball-smoothed loss E_v[f_t(x + delta v)].
/// Test-side oracle for the unbiasedness properties; not used by any solver.
double smoothed_value(LossOracle& oracle, long t, const Eigen::VectorXd& x, double delta,
                      long n_samples, Rng& rng);

}  // namespace bansap
