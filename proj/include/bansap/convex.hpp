#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

#include "bansap/geometry.hpp"

namespace bansap {

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;
using ObjectiveGradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ConstraintFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ConstraintJacFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

struct ConvexSolveOptions {
  double kkt_tol = 1e-6;
  long max_total_iterations = 100000;  // projected-gradient iteration budget
  int max_outer = 80;                  // multiplier updates
  double initial_penalty = 1.0;
  double penalty_growth = 5.0;
  double max_penalty = 1e12;
};

/// Converged primal-dual pair with its KKT certificate.
struct KktPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd multipliers;
  double stationarity = 0.0;    // || x - P_box(x - grad_f - J^T lambda) ||_inf
  double feasibility = 0.0;     // max_j g_j(x)
  double complementarity = 0.0; // max_j |lambda_j g_j(x)|
  long iterations = 0;
  bool converged = false;
};

struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Minimize a smooth convex objective over a box subject to g(x) <= 0 by
/// projected primal descent on the augmented Lagrangian with multiplier
/// ascent rounds. Throws InfeasibleError when the constraints admit no point
/// in the box, NoConvergenceError when the budget runs out, each with the
/// residuals attached.
KktPoint solve_box_constrained(const ObjectiveFn& f, const ObjectiveGradFn& grad,
                               const ConstraintFn& g, const ConstraintJacFn& g_jac,
                               const BoxSet& box, const ConvexSolveOptions& options = {});

}  // namespace bansap
