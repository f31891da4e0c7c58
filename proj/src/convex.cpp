#include "bansap/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bansap {

namespace {

double positive_max(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : std::max(0.0, v.maxCoeff());
}

struct Residuals {
  double stationarity;
  double feasibility;
  double complementarity;
};

Residuals kkt_residuals(const Eigen::VectorXd& x, const Eigen::VectorXd& lambda,
                        const ObjectiveGradFn& grad, const Eigen::VectorXd& g_val,
                        const Eigen::MatrixXd& jac, const BoxSet& box) {
  const Eigen::VectorXd grad_lagrangian = grad(x) + jac.transpose() * lambda;
  Residuals r;
  r.stationarity = (x - box.project(x - grad_lagrangian)).lpNorm<Eigen::Infinity>();
  r.feasibility = g_val.size() == 0 ? 0.0 : g_val.maxCoeff();
  r.complementarity = 0.0;
  for (Eigen::Index j = 0; j < g_val.size(); ++j) {
    r.complementarity = std::max(r.complementarity, std::abs(lambda[j] * g_val[j]));
  }
  return r;
}

std::string residual_report(const Residuals& r) {
  std::ostringstream os;
  os << "stationarity=" << r.stationarity << " feasibility=" << r.feasibility
     << " complementarity=" << r.complementarity;
  return os.str();
}

}  // namespace

KktPoint solve_box_constrained(const ObjectiveFn& f, const ObjectiveGradFn& grad,
                               const ConstraintFn& g, const ConstraintJacFn& g_jac,
                               const BoxSet& box, const ConvexSolveOptions& options) {
  Eigen::VectorXd x = box.center();
  const Eigen::Index m = g(x).size();
  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
  double rho = options.initial_penalty;
  long iterations = 0;

  const auto aug_value = [&](const Eigen::VectorXd& point) {
    double value = f(point);
    if (m > 0) {
      const Eigen::VectorXd gv = g(point);
      for (Eigen::Index j = 0; j < m; ++j) {
        const double shifted = std::max(0.0, lambda[j] + rho * gv[j]);
        value += (shifted * shifted - lambda[j] * lambda[j]) / (2.0 * rho);
      }
    }
    return value;
  };
  const auto aug_grad = [&](const Eigen::VectorXd& point) -> Eigen::VectorXd {
    Eigen::VectorXd out = grad(point);
    if (m > 0) {
      const Eigen::VectorXd gv = g(point);
      const Eigen::VectorXd shifted = (lambda + rho * gv).cwiseMax(0.0);
      out += g_jac(point).transpose() * shifted;
    }
    return out;
  };

  double inner_tol = std::sqrt(options.kkt_tol);
  double prev_violation = std::numeric_limits<double>::infinity();
  int stalled_rounds = 0;
  Residuals last{std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};

  for (int outer = 0; outer < options.max_outer; ++outer) {
    // Projected gradient with a spectral step and backtracking on the
    // augmented Lagrangian subproblem.
    double step = 1.0;
    double fx = aug_value(x);
    Eigen::VectorXd gr = aug_grad(x);
    while (iterations < options.max_total_iterations) {
      if ((x - box.project(x - gr)).lpNorm<Eigen::Infinity>() <= inner_tol) break;
      ++iterations;

      Eigen::VectorXd x_new = box.project(x - step * gr);
      double f_new = aug_value(x_new);
      int halvings = 0;
      while (f_new > fx + gr.dot(x_new - x) + (x_new - x).squaredNorm() / (2.0 * step) +
                         1e-12 * (1.0 + std::abs(fx)) &&
             halvings < 60) {
        step *= 0.5;
        x_new = box.project(x - step * gr);
        f_new = aug_value(x_new);
        ++halvings;
      }

      const Eigen::VectorXd gr_new = aug_grad(x_new);
      const Eigen::VectorXd s = x_new - x;
      const Eigen::VectorXd y = gr_new - gr;
      const double sy = s.dot(y);
      if (sy > 1e-18) {
        step = std::clamp(s.dot(s) / sy, 1e-16, 1e16);
      } else {
        step = std::min(step * 2.0, 1e16);
      }
      x = std::move(x_new);
      fx = f_new;
      gr = gr_new;
    }

    const Eigen::VectorXd g_val = m > 0 ? g(x) : Eigen::VectorXd();
    const Eigen::VectorXd lambda_next =
        m > 0 ? (lambda + rho * g_val).cwiseMax(0.0).eval() : lambda;
    const Eigen::MatrixXd jac = m > 0 ? g_jac(x) : Eigen::MatrixXd(0, x.size());
    last = kkt_residuals(x, lambda_next, grad, g_val, jac, box);
    lambda = lambda_next;

    if (last.stationarity <= options.kkt_tol && last.feasibility <= options.kkt_tol &&
        last.complementarity <= options.kkt_tol) {
      return KktPoint{std::move(x), std::move(lambda), last.stationarity, last.feasibility,
                      last.complementarity, iterations, true};
    }

    const double violation = positive_max(g_val);
    if (violation > options.kkt_tol && violation > 0.25 * prev_violation) {
      if (rho >= options.max_penalty) {
        if (++stalled_rounds >= 3) {
          throw InfeasibleError(
              "constraints appear infeasible within the box (minimal violation about " +
              std::to_string(violation) + ")");
        }
      }
      rho = std::min(rho * options.penalty_growth, options.max_penalty);
    } else if (violation <= options.kkt_tol && last.complementarity > options.kkt_tol) {
      // Feasible but not complementary: the active-constraint residuals decay
      // like 1/rho, so push the penalty instead of grinding more rounds.
      rho = std::min(rho * options.penalty_growth, options.max_penalty);
      stalled_rounds = 0;
    } else {
      stalled_rounds = 0;
    }
    prev_violation = std::min(prev_violation, std::max(violation, options.kkt_tol));
    inner_tol = std::max(0.9 * options.kkt_tol, inner_tol * 0.2);

    if (iterations >= options.max_total_iterations) break;
  }

  throw NoConvergenceError("constrained solve exhausted its iteration budget; " +
                           residual_report(last));
}

}  // namespace bansap
