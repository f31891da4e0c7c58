#pragma once

#include <Eigen/Dense>

#include "bansap/rng.hpp"

namespace bansap {

/// Axis-aligned box with nonempty interior. The feasible region of every
/// problem in this library; projections and set shrinkage are exact
/// per-coordinate operations.
class BoxSet {
 public:
  /// Throws std::invalid_argument unless lower < upper coordinate-wise.
  BoxSet(Eigen::VectorXd lower, Eigen::VectorXd upper);

  Eigen::Index dim() const { return lower_.size(); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  Eigen::VectorXd center() const { return 0.5 * (lower_ + upper_); }
  Eigen::VectorXd half_widths() const { return 0.5 * (upper_ - lower_); }

  /// Radius of the largest ball around center() inside the box.
  double inner_radius() const { return half_widths().minCoeff(); }
  /// Radius of the smallest ball around center() containing the box.
  double outer_radius() const { return half_widths().norm(); }

  /// Euclidean projection onto the box (per-coordinate clamp).
  /// Throws std::invalid_argument on dimension mismatch.
  Eigen::VectorXd project(const Eigen::VectorXd& y) const;

  /// Contract half-widths by (1 - gamma) about the center, gamma in [0, 1).
  /// Any x in the shrunken box satisfies x + delta * u inside the original box
  /// for every unit u whenever delta <= gamma * inner_radius().
  BoxSet shrink(double gamma) const;

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;

 private:
  Eigen::VectorXd lower_, upper_;
};

enum class SamplingScheme { UniformSphere, CoordinateBasis, GaussianNormalized };

const char* to_string(SamplingScheme scheme);
SamplingScheme sampling_scheme_from_string(const std::string& name);

/// Unit vector on the Euclidean sphere, norm within 1e-12 of one.
class Direction {
 public:
  explicit Direction(Eigen::VectorXd u);

  const Eigen::VectorXd& vec() const { return u_; }
  Eigen::Index dim() const { return u_.size(); }

 private:
  Eigen::VectorXd u_;
};

/// Draw a random unit direction.
///   UniformSphere      - normalized standard normal vector.
///   CoordinateBasis    - +/- e_i, index and sign uniform.
///   GaussianNormalized - same distribution as UniformSphere; kept as a
///                        deliberately separate code path so scheme sweeps
///                        exercise a distinct implementation.
Direction sample_direction(SamplingScheme scheme, Eigen::Index d, Rng& rng);

/// Uniform draw from the unit ball (sphere sample scaled by U^(1/d)).
Eigen::VectorXd sample_ball(Eigen::Index d, Rng& rng);

}  // namespace bansap
