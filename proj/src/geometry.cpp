#include "bansap/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace bansap {

BoxSet::BoxSet(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw std::invalid_argument("BoxSet: bound dimensions differ");
  }
  if (lower_.size() == 0) {
    throw std::invalid_argument("BoxSet: empty bounds");
  }
  if (((upper_ - lower_).array() <= 0.0).any()) {
    throw std::invalid_argument("BoxSet: requires lower < upper in every coordinate");
  }
}

Eigen::VectorXd BoxSet::project(const Eigen::VectorXd& y) const {
  if (y.size() != dim()) {
    throw std::invalid_argument("BoxSet::project: dimension mismatch");
  }
  return y.cwiseMax(lower_).cwiseMin(upper_);
}

BoxSet BoxSet::shrink(double gamma) const {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("BoxSet::shrink: gamma must lie in [0, 1)");
  }
  const Eigen::VectorXd c = center();
  const Eigen::VectorXd w = (1.0 - gamma) * half_widths();
  return BoxSet(c - w, c + w);
}

bool BoxSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != dim()) return false;
  return ((x - lower_).array() >= -tol).all() && ((upper_ - x).array() >= -tol).all();
}

const char* to_string(SamplingScheme scheme) {
  switch (scheme) {
    case SamplingScheme::UniformSphere:
      return "uniform";
    case SamplingScheme::CoordinateBasis:
      return "coordinate";
    case SamplingScheme::GaussianNormalized:
      return "gaussian";
  }
  return "unknown";
}

SamplingScheme sampling_scheme_from_string(const std::string& name) {
  if (name == "uniform") return SamplingScheme::UniformSphere;
  if (name == "coordinate") return SamplingScheme::CoordinateBasis;
  if (name == "gaussian") return SamplingScheme::GaussianNormalized;
  throw std::invalid_argument("unknown sampling scheme: " + name);
}

Direction::Direction(Eigen::VectorXd u) : u_(std::move(u)) {
  const double norm = u_.norm();
  if (!(std::abs(norm - 1.0) <= 1e-12)) {
    throw std::invalid_argument("Direction: vector norm " + std::to_string(norm) +
                                " not within 1e-12 of unit");
  }
}

namespace {

Eigen::VectorXd normalized_gaussian(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd u(d);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < d; ++i) u[i] = normal(rng);
    norm = u.norm();
  } while (norm < 1e-300);
  u /= norm;
  // One extra normalization pass keeps the norm within the Direction
  // tolerance when d is large.
  return u / u.norm();
}

}  // namespace

Direction sample_direction(SamplingScheme scheme, Eigen::Index d, Rng& rng) {
  if (d < 1) {
    throw std::invalid_argument("sample_direction: dimension must be >= 1");
  }
  switch (scheme) {
    case SamplingScheme::UniformSphere:
      return Direction(normalized_gaussian(d, rng));
    case SamplingScheme::CoordinateBasis: {
      std::uniform_int_distribution<Eigen::Index> pick(0, d - 1);
      std::uniform_int_distribution<int> coin(0, 1);
      Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
      u[pick(rng)] = coin(rng) == 0 ? 1.0 : -1.0;
      return Direction(std::move(u));
    }
    case SamplingScheme::GaussianNormalized: {
      // Distributionally identical to UniformSphere; separate path on purpose.
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::VectorXd g(d);
      double norm = 0.0;
      do {
        for (Eigen::Index i = 0; i < d; ++i) g[i] = normal(rng);
        norm = g.norm();
      } while (norm < 1e-300);
      g /= norm;
      return Direction(g / g.norm());
    }
  }
  throw std::invalid_argument("sample_direction: unknown scheme");
}

Eigen::VectorXd sample_ball(Eigen::Index d, Rng& rng) {
  if (d < 1) {
    throw std::invalid_argument("sample_ball: dimension must be >= 1");
  }
  const Direction u = sample_direction(SamplingScheme::UniformSphere, d, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = std::pow(unit(rng), 1.0 / static_cast<double>(d));
  return radius * u.vec();
}

}  // namespace bansap
