#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bansap/estimators.hpp"
#include "bansap/geometry.hpp"
#include "bansap/solver.hpp"

namespace bansap {

/// Fog topology and capacities. Decision coordinates in order: the cloud
/// offload amounts z^n (one per node), then every directed collaboration link
/// y^{nk} (node by node, in listed order), then the local processing amounts
/// y^{nn}. A link target may be kExternal: workload handed to a peer outside
/// the modeled node set (it leaves the balance equations on the receiving
/// side).
class FogNetwork {
 public:
  static constexpr std::size_t kExternal = std::numeric_limits<std::size_t>::max();

  FogNetwork(std::size_t num_nodes, std::vector<std::vector<std::size_t>> out_links,
             std::vector<double> cloud_capacity, std::vector<std::vector<double>> link_capacity,
             std::vector<double> local_capacity);

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_links() const { return num_links_; }
  Eigen::Index dimension() const {
    return static_cast<Eigen::Index>(2 * num_nodes_ + num_links_);
  }

  const std::vector<std::vector<std::size_t>>& out_links() const { return out_links_; }
  const std::vector<std::vector<std::size_t>>& in_links() const { return in_links_; }
  const std::vector<double>& cloud_capacity() const { return cloud_capacity_; }
  const std::vector<std::vector<double>>& link_capacity() const { return link_capacity_; }
  const std::vector<double>& local_capacity() const { return local_capacity_; }

  // Flat coordinate indices (a bijection onto 0..d-1).
  Eigen::Index cloud_index(std::size_t n) const;
  Eigen::Index link_index(std::size_t n, std::size_t j) const;  // j-th out-link of node n
  Eigen::Index local_index(std::size_t n) const;

  /// Feasible region [0, capacity] in every coordinate.
  BoxSet action_box() const;

 private:
  std::size_t num_nodes_;
  std::size_t num_links_ = 0;
  std::vector<std::vector<std::size_t>> out_links_;
  std::vector<std::vector<std::size_t>> in_links_;   // derived: (source node, link slot) pairs flattened to sources
  std::vector<std::vector<double>> link_capacity_;
  std::vector<double> cloud_capacity_;
  std::vector<double> local_capacity_;
  std::vector<Eigen::Index> link_offset_;  // first flat link index per node
};

/// Time-varying latency coefficients: per-node cloud congestion sinusoid
/// p_t^n = offset + amplitude * sin(pi t / half_period), linear link
/// coefficients and quadratic local-compute coefficients.
struct FogCostParams {
  std::vector<double> congestion_amplitude;
  std::vector<double> congestion_offset;
  std::vector<std::vector<double>> link_coeff;  // l^{nk}
  std::vector<double> local_coeff;              // l^{nn}
  double half_period = 96.0;

  double congestion(std::size_t n, long t) const;
};

/// Per-node workload arrivals b_t^n = max(0, q^n sin(pi t / half_period) + noise),
/// with the slot noise drawn counter-based so b_t^n depends only on
/// (noise_key, n, t) and never on the horizon or on evaluation order.
struct ArrivalProcess {
  std::vector<double> amplitude;                        // q^n, drawn per run
  std::vector<std::pair<double, double>> noise_range;   // per-node [lo, hi]
  std::uint64_t noise_key = 0;
  double half_period = 96.0;

  double rate(std::size_t n, long t) const;
};

/// Aggregate network latency: sum over nodes of exp(p_t^n z^n) plus linear
/// link costs plus quadratic local-compute cost.
double fog_loss(const FogNetwork& net, const FogCostParams& params, long t,
                const Eigen::VectorXd& x);
Eigen::VectorXd fog_loss_gradient(const FogNetwork& net, const FogCostParams& params, long t,
                                  const Eigen::VectorXd& x);

/// Workload-conservation residuals g^n = b_t^n + inflow - outflow - z^n - y^{nn}
/// and their constant Jacobian with entries in {-1, 0, +1}.
Eigen::VectorXd fog_constraints(const FogNetwork& net, const ArrivalProcess& arrivals, long t,
                                const Eigen::VectorXd& x);
Eigen::MatrixXd fog_constraint_jacobian(const FogNetwork& net);

/// A fully materialized problem instance. Copyable value type; evaluation is
/// pure per (t, x), so independent runs can each hold their own copy.
class FogProblem {
 public:
  FogProblem(FogNetwork net, FogCostParams cost, ArrivalProcess arrivals);

  const FogNetwork& network() const { return net_; }
  const FogCostParams& cost_params() const { return cost_; }
  const ArrivalProcess& arrivals() const { return arrivals_; }
  const BoxSet& box() const { return box_; }

  double loss(long t, const Eigen::VectorXd& x) const { return fog_loss(net_, cost_, t, x); }
  Eigen::VectorXd loss_gradient(long t, const Eigen::VectorXd& x) const {
    return fog_loss_gradient(net_, cost_, t, x);
  }
  Eigen::VectorXd constraints(long t, const Eigen::VectorXd& x) const {
    return fog_constraints(net_, arrivals_, t, x);
  }
  const Eigen::MatrixXd& constraint_jacobian() const { return jacobian_; }
  Eigen::VectorXd arrival_vector(long t) const;

  /// Exact bound on |f_t| over the box (the loss is increasing in every
  /// coordinate, so the supremum sits at the upper corner at peak congestion)
  /// and on the gradient norm. sampled_* report the empirical maxima over a
  /// random box sample for cross-checking.
  struct Bounds {
    double value_bound;      // F
    double gradient_bound;   // G, also covers the constraint rows
    double sampled_value;
    double sampled_gradient;
  };
  Bounds estimate_bounds(long n_samples, Rng& rng) const;

 private:
  FogNetwork net_;
  FogCostParams cost_;
  ArrivalProcess arrivals_;
  BoxSet box_;
  Eigen::MatrixXd jacobian_;
};

/// Bandit side of a fog problem: value queries only, domain-checked.
class FogLossOracle final : public LossOracle {
 public:
  explicit FogLossOracle(const FogProblem& problem,
                         std::optional<double> value_bound = std::nullopt,
                         std::optional<double> lipschitz_bound = std::nullopt)
      : problem_(&problem), f_bound_(value_bound), g_bound_(lipschitz_bound) {}

  const BoxSet* domain() const override { return &problem_->box(); }
  std::optional<double> value_bound() const override { return f_bound_; }
  std::optional<double> lipschitz_bound() const override { return g_bound_; }

 private:
  double eval(long t, const Eigen::VectorXd& x) const override { return problem_->loss(t, x); }

  const FogProblem* problem_;
  std::optional<double> f_bound_, g_bound_;
};

class FogConstraintOracle final : public ConstraintOracle {
 public:
  explicit FogConstraintOracle(const FogProblem& problem) : problem_(&problem) {}

  Eigen::VectorXd value(long t, const Eigen::VectorXd& x) const override {
    return problem_->constraints(t, x);
  }
  Eigen::MatrixXd jacobian(long, const Eigen::VectorXd&) const override {
    return problem_->constraint_jacobian();
  }
  Eigen::Index count() const override {
    return static_cast<Eigen::Index>(problem_->network().num_nodes());
  }

 private:
  const FogProblem* problem_;
};

class FogFullInfoOracle final : public GradientOracle {
 public:
  explicit FogFullInfoOracle(const FogProblem& problem) : problem_(&problem) {}

  double value(long t, const Eigen::VectorXd& x) const override { return problem_->loss(t, x); }
  Eigen::VectorXd gradient(long t, const Eigen::VectorXd& x) const override {
    return problem_->loss_gradient(t, x);
  }

 private:
  const FogProblem* problem_;
};

/// Parameter ranges for one node class.
struct NodeClassRanges {
  double amplitude_lo, amplitude_hi;  // q^n
  double noise_lo, noise_hi;          // nu_t^n
  double congestion_amplitude;
  double congestion_offset;
};

struct FogInstanceConfig {
  std::size_t nodes = 10;
  int neighbor_links = 2;  // ring chords n -> n+1 .. n+k (mod N), self-loops skipped
  std::optional<std::vector<std::vector<std::size_t>>> adjacency;  // explicit override
  double cloud_capacity = 100.0;
  double link_capacity = 10.0;
  double local_capacity = 50.0;
  double coeff_numerator = 8.0;  // link/local coefficients are this over the capacity
  double half_period = 96.0;

  // Node classes keyed by 1-based node label.
  NodeClassRanges default_class{40.0, 50.0, 45.0, 55.0, 0.015, 0.05};
  NodeClassRanges reduced_class{32.0, 40.0, 36.0, 44.0, 0.015, 0.05};     // labels 1..3
  NodeClassRanges congested_class{20.0, 25.0, 22.5, 27.5, 0.045, 0.15};  // labels 4, 5
};

/// Build an instance deterministically from (config, seed): topology from the
/// ring rule (or the explicit adjacency), per-class congestion coefficients,
/// and per-run arrival amplitudes.
FogProblem generate_instance(const FogInstanceConfig& config, std::uint64_t seed);

/// Heuristic baselines. Both serve min(arrivals + backlog, capacity) through a
/// single resource and buffer the remainder; the buffered amounts surface in
/// the dynamic fit. Returns (action, next backlog).
std::pair<Eigen::VectorXd, Eigen::VectorXd> cloud_only_step(const Eigen::VectorXd& backlog,
                                                            const Eigen::VectorXd& arrivals,
                                                            const FogNetwork& net);
std::pair<Eigen::VectorXd, Eigen::VectorXd> fog_only_step(const Eigen::VectorXd& backlog,
                                                          const Eigen::VectorXd& arrivals,
                                                          const FogNetwork& net);

/// One node's share of the decentralized primal-dual slot.
struct NodeUpdate {
  double cloud_next = 0.0;
  std::vector<double> link_next;
  double local_next = 0.0;
  double multiplier_next = 0.0;
};

/// Re-expresses the global projected step as per-variable scalar updates and
/// the per-node dual update driven by the slot-(t+1) flows. The box
/// projection decomposes per coordinate, so flattening these reproduces the
/// global update exactly.
std::vector<NodeUpdate> decentralized_step(const FogNetwork& net, const BoxSet& box,
                                           double gamma, const Eigen::VectorXd& x_hat,
                                           const Eigen::VectorXd& multipliers,
                                           const Eigen::VectorXd& grad_estimate,
                                           const Eigen::VectorXd& arrivals, double alpha,
                                           double mu);

/// Flatten a decentralized view back into (x_next, multipliers_next).
std::pair<Eigen::VectorXd, Eigen::VectorXd> flatten_node_updates(
    const FogNetwork& net, const std::vector<NodeUpdate>& updates);

/// Human-readable instance snapshot (topology, capacities, cost parameters,
/// arrival draws, and the materialized arrival table) for exact replay.
std::string instance_to_json(const FogProblem& problem, long horizon, std::uint64_t seed,
                             const std::string& config_text = {});

struct InstanceSnapshot {
  FogProblem problem;
  long horizon = 0;
  std::uint64_t seed = 0;
  std::string config_text;
};

InstanceSnapshot instance_from_json(const std::string& json_text);
InstanceSnapshot load_instance_snapshot(const std::string& path);
void save_instance_snapshot(const FogProblem& problem, long horizon, std::uint64_t seed,
                            const std::string& config_text, const std::string& path);

}  // namespace bansap
