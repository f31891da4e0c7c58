#include "bansap/fog.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace bansap {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

FogNetwork::FogNetwork(std::size_t num_nodes, std::vector<std::vector<std::size_t>> out_links,
                       std::vector<double> cloud_capacity,
                       std::vector<std::vector<double>> link_capacity,
                       std::vector<double> local_capacity)
    : num_nodes_(num_nodes),
      out_links_(std::move(out_links)),
      link_capacity_(std::move(link_capacity)),
      cloud_capacity_(std::move(cloud_capacity)),
      local_capacity_(std::move(local_capacity)) {
  if (num_nodes_ == 0) throw std::invalid_argument("FogNetwork: needs at least one node");
  if (out_links_.size() != num_nodes_ || link_capacity_.size() != num_nodes_ ||
      cloud_capacity_.size() != num_nodes_ || local_capacity_.size() != num_nodes_) {
    throw std::invalid_argument("FogNetwork: per-node tables must all have one entry per node");
  }
  in_links_.assign(num_nodes_, {});
  link_offset_.assign(num_nodes_, 0);
  for (std::size_t n = 0; n < num_nodes_; ++n) {
    if (out_links_[n].size() != link_capacity_[n].size()) {
      throw std::invalid_argument("FogNetwork: link capacities must match the adjacency");
    }
    if (!(cloud_capacity_[n] > 0.0) || !(local_capacity_[n] > 0.0)) {
      throw std::invalid_argument("FogNetwork: capacities must be positive");
    }
    link_offset_[n] = static_cast<Eigen::Index>(num_nodes_ + num_links_);
    for (std::size_t j = 0; j < out_links_[n].size(); ++j) {
      const std::size_t target = out_links_[n][j];
      if (target == n) throw std::invalid_argument("FogNetwork: self-loop links are not allowed");
      if (target != kExternal && target >= num_nodes_) {
        throw std::invalid_argument("FogNetwork: link target out of range");
      }
      if (!(link_capacity_[n][j] > 0.0)) {
        throw std::invalid_argument("FogNetwork: capacities must be positive");
      }
      if (target != kExternal) in_links_[target].push_back(n);
      ++num_links_;
    }
  }
}

Eigen::Index FogNetwork::cloud_index(std::size_t n) const {
  return static_cast<Eigen::Index>(n);
}

Eigen::Index FogNetwork::link_index(std::size_t n, std::size_t j) const {
  return link_offset_[n] + static_cast<Eigen::Index>(j);
}

Eigen::Index FogNetwork::local_index(std::size_t n) const {
  return static_cast<Eigen::Index>(num_nodes_ + num_links_ + n);
}

BoxSet FogNetwork::action_box() const {
  Eigen::VectorXd upper(dimension());
  for (std::size_t n = 0; n < num_nodes_; ++n) {
    upper[cloud_index(n)] = cloud_capacity_[n];
    for (std::size_t j = 0; j < out_links_[n].size(); ++j) {
      upper[link_index(n, j)] = link_capacity_[n][j];
    }
    upper[local_index(n)] = local_capacity_[n];
  }
  return BoxSet(Eigen::VectorXd::Zero(dimension()), upper);
}

double FogCostParams::congestion(std::size_t n, long t) const {
  return congestion_offset[n] +
         congestion_amplitude[n] * std::sin(kPi * static_cast<double>(t) / half_period);
}

double ArrivalProcess::rate(std::size_t n, long t) const {
  const auto [lo, hi] = noise_range[n];
  const std::uint64_t key =
      mix_seed(mix_seed(noise_key, static_cast<std::uint64_t>(n) + 1), static_cast<std::uint64_t>(t));
  const double noise = lo + (hi - lo) * key_to_unit(key);
  const double value =
      amplitude[n] * std::sin(kPi * static_cast<double>(t) / half_period) + noise;
  return std::max(0.0, value);
}

double fog_loss(const FogNetwork& net, const FogCostParams& params, long t,
                const Eigen::VectorXd& x) {
  if (x.size() != net.dimension()) throw std::invalid_argument("fog_loss: dimension mismatch");
  double total = 0.0;
  for (std::size_t n = 0; n < net.num_nodes(); ++n) {
    total += std::exp(params.congestion(n, t) * x[net.cloud_index(n)]);
    for (std::size_t j = 0; j < net.out_links()[n].size(); ++j) {
      total += params.link_coeff[n][j] * x[net.link_index(n, j)];
    }
    const double local = x[net.local_index(n)];
    total += params.local_coeff[n] * local * local;
  }
  return total;
}

Eigen::VectorXd fog_loss_gradient(const FogNetwork& net, const FogCostParams& params, long t,
                                  const Eigen::VectorXd& x) {
  if (x.size() != net.dimension()) {
    throw std::invalid_argument("fog_loss_gradient: dimension mismatch");
  }
  Eigen::VectorXd grad(net.dimension());
  for (std::size_t n = 0; n < net.num_nodes(); ++n) {
    const double p = params.congestion(n, t);
    grad[net.cloud_index(n)] = p * std::exp(p * x[net.cloud_index(n)]);
    for (std::size_t j = 0; j < net.out_links()[n].size(); ++j) {
      grad[net.link_index(n, j)] = params.link_coeff[n][j];
    }
    grad[net.local_index(n)] = 2.0 * params.local_coeff[n] * x[net.local_index(n)];
  }
  return grad;
}

Eigen::VectorXd fog_constraints(const FogNetwork& net, const ArrivalProcess& arrivals, long t,
                                const Eigen::VectorXd& x) {
  if (x.size() != net.dimension()) {
    throw std::invalid_argument("fog_constraints: dimension mismatch");
  }
  Eigen::VectorXd g(static_cast<Eigen::Index>(net.num_nodes()));
  for (std::size_t n = 0; n < net.num_nodes(); ++n) {
    g[static_cast<Eigen::Index>(n)] =
        arrivals.rate(n, t) - x[net.cloud_index(n)] - x[net.local_index(n)];
  }
  for (std::size_t n = 0; n < net.num_nodes(); ++n) {
    for (std::size_t j = 0; j < net.out_links()[n].size(); ++j) {
      const double flow = x[net.link_index(n, j)];
      g[static_cast<Eigen::Index>(n)] -= flow;
      const std::size_t target = net.out_links()[n][j];
      if (target != FogNetwork::kExternal) g[static_cast<Eigen::Index>(target)] += flow;
    }
  }
  return g;
}

Eigen::MatrixXd fog_constraint_jacobian(const FogNetwork& net) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(net.num_nodes()),
                                              net.dimension());
  for (std::size_t n = 0; n < net.num_nodes(); ++n) {
    const auto row = static_cast<Eigen::Index>(n);
    jac(row, net.cloud_index(n)) = -1.0;
    jac(row, net.local_index(n)) = -1.0;
    for (std::size_t j = 0; j < net.out_links()[n].size(); ++j) {
      jac(row, net.link_index(n, j)) = -1.0;
      const std::size_t target = net.out_links()[n][j];
      if (target != FogNetwork::kExternal) {
        jac(static_cast<Eigen::Index>(target), net.link_index(n, j)) = 1.0;
      }
    }
  }
  return jac;
}

FogProblem::FogProblem(FogNetwork net, FogCostParams cost, ArrivalProcess arrivals)
    : net_(std::move(net)),
      cost_(std::move(cost)),
      arrivals_(std::move(arrivals)),
      box_(net_.action_box()),
      jacobian_(fog_constraint_jacobian(net_)) {
  const std::size_t n = net_.num_nodes();
  if (cost_.congestion_amplitude.size() != n || cost_.congestion_offset.size() != n ||
      cost_.link_coeff.size() != n || cost_.local_coeff.size() != n ||
      arrivals_.amplitude.size() != n || arrivals_.noise_range.size() != n) {
    throw std::invalid_argument("FogProblem: parameter tables do not match the node count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(cost_.congestion_offset[i] > std::abs(cost_.congestion_amplitude[i]))) {
      throw std::invalid_argument("FogProblem: congestion coefficient must stay positive");
    }
    if (cost_.link_coeff[i].size() != net_.out_links()[i].size()) {
      throw std::invalid_argument("FogProblem: link coefficients do not match the adjacency");
    }
  }
}

Eigen::VectorXd FogProblem::arrival_vector(long t) const {
  Eigen::VectorXd b(static_cast<Eigen::Index>(net_.num_nodes()));
  for (std::size_t n = 0; n < net_.num_nodes(); ++n) {
    b[static_cast<Eigen::Index>(n)] = arrivals_.rate(n, t);
  }
  return b;
}

FogProblem::Bounds FogProblem::estimate_bounds(long n_samples, Rng& rng) const {
  Bounds out{0.0, 0.0, 0.0, 0.0};

  // Closed-form suprema: the loss and every gradient component are increasing
  // in each coordinate and in the congestion coefficient.
  double f_corner = 0.0;
  Eigen::VectorXd grad_corner(net_.dimension());
  for (std::size_t n = 0; n < net_.num_nodes(); ++n) {
    const double p_max = cost_.congestion_offset[n] + std::abs(cost_.congestion_amplitude[n]);
    const double z_cap = net_.cloud_capacity()[n];
    f_corner += std::exp(p_max * z_cap);
    grad_corner[net_.cloud_index(n)] = p_max * std::exp(p_max * z_cap);
    for (std::size_t j = 0; j < net_.out_links()[n].size(); ++j) {
      f_corner += cost_.link_coeff[n][j] * net_.link_capacity()[n][j];
      grad_corner[net_.link_index(n, j)] = cost_.link_coeff[n][j];
    }
    const double y_cap = net_.local_capacity()[n];
    f_corner += cost_.local_coeff[n] * y_cap * y_cap;
    grad_corner[net_.local_index(n)] = 2.0 * cost_.local_coeff[n] * y_cap;
  }
  out.value_bound = f_corner;
  double jac_row_max = 0.0;
  for (Eigen::Index r = 0; r < jacobian_.rows(); ++r) {
    jac_row_max = std::max(jac_row_max, jacobian_.row(r).norm());
  }
  out.gradient_bound = std::max(grad_corner.norm(), jac_row_max);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<long> slot(1, static_cast<long>(2 * cost_.half_period));
  for (long i = 0; i < n_samples; ++i) {
    Eigen::VectorXd x(net_.dimension());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      x[k] = box_.lower()[k] + unit(rng) * (box_.upper()[k] - box_.lower()[k]);
    }
    const long t = slot(rng);
    out.sampled_value = std::max(out.sampled_value, std::abs(loss(t, x)));
    out.sampled_gradient = std::max(out.sampled_gradient, loss_gradient(t, x).norm());
  }
  return out;
}

FogProblem generate_instance(const FogInstanceConfig& config, std::uint64_t seed) {
  if (config.nodes == 0) throw std::invalid_argument("generate_instance: invalid node count");
  const std::size_t n_nodes = config.nodes;

  std::vector<std::vector<std::size_t>> adjacency;
  if (config.adjacency) {
    adjacency = *config.adjacency;
    if (adjacency.size() != n_nodes) {
      throw std::invalid_argument("generate_instance: adjacency size does not match node count");
    }
  } else {
    adjacency.assign(n_nodes, {});
    for (std::size_t n = 0; n < n_nodes; ++n) {
      for (int hop = 1; hop <= config.neighbor_links; ++hop) {
        const std::size_t target = (n + static_cast<std::size_t>(hop)) % n_nodes;
        if (target == n) continue;
        adjacency[n].push_back(target);
      }
    }
  }

  std::vector<double> cloud_cap(n_nodes, config.cloud_capacity);
  std::vector<double> local_cap(n_nodes, config.local_capacity);
  std::vector<std::vector<double>> link_cap(n_nodes);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    link_cap[n].assign(adjacency[n].size(), config.link_capacity);
  }
  FogNetwork net(n_nodes, adjacency, cloud_cap, link_cap, local_cap);

  const auto class_of = [&](std::size_t n) -> const NodeClassRanges& {
    const std::size_t label = n + 1;
    if (label == 4 || label == 5) return config.congested_class;
    if (label >= 1 && label <= 3) return config.reduced_class;
    return config.default_class;
  };

  FogCostParams cost;
  cost.half_period = config.half_period;
  cost.congestion_amplitude.resize(n_nodes);
  cost.congestion_offset.resize(n_nodes);
  cost.local_coeff.resize(n_nodes);
  cost.link_coeff.resize(n_nodes);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    const NodeClassRanges& cls = class_of(n);
    cost.congestion_amplitude[n] = cls.congestion_amplitude;
    cost.congestion_offset[n] = cls.congestion_offset;
    cost.local_coeff[n] = config.coeff_numerator / local_cap[n];
    cost.link_coeff[n].resize(link_cap[n].size());
    for (std::size_t j = 0; j < link_cap[n].size(); ++j) {
      cost.link_coeff[n][j] = config.coeff_numerator / link_cap[n][j];
    }
  }

  const std::uint64_t instance_key = mix_seed(seed, stream_tag::kInstance);
  ArrivalProcess arrivals;
  arrivals.half_period = config.half_period;
  arrivals.noise_key = mix_seed(instance_key, stream_tag::kArrivalNoise);
  arrivals.amplitude.resize(n_nodes);
  arrivals.noise_range.resize(n_nodes);
  for (std::size_t n = 0; n < n_nodes; ++n) {
    const NodeClassRanges& cls = class_of(n);
    const std::uint64_t key =
        mix_seed(mix_seed(instance_key, stream_tag::kArrivalAmplitude), n + 1);
    arrivals.amplitude[n] =
        cls.amplitude_lo + (cls.amplitude_hi - cls.amplitude_lo) * key_to_unit(key);
    arrivals.noise_range[n] = {cls.noise_lo, cls.noise_hi};
  }

  return FogProblem(std::move(net), std::move(cost), std::move(arrivals));
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> cloud_only_step(const Eigen::VectorXd& backlog,
                                                            const Eigen::VectorXd& arrivals,
                                                            const FogNetwork& net) {
  Eigen::VectorXd action = Eigen::VectorXd::Zero(net.dimension());
  Eigen::VectorXd next_backlog(backlog.size());
  for (std::size_t n = 0; n < net.num_nodes(); ++n) {
    const auto i = static_cast<Eigen::Index>(n);
    const double served = std::min(arrivals[i] + backlog[i], net.cloud_capacity()[n]);
    action[net.cloud_index(n)] = served;
    next_backlog[i] = backlog[i] + arrivals[i] - served;
  }
  return {std::move(action), std::move(next_backlog)};
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> fog_only_step(const Eigen::VectorXd& backlog,
                                                          const Eigen::VectorXd& arrivals,
                                                          const FogNetwork& net) {
  Eigen::VectorXd action = Eigen::VectorXd::Zero(net.dimension());
  Eigen::VectorXd next_backlog(backlog.size());
  for (std::size_t n = 0; n < net.num_nodes(); ++n) {
    const auto i = static_cast<Eigen::Index>(n);
    const double served = std::min(arrivals[i] + backlog[i], net.local_capacity()[n]);
    action[net.local_index(n)] = served;
    next_backlog[i] = backlog[i] + arrivals[i] - served;
  }
  return {std::move(action), std::move(next_backlog)};
}

std::vector<NodeUpdate> decentralized_step(const FogNetwork& net, const BoxSet& box,
                                           double gamma, const Eigen::VectorXd& x_hat,
                                           const Eigen::VectorXd& multipliers,
                                           const Eigen::VectorXd& grad_estimate,
                                           const Eigen::VectorXd& arrivals, double alpha,
                                           double mu) {
  const BoxSet shrunken = box.shrink(gamma);
  const auto clamp = [&](Eigen::Index i, double v) {
    return std::min(std::max(v, shrunken.lower()[i]), shrunken.upper()[i]);
  };

  std::vector<NodeUpdate> updates(net.num_nodes());
  for (std::size_t n = 0; n < net.num_nodes(); ++n) {
    const double lam_n = multipliers[static_cast<Eigen::Index>(n)];
    NodeUpdate& up = updates[n];

    const Eigen::Index zi = net.cloud_index(n);
    up.cloud_next = clamp(zi, x_hat[zi] - alpha * (grad_estimate[zi] - lam_n));

    up.link_next.resize(net.out_links()[n].size());
    for (std::size_t j = 0; j < net.out_links()[n].size(); ++j) {
      const Eigen::Index li = net.link_index(n, j);
      const std::size_t target = net.out_links()[n][j];
      const double lam_k =
          target == FogNetwork::kExternal ? 0.0 : multipliers[static_cast<Eigen::Index>(target)];
      up.link_next[j] = clamp(li, x_hat[li] - alpha * (grad_estimate[li] - lam_n + lam_k));
    }

    const Eigen::Index yi = net.local_index(n);
    up.local_next = clamp(yi, x_hat[yi] - alpha * (grad_estimate[yi] - lam_n));
  }

  // Dual ascent on the slot-(t+1) flows; over-serving pushes the multiplier
  // back toward zero.
  Eigen::VectorXd inflow = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.num_nodes()));
  for (std::size_t n = 0; n < net.num_nodes(); ++n) {
    for (std::size_t j = 0; j < net.out_links()[n].size(); ++j) {
      const std::size_t target = net.out_links()[n][j];
      if (target != FogNetwork::kExternal) {
        inflow[static_cast<Eigen::Index>(target)] += updates[n].link_next[j];
      }
    }
  }
  for (std::size_t n = 0; n < net.num_nodes(); ++n) {
    const auto i = static_cast<Eigen::Index>(n);
    double residual = arrivals[i] + inflow[i] - updates[n].cloud_next - updates[n].local_next;
    for (double flow : updates[n].link_next) residual -= flow;
    updates[n].multiplier_next = std::max(0.0, multipliers[i] + mu * residual);
  }
  return updates;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> flatten_node_updates(
    const FogNetwork& net, const std::vector<NodeUpdate>& updates) {
  Eigen::VectorXd x(net.dimension());
  Eigen::VectorXd lambda(static_cast<Eigen::Index>(net.num_nodes()));
  for (std::size_t n = 0; n < net.num_nodes(); ++n) {
    x[net.cloud_index(n)] = updates[n].cloud_next;
    for (std::size_t j = 0; j < updates[n].link_next.size(); ++j) {
      x[net.link_index(n, j)] = updates[n].link_next[j];
    }
    x[net.local_index(n)] = updates[n].local_next;
    lambda[static_cast<Eigen::Index>(n)] = updates[n].multiplier_next;
  }
  return {std::move(x), std::move(lambda)};
}

namespace {

nlohmann::json links_to_json(const std::vector<std::vector<std::size_t>>& links) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : links) {
    nlohmann::json jrow = nlohmann::json::array();
    for (std::size_t target : row) {
      if (target == FogNetwork::kExternal) {
        jrow.push_back(-1);
      } else {
        jrow.push_back(static_cast<long long>(target));
      }
    }
    out.push_back(std::move(jrow));
  }
  return out;
}

std::vector<std::vector<std::size_t>> links_from_json(const nlohmann::json& j) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& row : j) {
    std::vector<std::size_t> targets;
    for (const auto& v : row) {
      const long long raw = v.get<long long>();
      targets.push_back(raw < 0 ? FogNetwork::kExternal : static_cast<std::size_t>(raw));
    }
    out.push_back(std::move(targets));
  }
  return out;
}

}  // namespace

std::string instance_to_json(const FogProblem& problem, long horizon, std::uint64_t seed,
                             const std::string& config_text) {
  const FogNetwork& net = problem.network();
  nlohmann::json j;
  j["format"] = "bansap-fog-instance";
  j["version"] = 1;
  j["seed"] = seed;
  j["horizon"] = horizon;
  j["network"] = {{"nodes", net.num_nodes()},
                  {"out_links", links_to_json(net.out_links())},
                  {"cloud_capacity", net.cloud_capacity()},
                  {"link_capacity", net.link_capacity()},
                  {"local_capacity", net.local_capacity()}};
  const FogCostParams& cost = problem.cost_params();
  j["cost"] = {{"congestion_amplitude", cost.congestion_amplitude},
               {"congestion_offset", cost.congestion_offset},
               {"link_coeff", cost.link_coeff},
               {"local_coeff", cost.local_coeff},
               {"half_period", cost.half_period}};
  const ArrivalProcess& arr = problem.arrivals();
  nlohmann::json ranges = nlohmann::json::array();
  for (const auto& [lo, hi] : arr.noise_range) ranges.push_back({lo, hi});
  nlohmann::json table = nlohmann::json::array();
  for (long t = 1; t <= horizon; ++t) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t n = 0; n < net.num_nodes(); ++n) row.push_back(arr.rate(n, t));
    table.push_back(std::move(row));
  }
  j["arrivals"] = {{"amplitude", arr.amplitude},
                   {"noise_range", std::move(ranges)},
                   {"noise_key", arr.noise_key},
                   {"half_period", arr.half_period},
                   {"table", std::move(table)}};
  if (!config_text.empty()) j["config_text"] = config_text;
  return j.dump(2);
}

InstanceSnapshot instance_from_json(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  if (j.value("format", "") != "bansap-fog-instance") {
    throw std::runtime_error("instance snapshot: unrecognized format");
  }
  const auto& jnet = j.at("network");
  FogNetwork net(jnet.at("nodes").get<std::size_t>(), links_from_json(jnet.at("out_links")),
                 jnet.at("cloud_capacity").get<std::vector<double>>(),
                 jnet.at("link_capacity").get<std::vector<std::vector<double>>>(),
                 jnet.at("local_capacity").get<std::vector<double>>());

  const auto& jcost = j.at("cost");
  FogCostParams cost;
  cost.congestion_amplitude = jcost.at("congestion_amplitude").get<std::vector<double>>();
  cost.congestion_offset = jcost.at("congestion_offset").get<std::vector<double>>();
  cost.link_coeff = jcost.at("link_coeff").get<std::vector<std::vector<double>>>();
  cost.local_coeff = jcost.at("local_coeff").get<std::vector<double>>();
  cost.half_period = jcost.at("half_period").get<double>();

  const auto& jarr = j.at("arrivals");
  ArrivalProcess arrivals;
  arrivals.amplitude = jarr.at("amplitude").get<std::vector<double>>();
  arrivals.noise_key = jarr.at("noise_key").get<std::uint64_t>();
  arrivals.half_period = jarr.at("half_period").get<double>();
  for (const auto& pair : jarr.at("noise_range")) {
    arrivals.noise_range.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
  }

  InstanceSnapshot snap{FogProblem(std::move(net), std::move(cost), std::move(arrivals)),
                        j.at("horizon").get<long>(), j.at("seed").get<std::uint64_t>(),
                        j.value("config_text", "")};

  // The stored table must match what the generator parameters reproduce;
  // doubles survive the JSON round trip exactly.
  const auto& table = jarr.at("table");
  const std::size_t n_nodes = snap.problem.network().num_nodes();
  for (long t = 1; t <= snap.horizon; ++t) {
    const auto& row = table.at(static_cast<std::size_t>(t - 1));
    for (std::size_t n = 0; n < n_nodes; ++n) {
      if (row.at(n).get<double>() != snap.problem.arrivals().rate(n, t)) {
        throw std::runtime_error("instance snapshot: arrival table does not match its generator");
      }
    }
  }
  return snap;
}

InstanceSnapshot load_instance_snapshot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance snapshot: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

void save_instance_snapshot(const FogProblem& problem, long horizon, std::uint64_t seed,
                            const std::string& config_text, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance snapshot: " + path);
  out << instance_to_json(problem, horizon, seed, config_text) << '\n';
}

}  // namespace bansap
