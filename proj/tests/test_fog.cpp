#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "bansap/fog.hpp"
#include "bansap/solver.hpp"

using namespace bansap;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ArrivalProcess constant_arrivals(std::size_t nodes, double value) {
  ArrivalProcess arr;
  arr.amplitude.assign(nodes, 0.0);
  arr.noise_range.assign(nodes, {value, value});
  arr.noise_key = 1;
  return arr;
}

FogCostParams flat_cost(const FogNetwork& net, double p_offset) {
  FogCostParams cost;
  const std::size_t n = net.num_nodes();
  cost.congestion_amplitude.assign(n, 0.0);
  cost.congestion_offset.assign(n, p_offset);
  cost.local_coeff.resize(n);
  cost.link_coeff.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cost.local_coeff[i] = 8.0 / net.local_capacity()[i];
    cost.link_coeff[i].resize(net.out_links()[i].size());
    for (std::size_t j = 0; j < net.out_links()[i].size(); ++j) {
      cost.link_coeff[i][j] = 8.0 / net.link_capacity()[i][j];
    }
  }
  return cost;
}

}  // namespace

TEST_CASE("network index map and dimension") {
  FogInstanceConfig cfg;
  const FogProblem ten = generate_instance(cfg, 1);
  CHECK(ten.network().dimension() == 40);  // 10 cloud + 20 links + 10 local

  for (std::size_t n : {5ul, 10ul, 15ul}) {
    cfg.nodes = n;
    const FogProblem p = generate_instance(cfg, 1);
    std::size_t links = 0;
    for (const auto& row : p.network().out_links()) links += row.size();
    CHECK(p.network().dimension() == static_cast<Eigen::Index>(2 * n + links));
    CHECK(links == 2 * n);  // ring with two chords at N >= 3

    // The flat index map is a bijection onto 0..d-1.
    std::vector<int> hits(static_cast<std::size_t>(p.network().dimension()), 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++hits[static_cast<std::size_t>(p.network().cloud_index(i))];
      ++hits[static_cast<std::size_t>(p.network().local_index(i))];
      for (std::size_t j = 0; j < p.network().out_links()[i].size(); ++j) {
        ++hits[static_cast<std::size_t>(p.network().link_index(i, j))];
      }
    }
    for (int h : hits) CHECK(h == 1);
  }

  CHECK_THROWS_AS((void)FogNetwork(1, {{0}}, {1.0}, {{1.0}}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)FogNetwork(1, {{}}, {0.0}, {{}}, {1.0}), std::invalid_argument);
}

TEST_CASE("congestion sinusoid period and class offsets") {
  FogInstanceConfig cfg;
  const FogProblem p = generate_instance(cfg, 4);
  const FogCostParams& cost = p.cost_params();

  for (long t : {1, 17, 100}) {
    CHECK(cost.congestion(0, t) == doctest::Approx(cost.congestion(0, t + 192)).epsilon(1e-12));
  }

  // Mean over a full period equals the class offset; nodes 4 and 5 sit at the
  // congested offset, the rest at the default one.
  const auto mean_p = [&](std::size_t node) {
    double sum = 0.0;
    for (long t = 1; t <= 192; ++t) sum += cost.congestion(node, t);
    return sum / 192.0;
  };
  CHECK(mean_p(3) == doctest::Approx(0.15).epsilon(1e-9));
  CHECK(mean_p(4) == doctest::Approx(0.15).epsilon(1e-9));
  CHECK(mean_p(0) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(mean_p(7) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("loss values match hand computations") {
  SUBCASE("single node, everything idle") {
    FogNetwork net(1, {{}}, {100.0}, {{}}, {50.0});
    const FogProblem p(net, flat_cost(net, 0.05), constant_arrivals(1, 10.0));
    CHECK(p.loss(1, VectorXd::Zero(2)) == doctest::Approx(1.0));
  }

  SUBCASE("single node at the capacity corner") {
    FogNetwork net(1, {{}}, {100.0}, {{}}, {50.0});
    const FogProblem p(net, flat_cost(net, 0.05), constant_arrivals(1, 10.0));
    VectorXd x(2);
    x[net.cloud_index(0)] = 100.0;
    x[net.local_index(0)] = 50.0;
    CHECK(p.loss(1, x) == doctest::Approx(std::exp(5.0) + 400.0));
  }
}

TEST_CASE("the loss is convex along random segments") {
  FogInstanceConfig cfg;
  cfg.nodes = 6;
  const FogProblem p = generate_instance(cfg, 9);
  Rng rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const BoxSet& box = p.box();
  for (int i = 0; i < 10000; ++i) {
    VectorXd a(box.dim()), b(box.dim());
    for (Eigen::Index k = 0; k < box.dim(); ++k) {
      a[k] = box.lower()[k] + unit(rng) * (box.upper()[k] - box.lower()[k]);
      b[k] = box.lower()[k] + unit(rng) * (box.upper()[k] - box.lower()[k]);
    }
    const long t = 1 + (i % 192);
    const double mid = p.loss(t, 0.5 * (a + b));
    CHECK(mid <= 0.5 * (p.loss(t, a) + p.loss(t, b)) + 1e-9);
  }
}

TEST_CASE("constraint values and Jacobian structure") {
  SUBCASE("isolated node in exact balance") {
    FogNetwork net(1, {{}}, {100.0}, {{}}, {50.0});
    const FogProblem p(net, flat_cost(net, 0.05), constant_arrivals(1, 10.0));
    VectorXd x(2);
    x[net.cloud_index(0)] = 4.0;
    x[net.local_index(0)] = 6.0;
    CHECK(p.constraints(7, x)[0] == doctest::Approx(0.0));

    const MatrixXd jac = p.constraint_jacobian();
    CHECK(jac(0, net.cloud_index(0)) == -1.0);
    CHECK(jac(0, net.local_index(0)) == -1.0);
  }

  SUBCASE("flow between two nodes carries opposite signs") {
    FogNetwork net(2, {{1}, {}}, {10.0, 10.0}, {{5.0}, {}}, {10.0, 10.0});
    const FogProblem p(net, flat_cost(net, 0.05), constant_arrivals(2, 0.0));
    VectorXd x = VectorXd::Zero(net.dimension());
    x[net.link_index(0, 0)] = 3.0;
    const VectorXd g = p.constraints(1, x);
    CHECK(g[0] == doctest::Approx(-3.0));
    CHECK(g[1] == doctest::Approx(3.0));
  }

  SUBCASE("an external link only drains its source") {
    FogNetwork net(1, {{FogNetwork::kExternal}}, {10.0}, {{5.0}}, {10.0});
    const FogProblem p(net, flat_cost(net, 0.05), constant_arrivals(1, 2.0));
    CHECK(net.dimension() == 3);
    VectorXd x = VectorXd::Zero(3);
    x[net.link_index(0, 0)] = 1.5;
    CHECK(p.constraints(1, x)[0] == doctest::Approx(0.5));
  }

  SUBCASE("the Jacobian matches finite differences exactly") {
    FogInstanceConfig cfg;
    cfg.nodes = 5;
    const FogProblem p = generate_instance(cfg, 11);
    const MatrixXd jac = p.constraint_jacobian();
    Rng rng(8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double h = 0.5;
    for (int trial = 0; trial < 100; ++trial) {
      VectorXd x(p.box().dim());
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        x[k] = p.box().lower()[k] + unit(rng) * (p.box().upper()[k] - p.box().lower()[k]);
      }
      const long t = 1 + trial;
      const Eigen::Index col = static_cast<Eigen::Index>(trial) % x.size();
      VectorXd xp = x, xm = x;
      xp[col] += h;
      xm[col] -= h;
      const VectorXd fd = (p.constraints(t, xp) - p.constraints(t, xm)) / (2.0 * h);
      CHECK((fd - jac.col(col)).lpNorm<Eigen::Infinity>() <= 1e-9);
    }
  }
}

TEST_CASE("instance generation draws classes and stays deterministic") {
  FogInstanceConfig cfg;
  const FogProblem a = generate_instance(cfg, 123);
  const FogProblem b = generate_instance(cfg, 123);
  const FogProblem c = generate_instance(cfg, 124);

  for (std::size_t n = 0; n < cfg.nodes; ++n) {
    CHECK(a.arrivals().amplitude[n] == b.arrivals().amplitude[n]);
    const std::size_t label = n + 1;
    const NodeClassRanges& cls = (label == 4 || label == 5) ? cfg.congested_class
                                 : label <= 3              ? cfg.reduced_class
                                                           : cfg.default_class;
    CHECK(a.arrivals().amplitude[n] >= cls.amplitude_lo);
    CHECK(a.arrivals().amplitude[n] <= cls.amplitude_hi);
  }
  CHECK(a.arrivals().amplitude != c.arrivals().amplitude);

  // Arrivals are nonnegative and depend only on (seed, node, t).
  for (long t = 1; t <= 400; ++t) {
    for (std::size_t n = 0; n < cfg.nodes; ++n) {
      const double rate = a.arrivals().rate(n, t);
      CHECK(rate >= 0.0);
      CHECK(rate == b.arrivals().rate(n, t));
    }
  }

  CHECK_THROWS_AS((void)generate_instance(FogInstanceConfig{.nodes = 0}, 1),
                  std::invalid_argument);
}

TEST_CASE("heuristic baselines serve one resource and buffer the rest") {
  FogNetwork net(1, {{}}, {100.0}, {{}}, {50.0});

  SUBCASE("cloud-only within capacity") {
    const auto [action, backlog] =
        cloud_only_step(VectorXd::Zero(1), VectorXd::Constant(1, 30.0), net);
    CHECK(action[net.cloud_index(0)] == doctest::Approx(30.0));
    CHECK(backlog[0] == doctest::Approx(0.0));
  }

  SUBCASE("fog-only clips at the compute capacity") {
    const auto [action, backlog] =
        fog_only_step(VectorXd::Zero(1), VectorXd::Constant(1, 80.0), net);
    CHECK(action[net.local_index(0)] == doctest::Approx(50.0));
    CHECK(backlog[0] == doctest::Approx(30.0));
  }

  SUBCASE("backlog drains when capacity allows") {
    const auto [action, backlog] =
        cloud_only_step(VectorXd::Constant(1, 40.0), VectorXd::Constant(1, 30.0), net);
    CHECK(action[net.cloud_index(0)] == doctest::Approx(70.0));
    CHECK(backlog[0] == doctest::Approx(0.0));
  }

  SUBCASE("actions stay inside the feasible set") {
    FogInstanceConfig cfg;
    cfg.nodes = 4;
    const FogProblem p = generate_instance(cfg, 6);
    VectorXd backlog = VectorXd::Zero(4);
    for (long t = 1; t <= 300; ++t) {
      auto [action, next] = cloud_only_step(backlog, p.arrival_vector(t), p.network());
      CHECK(p.box().contains(action, 0.0));
      backlog = next;
    }
  }
}

TEST_CASE("decentralized node updates reproduce the global step") {
  FogInstanceConfig cfg;
  cfg.nodes = 6;
  const FogProblem p = generate_instance(cfg, 31);
  const BoxSet& box = p.box();
  const MatrixXd jac = p.constraint_jacobian();
  Rng rng(14);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double gamma = 0.2;
  const BoxSet shrunken = box.shrink(gamma);
  for (int trial = 0; trial < 1000; ++trial) {
    VectorXd x_hat(box.dim()), grad(box.dim());
    for (Eigen::Index k = 0; k < box.dim(); ++k) {
      x_hat[k] = shrunken.lower()[k] + unit(rng) * (shrunken.upper()[k] - shrunken.lower()[k]);
      grad[k] = 200.0 * unit(rng) - 100.0;
    }
    VectorXd lambda(6);
    for (int k = 0; k < 6; ++k) lambda[k] = 20.0 * unit(rng);
    const long t = 1 + trial % 300;
    const VectorXd arrivals = p.arrival_vector(t);
    const double alpha = 0.01 * (0.5 + unit(rng));
    const double mu = 0.02 * (0.5 + unit(rng));

    const auto [x_global, lambda_global] = primal_dual_update(
        x_hat, lambda, grad, p.constraints(t, x_hat), jac, alpha, mu, shrunken);
    const auto nodes =
        decentralized_step(p.network(), box, gamma, x_hat, lambda, grad, arrivals, alpha, mu);
    const auto [x_nodes, lambda_nodes] = flatten_node_updates(p.network(), nodes);

    CHECK((x_global - x_nodes).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((lambda_global - lambda_nodes).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("decentralized dual update runs on the new flows") {
  FogNetwork net(1, {{}}, {100.0}, {{}}, {50.0});
  const BoxSet box = net.action_box();
  const VectorXd arrivals = VectorXd::Constant(1, 10.0);

  // Old iterate under-serves (residual +4) but the freshly updated flows
  // over-serve, so the multiplier must shrink, not grow.
  VectorXd x_hat(2);
  x_hat[net.cloud_index(0)] = 2.0;
  x_hat[net.local_index(0)] = 4.0;
  VectorXd grad(2);
  grad << -100.0, -100.0;  // pushes both resources up
  VectorXd lambda = VectorXd::Constant(1, 5.0);
  const double mu = 0.1;

  const auto nodes =
      decentralized_step(net, box, 0.0, x_hat, lambda, grad, arrivals, 0.05, mu);
  const double served = nodes[0].cloud_next + nodes[0].local_next;
  REQUIRE(served > 10.0);
  CHECK(nodes[0].multiplier_next == doctest::Approx(5.0 + mu * (10.0 - served)));
  CHECK(nodes[0].multiplier_next < 5.0);
  CHECK(nodes[0].multiplier_next > 0.0);

  // Driving the residual strongly negative clamps the multiplier at zero.
  lambda[0] = 0.1;
  const auto clamped =
      decentralized_step(net, box, 0.0, x_hat, lambda, grad, arrivals, 0.05, 1.0);
  CHECK(clamped[0].multiplier_next == 0.0);
}

TEST_CASE("instance snapshots round-trip and verify their arrival table") {
  FogInstanceConfig cfg;
  cfg.nodes = 3;
  const FogProblem p = generate_instance(cfg, 77);
  const long horizon = 50;
  const std::string path = (std::filesystem::temp_directory_path() / "bansap_snapshot_test.json")
                               .string();
  save_instance_snapshot(p, horizon, 77, "horizon = 50\n", path);

  const InstanceSnapshot snap = load_instance_snapshot(path);
  CHECK(snap.seed == 77);
  CHECK(snap.horizon == horizon);
  CHECK(snap.config_text == "horizon = 50\n");
  CHECK(snap.problem.network().num_nodes() == 3);
  for (long t = 1; t <= horizon; ++t) {
    for (std::size_t n = 0; n < 3; ++n) {
      CHECK(snap.problem.arrivals().rate(n, t) == p.arrivals().rate(n, t));
    }
  }

  // Tampering with the stored arrivals is detected.
  std::string text = instance_to_json(p, horizon, 77);
  const auto pos = text.find("\"table\"");
  REQUIRE(pos != std::string::npos);
  const auto digit = text.find_first_of("0123456789", pos);
  std::string corrupted = text;
  corrupted[digit] = corrupted[digit] == '9' ? '8' : '9';
  CHECK_THROWS_AS((void)instance_from_json(corrupted), std::runtime_error);
  std::filesystem::remove(path);

  // External link targets survive the round trip.
  FogNetwork toy(1, {{FogNetwork::kExternal}}, {2.0}, {{1.0}}, {2.0});
  const FogProblem toy_problem(toy, flat_cost(toy, 0.3), constant_arrivals(1, 1.0));
  const InstanceSnapshot toy_snap = instance_from_json(instance_to_json(toy_problem, 5, 1));
  REQUIRE(toy_snap.problem.network().out_links()[0].size() == 1);
  CHECK(toy_snap.problem.network().out_links()[0][0] == FogNetwork::kExternal);
}

TEST_CASE("bound estimates dominate sampled values") {
  FogInstanceConfig cfg;
  cfg.nodes = 5;
  const FogProblem p = generate_instance(cfg, 21);
  Rng rng(5);
  const auto bounds = p.estimate_bounds(20000, rng);
  CHECK(bounds.sampled_value <= bounds.value_bound);
  CHECK(bounds.sampled_gradient <= bounds.gradient_bound);
  CHECK(bounds.sampled_value > 0.0);

  // The declared Lipschitz bound also covers the constraint rows.
  const MatrixXd jac = p.constraint_jacobian();
  for (Eigen::Index r = 0; r < jac.rows(); ++r) {
    CHECK(jac.row(r).norm() <= bounds.gradient_bound);
  }
}
