#include "bansap/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace bansap {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr std::uint64_t kAlgoSeedOffset = 1000;
}  // namespace

// ---------------------------------------------------------------------------
// Synthetic problem

SyntheticProblem::SyntheticProblem(const SyntheticConfig& config)
    : config_(config),
      box_(Eigen::VectorXd::Constant(config.dim, -config.box_halfwidth),
           Eigen::VectorXd::Constant(config.dim, config.box_halfwidth)) {
  if (config.dim < 1) throw std::invalid_argument("SyntheticProblem: dim must be >= 1");
}

Eigen::VectorXd SyntheticProblem::target(long t) const {
  Eigen::VectorXd c(config_.dim);
  for (Eigen::Index i = 0; i < config_.dim; ++i) {
    const double phase = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(config_.dim);
    c[i] = config_.target_amplitude *
           std::sin(2.0 * kPi * static_cast<double>(t) / config_.target_period + phase);
  }
  return c;
}

double SyntheticProblem::budget(long t) const {
  return config_.budget_base +
         config_.budget_amplitude *
             std::sin(2.0 * kPi * static_cast<double>(t) / config_.target_period);
}

double SyntheticProblem::loss(long t, const Eigen::VectorXd& x) const {
  return (x - target(t)).squaredNorm();
}

Eigen::VectorXd SyntheticProblem::loss_gradient(long t, const Eigen::VectorXd& x) const {
  return 2.0 * (x - target(t));
}

Eigen::VectorXd SyntheticProblem::constraints(long t, const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(1);
  g[0] = x.sum() - budget(t);
  return g;
}

Eigen::MatrixXd SyntheticProblem::constraint_jacobian() const {
  return Eigen::MatrixXd::Ones(1, config_.dim);
}

double SyntheticProblem::value_bound() const {
  const double reach = config_.box_halfwidth + config_.target_amplitude;
  return static_cast<double>(config_.dim) * reach * reach;
}

double SyntheticProblem::lipschitz_bound() const {
  const double reach = config_.box_halfwidth + config_.target_amplitude;
  // Covers both the loss gradient and the constraint row norm sqrt(dim).
  return std::max(2.0 * std::sqrt(static_cast<double>(config_.dim)) * reach,
                  std::sqrt(static_cast<double>(config_.dim)));
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string token;
  while (is >> token) out.push_back(token);
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': expected a number, got '" + value +
                                "'");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + value +
                                "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config key '" + key + "': expected true/false, got '" + value +
                              "'");
}

std::pair<double, double> parse_pair(const std::string& key, const std::string& value) {
  const auto parts = split_ws(value);
  if (parts.size() != 2) {
    throw std::invalid_argument("config key '" + key + "': expected two numbers");
  }
  return {parse_double(key, parts[0]), parse_double(key, parts[1])};
}

AlgorithmSpec parse_algorithm_line(const std::string& value) {
  const auto tokens = split_ws(value);
  if (tokens.empty()) throw std::invalid_argument("empty algorithm line");

  AlgorithmSpec spec;
  const std::string& name = tokens.front();
  int feedback = 2;
  SamplingScheme scheme = SamplingScheme::UniformSphere;

  std::map<std::string, std::string> opts;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    const auto eq = tokens[i].find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("algorithm option '" + tokens[i] + "' is not key=value");
    }
    opts[tokens[i].substr(0, eq)] = tokens[i].substr(eq + 1);
  }
  const auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = opts.find(key);
    if (it == opts.end()) return std::nullopt;
    std::string v = it->second;
    opts.erase(it);
    return v;
  };

  if (name == "bansap") {
    if (auto v = take("M")) feedback = static_cast<int>(parse_long("M", *v));
    if (auto v = take("scheme")) scheme = sampling_scheme_from_string(*v);
    spec.algo = BanSaPAlgo{feedback, scheme};
  } else if (name == "mosp") {
    spec.algo = MospAlgo{};
  } else if (name == "cloud_only") {
    spec.algo = CloudOnlyAlgo{};
  } else if (name == "fog_only") {
    spec.algo = FogOnlyAlgo{};
  } else {
    throw std::invalid_argument("unknown algorithm '" + name + "'");
  }

  if (auto v = take("alpha")) spec.primal_step = parse_double("alpha", *v);
  if (auto v = take("mu")) spec.dual_step = parse_double("mu", *v);
  if (auto v = take("delta")) spec.exploration_radius = parse_double("delta", *v);
  if (auto v = take("gamma")) spec.shrink_factor = parse_double("gamma", *v);
  if (auto v = take("c_alpha")) spec.c_alpha = parse_double("c_alpha", *v);
  if (auto v = take("c_delta")) spec.c_delta = parse_double("c_delta", *v);
  if (auto v = take("start")) {
    if (*v == "center") {
      spec.start = StartPoint::ShrunkenCenter;
    } else if (*v == "origin") {
      spec.start = StartPoint::ProjectedOrigin;
    } else {
      throw std::invalid_argument("algorithm option start: expected center or origin");
    }
  }
  if (auto v = take("label")) spec.label = *v;
  if (!opts.empty()) {
    throw std::invalid_argument("algorithm '" + name + "': unknown option '" +
                                opts.begin()->first + "'");
  }
  if (spec.label.empty()) spec.label = algorithm_name(spec.algo);
  return spec;
}

void apply_class_key(NodeClassRanges& cls, const std::string& field, const std::string& key,
                     const std::string& value) {
  if (field == "arrival_amplitude") {
    std::tie(cls.amplitude_lo, cls.amplitude_hi) = parse_pair(key, value);
  } else if (field == "arrival_noise") {
    std::tie(cls.noise_lo, cls.noise_hi) = parse_pair(key, value);
  } else if (field == "congestion") {
    std::tie(cls.congestion_amplitude, cls.congestion_offset) = parse_pair(key, value);
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig config;
  config.config_text = text;

  std::set<std::string> seen;
  std::istringstream input(text);
  std::string line;
  int line_no = 0;
  while (std::getline(input, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": empty key or value");
    }
    if (key != "algorithm" && !seen.insert(key).second) {
      throw std::invalid_argument("config key '" + key + "' appears twice");
    }

    if (key == "problem") {
      if (value == "fog") {
        config.problem = ExperimentConfig::ProblemKind::Fog;
      } else if (value == "synthetic") {
        config.problem = ExperimentConfig::ProblemKind::Synthetic;
      } else {
        throw std::invalid_argument("config key 'problem': expected fog or synthetic");
      }
    } else if (key == "horizon") {
      config.horizon = parse_long(key, value);
    } else if (key == "runs") {
      config.runs = static_cast<int>(parse_long(key, value));
    } else if (key == "base_seed") {
      config.base_seed = static_cast<std::uint64_t>(parse_long(key, value));
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else if (key == "threads") {
      config.threads = static_cast<int>(parse_long(key, value));
    } else if (key == "snapshots") {
      config.write_snapshots = parse_bool(key, value);
    } else if (key == "algorithm") {
      config.algorithms.push_back(parse_algorithm_line(value));
    } else if (key == "schedule.c_alpha") {
      config.schedule_constants.c_alpha = parse_double(key, value);
    } else if (key == "schedule.c_delta") {
      config.schedule_constants.c_delta = parse_double(key, value);
    } else if (key == "schedule.variation_exponent") {
      config.variation_exponent = parse_double(key, value);
    } else if (key == "metrics.regret") {
      config.compute_regret = parse_bool(key, value);
    } else if (key == "metrics.kkt_tol") {
      config.kkt_tol = parse_double(key, value);
    } else if (key == "metrics.kkt_budget") {
      config.kkt_budget = parse_long(key, value);
    } else if (key == "fog.nodes") {
      config.fog.nodes = static_cast<std::size_t>(parse_long(key, value));
    } else if (key == "fog.neighbor_links") {
      config.fog.neighbor_links = static_cast<int>(parse_long(key, value));
    } else if (key == "fog.cloud_capacity") {
      config.fog.cloud_capacity = parse_double(key, value);
    } else if (key == "fog.link_capacity") {
      config.fog.link_capacity = parse_double(key, value);
    } else if (key == "fog.local_capacity") {
      config.fog.local_capacity = parse_double(key, value);
    } else if (key == "fog.coeff_numerator") {
      config.fog.coeff_numerator = parse_double(key, value);
    } else if (key == "fog.half_period") {
      config.fog.half_period = parse_double(key, value);
    } else if (key.rfind("fog.default.", 0) == 0) {
      apply_class_key(config.fog.default_class, key.substr(12), key, value);
    } else if (key.rfind("fog.reduced.", 0) == 0) {
      apply_class_key(config.fog.reduced_class, key.substr(12), key, value);
    } else if (key.rfind("fog.congested.", 0) == 0) {
      apply_class_key(config.fog.congested_class, key.substr(14), key, value);
    } else if (key == "synthetic.dim") {
      config.synthetic.dim = parse_long(key, value);
    } else if (key == "synthetic.box_halfwidth") {
      config.synthetic.box_halfwidth = parse_double(key, value);
    } else if (key == "synthetic.target_amplitude") {
      config.synthetic.target_amplitude = parse_double(key, value);
    } else if (key == "synthetic.target_period") {
      config.synthetic.target_period = parse_double(key, value);
    } else if (key == "synthetic.budget_base") {
      config.synthetic.budget_base = parse_double(key, value);
    } else if (key == "synthetic.budget_amplitude") {
      config.synthetic.budget_amplitude = parse_double(key, value);
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

namespace {

BoxSet reference_box(const ExperimentConfig& config) {
  if (config.problem == ExperimentConfig::ProblemKind::Fog) {
    return generate_instance(config.fog, config.base_seed).box();
  }
  return SyntheticProblem(config.synthetic).box();
}

}  // namespace

HyperParams resolve_hyper(const ExperimentConfig& config, const AlgorithmSpec& spec,
                          const BoxSet& box) {
  ScheduleConstants constants = config.schedule_constants;
  if (spec.c_alpha) constants.c_alpha = *spec.c_alpha;
  if (spec.c_delta) constants.c_delta = *spec.c_delta;
  const long effective_horizon = std::max<long>(config.horizon, 1);

  HyperParams hp;
  if (const auto* bansap = std::get_if<BanSaPAlgo>(&spec.algo)) {
    const FeedbackMode mode =
        bansap->feedback_count == 1 ? FeedbackMode::OnePoint : FeedbackMode::TwoPoint;
    hp = schedule(effective_horizon, mode, config.variation_exponent, box, constants);
    hp.feedback_count = bansap->feedback_count;
    hp.scheme = bansap->scheme;
    hp.horizon = config.horizon;
    if (spec.primal_step) hp.primal_step = *spec.primal_step;
    if (spec.dual_step) hp.dual_step = *spec.dual_step;
    if (spec.exploration_radius) {
      hp.exploration_radius = *spec.exploration_radius;
      // Keep the feasibility coupling unless the shrink factor is also pinned.
      if (!spec.shrink_factor) hp.shrink_factor = hp.exploration_radius / box.inner_radius();
    }
    if (spec.shrink_factor) hp.shrink_factor = *spec.shrink_factor;
    const double coupled = hp.exploration_radius / box.inner_radius();
    if (std::abs(hp.shrink_factor - coupled) > 1e-12) {
      std::cerr << "warning: algorithm '" << spec.label << "' overrides the shrink factor ("
                << hp.shrink_factor << " vs coupled " << coupled << ")\n";
    }
    hp.validate_for_bandit(box);
  } else if (std::holds_alternative<MospAlgo>(spec.algo)) {
    const double exponent =
        config.variation_exponent ? 0.5 * (*config.variation_exponent - 1.0) : -0.5;
    hp.primal_step = constants.c_alpha * std::pow(static_cast<double>(effective_horizon), exponent);
    hp.dual_step = hp.primal_step;
    if (spec.primal_step) hp.primal_step = *spec.primal_step;
    if (spec.dual_step) hp.dual_step = *spec.dual_step;
    hp.feedback_count = 1;
    hp.horizon = config.horizon;
    hp.validate_basic();
  } else {
    hp.horizon = config.horizon;
    hp.primal_step = 1.0;  // unused by the heuristics
    hp.dual_step = 1.0;
  }
  if (spec.start) hp.start = *spec.start;
  hp.variation_exponent = config.variation_exponent;
  return hp;
}

void validate_config(const ExperimentConfig& config) {
  std::vector<std::string> problems;
  if (config.runs < 1) problems.push_back("runs must be >= 1");
  if (config.horizon < 1) problems.push_back("horizon must be >= 1");
  if (config.algorithms.empty()) problems.push_back("at least one algorithm is required");
  if (config.kkt_tol <= 0) problems.push_back("metrics.kkt_tol must be positive");
  if (config.threads < 0) problems.push_back("threads must be >= 0");
  if (config.problem == ExperimentConfig::ProblemKind::Fog && config.fog.nodes == 0) {
    problems.push_back("fog.nodes must be >= 1");
  }
  if (config.problem == ExperimentConfig::ProblemKind::Synthetic) {
    for (const auto& spec : config.algorithms) {
      if (std::holds_alternative<CloudOnlyAlgo>(spec.algo) ||
          std::holds_alternative<FogOnlyAlgo>(spec.algo)) {
        problems.push_back("heuristic baselines require the fog problem");
      }
    }
  }
  std::set<std::string> labels;
  for (const auto& spec : config.algorithms) {
    if (spec.label.find(',') != std::string::npos) {
      problems.push_back("algorithm label '" + spec.label + "' may not contain commas");
    }
    if (!labels.insert(spec.label).second) {
      problems.push_back("duplicate algorithm label '" + spec.label + "'");
    }
  }

  if (problems.empty()) {
    try {
      const BoxSet box = reference_box(config);
      for (const auto& spec : config.algorithms) resolve_hyper(config, spec, box);
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
  }

  if (!problems.empty()) {
    std::string all = "invalid configuration:";
    for (const auto& p : problems) all += "\n  - " + p;
    throw std::invalid_argument(all);
  }
}

// ---------------------------------------------------------------------------
// Experiment execution

namespace {

struct SeedOutcome {
  std::vector<std::vector<RunRow>> rows_per_algo;
  std::vector<std::vector<RegretRow>> regret_per_algo;
  std::vector<RunError> errors;
};

struct ResolvedAlgo {
  AlgorithmSpec spec;
  HyperParams hyper;
};

void fill_rows(std::vector<RunRow>& rows, const std::string& label, std::uint64_t seed,
               const Trajectory& traj) {
  const FitSeries fit = dynamic_fit(traj);
  rows.reserve(traj.records.size());
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const SlotRecord& rec = traj.records[i];
    rows.push_back(RunRow{label, seed, static_cast<long>(i) + 1, rec.average_loss(),
                          fit.cumulative_norm[i], rec.multiplier_norm});
  }
}

SeedOutcome run_seed(const ExperimentConfig& config, const std::vector<ResolvedAlgo>& algos,
                     std::uint64_t seed, const FogProblem* preset_fog) {
  SeedOutcome outcome;
  outcome.rows_per_algo.resize(algos.size());
  outcome.regret_per_algo.resize(algos.size());

  const bool is_fog = config.problem == ExperimentConfig::ProblemKind::Fog;

  std::optional<FogProblem> fog_storage;
  std::optional<SyntheticProblem> synthetic_storage;
  const FogProblem* fog = nullptr;
  if (is_fog) {
    if (preset_fog != nullptr) {
      fog = preset_fog;
    } else {
      fog_storage.emplace(generate_instance(config.fog, seed));
      fog = &*fog_storage;
    }
  } else {
    synthetic_storage.emplace(config.synthetic);
  }

  LossFn exact_loss;
  LossGradFn exact_grad;
  BoxSet box = is_fog ? fog->box() : synthetic_storage->box();
  double f_bound = 0.0, g_bound = 0.0;
  if (is_fog) {
    exact_loss = [fog](long t, const Eigen::VectorXd& x) { return fog->loss(t, x); };
    exact_grad = [fog](long t, const Eigen::VectorXd& x) { return fog->loss_gradient(t, x); };
    Rng unused(0);
    const auto bounds = fog->estimate_bounds(0, unused);
    f_bound = bounds.value_bound;
    g_bound = bounds.gradient_bound;
  } else {
    const SyntheticProblem* sp = &*synthetic_storage;
    exact_loss = [sp](long t, const Eigen::VectorXd& x) { return sp->loss(t, x); };
    exact_grad = [sp](long t, const Eigen::VectorXd& x) { return sp->loss_gradient(t, x); };
    f_bound = sp->value_bound();
    g_bound = sp->lipschitz_bound();
  }

  std::optional<FunctionConstraintOracle> synthetic_cons;
  std::optional<FogConstraintOracle> fog_cons;
  const ConstraintOracle* cons = nullptr;
  if (is_fog) {
    fog_cons.emplace(*fog);
    cons = &*fog_cons;
  } else {
    const SyntheticProblem* sp = &*synthetic_storage;
    synthetic_cons.emplace(
        [sp](long t, const Eigen::VectorXd& x) { return sp->constraints(t, x); },
        [sp](long, const Eigen::VectorXd&) { return sp->constraint_jacobian(); }, 1);
    cons = &*synthetic_cons;
  }

  std::optional<OptimaSeries> optima;
  if (config.compute_regret) {
    ConvexSolveOptions opts;
    opts.kkt_tol = config.kkt_tol;
    opts.max_total_iterations = config.kkt_budget;
    try {
      optima = compute_optima(exact_loss, exact_grad, *cons, box, config.horizon,
                              config.kkt_tol, opts);
    } catch (const std::exception& e) {
      outcome.errors.push_back(RunError{"per_slot_optima", seed, e.what()});
    }
  }

  for (std::size_t ordinal = 0; ordinal < algos.size(); ++ordinal) {
    const ResolvedAlgo& ra = algos[ordinal];
    try {
      FunctionLossOracle generic_oracle(exact_loss, &box, f_bound, g_bound);
      std::optional<FogLossOracle> fog_oracle;
      LossOracle* oracle = &generic_oracle;
      if (is_fog) {
        fog_oracle.emplace(*fog, f_bound, g_bound);
        oracle = &*fog_oracle;
      }
      FunctionGradientOracle full_info(exact_loss, exact_grad);

      ProblemBundle bundle{oracle, &full_info, cons, fog, box};
      const Trajectory traj =
          run(bundle, ra.spec.algo, ra.hyper, mix_seed(seed, kAlgoSeedOffset + ordinal));
      fill_rows(outcome.rows_per_algo[ordinal], ra.spec.label, seed, traj);
      if (optima) {
        const RegretSeries reg = dynamic_regret(traj, *optima, exact_loss);
        auto& rows = outcome.regret_per_algo[ordinal];
        rows.reserve(reg.per_slot.size());
        for (std::size_t i = 0; i < reg.per_slot.size(); ++i) {
          rows.push_back(RegretRow{ra.spec.label, seed, static_cast<long>(i) + 1,
                                   reg.per_slot[i], reg.cumulative[i]});
        }
      }
    } catch (const std::exception& e) {
      outcome.errors.push_back(RunError{ra.spec.label, seed, e.what()});
    }
  }

  if (config.write_snapshots && is_fog) {
    const std::string path = config.output_dir + "/instance_seed" + std::to_string(seed) +
                             ".json";
    save_instance_snapshot(*fog, config.horizon, seed, config.config_text, path);
  }
  return outcome;
}

void append_summary(ResultTable& table, const ResultTable::Block& block, double per_node_scale) {
  // Group rows by algorithm in first-seen order.
  std::vector<std::string> order;
  std::map<std::string, std::map<std::uint64_t, std::pair<double, long>>> cost_acc;
  std::map<std::string, std::map<std::uint64_t, double>> final_fit;
  for (const RunRow& row : block.rows) {
    if (cost_acc.find(row.algorithm) == cost_acc.end()) order.push_back(row.algorithm);
    auto& acc = cost_acc[row.algorithm][row.seed];
    acc.first += row.avg_cost;
    acc.second += 1;
    final_fit[row.algorithm][row.seed] = row.cum_fit;  // rows arrive in slot order
  }

  const auto mean_std = [](const std::vector<double>& xs) -> std::pair<double, double> {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double denom = xs.size() > 1 ? static_cast<double>(xs.size() - 1) : 1.0;
    return {mean, std::sqrt(var / denom)};
  };

  for (const std::string& algo : order) {
    std::vector<double> costs, fits, per_node;
    for (const auto& [seed, acc] : cost_acc[algo]) {
      costs.push_back(acc.first / static_cast<double>(acc.second));
      const double fit = final_fit[algo][seed];
      fits.push_back(fit);
      per_node.push_back(fit / per_node_scale);
    }
    const auto [cm, cs] = mean_std(costs);
    table.summary.push_back(SummaryRow{algo, block.axis_value, "avg_cost", cm, cs});
    const auto [fm, fs] = mean_std(fits);
    table.summary.push_back(SummaryRow{algo, block.axis_value, "fit", fm, fs});
    const auto [pm, ps] = mean_std(per_node);
    table.summary.push_back(SummaryRow{algo, block.axis_value, "fit_per_node_slot", pm, ps});
  }
}

ResultTable run_experiment_impl(const ExperimentConfig& config, const std::string& axis_value,
                                const FogProblem* preset_fog) {
  validate_config(config);
  const BoxSet box = preset_fog != nullptr ? preset_fog->box() : reference_box(config);

  std::vector<ResolvedAlgo> algos;
  algos.reserve(config.algorithms.size());
  for (const auto& spec : config.algorithms) {
    algos.push_back(ResolvedAlgo{spec, resolve_hyper(config, spec, box)});
  }

  if (config.write_snapshots) {
    std::filesystem::create_directories(config.output_dir);
  }

  const int runs = config.runs;
  std::vector<SeedOutcome> outcomes(static_cast<std::size_t>(runs));
  int n_threads = config.threads > 0
                      ? config.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, runs));

  if (n_threads == 1) {
    for (int i = 0; i < runs; ++i) {
      outcomes[static_cast<std::size_t>(i)] =
          run_seed(config, algos, config.base_seed + static_cast<std::uint64_t>(i), preset_fog);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= runs) return;
          outcomes[static_cast<std::size_t>(i)] = run_seed(
              config, algos, config.base_seed + static_cast<std::uint64_t>(i), preset_fog);
        }
      });
    }
    for (auto& w : workers) w.join();
  }

  // Merge in deterministic (algorithm, seed) order regardless of completion.
  ResultTable table;
  ResultTable::Block block;
  block.axis_value = axis_value;
  for (std::size_t ordinal = 0; ordinal < algos.size(); ++ordinal) {
    for (const SeedOutcome& outcome : outcomes) {
      const auto& rows = outcome.rows_per_algo[ordinal];
      block.rows.insert(block.rows.end(), rows.begin(), rows.end());
      const auto& reg = outcome.regret_per_algo[ordinal];
      block.regret_rows.insert(block.regret_rows.end(), reg.begin(), reg.end());
    }
  }
  for (const SeedOutcome& outcome : outcomes) {
    table.errors.insert(table.errors.end(), outcome.errors.begin(), outcome.errors.end());
  }

  const double nodes =
      config.problem == ExperimentConfig::ProblemKind::Fog
          ? static_cast<double>(config.fog.nodes)
          : 1.0;
  append_summary(table, block, nodes * static_cast<double>(std::max<long>(config.horizon, 1)));
  table.blocks.push_back(std::move(block));
  return table;
}

}  // namespace

bool ResultTable::empty() const {
  for (const auto& block : blocks) {
    if (!block.rows.empty()) return false;
  }
  return true;
}

ResultTable run_experiment(const ExperimentConfig& config) {
  return run_experiment_impl(config, "", nullptr);
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "M") return SweepAxis::FeedbackCount;
  if (name == "scheme") return SweepAxis::Scheme;
  if (name == "N") return SweepAxis::NetworkSize;
  throw std::invalid_argument("unknown sweep axis '" + name + "' (expected M, scheme, or N)");
}

ResultTable sweep(const ExperimentConfig& config, SweepAxis axis,
                  const std::vector<std::string>& values) {
  if (values.empty()) throw std::invalid_argument("sweep: no axis values given");

  ResultTable combined;
  for (const std::string& value : values) {
    ExperimentConfig cfg = config;
    switch (axis) {
      case SweepAxis::FeedbackCount: {
        const int m = static_cast<int>(parse_long("M", value));
        if (m < 1) throw std::invalid_argument("sweep: M must be >= 1");
        for (auto& spec : cfg.algorithms) {
          if (auto* b = std::get_if<BanSaPAlgo>(&spec.algo)) {
            const bool default_label = spec.label == algorithm_name(spec.algo);
            b->feedback_count = m;
            if (default_label) spec.label = algorithm_name(spec.algo);
          }
        }
        break;
      }
      case SweepAxis::Scheme: {
        const SamplingScheme scheme = sampling_scheme_from_string(value);
        for (auto& spec : cfg.algorithms) {
          if (auto* b = std::get_if<BanSaPAlgo>(&spec.algo)) {
            const bool default_label = spec.label == algorithm_name(spec.algo);
            b->scheme = scheme;
            if (default_label) spec.label = algorithm_name(spec.algo);
          }
        }
        break;
      }
      case SweepAxis::NetworkSize: {
        if (config.problem != ExperimentConfig::ProblemKind::Fog) {
          throw std::invalid_argument("sweep over N requires the fog problem");
        }
        cfg.fog.nodes = static_cast<std::size_t>(parse_long("N", value));
        break;
      }
    }
    // Deduplicate labels that collapsed onto each other under the override.
    std::map<std::string, int> counts;
    for (auto& spec : cfg.algorithms) {
      const int n = counts[spec.label]++;
      if (n > 0) spec.label += "_" + std::to_string(n + 1);
    }

    ResultTable part = run_experiment_impl(cfg, value, nullptr);
    for (auto& b : part.blocks) combined.blocks.push_back(std::move(b));
    combined.summary.insert(combined.summary.end(), part.summary.begin(), part.summary.end());
    combined.errors.insert(combined.errors.end(), part.errors.begin(), part.errors.end());
  }
  return combined;
}

ResultTable replay_snapshot(const InstanceSnapshot& snapshot) {
  if (snapshot.config_text.empty()) {
    throw std::invalid_argument("snapshot carries no experiment configuration to replay");
  }
  ExperimentConfig config = parse_config_text(snapshot.config_text);
  config.horizon = snapshot.horizon;
  config.runs = 1;
  config.base_seed = snapshot.seed;
  config.write_snapshots = false;
  config.problem = ExperimentConfig::ProblemKind::Fog;
  return run_experiment_impl(config, "", &snapshot.problem);
}

// ---------------------------------------------------------------------------
// Output emission

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) != 0 ? c : '_');
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
  if (!out) throw std::runtime_error("failed while writing: " + path);
}

constexpr const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Render cost/fit curves and sweep charts from the CSVs in this directory."""
import csv
import glob
import os
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def plot_timeseries(rows, value_key, ylabel, outfile, cumulative_mean=False):
    by_algo = defaultdict(lambda: defaultdict(list))  # algo -> t -> values
    for row in rows:
        by_algo[row["algorithm"]][int(row["t"])].append(float(row[value_key]))
    plt.figure(figsize=(7, 4.5))
    for algo in sorted(by_algo):
        ts = sorted(by_algo[algo])
        means = [sum(by_algo[algo][t]) / len(by_algo[algo][t]) for t in ts]
        if cumulative_mean:
            running, out = 0.0, []
            for i, m in enumerate(means, start=1):
                running += m
                out.append(running / i)
            means = out
        plt.plot(ts, means, label=algo)
    plt.xlabel("slot t")
    plt.ylabel(ylabel)
    plt.legend(fontsize=8)
    plt.tight_layout()
    plt.savefig(os.path.join(HERE, outfile), dpi=140)
    plt.close()


def plot_summary_bars(rows, metric, outfile):
    rows = [r for r in rows if r["metric"] == metric]
    if not rows:
        return
    axes = sorted({r["axis"] for r in rows})
    algos = sorted({r["algorithm"] for r in rows})
    width = 0.8 / max(1, len(algos))
    plt.figure(figsize=(7, 4.5))
    for k, algo in enumerate(algos):
        xs, ys, errs = [], [], []
        for i, axis in enumerate(axes):
            match = [r for r in rows if r["algorithm"] == algo and r["axis"] == axis]
            if match:
                xs.append(i + k * width)
                ys.append(float(match[0]["mean"]))
                errs.append(float(match[0]["std"]))
        plt.bar(xs, ys, width=width, yerr=errs, capsize=2, label=algo)
    plt.xticks([i + 0.4 - width / 2 for i in range(len(axes))], axes)
    plt.xlabel("sweep value")
    plt.ylabel(metric)
    plt.legend(fontsize=8)
    plt.tight_layout()
    plt.savefig(os.path.join(HERE, outfile), dpi=140)
    plt.close()


def main():
    for raw in glob.glob(os.path.join(HERE, "raw*.csv")):
        suffix = os.path.splitext(os.path.basename(raw))[0][len("raw"):]
        rows = read_csv(raw)
        plot_timeseries(rows, "avg_cost", "average cost", f"cost{suffix}.png",
                        cumulative_mean=True)
        plot_timeseries(rows, "cum_fit", "dynamic fit", f"fit{suffix}.png")
    summary_path = os.path.join(HERE, "summary.csv")
    if os.path.exists(summary_path):
        summary = read_csv(summary_path)
        if any(r["axis"] for r in summary):
            plot_summary_bars(summary, "avg_cost", "sweep_cost.png")
            plot_summary_bars(summary, "fit_per_node_slot", "sweep_fit.png")
    print("plots written to", HERE)


if __name__ == "__main__":
    main()
)PY";

}  // namespace

void emit_outputs(const ResultTable& table, const std::string& dir) {
  if (table.empty()) {
    throw std::invalid_argument("emit_outputs: refusing to write an empty result table");
  }
  std::filesystem::create_directories(dir);

  for (const auto& block : table.blocks) {
    const std::string suffix = block.axis_value.empty() ? "" : "_" + sanitize(block.axis_value);
    std::ostringstream raw;
    raw << "algorithm,seed,t,avg_cost,cum_fit,dual_norm\n";
    for (const RunRow& row : block.rows) {
      raw << row.algorithm << ',' << row.seed << ',' << row.t << ','
          << format_double(row.avg_cost) << ',' << format_double(row.cum_fit) << ','
          << format_double(row.dual_norm) << '\n';
    }
    write_file(dir + "/raw" + suffix + ".csv", raw.str());

    if (!block.regret_rows.empty()) {
      std::ostringstream reg;
      reg << "algorithm,seed,t,regret,cum_regret\n";
      for (const RegretRow& row : block.regret_rows) {
        reg << row.algorithm << ',' << row.seed << ',' << row.t << ','
            << format_double(row.regret) << ',' << format_double(row.cum_regret) << '\n';
      }
      write_file(dir + "/regret" + suffix + ".csv", reg.str());
    }
  }

  std::ostringstream summary;
  summary << "algorithm,axis,metric,mean,std\n";
  for (const SummaryRow& row : table.summary) {
    summary << row.algorithm << ',' << row.axis << ',' << row.metric << ','
            << format_double(row.mean) << ',' << format_double(row.stddev) << '\n';
  }
  write_file(dir + "/summary.csv", summary.str());
  write_file(dir + "/plot_results.py", kPlotScript);
}

}  // namespace bansap
