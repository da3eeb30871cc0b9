#include "upo/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <future>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/core.h>

#include "upo/pando.hpp"

namespace upo {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw Error(ErrorCode::config, fmt::format("invalid value '{}' for '{}': expected {}", value, key, expected));
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) bad_value(key, value, "a finite number");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "a non-negative integer");
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "an integer");
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool is_vee(const ExperimentConfig& cfg) { return cfg.scenario == ScenarioKind::synthetic_vee; }

// Controllers behind one interface for the simulation loop.
class Policy {
 public:
  virtual ~Policy() = default;
  /// Measurement y at the input applied this step; returns the next input.
  virtual GridPoint next(double y) = 0;
};

class ConstantPolicy final : public Policy {
 public:
  explicit ConstantPolicy(GridPoint u) : u_(u) {}
  GridPoint next(double) override { return u_; }

 private:
  GridPoint u_;
};

class PandoPolicy final : public Policy {
 public:
  PandoPolicy(const InputGrid& grid, GridPoint first) : grid_(grid), first_(first) {}

  GridPoint next(double y) override {
    if (!state_) {
      state_ = pando_init(first_, y, grid_);
      return state_->curr;
    }
    auto step = pando_step(*state_, y, grid_);
    state_ = step.state;
    return step.next;
  }

 private:
  const InputGrid& grid_;
  GridPoint first_;
  std::optional<PandoState> state_;
};

class UpoPolicy final : public Policy {
 public:
  UpoPolicy(const InputGrid& grid, GridPoint first, const UpoConfig& cfg)
      : grid_(grid), first_(first), cfg_(cfg), rule_(gauss_hermite(cfg.planner.quad_points)) {}

  GridPoint next(double y) override {
    if (!state_) {
      state_ = upo_init(first_, y, grid_, cfg_);
      return state_->curr;
    }
    auto step = upo_step(*state_, y, grid_, cfg_, rule_);
    state_ = std::move(step.state);
    return step.next;
  }

 private:
  const InputGrid& grid_;
  GridPoint first_;
  UpoConfig cfg_;
  QuadratureRule rule_;
  std::optional<UpoState> state_;
};

std::unique_ptr<Policy> make_policy(const Scenario& scenario, const ExperimentConfig& cfg) {
  const InputGrid& grid = scenario.grid();
  const GridPoint first = cfg.u_init ? grid.point_at(*cfg.u_init) : grid.bottom();
  switch (cfg.method) {
    case Method::pando: return std::make_unique<PandoPolicy>(grid, first);
    case Method::upo: return std::make_unique<UpoPolicy>(grid, first, cfg.upo);
    case Method::constant: return std::make_unique<ConstantPolicy>(grid.point_at(cfg.u_const));
    case Method::best_constant: return std::make_unique<ConstantPolicy>(best_constant_input(scenario));
  }
  throw Error(ErrorCode::invalid_argument, "unknown method");
}

GridPoint initial_input(const Scenario& scenario, const ExperimentConfig& cfg) {
  const InputGrid& grid = scenario.grid();
  switch (cfg.method) {
    case Method::constant: return grid.point_at(cfg.u_const);
    case Method::best_constant: return best_constant_input(scenario);
    default: return cfg.u_init ? grid.point_at(*cfg.u_init) : grid.bottom();
  }
}

// Everything that determines the true-value table and the noise stream.
std::string scenario_fingerprint(const ExperimentConfig& cfg) {
  const InputGrid g = cfg.grid();
  std::string fp = fmt::format("{}|{}|{}|{}|{}|{}|{}|{}|{}|{}", static_cast<int>(cfg.scenario),
                               cfg.profile_csv, cfg.steps, cfg.seed, cfg.seeds, g.u_min(),
                               g.delta_u(), g.size(), cfg.resolved_rho(),
                               static_cast<int>(cfg.resolved_noise()));
  if (is_vee(cfg)) {
    const VeeSpec& v = cfg.vee;
    fp += fmt::format("|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}", v.L_b, v.L_k, v.drift.start, v.drift.rate,
                      v.drift.lower, v.drift.upper, v.level.base, v.level.amplitude,
                      v.level.period, cfg.vee_start_set);
  } else {
    const pv::PvParams& p = cfg.pv;
    fp += fmt::format("|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}|{}", p.T_r, p.I_s, p.I_0, p.k_i, p.N,
                      p.E_g, p.k, p.q, p.n_s, p.R_s, p.R_p, p.C_c, p.L_c, p.R_c);
    fp += fmt::format("|{}|{}|{}|{}", cfg.day.irradiance_peak, cfg.day.temperature_base,
                      cfg.day.temperature_peak, cfg.day.temperature_peak_fraction);
  }
  return fp;
}

}  // namespace

void ExperimentConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "method") {
    if (value == "pando") method = Method::pando;
    else if (value == "upo") method = Method::upo;
    else if (value == "best_constant" || value == "best-constant") method = Method::best_constant;
    else if (value == "constant") method = Method::constant;
    else if (value.rfind("constant:", 0) == 0) {
      method = Method::constant;
      u_const = parse_double(key, value.substr(9));
    } else {
      bad_value(key, value, "pando, upo, constant, constant:U or best_constant");
    }
  } else if (key == "u-const") {
    u_const = parse_double(key, value);
  } else if (key == "scenario") {
    if (value == "pv_default") scenario = ScenarioKind::pv_default;
    else if (value == "pv_csv") scenario = ScenarioKind::pv_csv;
    else if (value.rfind("pv_csv:", 0) == 0) {
      scenario = ScenarioKind::pv_csv;
      profile_csv = value.substr(7);
    } else if (value == "synthetic_vee") scenario = ScenarioKind::synthetic_vee;
    else bad_value(key, value, "pv_default, pv_csv, pv_csv:PATH or synthetic_vee");
  } else if (key == "profile-csv") {
    profile_csv = value;
    scenario = ScenarioKind::pv_csv;
  } else if (key == "steps") {
    steps = parse_u64(key, value);
  } else if (key == "seed") {
    seed = parse_u64(key, value);
  } else if (key == "seeds") {
    seeds = parse_u64(key, value);
  } else if (key == "lambda") {
    upo.forgetting = parse_double(key, value);
  } else if (key == "rho-est") {
    upo.rho_est = parse_double(key, value);
  } else if (key == "horizon") {
    upo.planner.horizon = parse_int(key, value);
  } else if (key == "quad-points") {
    upo.planner.quad_points = parse_int(key, value);
  } else if (key == "weight") {
    upo.planner.weight = parse_double(key, value);
  } else if (key == "u-init") {
    u_init = parse_double(key, value);
  } else if (key == "out") {
    out_dir = value;
  } else if (key == "rho") {
    rho = parse_double(key, value);
  } else if (key == "noise") {
    if (value == "gaussian") noise = NoiseKind::gaussian;
    else if (value == "truncated" || value == "truncated_gaussian") noise = NoiseKind::truncated_gaussian;
    else bad_value(key, value, "gaussian or truncated");
  } else if (key == "grid-min") {
    grid_min = parse_double(key, value);
  } else if (key == "grid-step") {
    grid_step = parse_double(key, value);
  } else if (key == "grid-size") {
    grid_size = parse_u64(key, value);
  } else if (key == "irradiance-peak") {
    day.irradiance_peak = parse_double(key, value);
  } else if (key == "temperature-base") {
    day.temperature_base = parse_double(key, value);
  } else if (key == "temperature-peak") {
    day.temperature_peak = parse_double(key, value);
  } else if (key == "vee-lb") {
    vee.L_b = parse_double(key, value);
  } else if (key == "vee-lk") {
    vee.L_k = parse_double(key, value);
  } else if (key == "vee-start") {
    vee.drift.start = parse_double(key, value);
    vee_start_set = true;
  } else if (key == "vee-rate") {
    vee.drift.rate = parse_double(key, value);
  } else if (key == "vee-lower") {
    vee.drift.lower = parse_double(key, value);
  } else if (key == "vee-upper") {
    vee.drift.upper = parse_double(key, value);
  } else if (key == "vee-level") {
    vee.level.base = parse_double(key, value);
  } else if (key == "vee-amplitude") {
    vee.level.amplitude = parse_double(key, value);
  } else if (key == "vee-period") {
    vee.level.period = parse_double(key, value);
  } else if (pv::PvParams probe; probe.set(key, 0.0)) {
    pv.set(key, parse_double(key, value));
  } else {
    throw Error(ErrorCode::config, fmt::format("unknown configuration key '{}'", key));
  }
}

void ExperimentConfig::load(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::config, fmt::format("config line {}: expected key=value", line_no));
    }
    try {
      set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("config line {}: {}", line_no, e.what()));
    }
  }
}

void ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open config file '{}'", path));
  load(in);
}

InputGrid ExperimentConfig::grid() const {
  if (is_vee(*this)) {
    return InputGrid(grid_min.value_or(0.0), grid_step.value_or(1.0), grid_size.value_or(21));
  }
  return InputGrid(grid_min.value_or(0.05), grid_step.value_or(0.05), grid_size.value_or(19));
}

double ExperimentConfig::resolved_rho() const { return rho.value_or(is_vee(*this) ? 0.2 : 5.0); }

NoiseKind ExperimentConfig::resolved_noise() const {
  return noise.value_or(is_vee(*this) ? NoiseKind::truncated_gaussian : NoiseKind::gaussian);
}

void ExperimentConfig::validate() const {
  if (steps < 2) throw Error(ErrorCode::config, "steps must be >= 2");
  if (seeds < 1) throw Error(ErrorCode::config, "seeds must be >= 1");
  upo.validate();
  const InputGrid g = grid();
  if (u_init) g.point_at(*u_init);
  if (method == Method::constant) g.point_at(u_const);
  if (scenario == ScenarioKind::pv_csv && profile_csv.empty()) {
    throw Error(ErrorCode::config, "scenario pv_csv needs a profile-csv path");
  }
  if (!is_vee(*this)) {
    pv.validate();
    if (!(g.u_min() > 0.0) || g.value(g.top()) > 1.0) {
      throw Error(ErrorCode::config, "duty-cycle grid must lie inside (0, 1]");
    }
  }
}

std::string method_label(const ExperimentConfig& cfg) {
  switch (cfg.method) {
    case Method::pando: return "pando";
    case Method::upo: return "upo";
    case Method::constant: return fmt::format("constant({})", cfg.u_const);
    case Method::best_constant: return "best_constant";
  }
  return "unknown";
}

Scenario build_scenario(const ExperimentConfig& cfg) {
  cfg.validate();
  const InputGrid grid = cfg.grid();
  if (is_vee(cfg)) {
    VeeSpec spec = cfg.vee;
    spec.rho = cfg.resolved_rho();
    spec.noise = cfg.resolved_noise();
    spec.steps = cfg.steps;
    if (!cfg.vee_start_set) spec.drift.start = static_cast<double>(grid.size() / 2);
    return std::move(make_vee_scenario(grid, spec).scenario);
  }

  const pv::DayProfile profile = cfg.scenario == ScenarioKind::pv_csv
                                     ? pv::read_profile_csv(cfg.profile_csv)
                                     : pv::day_profile_default(cfg.steps, cfg.day);
  if (profile.samples() < cfg.steps + 1) {
    throw Error(ErrorCode::config, fmt::format("profile has {} samples, {} steps need {}",
                                               profile.samples(), cfg.steps, cfg.steps + 1));
  }
  std::vector<std::vector<double>> values(cfg.steps, std::vector<double>(grid.size()));
  for (std::size_t k = 1; k <= cfg.steps; ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      values[k - 1][i] = pv::steady_state_power(grid.value(GridPoint{i}), profile.temperature[k],
                                                profile.irradiance[k], cfg.pv)
                             .power;
    }
  }
  return Scenario(grid, std::move(values), cfg.resolved_rho(), cfg.resolved_noise());
}

GridPoint best_constant_input(const Scenario& scenario) {
  GridPoint best{0};
  double best_total = scenario.cumulative(best);
  for (std::size_t i = 1; i < scenario.grid().size(); ++i) {
    const double total = scenario.cumulative(GridPoint{i});
    if (total > best_total) {
      best_total = total;
      best = GridPoint{i};
    }
  }
  return best;
}

MetricsReport metrics_of(std::span<const TrajectoryRecord> records) {
  MetricsReport m;
  for (const auto& r : records) {
    if (r.u != r.u_star) ++m.perturbation_count;
    m.cumulative_objective += r.f_true;
  }
  return m;
}

ExperimentResult run_experiment(const Scenario& scenario, const ExperimentConfig& cfg,
                                std::uint64_t seed) {
  if (cfg.steps > scenario.steps()) {
    throw Error(ErrorCode::config, "experiment is longer than the scenario");
  }
  NoiseModel noise(scenario.rho(), scenario.noise_kind(), seed);
  auto policy = make_policy(scenario, cfg);

  ExperimentResult result;
  result.method = method_label(cfg);
  result.seed = seed;
  result.records.reserve(cfg.steps);
  GridPoint u = initial_input(scenario, cfg);
  double cumulative = 0.0;
  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    const auto k = static_cast<std::int64_t>(step);
    TrajectoryRecord rec;
    rec.k = k;
    rec.u = u;
    rec.f_true = scenario.value(k, u);
    rec.y = measure(rec.f_true, noise);
    rec.u_star = scenario.optimum(k);
    rec.perturbed = rec.u != rec.u_star;
    cumulative += rec.f_true;
    rec.cumulative_objective = cumulative;
    result.records.push_back(rec);
    if (step == cfg.steps) break;
    try {
      u = policy->next(rec.y);
    } catch (const Error& e) {
      throw Error(e.code(), fmt::format("step {}: {}", k, e.what()));
    }
  }
  result.metrics = metrics_of(result.records);
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const Scenario scenario = build_scenario(cfg);
  return run_experiment(scenario, cfg, cfg.seed);
}

double improvement(double cumulative, double baseline) {
  return (cumulative - baseline) / baseline;
}

Comparison compare(std::span<const ExperimentConfig> configs) {
  if (configs.empty()) throw Error(ErrorCode::invalid_argument, "compare needs at least one config");
  const std::string fingerprint = scenario_fingerprint(configs.front());
  for (const auto& c : configs) {
    if (scenario_fingerprint(c) != fingerprint) {
      throw Error(ErrorCode::invalid_argument, "compared configs do not share scenario, steps and seeds");
    }
  }

  std::vector<ExperimentConfig> all(configs.begin(), configs.end());
  auto has = [&](Method m) {
    return std::any_of(all.begin(), all.end(), [m](const auto& c) { return c.method == m; });
  };
  if (!has(Method::pando)) {
    all.push_back(configs.front());
    all.back().method = Method::pando;
  }
  if (!has(Method::best_constant)) {
    all.push_back(configs.front());
    all.back().method = Method::best_constant;
  }

  const Scenario scenario = build_scenario(configs.front());
  const ExperimentConfig& base = configs.front();

  struct Task {
    std::size_t config;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < base.seeds; ++s) {
    for (std::size_t c = 0; c < all.size(); ++c) tasks.push_back({c, base.seed + s});
  }

  // Tasks are independent; results are collected in task order.
  Comparison out;
  out.best_constant = best_constant_input(scenario);
  out.runs.resize(tasks.size());
  const std::size_t workers = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < tasks.size(); start += workers) {
    std::vector<std::future<ExperimentResult>> batch;
    const std::size_t end = std::min(tasks.size(), start + workers);
    for (std::size_t t = start; t < end; ++t) {
      batch.push_back(std::async(std::launch::async, [&, t] {
        return run_experiment(scenario, all[tasks[t].config], tasks[t].seed);
      }));
    }
    for (std::size_t t = start; t < end; ++t) out.runs[t] = batch[t - start].get();
  }

  const std::size_t per_seed = all.size();
  std::size_t pando_idx = 0;
  std::size_t const_idx = 0;
  for (std::size_t c = 0; c < all.size(); ++c) {
    if (all[c].method == Method::pando) pando_idx = c;
    if (all[c].method == Method::best_constant) const_idx = c;
  }
  for (std::size_t s = 0; s < base.seeds; ++s) {
    const double pando_cum = out.runs[s * per_seed + pando_idx].metrics.cumulative_objective;
    const double const_cum = out.runs[s * per_seed + const_idx].metrics.cumulative_objective;
    for (std::size_t c = 0; c < per_seed; ++c) {
      const ExperimentResult& r = out.runs[s * per_seed + c];
      out.rows.push_back({r.method, r.seed, r.metrics.perturbation_count,
                          r.metrics.cumulative_objective,
                          improvement(r.metrics.cumulative_objective, pando_cum),
                          improvement(r.metrics.cumulative_objective, const_cum)});
    }
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const InputGrid& grid,
                          std::span<const TrajectoryRecord> records) {
  out << "k,u,y,f_true,u_star,perturbed,cumulative\n";
  for (const auto& r : records) {
    out << fmt::format("{},{},{},{},{},{},{}\n", r.k, grid.value(r.u), r.y, r.f_true,
                       grid.value(r.u_star), r.perturbed ? 1 : 0, r.cumulative_objective);
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "method,seed,perturbations,cumulative,improvement_vs_pando,improvement_vs_const\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{},{},{}\n", r.method, r.seed, r.perturbations, r.cumulative,
                       r.improvement_vs_pando, r.improvement_vs_const);
  }
}

std::vector<CsvTrajectoryRow> read_trajectory_csv(std::istream& in) {
  std::vector<CsvTrajectoryRow> rows;
  std::string line;
  if (!std::getline(in, line) || line != "k,u,y,f_true,u_star,perturbed,cumulative") {
    throw Error(ErrorCode::io, "trajectory CSV has an unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field[7];
    for (auto& f : field) {
      if (!std::getline(row, f, ',')) throw Error(ErrorCode::io, "trajectory CSV row is short");
    }
    CsvTrajectoryRow r;
    r.k = static_cast<std::int64_t>(parse_u64("k", field[0]));
    r.u = parse_double("u", field[1]);
    r.y = parse_double("y", field[2]);
    r.f_true = parse_double("f_true", field[3]);
    r.u_star = parse_double("u_star", field[4]);
    r.perturbed = field[5] == "1";
    r.cumulative = parse_double("cumulative", field[6]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace upo
