#pragma once

// Batch experiment runner: wires a controller to a simulated scenario,
// logs one TrajectoryRecord per step and reports perturbation counts and
// cumulative true objective.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "upo/controller.hpp"
#include "upo/convergence.hpp"
#include "upo/pv_plant.hpp"
#include "upo/scenario.hpp"

namespace upo {

enum class Method { pando, upo, constant, best_constant };
enum class ScenarioKind { pv_default, pv_csv, synthetic_vee };

struct ExperimentConfig {
  Method method = Method::upo;
  double u_const = 0.45;
  ScenarioKind scenario = ScenarioKind::pv_default;
  std::string profile_csv;
  std::size_t steps = 300;
  std::uint64_t seed = 1;
  std::size_t seeds = 1;
  UpoConfig upo;
  std::optional<double> u_init;  // default: bottom of the grid
  std::string out_dir = ".";

  // Scenario knobs; unset values take per-scenario defaults.
  std::optional<double> rho;
  std::optional<NoiseKind> noise;
  std::optional<double> grid_min;
  std::optional<double> grid_step;
  std::optional<std::size_t> grid_size;
  pv::PvParams pv;
  pv::DayProfileShape day;
  VeeSpec vee;
  bool vee_start_set = false;

  /// Apply one `key=value` setting. Keys match the CLI long flags without
  /// dashes (method, steps, lambda, rho-est, ...) plus the photovoltaic
  /// table names (T_r, I_s, ..., R_c). Throws Error(config) on bad input.
  void set(const std::string& key, const std::string& value);

  /// Apply every `key=value` line of a config file; `#` starts a comment.
  void load(std::istream& in);
  void load_file(const std::string& path);

  InputGrid grid() const;
  double resolved_rho() const;
  NoiseKind resolved_noise() const;
  void validate() const;
};

std::string method_label(const ExperimentConfig& cfg);

/// Builds the true-value table for the configured scenario.
Scenario build_scenario(const ExperimentConfig& cfg);

struct MetricsReport {
  std::int64_t perturbation_count = 0;
  double cumulative_objective = 0.0;
};

struct ExperimentResult {
  std::string method;
  std::uint64_t seed = 0;
  std::vector<TrajectoryRecord> records;
  MetricsReport metrics;
};

/// Grid point maximizing sum_k f_k(u) (ties to the smaller index).
GridPoint best_constant_input(const Scenario& scenario);

/// Simulate cfg.steps steps of cfg.method on `scenario` with noise seed `seed`.
ExperimentResult run_experiment(const Scenario& scenario, const ExperimentConfig& cfg,
                                std::uint64_t seed);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

MetricsReport metrics_of(std::span<const TrajectoryRecord> records);

/// (a - b) / b
double improvement(double cumulative, double baseline);

struct SummaryRow {
  std::string method;
  std::uint64_t seed = 0;
  std::int64_t perturbations = 0;
  double cumulative = 0.0;
  double improvement_vs_pando = 0.0;
  double improvement_vs_const = 0.0;
};

struct Comparison {
  std::vector<SummaryRow> rows;
  std::vector<ExperimentResult> runs;  // same order as rows
  GridPoint best_constant;
};

/// Runs every config over the shared seed set [seed, seed + seeds), adding
/// P&O and best-constant baselines when absent. Throws when the configs do
/// not share scenario, steps and seeds.
Comparison compare(std::span<const ExperimentConfig> configs);

void write_trajectory_csv(std::ostream& out, const InputGrid& grid,
                          std::span<const TrajectoryRecord> records);
void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows);

/// Parses a trajectory CSV back into (u value, u_star value, perturbed, f_true) rows.
struct CsvTrajectoryRow {
  std::int64_t k = 0;
  double u = 0.0;
  double y = 0.0;
  double f_true = 0.0;
  double u_star = 0.0;
  bool perturbed = false;
  double cumulative = 0.0;
};
std::vector<CsvTrajectoryRow> read_trajectory_csv(std::istream& in);

}  // namespace upo
