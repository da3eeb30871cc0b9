#include "upo/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/core.h>

namespace upo {

double beta_bound(double L_k, double rho, double L_b) {
  if (!(L_b > 0.0)) {
    throw Error(ErrorCode::invalid_argument, fmt::format("L_b must be positive (got {})", L_b));
  }
  return (L_k + 2.0 * rho) / L_b + 1.0;
}

SyntheticScenario make_vee_scenario(const InputGrid& grid, const VeeSpec& spec) {
  if (!(spec.L_b > 0.0) || !(spec.L_k >= 0.0) || !(spec.rho >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "V scenario needs L_b > 0, L_k >= 0, rho >= 0");
  }
  if (spec.steps == 0) throw Error(ErrorCode::invalid_argument, "V scenario needs at least one step");
  const VeeDrift& d = spec.drift;
  const VeeLevel& lv = spec.level;
  if (!(d.rate >= 0.0) || !(lv.amplitude >= 0.0) || !(lv.period > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "V scenario drift rate, level amplitude and period must be non-negative");
  }
  if (d.rate > 0.0 && !(d.upper > d.lower)) {
    throw Error(ErrorCode::invalid_argument, "drifting V scenario needs lower < upper");
  }

  const double level_step = 2.0 * lv.amplitude * std::abs(std::sin(std::numbers::pi / lv.period));
  const double per_step = spec.L_b * d.rate + level_step;
  if (per_step > spec.L_k * (1.0 + 1e-12) + 1e-15) {
    throw Error(ErrorCode::infeasible,
                fmt::format("drift too fast: per-step change {} exceeds L_k = {}", per_step, spec.L_k));
  }

  const double beta = beta_bound(spec.L_k, spec.rho, spec.L_b);
  const double top = static_cast<double>(grid.size() - 1);
  const double lo = d.rate > 0.0 ? d.lower : d.start;
  const double hi = d.rate > 0.0 ? d.upper : d.start;
  if (d.start < lo || d.start > hi) {
    throw Error(ErrorCode::invalid_argument, "drift start lies outside [lower, upper]");
  }
  if (lo < beta || hi > top - beta) {
    throw Error(ErrorCode::infeasible,
                fmt::format("optimum path [{}, {}] comes closer than beta = {} to the grid ends [0, {}]",
                            lo, hi, beta, top));
  }

  std::vector<double> centers(spec.steps);
  std::vector<std::vector<double>> values(spec.steps, std::vector<double>(grid.size()));
  double c = d.start;
  double dir = 1.0;
  for (std::size_t k = 1; k <= spec.steps; ++k) {
    if (k > 1 && d.rate > 0.0) {
      c += dir * d.rate;
      if (c > d.upper) { c = 2.0 * d.upper - c; dir = -dir; }
      if (c < d.lower) { c = 2.0 * d.lower - c; dir = -dir; }
    }
    const double frac = c - std::floor(c);
    if (std::abs(frac - 0.5) < 1e-9) {
      throw Error(ErrorCode::infeasible,
                  fmt::format("optimum at k={} is ambiguous (center {} is halfway between grid points)", k, c));
    }
    centers[k - 1] = c;
    const double level =
        lv.base + lv.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(k) / lv.period);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      values[k - 1][i] = level - spec.L_b * std::abs(static_cast<double>(i) - c);
    }
  }

  return SyntheticScenario{Scenario(grid, std::move(values), spec.rho, spec.noise),
                           spec.L_b, spec.L_b, spec.L_k, spec.rho, std::move(centers)};
}

AssumptionScan scan_assumptions(const Scenario& scenario) {
  AssumptionScan scan;
  scan.min_neighbor_change = std::numeric_limits<double>::infinity();
  const auto& grid = scenario.grid();
  const auto steps = static_cast<std::int64_t>(scenario.steps());
  for (std::int64_t k = 1; k <= steps; ++k) {
    double best = -std::numeric_limits<double>::infinity();
    int best_count = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double f = scenario.value(k, GridPoint{i});
      if (f > best) { best = f; best_count = 1; }
      else if (f == best) ++best_count;
      if (i + 1 < grid.size()) {
        const double diff = std::abs(scenario.value(k, GridPoint{i + 1}) - f);
        scan.min_neighbor_change = std::min(scan.min_neighbor_change, diff);
        scan.max_neighbor_change = std::max(scan.max_neighbor_change, diff);
      }
      if (k < steps) {
        scan.max_temporal_change =
            std::max(scan.max_temporal_change, std::abs(scenario.value(k + 1, GridPoint{i}) - f));
      }
    }
    if (best_count != 1) scan.unique_optimum = false;
  }
  return scan;
}

Containment check_containment(std::span<const GridPoint> inputs, const Scenario& scenario,
                              double beta) {
  if (inputs.size() > scenario.steps()) {
    throw Error(ErrorCode::invalid_argument, "trajectory is longer than the scenario");
  }
  Containment result;
  for (std::size_t idx = 0; idx < inputs.size(); ++idx) {
    const auto k = static_cast<std::int64_t>(idx + 1);
    const double dist = std::abs(static_cast<double>(inputs[idx].index) -
                                 static_cast<double>(scenario.optimum(k).index));
    const bool inside = dist <= beta;
    if (!result.first_entry) {
      if (inside) result.first_entry = k;
    } else if (!inside) {
      ++result.violations;
    }
  }
  result.contained = result.first_entry.has_value() && result.violations == 0;
  return result;
}

Containment check_containment(std::span<const TrajectoryRecord> trajectory,
                              const Scenario& scenario, double beta) {
  std::vector<GridPoint> inputs;
  inputs.reserve(trajectory.size());
  for (const auto& r : trajectory) inputs.push_back(r.u);
  return check_containment(inputs, scenario, beta);
}

}  // namespace upo
