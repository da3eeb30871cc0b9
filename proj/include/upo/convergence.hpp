#pragma once

// Neighborhood bound for perturb and observe on functions with bounded
// slopes, bounded temporal variation and bounded noise, plus synthetic
// V-shaped fixtures and an empirical containment check.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "upo/core_types.hpp"
#include "upo/scenario.hpp"

namespace upo {

/// beta = (L_k + 2 rho) / L_b + 1. P&O on a function whose neighbor
/// differences are at least L_b, whose values move by at most L_k per step
/// and whose noise satisfies |rho eps| <= rho ends up within beta grid steps
/// of the optimum.
double beta_bound(double L_k, double rho, double L_b);

/// Optimum path in grid-index units. The center moves `rate` grid steps per
/// time step and bounces between `lower` and `upper`.
struct VeeDrift {
  double start = 0.0;
  double rate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

/// Common level C_k = base + amplitude * sin(2 pi k / period).
struct VeeLevel {
  double base = 100.0;
  double amplitude = 0.0;
  double period = 100.0;
};

struct VeeSpec {
  double L_b = 1.0;
  double L_k = 0.0;
  double rho = 0.0;
  NoiseKind noise = NoiseKind::truncated_gaussian;
  std::size_t steps = 500;
  VeeDrift drift;
  VeeLevel level;
};

struct SyntheticScenario {
  Scenario scenario;
  double L_b;
  double L_u;
  double L_k;
  double rho;
  std::vector<double> centers;  // c_k for k = 1..steps
};

/// f_k(u^(i)) = C_k - L_b |i - c_k|. Rejects paths whose per-step change
/// L_b |c_{k+1} - c_k| + |C_{k+1} - C_k| can exceed L_k, centers closer
/// than beta to a grid end, and centers that make the maximizer ambiguous.
/// With an integer center every neighbor pair differs by exactly L_b; a
/// fractional center flattens the pair that straddles it.
SyntheticScenario make_vee_scenario(const InputGrid& grid, const VeeSpec& spec);

struct AssumptionScan {
  double min_neighbor_change = 0.0;
  double max_neighbor_change = 0.0;
  double max_temporal_change = 0.0;
  bool unique_optimum = true;
};

/// Direct scan of a scenario table over all k and neighbor pairs.
AssumptionScan scan_assumptions(const Scenario& scenario);

struct Containment {
  std::optional<std::int64_t> first_entry;  // first k with |u_k - u*_k| <= beta
  bool contained = false;                   // every later step also inside
  std::size_t violations = 0;               // steps outside after first entry
};

/// inputs[k-1] is u_k for k = 1..inputs.size().
Containment check_containment(std::span<const GridPoint> inputs, const Scenario& scenario,
                              double beta);
Containment check_containment(std::span<const TrajectoryRecord> trajectory,
                              const Scenario& scenario, double beta);

}  // namespace upo
