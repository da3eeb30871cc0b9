#pragma once

// Uncertainty-based perturb and observe: P&O direction tracking on the
// belief means, with the lookahead planner deciding whether a perturbation
// is worth it once the neighborhood has been explored.

#include <cstdint>

#include "upo/belief.hpp"
#include "upo/core_types.hpp"
#include "upo/planner.hpp"
#include "upo/quadrature.hpp"

namespace upo {

struct UpoConfig {
  double forgetting = 0.88;
  double rho_est = 5.0;
  PlannerConfig planner;

  void validate() const;
};

struct UpoState {
  BeliefState belief;
  GridPoint prev;    // input applied one step ago
  GridPoint curr;    // input currently applied
  GridPoint anchor;  // most recent input different from curr
  Direction g = Direction::up;
  std::int64_t k = 1;
};

enum class UpoBranch { return_previous, explore_forward, planner };

struct UpoStep {
  UpoState state;
  GridPoint next;
  UpoBranch branch;
};

/// Fold y_first at u_first into an empty belief and step to the upper
/// neighbor (lower neighbor at the top of the grid).
UpoState upo_init(GridPoint u_first, double y_first, const InputGrid& grid, const UpoConfig& cfg);

/// Consume the measurement y at state.curr and choose the next input:
///  1. mean(curr) <= mean(anchor): return to anchor;
///  2. else if curr + g is on the grid and unmeasured: explore it;
///  3. else: lookahead planner.
/// g is the direction of travel from anchor to curr, reversed when the
/// belief mean at curr does not exceed the one at anchor.
UpoStep upo_step(const UpoState& state, double y, const InputGrid& grid, const UpoConfig& cfg,
                 const QuadratureRule& rule);

}  // namespace upo
