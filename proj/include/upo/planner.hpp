#pragma once

// Lookahead input selection: expected cumulative function value over a
// p-step horizon, with future beliefs propagated through hypothetical
// measurements and expectations taken by Gauss-Hermite quadrature.

#include <vector>

#include "upo/belief.hpp"
#include "upo/core_types.hpp"
#include "upo/quadrature.hpp"

namespace upo {

struct PlannerConfig {
  int horizon = 2;
  int quad_points = kDefaultQuadraturePoints;
  /// Penalty subtracted from every candidate other than the P&O-direction input.
  double weight = 0.0;

  void validate() const;
};

/// Belief after a synthetic measurement at u_next, drawn at standard-normal
/// abscissa `node` from the predicted measurement distribution
///   y_hat = mean + sqrt(variance / lambda^2 + rho_hat^2) * node.
BeliefState hypothetical_next_state(const BeliefState& state, GridPoint u_next, double node);

/// Expected sum of the best attainable means over `steps_remaining` steps.
/// steps_remaining == 1 is the terminal max over measured means.
double value(const BeliefState& state, int steps_remaining, const QuadratureRule& rule);

/// The penalty-free candidate: one step from `current` along g, reversed at
/// the grid ends.
GridPoint perturb_slot(const InputGrid& grid, GridPoint current, Direction g);

struct CandidateScore {
  GridPoint point;
  double score = 0.0;
};

struct Selection {
  GridPoint chosen;
  std::vector<CandidateScore> scores;  // every measured point, index order
};

/// Scores every measured grid point and picks the best. Ties prefer the
/// P&O-direction slot, then the candidate closest to `current`, then the
/// smaller index.
Selection score_candidates(const BeliefState& state, const InputGrid& grid, GridPoint current,
                           Direction g, const PlannerConfig& cfg, const QuadratureRule& rule);

GridPoint select_input(const BeliefState& state, const InputGrid& grid, GridPoint current,
                       Direction g, const PlannerConfig& cfg, const QuadratureRule& rule);

}  // namespace upo
