#include "upo/controller.hpp"

#include <cmath>

#include <fmt/core.h>

namespace upo {

void UpoConfig::validate() const {
  if (!(forgetting > 0.0 && forgetting <= 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("forgetting factor must lie in (0, 1] (got {})", forgetting));
  }
  if (!(rho_est > 0.0) || !std::isfinite(rho_est)) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("noise estimate must be finite and positive (got {})", rho_est));
  }
  planner.validate();
}

UpoState upo_init(GridPoint u_first, double y_first, const InputGrid& grid, const UpoConfig& cfg) {
  cfg.validate();
  if (!grid.contains(u_first)) throw Error(ErrorCode::off_grid, "initial input is off the grid");
  if (!std::isfinite(y_first)) throw Error(ErrorCode::invalid_argument, "measurement is not finite");
  BeliefState belief(grid.size(), cfg.forgetting, cfg.rho_est);
  belief = advance_and_update(belief, u_first, y_first);

  Direction g = Direction::up;
  const GridPoint second = grid.step_with_reversal(u_first, g);
  return UpoState{std::move(belief), u_first, second, u_first, g, 1};
}

UpoStep upo_step(const UpoState& state, double y, const InputGrid& grid, const UpoConfig& cfg,
                 const QuadratureRule& rule) {
  if (!std::isfinite(y)) {
    throw Error(ErrorCode::invalid_argument, fmt::format("measurement at step {} is not finite", state.k + 1));
  }
  UpoState next = state;
  next.belief = advance_and_update(state.belief, state.curr, y);

  const double mean_curr = next.belief.at(state.curr).mean;
  const double mean_anchor = next.belief.at(state.anchor).mean;
  const Direction travel = state.curr.index > state.anchor.index ? Direction::up : Direction::down;
  next.g = mean_curr >= mean_anchor ? travel : reversed(travel);

  GridPoint chosen;
  UpoBranch branch;
  if (mean_curr <= mean_anchor) {
    chosen = state.anchor;
    branch = UpoBranch::return_previous;
  } else if (auto forward = grid.shifted(state.curr, sign(next.g));
             forward && !next.belief.measured(*forward)) {
    chosen = *forward;
    branch = UpoBranch::explore_forward;
  } else {
    chosen = select_input(next.belief, grid, state.curr, next.g, cfg.planner, rule);
    branch = UpoBranch::planner;
  }

  next.prev = state.curr;
  if (chosen != state.curr) next.anchor = state.curr;
  next.curr = chosen;
  next.k = state.k + 1;
  return {std::move(next), chosen, branch};
}

}  // namespace upo
