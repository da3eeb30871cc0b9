#include "upo/pando.hpp"

#include <cmath>

namespace upo {

PandoState pando_init(GridPoint u_first, double y_first, const InputGrid& grid) {
  if (!grid.contains(u_first)) throw Error(ErrorCode::off_grid, "initial input is off the grid");
  PandoState s;
  s.g = Direction::up;
  s.prev = u_first;
  s.y_prev = y_first;
  s.y_curr = y_first;
  s.curr = grid.step_with_reversal(u_first, s.g);
  s.k = 1;
  return s;
}

PandoStep pando_step(const PandoState& state, double y_new, const InputGrid& grid) {
  if (!std::isfinite(y_new)) throw Error(ErrorCode::invalid_argument, "measurement is not finite");
  PandoState next = state;
  if (y_new < state.y_prev) next.g = reversed(state.g);
  const GridPoint u_next = grid.step_with_reversal(state.curr, next.g);
  next.prev = state.curr;
  next.y_prev = y_new;
  next.y_curr = y_new;
  next.curr = u_next;
  next.k = state.k + 1;
  return {next, u_next};
}

}  // namespace upo
