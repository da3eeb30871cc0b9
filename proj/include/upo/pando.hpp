#pragma once

#include <cstdint>

#include "upo/core_types.hpp"

namespace upo {

/// Classic perturb-and-observe. `prev` and `y_prev` are the previous input and
/// its measurement; `curr` is the input currently applied.
struct PandoState {
  Direction g = Direction::up;
  GridPoint prev;
  GridPoint curr;
  double y_prev = 0.0;
  double y_curr = 0.0;
  std::int64_t k = 1;
};

struct PandoStep {
  PandoState state;
  GridPoint next;
};

/// First step after measuring y_first at u_first: move one step up, or one
/// step down when u_first is the top grid point.
PandoState pando_init(GridPoint u_first, double y_first, const InputGrid& grid);

/// Consume the measurement at state.curr. Keeps the direction when
/// y_new >= y_prev, reverses it otherwise, and steps one grid unit
/// (reversing at the grid ends).
PandoStep pando_step(const PandoState& state, double y_new, const InputGrid& grid);

}  // namespace upo
