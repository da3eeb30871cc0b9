#include "upo/planner.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include <fmt/core.h>

namespace upo {

void PlannerConfig::validate() const {
  if (horizon < 1) {
    throw Error(ErrorCode::invalid_argument, fmt::format("horizon must be >= 1 (got {})", horizon));
  }
  if (quad_points < 1 || quad_points > kMaxQuadraturePoints) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("quadrature points must lie in [1, {}] (got {})",
                            kMaxQuadraturePoints, quad_points));
  }
  if (!(weight >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, fmt::format("weight must be >= 0 (got {})", weight));
  }
}

BeliefState hypothetical_next_state(const BeliefState& state, GridPoint u_next, double node) {
  const PointBelief prior = state.at(u_next);
  const double lambda2 = state.forgetting_ * state.forgetting_;
  const double rho2 = state.rho_est_ * state.rho_est_;
  const double decayed = prior.variance / lambda2;
  const double k_gain = gain(prior.variance, state.forgetting_, state.rho_est_);

  BeliefState next = state;
  for (std::size_t i = 0; i < next.points_.size(); ++i) {
    auto& p = next.points_[i];
    if (!p) continue;
    if (i != u_next.index) {
      p->variance /= lambda2;
      continue;
    }
    if (std::isinf(decayed)) {
      // Infinite predicted spread: the shift is unbounded except at node 0.
      if (node != 0.0) p->mean = std::copysign(std::numeric_limits<double>::infinity(), node);
      p->variance = rho2;
    } else {
      p->mean += k_gain * std::sqrt(decayed + rho2) * node;
      const double keep = 1.0 - k_gain;
      p->variance = keep * keep * decayed + rho2 * k_gain * k_gain;
    }
  }
  ++next.k_;
  return next;
}

namespace {

double best_mean(const BeliefState& state) {
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (const auto p = state.find(GridPoint{i})) {
      any = true;
      if (p->mean > best) best = p->mean;
    }
  }
  if (!any) throw Error(ErrorCode::unmeasured_point, "belief has no measured points");
  return best;
}

// mean(u) plus the expected value of the remaining steps after measuring u.
double candidate_value(const BeliefState& state, GridPoint u, int steps_remaining,
                       const QuadratureRule& rule) {
  const double mean = state.at(u).mean;
  if (steps_remaining <= 1) return mean;
  return mean + expect(rule, [&](double node) {
           return value(hypothetical_next_state(state, u, node), steps_remaining - 1, rule);
         });
}

}  // namespace

double value(const BeliefState& state, int steps_remaining, const QuadratureRule& rule) {
  if (steps_remaining < 1) {
    throw Error(ErrorCode::invalid_argument, "steps_remaining must be >= 1");
  }
  if (steps_remaining == 1) return best_mean(state);
  double best = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!state.measured(GridPoint{i})) continue;
    any = true;
    const double v = candidate_value(state, GridPoint{i}, steps_remaining, rule);
    if (v > best) best = v;
  }
  if (!any) throw Error(ErrorCode::unmeasured_point, "belief has no measured points");
  return best;
}

GridPoint perturb_slot(const InputGrid& grid, GridPoint current, Direction g) {
  return grid.step_with_reversal(current, g);
}

Selection score_candidates(const BeliefState& state, const InputGrid& grid, GridPoint current,
                           Direction g, const PlannerConfig& cfg, const QuadratureRule& rule) {
  cfg.validate();
  if (state.size() != grid.size()) {
    throw Error(ErrorCode::invalid_argument, "belief and grid sizes differ");
  }
  const GridPoint slot = perturb_slot(grid, current, g);

  Selection sel;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const GridPoint u{i};
    if (!state.measured(u)) continue;
    double score = candidate_value(state, u, cfg.horizon, rule);
    if (u != slot) score -= cfg.weight;
    sel.scores.push_back({u, score});
  }
  if (sel.scores.empty()) {
    throw Error(ErrorCode::unmeasured_point, "no measured candidate inputs");
  }

  auto distance = [&](GridPoint u) {
    return std::labs(static_cast<long>(u.index) - static_cast<long>(current.index));
  };
  // Strictly-better-or-tie-break ordering; NaN scores never win.
  auto better = [&](const CandidateScore& a, const CandidateScore& b) {
    if (a.score > b.score) return true;
    if (a.score < b.score || std::isnan(a.score)) return false;
    if (std::isnan(b.score)) return true;
    if ((a.point == slot) != (b.point == slot)) return a.point == slot;
    if (distance(a.point) != distance(b.point)) return distance(a.point) < distance(b.point);
    return a.point.index < b.point.index;
  };
  const CandidateScore* best = &sel.scores.front();
  for (const auto& c : sel.scores) {
    if (better(c, *best)) best = &c;
  }
  sel.chosen = best->point;
  return sel;
}

GridPoint select_input(const BeliefState& state, const InputGrid& grid, GridPoint current,
                       Direction g, const PlannerConfig& cfg, const QuadratureRule& rule) {
  return score_candidates(state, grid, current, g, cfg, rule).chosen;
}

}  // namespace upo
