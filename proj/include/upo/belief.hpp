#pragma once

// Gaussian belief over the current function value at every grid point,
// with exponential forgetting of older measurements.
//
// For a point measured at times j in J, the current-time estimate is
//   mean     = sum_j lambda^{2(k-j)} y_j / sum_j lambda^{2(k-j)}
//   variance = rho_hat^2 / sum_j lambda^{2(k-j)}
// The runtime representation is the equivalent recursion (advance_and_update);
// batch_estimate evaluates the sums directly and serves as its reference.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "upo/core_types.hpp"

namespace upo {

struct PointBelief {
  double mean = 0.0;
  double variance = 0.0;
};

class BeliefState {
 public:
  /// Empty belief at time 0: every point unmeasured.
  BeliefState(std::size_t n_u, double forgetting, double rho_est);

  /// Belief with explicit per-point estimates at time k (nullopt = unmeasured).
  /// Variances must be positive.
  static BeliefState from_points(std::vector<std::optional<PointBelief>> points, double forgetting,
                                 double rho_est, std::int64_t k = 0);

  std::size_t size() const noexcept { return points_.size(); }
  double forgetting() const noexcept { return forgetting_; }
  double rho_est() const noexcept { return rho_est_; }
  std::int64_t time() const noexcept { return k_; }

  bool measured(GridPoint u) const;
  std::size_t measured_count() const noexcept;

  /// Current estimate at u. Throws unmeasured_point if u was never visited.
  PointBelief at(GridPoint u) const;
  std::optional<PointBelief> find(GridPoint u) const;

 private:
  friend BeliefState advance_and_update(const BeliefState&, GridPoint, double);
  friend BeliefState hypothetical_next_state(const BeliefState&, GridPoint, double);

  void check_point(GridPoint u) const;

  std::vector<std::optional<PointBelief>> points_;
  double forgetting_;
  double rho_est_;
  std::int64_t k_ = 0;
};

/// Blend weight between the time-decayed prior and a new measurement,
///   K = (sigma / lambda^2) / (sigma / lambda^2 + rho_hat^2).
double gain(double variance_prior, double forgetting, double rho_est);

/// Advance the belief one time step and fold in y at u_next. Every other
/// point keeps its mean and its variance grows by 1 / lambda^2.
BeliefState advance_and_update(const BeliefState& state, GridPoint u_next, double y_next);

/// One-step-ahead prediction (mean, variance / lambda^2) at a measured point.
PointBelief predict_one_step(const BeliefState& state, GridPoint u);

/// Direct evaluation of the forgetting-weighted sums for a single grid point.
/// All measurements must share one grid point and have time index <= k.
PointBelief batch_estimate(std::span<const Measurement> history, double forgetting,
                           double rho_est, std::int64_t k);

/// Debug snapshot: header `index,mean,variance,measured`, one row per point.
void write_belief_csv(std::ostream& out, const BeliefState& state);

}  // namespace upo
