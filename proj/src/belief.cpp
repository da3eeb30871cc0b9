#include "upo/belief.hpp"

#include <cmath>
#include <ostream>

#include <fmt/core.h>

namespace upo {

namespace {

void validate_parameters(double forgetting, double rho_est) {
  if (!(forgetting > 0.0 && forgetting <= 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("forgetting factor must lie in (0, 1] (got {})", forgetting));
  }
  if (!(rho_est > 0.0) || !std::isfinite(rho_est)) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("noise estimate must be finite and positive (got {})", rho_est));
  }
}

// Prior is the estimate at k-1; y is the measurement at k. An infinite
// decayed prior gives K = 1 and the limiting posterior variance rho_hat^2.
PointBelief fold_measurement(PointBelief prior, double y, double forgetting, double rho_est) {
  const double decayed = prior.variance / (forgetting * forgetting);
  const double k_gain = gain(prior.variance, forgetting, rho_est);
  PointBelief post;
  post.mean = prior.mean + k_gain * (y - prior.mean);
  if (std::isinf(decayed)) {
    post.variance = rho_est * rho_est;
  } else {
    const double keep = 1.0 - k_gain;
    post.variance = keep * keep * decayed + rho_est * rho_est * k_gain * k_gain;
  }
  return post;
}

}  // namespace

BeliefState::BeliefState(std::size_t n_u, double forgetting, double rho_est)
    : points_(n_u), forgetting_(forgetting), rho_est_(rho_est) {
  validate_parameters(forgetting, rho_est);
  if (n_u == 0) throw Error(ErrorCode::invalid_argument, "belief needs at least one point");
}

BeliefState BeliefState::from_points(std::vector<std::optional<PointBelief>> points,
                                     double forgetting, double rho_est, std::int64_t k) {
  BeliefState s(points.size(), forgetting, rho_est);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] && !(points[i]->variance > 0.0)) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("variance at index {} must be positive (got {})", i, points[i]->variance));
    }
  }
  s.points_ = std::move(points);
  s.k_ = k;
  return s;
}

void BeliefState::check_point(GridPoint u) const {
  if (u.index >= points_.size()) {
    throw Error(ErrorCode::off_grid,
                fmt::format("grid index {} outside belief of size {}", u.index, points_.size()));
  }
}

bool BeliefState::measured(GridPoint u) const {
  check_point(u);
  return points_[u.index].has_value();
}

std::size_t BeliefState::measured_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : points_) n += p.has_value() ? 1 : 0;
  return n;
}

PointBelief BeliefState::at(GridPoint u) const {
  check_point(u);
  if (!points_[u.index]) {
    throw Error(ErrorCode::unmeasured_point,
                fmt::format("grid index {} has not been measured", u.index));
  }
  return *points_[u.index];
}

std::optional<PointBelief> BeliefState::find(GridPoint u) const {
  check_point(u);
  return points_[u.index];
}

double gain(double variance_prior, double forgetting, double rho_est) {
  if (!(variance_prior > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("prior variance must be positive (got {})", variance_prior));
  }
  const double decayed = variance_prior / (forgetting * forgetting);
  if (std::isinf(decayed)) return 1.0;
  return decayed / (decayed + rho_est * rho_est);
}

BeliefState advance_and_update(const BeliefState& state, GridPoint u_next, double y_next) {
  state.check_point(u_next);
  BeliefState next = state;
  const double decay = 1.0 / (state.forgetting_ * state.forgetting_);
  for (std::size_t i = 0; i < next.points_.size(); ++i) {
    auto& p = next.points_[i];
    if (i == u_next.index) {
      if (p) {
        *p = fold_measurement(*p, y_next, state.forgetting_, state.rho_est_);
      } else {
        p = PointBelief{y_next, state.rho_est_ * state.rho_est_};
      }
    } else if (p) {
      p->variance *= decay;
    }
  }
  ++next.k_;
  return next;
}

PointBelief predict_one_step(const BeliefState& state, GridPoint u) {
  const PointBelief now = state.at(u);
  return {now.mean, now.variance / (state.forgetting() * state.forgetting())};
}

PointBelief batch_estimate(std::span<const Measurement> history, double forgetting,
                           double rho_est, std::int64_t k) {
  validate_parameters(forgetting, rho_est);
  if (history.empty()) {
    throw Error(ErrorCode::unmeasured_point, "unmeasured point: empty measurement history");
  }
  const GridPoint u = history.front().u;
  double weight_sum = 0.0;
  double weighted_y = 0.0;
  for (const Measurement& m : history) {
    if (m.u != u) {
      throw Error(ErrorCode::invalid_argument, "batch history mixes grid points");
    }
    if (m.k > k) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("measurement at time {} is after estimate time {}", m.k, k));
    }
    const double w = std::pow(forgetting, 2.0 * static_cast<double>(k - m.k));
    weight_sum += w;
    weighted_y += w * m.y;
  }
  return {weighted_y / weight_sum, rho_est * rho_est / weight_sum};
}

void write_belief_csv(std::ostream& out, const BeliefState& state) {
  out << "index,mean,variance,measured\n";
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto p = state.find(GridPoint{i});
    if (p) {
      out << fmt::format("{},{:.17g},{:.17g},1\n", i, p->mean, p->variance);
    } else {
      out << fmt::format("{},,,0\n", i);
    }
  }
}

}  // namespace upo
