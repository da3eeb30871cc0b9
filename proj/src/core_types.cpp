#include "upo/core_types.hpp"

#include <cmath>

#include <fmt/core.h>

namespace upo {

InputGrid::InputGrid(double u_min, double delta_u, std::size_t n_u)
    : u_min_(u_min), delta_u_(delta_u), n_u_(n_u) {
  if (!std::isfinite(u_min) || !std::isfinite(delta_u) || delta_u <= 0.0) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("grid spacing must be finite and positive (got {})", delta_u));
  }
  if (n_u < 2) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("grid needs at least 2 points (got {})", n_u));
  }
}

double InputGrid::value(GridPoint p) const {
  if (!contains(p)) {
    throw Error(ErrorCode::off_grid,
                fmt::format("grid index {} outside [0, {})", p.index, n_u_));
  }
  return u_min_ + static_cast<double>(p.index) * delta_u_;
}

GridPoint InputGrid::point_at(double u) const {
  const double pos = (u - u_min_) / delta_u_;
  const double rounded = std::round(pos);
  if (!std::isfinite(pos) || rounded < 0.0 ||
      rounded > static_cast<double>(n_u_ - 1) || std::abs(pos - rounded) > 1e-6) {
    throw Error(ErrorCode::off_grid, fmt::format("input {} is not a grid value", u));
  }
  return GridPoint{static_cast<std::size_t>(rounded)};
}

GridPoint InputGrid::nearest(double u) const noexcept {
  const double pos = std::round((u - u_min_) / delta_u_);
  if (!(pos > 0.0)) return bottom();
  if (pos >= static_cast<double>(n_u_ - 1)) return top();
  return GridPoint{static_cast<std::size_t>(pos)};
}

std::optional<GridPoint> InputGrid::shifted(GridPoint p, long offset) const noexcept {
  const long target = static_cast<long>(p.index) + offset;
  if (target < 0 || target >= static_cast<long>(n_u_)) return std::nullopt;
  return GridPoint{static_cast<std::size_t>(target)};
}

GridPoint InputGrid::step_with_reversal(GridPoint p, Direction& g) const noexcept {
  if (auto next = shifted(p, sign(g))) return *next;
  g = reversed(g);
  return *shifted(p, sign(g));
}

NoiseModel::NoiseModel(double rho, NoiseKind kind, std::uint64_t seed)
    : rho_(rho), kind_(kind), seed_(seed), engine_(seed) {
  if (!std::isfinite(rho) || rho < 0.0) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("noise scale must be finite and non-negative (got {})", rho));
  }
}

double NoiseModel::draw() {
  double eps = normal_(engine_);
  if (kind_ == NoiseKind::truncated_gaussian) {
    while (std::abs(eps) > 1.0) eps = normal_(engine_);
  }
  return eps;
}

double measure(double f_value, NoiseModel& noise) {
  return f_value + noise.rho() * noise.draw();
}

}  // namespace upo
