#pragma once

// Shared domain types: the admissible input grid, grid points, search
// directions, the seeded measurement-noise model and per-step trajectory
// records.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

namespace upo {

enum class ErrorCode : int {
  invalid_argument = 1,
  unmeasured_point = 2,
  off_grid = 3,
  non_convergence = 4,
  io = 5,
  config = 6,
  infeasible = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Zero-based index into an InputGrid. Inputs are handled by index
/// everywhere inside the library; real values only appear at I/O edges.
struct GridPoint {
  std::size_t index = 0;

  friend constexpr auto operator<=>(GridPoint, GridPoint) = default;
};

enum class Direction : int { down = -1, up = 1 };

constexpr Direction reversed(Direction d) noexcept {
  return d == Direction::up ? Direction::down : Direction::up;
}

constexpr int sign(Direction d) noexcept { return static_cast<int>(d); }

/// Equidistant input set {u_min, u_min + delta_u, ..., u_min + (n_u-1) delta_u}.
class InputGrid {
 public:
  InputGrid(double u_min, double delta_u, std::size_t n_u);

  double u_min() const noexcept { return u_min_; }
  double delta_u() const noexcept { return delta_u_; }
  std::size_t size() const noexcept { return n_u_; }

  GridPoint bottom() const noexcept { return GridPoint{0}; }
  GridPoint top() const noexcept { return GridPoint{n_u_ - 1}; }
  bool contains(GridPoint p) const noexcept { return p.index < n_u_; }

  /// Real input value of a grid point. Throws off_grid for an invalid index.
  double value(GridPoint p) const;

  /// Grid point whose value equals u to within a small fraction of delta_u.
  /// Throws off_grid when u is not a grid value.
  GridPoint point_at(double u) const;

  /// Grid point closest to u, clamped to the grid ends.
  GridPoint nearest(double u) const noexcept;

  /// p shifted by `offset` grid steps, or nullopt when that leaves the grid.
  std::optional<GridPoint> shifted(GridPoint p, long offset) const noexcept;

  /// One step from p in direction g. At a grid end the direction is reversed
  /// (g is updated in place) so the result is always a neighbor of p.
  GridPoint step_with_reversal(GridPoint p, Direction& g) const noexcept;

 private:
  double u_min_;
  double delta_u_;
  std::size_t n_u_;
};

enum class NoiseKind { gaussian, truncated_gaussian };

/// Seeded source of measurement noise rho * eps. Truncated draws are
/// rejection-sampled so that |eps| <= 1 before scaling.
class NoiseModel {
 public:
  NoiseModel(double rho, NoiseKind kind, std::uint64_t seed);

  double rho() const noexcept { return rho_; }
  NoiseKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// Next standard (unscaled) draw.
  double draw();

 private:
  double rho_;
  NoiseKind kind_;
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// y = f + rho * eps with eps drawn from the configured distribution.
double measure(double f_value, NoiseModel& noise);

struct Measurement {
  std::int64_t k = 0;
  GridPoint u;
  double y = 0.0;
};

struct TrajectoryRecord {
  std::int64_t k = 0;
  GridPoint u;
  double y = 0.0;
  double f_true = 0.0;
  GridPoint u_star;
  bool perturbed = false;
  double cumulative_objective = 0.0;
};

}  // namespace upo
