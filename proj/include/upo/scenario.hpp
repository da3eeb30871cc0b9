#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "upo/core_types.hpp"

namespace upo {

/// Time-varying plant as a table of true values f_k(u) for k = 1..steps,
/// plus the noise that corrupts its measurements.
class Scenario {
 public:
  /// values[k-1][i] = f_k(u^(i)).
  Scenario(InputGrid grid, std::vector<std::vector<double>> values, double rho, NoiseKind noise);

  const InputGrid& grid() const noexcept { return grid_; }
  std::size_t steps() const noexcept { return values_.size(); }
  double rho() const noexcept { return rho_; }
  NoiseKind noise_kind() const noexcept { return noise_; }

  /// f_k(u) for k in [1, steps].
  double value(std::int64_t k, GridPoint u) const;

  /// Exhaustive-scan maximizer at time k; ties resolve to the smaller index.
  GridPoint optimum(std::int64_t k) const;

  /// sum_k f_k(u) over the whole horizon.
  double cumulative(GridPoint u) const;

 private:
  InputGrid grid_;
  std::vector<std::vector<double>> values_;
  std::vector<GridPoint> optimum_;
  double rho_;
  NoiseKind noise_;
};

}  // namespace upo
