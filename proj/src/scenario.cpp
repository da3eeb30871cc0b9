#include "upo/scenario.hpp"

#include <cmath>

#include <fmt/core.h>

namespace upo {

Scenario::Scenario(InputGrid grid, std::vector<std::vector<double>> values, double rho,
                   NoiseKind noise)
    : grid_(grid), values_(std::move(values)), rho_(rho), noise_(noise) {
  if (values_.empty()) throw Error(ErrorCode::invalid_argument, "scenario has no time steps");
  if (!(rho_ >= 0.0) || !std::isfinite(rho_)) {
    throw Error(ErrorCode::invalid_argument, "scenario noise scale must be >= 0");
  }
  optimum_.reserve(values_.size());
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const auto& row = values_[k];
    if (row.size() != grid_.size()) {
      throw Error(ErrorCode::invalid_argument,
                  fmt::format("scenario row {} has {} values, grid has {}", k + 1, row.size(), grid_.size()));
    }
    std::size_t best = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!std::isfinite(row[i])) {
        throw Error(ErrorCode::invalid_argument, fmt::format("scenario value at k={} i={} is not finite", k + 1, i));
      }
      if (row[i] > row[best]) best = i;
    }
    optimum_.push_back(GridPoint{best});
  }
}

double Scenario::value(std::int64_t k, GridPoint u) const {
  if (k < 1 || k > static_cast<std::int64_t>(values_.size())) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("time index {} outside scenario horizon [1, {}]", k, values_.size()));
  }
  if (!grid_.contains(u)) throw Error(ErrorCode::off_grid, "scenario queried off the grid");
  return values_[static_cast<std::size_t>(k - 1)][u.index];
}

GridPoint Scenario::optimum(std::int64_t k) const {
  if (k < 1 || k > static_cast<std::int64_t>(values_.size())) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("time index {} outside scenario horizon [1, {}]", k, values_.size()));
  }
  return optimum_[static_cast<std::size_t>(k - 1)];
}

double Scenario::cumulative(GridPoint u) const {
  if (!grid_.contains(u)) throw Error(ErrorCode::off_grid, "scenario queried off the grid");
  double total = 0.0;
  for (const auto& row : values_) total += row[u.index];
  return total;
}

}  // namespace upo
