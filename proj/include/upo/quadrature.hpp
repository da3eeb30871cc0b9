#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace upo {

/// Nodes and positive weights approximating E[g(eps)] for standard normal eps.
class QuadratureRule {
 public:
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights);

  std::span<const double> nodes() const noexcept { return nodes_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

inline constexpr int kMaxQuadraturePoints = 64;
inline constexpr int kDefaultQuadraturePoints = 5;

/// Probabilists' Gauss-Hermite rule with `points` nodes (1..64), exact for
/// polynomials of degree <= 2 * points - 1 under the standard normal density.
QuadratureRule gauss_hermite(int points);

/// sum_i w_i g(v_i)
template <class F>
double expect(const QuadratureRule& rule, F&& g) {
  const auto v = rule.nodes();
  const auto w = rule.weights();
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) total += w[i] * g(v[i]);
  return total;
}

}  // namespace upo
