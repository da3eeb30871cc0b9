#include "upo/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/core.h>

#include "upo/core_types.hpp"

namespace upo {

namespace {

// Orthonormal probabilists' Hermite recurrence:
//   p_0 = 1, p_1 = x, p_{j+1} = (x p_j - sqrt(j) p_{j-1}) / sqrt(j + 1).
// Returns p_n(x), p_n'(x) and sum_{j<n} p_j(x)^2 (the inverse Christoffel weight).
struct Recurrence {
  long double value;
  long double derivative;
  long double christoffel_sum;
};

Recurrence evaluate(int n, long double x) {
  long double p_prev = 0.0L;
  long double p = 1.0L;
  long double d_prev = 0.0L;
  long double d = 0.0L;
  long double sum = 0.0L;
  for (int j = 0; j < n; ++j) {
    sum += p * p;
    const long double a = std::sqrt(static_cast<long double>(j + 1));
    const long double b = std::sqrt(static_cast<long double>(j));
    const long double p_next = (x * p - b * p_prev) / a;
    const long double d_next = (p + x * d - b * d_prev) / a;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d, sum};
}

}  // namespace

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> weights)
    : nodes_(std::move(nodes)), weights_(std::move(weights)) {
  if (nodes_.empty() || nodes_.size() != weights_.size()) {
    throw Error(ErrorCode::invalid_argument, "quadrature rule needs matching, non-empty nodes and weights");
  }
  for (double w : weights_) {
    if (!(w > 0.0)) throw Error(ErrorCode::invalid_argument, "quadrature weights must be positive");
  }
}

QuadratureRule gauss_hermite(int points) {
  if (points < 1 || points > kMaxQuadraturePoints) {
    throw Error(ErrorCode::invalid_argument,
                fmt::format("quadrature points must lie in [1, {}] (got {})",
                            kMaxQuadraturePoints, points));
  }
  const auto n = static_cast<Eigen::Index>(points);

  // Golub-Welsch: nodes are the eigenvalues of the symmetric Jacobi matrix.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 1; j < n; ++j) {
    const double off = std::sqrt(static_cast<double>(j));
    jacobi(j, j - 1) = off;
    jacobi(j - 1, j) = off;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd eig = solver.eigenvalues();

  // Polish on the positive half and mirror, so the rule is exactly symmetric.
  std::vector<double> nodes(static_cast<std::size_t>(points));
  std::vector<double> weights(static_cast<std::size_t>(points));
  const int half = points / 2;
  for (int i = 0; i < half; ++i) {
    long double x = std::abs(eig(n - 1 - i));
    for (int it = 0; it < 8; ++it) {
      const Recurrence r = evaluate(points, x);
      if (r.derivative == 0.0L) break;
      const long double dx = r.value / r.derivative;
      x -= dx;
      if (std::abs(dx) <= 1e-18L * std::max(1.0L, std::abs(x))) break;
    }
    const double w = static_cast<double>(1.0L / evaluate(points, x).christoffel_sum);
    const auto hi = static_cast<std::size_t>(points - 1 - i);
    const auto lo = static_cast<std::size_t>(i);
    nodes[hi] = static_cast<double>(x);
    nodes[lo] = -static_cast<double>(x);
    weights[hi] = w;
    weights[lo] = w;
  }
  if (points % 2 == 1) {
    const auto mid = static_cast<std::size_t>(half);
    nodes[mid] = 0.0;
    weights[mid] = static_cast<double>(1.0L / evaluate(points, 0.0L).christoffel_sum);
  }
  return QuadratureRule(std::move(nodes), std::move(weights));
}

}  // namespace upo
