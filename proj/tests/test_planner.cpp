#include <doctest.h>

#include <cmath>
#include <random>

#include "support/planner_oracle.hpp"
#include "upo/planner.hpp"

using namespace upo;

namespace {

BeliefState make_state(std::vector<double> means, std::vector<double> vars, double lambda, double rho) {
  std::vector<std::optional<PointBelief>> pts;
  for (std::size_t i = 0; i < means.size(); ++i) pts.push_back(PointBelief{means[i], vars[i]});
  return BeliefState::from_points(std::move(pts), lambda, rho);
}

}  // namespace

TEST_CASE("hypothetical state at the zero node") {
  const auto s = make_state({1.0, 2.0}, {4.0, 1.0}, 0.9, 1.0);
  const auto h = hypothetical_next_state(s, GridPoint{0}, 0.0);
  const double K = gain(4.0, 0.9, 1.0);
  CHECK(h.at(GridPoint{0}).mean == 1.0);
  CHECK(h.at(GridPoint{0}).variance == doctest::Approx((1 - K) * (1 - K) * 4.0 / 0.81 + K * K));
  CHECK(h.at(GridPoint{0}).variance < 4.0 / 0.81);
  CHECK(h.at(GridPoint{1}).mean == 2.0);
  CHECK(h.at(GridPoint{1}).variance == doctest::Approx(1.0 / 0.81));
  CHECK(h.time() == s.time() + 1);
}

TEST_CASE("hypothetical shift with K = 1/2") {
  const double rho = 3.0;
  const auto s = make_state({0.0}, {rho * rho}, 1.0, rho);
  const auto h = hypothetical_next_state(s, GridPoint{0}, 1.0);
  CHECK(h.at(GridPoint{0}).mean == doctest::Approx(0.5 * std::sqrt(2.0) * rho));
}

TEST_CASE("hypothetical state equals a real update with the synthetic measurement") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> m(-3, 3), v(0.1, 5), nd(-2, 2);
  for (int t = 0; t < 100; ++t) {
    const double lambda = 0.6 + 0.4 * (t % 5) / 4.0, rho = 1.3;
    const auto s = make_state({m(rng), m(rng), m(rng)}, {v(rng), v(rng), v(rng)}, lambda, rho);
    const GridPoint u{static_cast<std::size_t>(t % 3)};
    const double node = nd(rng);
    const auto p = s.at(u);
    const double y = p.mean + std::sqrt(p.variance / (lambda * lambda) + rho * rho) * node;
    const auto a = hypothetical_next_state(s, u, node);
    const auto b = advance_and_update(s, u, y);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(a.at(GridPoint{i}).mean == doctest::Approx(b.at(GridPoint{i}).mean).epsilon(1e-12));
      CHECK(a.at(GridPoint{i}).variance == doctest::Approx(b.at(GridPoint{i}).variance).epsilon(1e-12));
    }
  }
}

TEST_CASE("hypothetical state at an unmeasured point is an error") {
  const auto s = BeliefState::from_points({PointBelief{1.0, 1.0}, std::nullopt}, 0.9, 1.0);
  CHECK_THROWS_AS(hypothetical_next_state(s, GridPoint{1}, 0.0), Error);
}

TEST_CASE("terminal value is the best mean") {
  const auto s = make_state({2.0, 5.0, 3.0}, {1.0, 1.0, 1.0}, 0.9, 1.0);
  CHECK(value(s, 1, gauss_hermite(3)) == 5.0);
}

TEST_CASE("deterministic limit picks the best mean twice") {
  const auto s = make_state({2.0, 5.0, 3.0}, {1e-30, 1e-30, 1e-30}, 1.0, 1.0);
  CHECK(value(s, 2, gauss_hermite(5)) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("two-step value matches the independent evaluator") {
  const auto s = make_state({1.0, 1.1}, {4.0, 0.01}, 0.9, 1.0);
  CHECK(value(s, 2, gauss_hermite(3)) == doctest::Approx(2.6683312516585067).epsilon(1e-13));

  testing::OracleState o{{1.0, 1.1}, {4.0, 0.01}, {true, true}, 0.9, 1.0};
  CHECK(value(s, 2, gauss_hermite(3)) ==
        doctest::Approx(testing::oracle_value(o, 2, testing::oracle_rule(3))).epsilon(1e-13));
}

TEST_CASE("value needs a measured point and a positive horizon") {
  const BeliefState empty(3, 0.9, 1.0);
  CHECK_THROWS_AS(value(empty, 1, gauss_hermite(3)), Error);
  const auto s = make_state({1.0}, {1.0}, 0.9, 1.0);
  CHECK_THROWS_AS(value(s, 0, gauss_hermite(3)), Error);
}

TEST_CASE("horizon one picks the best mean") {
  const InputGrid grid(0.0, 1.0, 3);
  const auto s = make_state({2.0, 5.0, 3.0}, {1.0, 1.0, 1.0}, 0.88, 5.0);
  const PlannerConfig cfg{1, 5, 0.0};
  CHECK(select_input(s, grid, GridPoint{0}, Direction::up, cfg, gauss_hermite(5)).index == 1);
  CHECK(select_input(s, grid, GridPoint{2}, Direction::down, cfg, gauss_hermite(5)).index == 1);
}

TEST_CASE("a large weight forces the P&O slot") {
  const InputGrid grid(0.0, 1.0, 3);
  const auto s = make_state({2.0, 5.0, 3.0}, {1.0, 1.0, 1.0}, 0.88, 5.0);
  const PlannerConfig cfg{2, 5, 1e9};
  CHECK(select_input(s, grid, GridPoint{1}, Direction::down, cfg, gauss_hermite(5)).index == 0);
  CHECK(select_input(s, grid, GridPoint{1}, Direction::up, cfg, gauss_hermite(5)).index == 2);
  // At the top end the slot reverses.
  CHECK(select_input(s, grid, GridPoint{2}, Direction::up, cfg, gauss_hermite(5)).index == 1);
}

TEST_CASE("exploration value of a high-variance point") {
  const InputGrid grid(0.0, 1.0, 3);
  const auto s = make_state({1.0, 1.0, 1.0}, {10.0, 0.1, 0.1}, 0.88, 5.0);
  const PlannerConfig cfg{2, 5, 0.0};
  const auto sel = score_candidates(s, grid, GridPoint{1}, Direction::up, cfg, gauss_hermite(5));
  CHECK(sel.chosen.index == 0);
  REQUIRE(sel.scores.size() == 3);
  CHECK(sel.scores[0].score == doctest::Approx(2.6988155637344873).epsilon(1e-12));
  CHECK(sel.scores[1].score == doctest::Approx(2.008583594177617).epsilon(1e-12));
}

TEST_CASE("ties prefer the slot, then proximity, then the smaller index") {
  const InputGrid grid(0.0, 1.0, 5);
  const auto s = make_state({4.0, 4.0, 1.0, 4.0, 4.0}, {1, 1, 1, 1, 1}, 1.0, 1.0);
  const PlannerConfig cfg{1, 1, 0.0};
  const auto rule = gauss_hermite(1);
  CHECK(select_input(s, grid, GridPoint{2}, Direction::up, cfg, rule).index == 3);
  CHECK(select_input(s, grid, GridPoint{2}, Direction::down, cfg, rule).index == 1);
  // Slot (index 1) is worse than the tied candidates 0 and 4: proximity.
  const auto t = make_state({4.0, 1.0, 1.0, 1.0, 4.0}, {1, 1, 1, 1, 1}, 1.0, 1.0);
  CHECK(select_input(t, grid, GridPoint{3}, Direction::down, cfg, rule).index == 4);
  CHECK(select_input(t, grid, GridPoint{2}, Direction::down, cfg, rule).index == 0);
}

TEST_CASE("only measured points are candidates") {
  const InputGrid grid(0.0, 1.0, 3);
  const auto s = BeliefState::from_points({std::nullopt, PointBelief{1.0, 1.0}, std::nullopt}, 0.9, 1.0);
  const auto sel = score_candidates(s, grid, GridPoint{1}, Direction::up, {2, 3, 0.0}, gauss_hermite(3));
  CHECK(sel.scores.size() == 1);
  CHECK(sel.chosen.index == 1);
  const BeliefState empty(3, 0.9, 1.0);
  CHECK_THROWS_AS(select_input(empty, grid, GridPoint{1}, Direction::up, {}, gauss_hermite(3)), Error);
}

TEST_CASE("planner config validation") {
  CHECK_THROWS_AS((PlannerConfig{0, 5, 0.0}.validate()), Error);
  CHECK_THROWS_AS((PlannerConfig{2, 0, 0.0}.validate()), Error);
  CHECK_THROWS_AS((PlannerConfig{2, 5, -1.0}.validate()), Error);
  CHECK_THROWS_AS((PlannerConfig{2, 5, NAN}.validate()), Error);
  CHECK_NOTHROW((PlannerConfig{}.validate()));
}

TEST_CASE("perturb slot reverses at the ends") {
  const InputGrid grid(0.0, 1.0, 3);
  CHECK(perturb_slot(grid, GridPoint{0}, Direction::down).index == 1);
  CHECK(perturb_slot(grid, GridPoint{2}, Direction::up).index == 1);
  CHECK(perturb_slot(grid, GridPoint{1}, Direction::up).index == 2);
}

TEST_CASE("penalty monotonicity") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> m(-2, 2), v(0.05, 4);
  const InputGrid grid(0.0, 1.0, 4);
  const auto rule = gauss_hermite(3);
  for (int t = 0; t < 60; ++t) {
    const auto s = make_state({m(rng), m(rng), m(rng), m(rng)}, {v(rng), v(rng), v(rng), v(rng)}, 0.85, 1.0);
    const GridPoint cur{static_cast<std::size_t>(t % 4)};
    const Direction g = t % 2 ? Direction::up : Direction::down;
    const GridPoint slot = perturb_slot(grid, cur, g);
    bool won = false;
    Selection prev;
    for (double W : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 50.0}) {
      const auto sel = score_candidates(s, grid, cur, g, {2, 3, W}, rule);
      if (W > 0.0) {
        for (std::size_t i = 0; i < sel.scores.size(); ++i) {
          if (sel.scores[i].point == slot) CHECK(sel.scores[i].score == prev.scores[i].score);
          else CHECK(sel.scores[i].score < prev.scores[i].score);
        }
      }
      if (won) CHECK(sel.chosen == slot);
      if (sel.chosen == slot) won = true;
      prev = sel;
    }
    CHECK(won);
  }
}

TEST_CASE("zero-variance limit with lambda = 1") {
  const InputGrid grid(0.0, 1.0, 3);
  const auto s = make_state({1.0, 4.0, 2.5}, {1e-30, 1e-30, 1e-30}, 1.0, 1.0);
  for (int p = 1; p <= 3; ++p) {
    const auto sel = score_candidates(s, grid, GridPoint{0}, Direction::up, {p, 3, 0.0}, gauss_hermite(3));
    for (const auto& c : sel.scores) {
      const double mu = s.at(c.point).mean;
      CHECK(c.score == doctest::Approx(mu + (p - 1) * 4.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("matches the brute-force oracle on small random problems") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> m(-3, 3), v(0.01, 6), lam(0.5, 1.0), rh(0.3, 3.0);
  std::bernoulli_distribution meas(0.8);
  int checked = 0;
  for (std::size_t n = 2; n <= 3; ++n) {
    const InputGrid grid(0.0, 1.0, n);
    for (int p = 1; p <= 3; ++p) {
      for (int q = 1; q <= 3; ++q) {
        for (int t = 0; t < 20; ++t) {
          testing::OracleState o;
          o.lambda = lam(rng);
          o.rho = rh(rng);
          std::vector<std::optional<PointBelief>> pts;
          for (std::size_t i = 0; i < n; ++i) {
            const bool is = meas(rng) || i == 0;
            o.mean.push_back(m(rng));
            o.var.push_back(v(rng));
            o.measured.push_back(is);
            pts.push_back(is ? std::optional(PointBelief{o.mean.back(), o.var.back()}) : std::nullopt);
          }
          const auto s = BeliefState::from_points(pts, o.lambda, o.rho);
          const GridPoint cur{static_cast<std::size_t>(t) % n};
          const int g = t % 2 ? 1 : -1;
          const double W = t % 3 == 0 ? 0.0 : 0.3 * (t % 3);
          const auto sel = score_candidates(s, grid, cur, g > 0 ? Direction::up : Direction::down, {p, q, W},
                                            gauss_hermite(q));
          const auto ref = testing::oracle_select(o, cur.index, g, p, testing::oracle_rule(q), W);
          CHECK(sel.chosen.index == ref.chosen);
          for (const auto& c : sel.scores) CHECK(std::abs(c.score - ref.scores[c.point.index]) < 1e-9);
          ++checked;
        }
      }
    }
  }
  CHECK(checked == 360);
}
