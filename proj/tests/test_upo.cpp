#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "upo/controller.hpp"
#include "upo/pando.hpp"

using namespace upo;

namespace {

UpoState manual_state(std::vector<std::optional<PointBelief>> pts, GridPoint anchor, GridPoint curr,
                      const UpoConfig& cfg) {
  UpoState s{BeliefState::from_points(std::move(pts), cfg.forgetting, cfg.rho_est, 5), anchor, curr, anchor,
             curr.index > anchor.index ? Direction::up : Direction::down, 5};
  return s;
}

}  // namespace

TEST_CASE("fresh init has one measured point") {
  const InputGrid grid(0.0, 1.0, 5);
  const UpoConfig cfg;
  const auto s = upo_init(GridPoint{1}, 7.5, grid, cfg);
  CHECK(s.belief.measured_count() == 1);
  CHECK(s.belief.at(GridPoint{1}).mean == 7.5);
  CHECK(s.prev.index == 1);
  CHECK(s.curr.index == 2);
  CHECK(s.g == Direction::up);
}

TEST_CASE("init at the top steps down") {
  const InputGrid grid(0.0, 1.0, 5);
  const auto s = upo_init(GridPoint{4}, 1.0, grid, {});
  CHECK(s.curr.index == 3);
  CHECK(s.g == Direction::down);
}

TEST_CASE("init validates its inputs") {
  const InputGrid grid(0.0, 1.0, 5);
  CHECK_THROWS_AS(upo_init(GridPoint{9}, 1.0, grid, {}), Error);
  CHECK_THROWS_AS(upo_init(GridPoint{0}, NAN, grid, {}), Error);
  UpoConfig bad;
  bad.forgetting = 0.0;
  CHECK_THROWS_AS(upo_init(GridPoint{0}, 1.0, grid, bad), Error);
  bad = {};
  bad.rho_est = -1.0;
  CHECK_THROWS_AS(upo_init(GridPoint{0}, 1.0, grid, bad), Error);
}

TEST_CASE("returns to the previous point when the new mean is not better") {
  const InputGrid grid(0.0, 1.0, 5);
  UpoConfig cfg;
  cfg.forgetting = 1.0;
  cfg.rho_est = 1.0;
  // anchor 1 has mean 5; curr 2 measured for the first time at 3.
  auto s = manual_state({std::nullopt, PointBelief{5.0, 1e-12}, std::nullopt, std::nullopt, std::nullopt},
                        GridPoint{1}, GridPoint{2}, cfg);
  const auto r = upo_step(s, 3.0, grid, cfg, gauss_hermite(5));
  CHECK(r.branch == UpoBranch::return_previous);
  CHECK(r.next.index == 1);
  CHECK(r.state.g == Direction::down);
}

TEST_CASE("explores the unmeasured forward neighbor after an improvement") {
  const InputGrid grid(0.0, 1.0, 5);
  const UpoConfig cfg;
  auto s = upo_init(GridPoint{0}, 1.0, grid, cfg);
  const auto r = upo_step(s, 10.0, grid, cfg, gauss_hermite(5));
  CHECK(r.branch == UpoBranch::explore_forward);
  CHECK(r.next.index == 2);
  CHECK(r.state.g == Direction::up);
  CHECK(r.state.prev.index == 1);
  CHECK(r.state.anchor.index == 1);
}

TEST_CASE("uses the planner once the neighborhood is measured") {
  const InputGrid grid(0.0, 1.0, 3);
  UpoConfig cfg;
  cfg.planner.horizon = 1;
  // anchor 0 low, curr 1 high, forward neighbor 2 measured with the best mean.
  auto s = manual_state({PointBelief{1.0, 1.0}, std::nullopt, PointBelief{9.0, 1.0}}, GridPoint{0}, GridPoint{1},
                        cfg);
  const auto r = upo_step(s, 4.0, grid, cfg, gauss_hermite(5));
  CHECK(r.branch == UpoBranch::planner);
  CHECK(r.next.index == 2);
}

TEST_CASE("planner branch with horizon 1 picks the argmax of the means") {
  const InputGrid grid(0.0, 1.0, 4);
  UpoConfig cfg;
  cfg.planner.horizon = 1;
  auto s = manual_state({PointBelief{8.0, 1.0}, PointBelief{1.0, 1.0}, std::nullopt, PointBelief{2.0, 1.0}},
                        GridPoint{1}, GridPoint{2}, cfg);
  const auto r = upo_step(s, 3.0, grid, cfg, gauss_hermite(5));
  CHECK(r.branch == UpoBranch::planner);
  CHECK(r.next.index == 0);
}

TEST_CASE("off-grid forward candidate falls through to the planner") {
  const InputGrid grid(0.0, 1.0, 3);
  UpoConfig cfg;
  cfg.planner.horizon = 1;
  auto s = manual_state({std::nullopt, PointBelief{1.0, 1.0}, std::nullopt}, GridPoint{1}, GridPoint{2}, cfg);
  const auto r = upo_step(s, 5.0, grid, cfg, gauss_hermite(5));
  CHECK(r.branch == UpoBranch::planner);
  CHECK(r.next.index == 2);  // stays: best mean
  CHECK(r.state.anchor.index == 1);
  // Staying keeps the anchor; the next comparison is still against index 1.
  const auto again = upo_step(r.state, 0.0, grid, cfg, gauss_hermite(5));
  CHECK(again.state.belief.at(GridPoint{2}).mean < 5.0);
}

TEST_CASE("a strictly better mean never takes the return branch") {
  const InputGrid grid(0.0, 1.0, 9);
  UpoConfig cfg;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 5.0);
  auto s = upo_init(GridPoint{0}, 0.0, grid, cfg);
  const auto rule = gauss_hermite(5);
  for (int k = 0; k < 300; ++k) {
    const double y = 10.0 * std::sin(0.02 * k) * static_cast<double>(s.curr.index) + noise(rng);
    const auto r = upo_step(s, y, grid, cfg, rule);
    const double mc = r.state.belief.at(s.curr).mean;
    const double ma = r.state.belief.at(s.anchor).mean;
    if (mc > ma && s.curr != s.anchor) CHECK(r.branch != UpoBranch::return_previous);
    if (r.branch == UpoBranch::return_previous) CHECK(r.next == s.anchor);
    if (r.branch == UpoBranch::explore_forward) {
      CHECK(std::labs(static_cast<long>(r.next.index) - static_cast<long>(s.curr.index)) == 1);
    }
    CHECK(grid.contains(r.next));
    s = r.state;
  }
}

TEST_CASE("non-finite measurement is rejected") {
  const InputGrid grid(0.0, 1.0, 3);
  const UpoConfig cfg;
  auto s = upo_init(GridPoint{0}, 0.0, grid, cfg);
  CHECK_THROWS_AS(upo_step(s, NAN, grid, cfg, gauss_hermite(5)), Error);
}

TEST_CASE("very large weight and tiny forgetting reproduce P&O") {
  const InputGrid grid(0.0, 1.0, 11);
  UpoConfig cfg;
  cfg.forgetting = 1e-6;
  cfg.planner.weight = 1e9;
  cfg.planner.horizon = 1;
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.3);
  auto f = [](std::size_t i, int k) { return 10.0 - std::abs(static_cast<double>(i) - 5.0) + 0.01 * k; };
  const auto rule = gauss_hermite(5);

  const double y1 = f(2, 1) + noise(rng);
  auto a = upo_init(GridPoint{2}, y1, grid, cfg);
  auto b = pando_init(GridPoint{2}, y1, grid);
  for (int k = 2; k <= 200; ++k) {
    REQUIRE(a.curr == b.curr);
    const double y = f(a.curr.index, k) + noise(rng);
    auto ra = upo_step(a, y, grid, cfg, rule);
    auto rb = pando_step(b, y, grid);
    CHECK(ra.next == rb.next);
    a = ra.state;
    b = rb.state;
  }
}

TEST_CASE("identical inputs give identical trajectories") {
  const InputGrid grid(0.0, 1.0, 7);
  const UpoConfig cfg;
  const auto rule = gauss_hermite(5);
  auto run = [&] {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> noise(0.0, 2.0);
    auto s = upo_init(GridPoint{0}, noise(rng), grid, cfg);
    std::vector<std::size_t> out;
    for (int k = 0; k < 100; ++k) {
      auto r = upo_step(s, 5.0 - std::abs(static_cast<double>(s.curr.index) - 4.0) + noise(rng), grid, cfg, rule);
      out.push_back(r.next.index);
      s = r.state;
    }
    return out;
  };
  CHECK(run() == run());
}
