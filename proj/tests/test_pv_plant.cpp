#include <doctest.h>

#include <cmath>
#include <sstream>

#include "upo/pv_plant.hpp"

using namespace upo::pv;

TEST_CASE("table defaults") {
  const PvParams p;
  CHECK(p.T_r == 298.15);
  CHECK(p.I_s == 5.61);
  CHECK(p.I_0 == 1.13e-6);
  CHECK(p.k_i == 1.96e-3);
  CHECK(p.N == 1.81);
  CHECK(p.E_g == 1.16);
  CHECK(p.k == 1.38e-23);
  CHECK(p.q == 1.60e-19);
  CHECK(p.n_s == 72.0);
  CHECK(p.R_s == 2.83e-3);
  CHECK(p.R_p == 8.7);
  CHECK(p.C_c == 1e-3);
  CHECK(p.L_c == 5e-3);
  CHECK(p.R_c == 2.0);
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("parameters by name") {
  PvParams p;
  CHECK(p.set("R_c", 3.0));
  CHECK(p.R_c == 3.0);
  CHECK(p.set("n_s", 36.0));
  CHECK(p.n_s == 36.0);
  CHECK_FALSE(p.set("bogus", 1.0));
  p.R_p = -1.0;
  CHECK_THROWS(p.validate());
}

TEST_CASE("light current") {
  const PvParams p;
  CHECK(light_current(p.T_r, 1000.0, p) == 5.61);
  CHECK(light_current(300.0, 0.0, p) == 0.0);
  CHECK(light_current(p.T_r + 10.0, 500.0, p) == doctest::Approx(2.8148).epsilon(1e-13));
}

TEST_CASE("saturation current") {
  const PvParams p;
  CHECK(saturation_current(p.T_r, p) == 1.13e-6);
  CHECK(saturation_current(310.0, p) > p.I_0);
  CHECK(saturation_current(310.0, p) == doctest::Approx(3.2930482042943728e-6).epsilon(1e-12));
}

TEST_CASE("array current at the origin without light") {
  const PvParams p;
  CHECK(std::abs(array_current(0.0, 300.0, 0.0, p)) < 1e-12);
}

TEST_CASE("short-circuit and loaded current against the bisection oracle") {
  const PvParams p;
  CHECK(array_current(0.0, p.T_r, 1000.0, p) == doctest::Approx(5.6081752723362398).epsilon(1e-11));
  CHECK(array_current(30.0, p.T_r, 1000.0, p) == doctest::Approx(5.548075855495247).epsilon(1e-11));
}

TEST_CASE("residual is tiny and current non-increasing in voltage") {
  const PvParams p;
  for (double T : {285.0, 298.15, 315.0}) {
    for (double S : {100.0, 600.0, 1000.0}) {
      const double voc = open_circuit_voltage(T, S, p);
      CHECK(voc > 0.0);
      CHECK(std::abs(array_current(voc, T, S, p)) < 1e-8);
      double last = INFINITY;
      for (int j = 0; j <= 200; ++j) {
        const double v = voc * j / 200.0;
        const double i = array_current(v, T, S, p);
        CHECK(std::abs(array_residual(i, v, T, S, p)) < 1e-10);
        CHECK(i <= last + 1e-12);
        last = i;
      }
    }
  }
}

TEST_CASE("open-circuit voltage without light is zero") {
  const PvParams p;
  CHECK(open_circuit_voltage(300.0, 0.0, p) == 0.0);
}

TEST_CASE("steady state against the oracle") {
  const PvParams p;
  const auto a = steady_state_power(0.5, p.T_r, 1000.0, p);
  CHECK(a.v == doctest::Approx(41.435553167124351).epsilon(1e-9));
  CHECK(a.i == doctest::Approx(5.1794441458905439).epsilon(1e-9));
  CHECK(a.power == doctest::Approx(214.61313328319861).epsilon(1e-9));
  const auto b = steady_state_power(0.3, p.T_r, 1000.0, p);
  CHECK(b.power == doctest::Approx(110.00622515998803).epsilon(1e-9));
}

TEST_CASE("steady state balance and residual") {
  const PvParams p;
  for (int j = 1; j <= 20; ++j) {
    const double u = 0.05 * j;
    const auto op = steady_state_power(u, 305.0, 800.0, p);
    CHECK(std::abs(array_residual(op.i, op.v, 305.0, 800.0, p)) < 1e-10);
    CHECK(std::abs(op.i - op.v * u * u / p.R_c) < 1e-8);
    CHECK(op.power == doctest::Approx(op.v * op.i));
  }
}

TEST_CASE("power without light and for vanishing duty") {
  const PvParams p;
  CHECK(steady_state_power(0.5, 300.0, 0.0, p).power == 0.0);
  CHECK(steady_state_power(1e-4, 300.0, 1000.0, p).power < 0.1);
  CHECK_THROWS(steady_state_power(0.0, 300.0, 1000.0, p));
  CHECK_THROWS(steady_state_power(1.2, 300.0, 1000.0, p));
}

TEST_CASE("power is unimodal on the default grid over the default day") {
  const PvParams p;
  const auto day = day_profile_default();
  for (std::size_t k = 1; k < day.samples() - 1; ++k) {
    std::vector<double> P;
    for (int i = 1; i <= 19; ++i) P.push_back(steady_state_power(0.05 * i, day.temperature[k], day.irradiance[k], p).power);
    std::size_t peak = 0;
    for (std::size_t i = 1; i < P.size(); ++i) if (P[i] > P[peak]) peak = i;
    for (std::size_t i = 1; i <= peak; ++i) CHECK(P[i] > P[i - 1]);
    for (std::size_t i = peak + 1; i < P.size(); ++i) CHECK(P[i] < P[i - 1]);
  }
}

TEST_CASE("default day profile shape") {
  const auto day = day_profile_default(300);
  REQUIRE(day.samples() == 301);
  CHECK(day.irradiance.front() == 0.0);
  CHECK(day.irradiance.back() == 0.0);
  std::size_t peak = 0;
  for (std::size_t k = 0; k < day.samples(); ++k) {
    CHECK(day.irradiance[k] >= 0.0);
    if (day.irradiance[k] > day.irradiance[peak]) peak = k;
  }
  CHECK(peak == 150);
  CHECK(day.irradiance[150] == doctest::Approx(1000.0));
  std::size_t tpeak = 0;
  for (std::size_t k = 0; k < day.samples(); ++k) if (day.temperature[k] > day.temperature[tpeak]) tpeak = k;
  CHECK(tpeak > 150);
  CHECK(day.temperature[tpeak] == doctest::Approx(308.0).epsilon(1e-3));
  CHECK(day.temperature.front() == doctest::Approx(290.0));
  CHECK_THROWS(day_profile_default(1));
}

TEST_CASE("optimal duty cycle varies over the day") {
  const PvParams p;
  const auto day = day_profile_default();
  std::size_t lo = 100, hi = 0;
  for (std::size_t k = 10; k < 290; k += 10) {
    std::size_t best = 0;
    double bp = -1.0;
    for (std::size_t i = 1; i <= 19; ++i) {
      const double P = steady_state_power(0.05 * i, day.temperature[k], day.irradiance[k], p).power;
      if (P > bp) { bp = P; best = i; }
    }
    lo = std::min(lo, best);
    hi = std::max(hi, best);
  }
  CHECK(hi > lo);
}

TEST_CASE("profile CSV round trip and validation") {
  std::istringstream ok("k,T,S\n0,290,0\n1,295,500\n2,300,0\n");
  const auto d = read_profile_csv(ok);
  CHECK(d.samples() == 3);
  CHECK(d.temperature[1] == 295.0);
  CHECK(d.irradiance[1] == 500.0);

  std::istringstream header("time,T,S\n0,290,0\n");
  CHECK_THROWS(read_profile_csv(header));
  std::istringstream neg("k,T,S\n0,290,-5\n1,290,0\n");
  CHECK_THROWS(read_profile_csv(neg));
  std::istringstream order("k,T,S\n0,290,0\n2,290,0\n");
  CHECK_THROWS(read_profile_csv(order));
  CHECK_THROWS(read_profile_csv(std::string("/nonexistent/profile.csv")));
}
