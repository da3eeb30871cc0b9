#include "upo/pv_plant.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/core.h>

#include "upo/core_types.hpp"

namespace upo::pv {

namespace {

constexpr double kMaxExponent = 700.0;
constexpr double kCurrentTolerance = 1e-10;
constexpr int kMaxNewtonIterations = 200;

struct DiodeTerms {
  double i_s;
  double i_0;
  double n_vt;  // N * V_t * n_s
  double r_series;  // R_s * n_s
  double r_parallel;  // R_p * n_s
};

DiodeTerms diode_terms(double T, double S, const PvParams& p) {
  return {light_current(T, S, p), saturation_current(T, p), p.N * thermal_voltage(T, p) * p.n_s,
          p.R_s * p.n_s, p.R_p * p.n_s};
}

double residual(const DiodeTerms& d, double i, double v) {
  const double drop = v + i * d.r_series;
  const double x = std::min(drop / d.n_vt, kMaxExponent);
  return d.i_s - d.i_0 * std::expm1(x) - drop / d.r_parallel - i;
}

double residual_slope(const DiodeTerms& d, double i, double v) {
  const double drop = v + i * d.r_series;
  const double x = std::min(drop / d.n_vt, kMaxExponent);
  return -d.i_0 * std::exp(x) * d.r_series / d.n_vt - d.r_series / d.r_parallel - 1.0;
}

}  // namespace

void PvParams::validate() const {
  const double values[] = {T_r, I_s, I_0, k_i, N, E_g, k, q, n_s, R_s, R_p, C_c, L_c, R_c};
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::invalid_argument, "photovoltaic parameters must be finite and positive");
    }
  }
}

bool PvParams::set(const std::string& name, double value) {
  double* field = nullptr;
  if (name == "T_r") field = &T_r;
  else if (name == "I_s") field = &I_s;
  else if (name == "I_0") field = &I_0;
  else if (name == "k_i") field = &k_i;
  else if (name == "N") field = &N;
  else if (name == "E_g") field = &E_g;
  else if (name == "k") field = &k;
  else if (name == "q") field = &q;
  else if (name == "n_s") field = &n_s;
  else if (name == "R_s") field = &R_s;
  else if (name == "R_p") field = &R_p;
  else if (name == "C_c") field = &C_c;
  else if (name == "L_c") field = &L_c;
  else if (name == "R_c") field = &R_c;
  if (field == nullptr) return false;
  *field = value;
  return true;
}

double thermal_voltage(double T, const PvParams& p) { return p.k * T / p.q; }

double light_current(double T, double S, const PvParams& p) {
  return (p.I_s + p.k_i * (T - p.T_r)) * S / 1000.0;
}

double saturation_current(double T, const PvParams& p) {
  const double ratio = T / p.T_r;
  // E_g is in eV and V_t in volts, so E_g / V_t is dimensionless as written.
  return p.I_0 * ratio * ratio * ratio * std::exp(p.E_g / (p.N * thermal_voltage(T, p)) * (ratio - 1.0));
}

double array_residual(double i, double v, double T, double S, const PvParams& p) {
  return residual(diode_terms(T, S, p), i, v);
}

double array_current(double v, double T, double S, const PvParams& p) {
  const DiodeTerms d = diode_terms(T, S, p);
  // r(i) is strictly decreasing and concave; r(hi) <= 0 <= r(lo).
  double hi = std::max(d.i_s, 0.0);
  double lo = std::min(-v / d.r_series, 0.0) - 1.0;
  double i = hi;
  double r = residual(d, i, v);
  // Polish past the tolerance until the iterate stops moving.
  for (int it = 0; it < kMaxNewtonIterations && r != 0.0; ++it) {
    if (r > 0.0) lo = i; else hi = i;
    double candidate = i - r / residual_slope(d, i, v);
    if (!(candidate > lo && candidate < hi)) candidate = 0.5 * (lo + hi);
    if (candidate == i) break;
    const double r_new = residual(d, candidate, v);
    if (std::abs(r) < kCurrentTolerance && std::abs(r_new) >= std::abs(r)) break;
    i = candidate;
    r = r_new;
  }
  if (std::abs(r) < kCurrentTolerance) return i;
  throw Error(ErrorCode::non_convergence,
              fmt::format("array current did not converge: v={} T={} S={} i={} residual={} bracket=[{}, {}]",
                          v, T, S, i, r, lo, hi));
}

double open_circuit_voltage(double T, double S, const PvParams& p) {
  if (light_current(T, S, p) <= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (array_current(hi, T, S, p) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e7) throw Error(ErrorCode::non_convergence, "open-circuit voltage bracket diverged");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (array_current(mid, T, S, p) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

OperatingPoint steady_state_power(double u, double T, double S, const PvParams& p) {
  if (!(u > 0.0 && u <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, fmt::format("duty cycle must lie in (0, 1] (got {})", u));
  }
  if (S < 0.0) throw Error(ErrorCode::invalid_argument, "irradiance must be non-negative");
  const double v_oc = open_circuit_voltage(T, S, p);
  if (v_oc <= 0.0) return {};
  const double load = u * u / p.R_c;
  // Balance i(v) - v u^2 / R_c: non-negative at 0, negative at v_oc.
  double lo = 0.0;
  double hi = v_oc;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (array_current(mid, T, S, p) - mid * load > 0.0) lo = mid; else hi = mid;
  }
  OperatingPoint op;
  op.v = 0.5 * (lo + hi);
  op.i = array_current(op.v, T, S, p);
  op.power = op.v * op.i;
  return op;
}

void DayProfile::validate() const {
  if (temperature.size() != irradiance.size()) {
    throw Error(ErrorCode::invalid_argument, "profile temperature and irradiance lengths differ");
  }
  if (irradiance.size() < 2) throw Error(ErrorCode::invalid_argument, "profile needs at least 2 samples");
  for (std::size_t k = 0; k < irradiance.size(); ++k) {
    if (!(irradiance[k] >= 0.0) || !std::isfinite(irradiance[k])) {
      throw Error(ErrorCode::invalid_argument, fmt::format("irradiance at k={} must be >= 0", k));
    }
    if (!(temperature[k] > 0.0) || !std::isfinite(temperature[k])) {
      throw Error(ErrorCode::invalid_argument, fmt::format("temperature at k={} must be > 0", k));
    }
  }
}

DayProfile day_profile_default(std::size_t steps, const DayProfileShape& shape) {
  if (steps < 2) throw Error(ErrorCode::invalid_argument, "day profile needs at least 2 steps");
  DayProfile profile;
  profile.temperature.resize(steps + 1);
  profile.irradiance.resize(steps + 1);
  const double peak_at = shape.temperature_peak_fraction;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double tau = static_cast<double>(k) / static_cast<double>(steps);
    const double s = std::sin(std::numbers::pi * tau);
    profile.irradiance[k] = (k == 0 || k == steps) ? 0.0 : shape.irradiance_peak * s * s;
    // Warp time so the temperature bell peaks at peak_at instead of midday.
    const double phase = tau <= peak_at ? 0.5 * tau / peak_at
                                        : 0.5 + 0.5 * (tau - peak_at) / (1.0 - peak_at);
    const double t = std::sin(std::numbers::pi * phase);
    profile.temperature[k] =
        shape.temperature_base + (shape.temperature_peak - shape.temperature_base) * t * t;
  }
  return profile;
}

DayProfile read_profile_csv(std::istream& in) {
  DayProfile profile;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line.rfind("k,", 0) == 0) continue;
    }
    std::istringstream row(line);
    std::string k_field, t_field, s_field;
    if (!std::getline(row, k_field, ',') || !std::getline(row, t_field, ',') ||
        !std::getline(row, s_field, ',')) {
      throw Error(ErrorCode::io, fmt::format("profile line {}: expected k,T,S", line_no));
    }
    try {
      const auto k = std::stoll(k_field);
      if (k != static_cast<long long>(profile.samples())) {
        throw Error(ErrorCode::io, fmt::format("profile line {}: expected k={} (got {})", line_no,
                                               profile.samples(), k));
      }
      profile.temperature.push_back(std::stod(t_field));
      profile.irradiance.push_back(std::stod(s_field));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::io, fmt::format("profile line {}: malformed number", line_no));
    }
  }
  profile.validate();
  return profile;
}

DayProfile read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, fmt::format("cannot open profile '{}'", path));
  return read_profile_csv(in);
}

}  // namespace upo::pv
