#pragma once

// Steady-state photovoltaic array behind a dc-dc buck converter. Maps the
// converter duty cycle, cell temperature and irradiance to the produced
// array power.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace upo::pv {

struct PvParams {
  double T_r = 298.15;      // reference temperature [K]
  double I_s = 5.61;        // short-circuit current at T_r [A]
  double I_0 = 1.13e-6;     // reverse saturation current at T_r [A]
  double k_i = 1.96e-3;     // short-circuit current temperature coefficient [A/K]
  double N = 1.81;          // ideality factor
  double E_g = 1.16;        // band gap [eV]
  double k = 1.38e-23;      // Boltzmann constant [J/K]
  double q = 1.60e-19;      // electron charge [C]
  double n_s = 72.0;        // cells in series
  double R_s = 2.83e-3;     // series resistance [Ohm]
  double R_p = 8.7;         // parallel resistance [Ohm]
  double C_c = 1e-3;        // converter capacitance [F]
  double L_c = 5e-3;        // converter inductance [H]
  double R_c = 2.0;         // converter load resistance [Ohm]

  void validate() const;

  /// Set a parameter by its table name (T_r, I_s, ..., R_c). Returns false
  /// for an unknown name.
  bool set(const std::string& name, double value);
};

double thermal_voltage(double T, const PvParams& p);

/// i_s = (I_s + k_i (T - T_r)) S / 1000
double light_current(double T, double S, const PvParams& p);

/// i_0 = I_0 (T/T_r)^3 exp(E_g / (N V_t) (T/T_r - 1)), V_t = k T / q
double saturation_current(double T, const PvParams& p);

/// Residual  i_s - i_0 (exp((v + i R_s n_s)/(N V_t n_s)) - 1) - (v + i R_s n_s)/(R_p n_s) - i.
double array_residual(double i, double v, double T, double S, const PvParams& p);

/// Array output current at terminal voltage v (safeguarded Newton).
double array_current(double v, double T, double S, const PvParams& p);

/// Voltage where the array current vanishes; 0 without light.
double open_circuit_voltage(double T, double S, const PvParams& p);

struct OperatingPoint {
  double v = 0.0;
  double i = 0.0;
  double power = 0.0;
};

/// Converter equilibrium for duty cycle u in (0, 1]: i_L = v u / R_c and
/// i(v) = v u^2 / R_c. Power is the array output v * i.
OperatingPoint steady_state_power(double u, double T, double S, const PvParams& p);

struct DayProfile {
  std::vector<double> temperature;  // [K], sample k = 0..steps
  std::vector<double> irradiance;   // [W/m^2]

  std::size_t samples() const noexcept { return irradiance.size(); }
  void validate() const;
};

struct DayProfileShape {
  double irradiance_peak = 1000.0;
  double temperature_base = 290.0;
  double temperature_peak = 308.0;
  double temperature_peak_fraction = 0.6;  // where in the day T peaks
};

/// Clear-day fixture: irradiance sin^2 bell from 0 at k = 0 to the peak at
/// k = steps / 2 and back to 0 at k = steps; temperature a bell that lags
/// it. Holds steps + 1 samples.
DayProfile day_profile_default(std::size_t steps = 300, const DayProfileShape& shape = {});

/// CSV with header `k,T,S`; rows must be in order k = 0, 1, 2, ...
DayProfile read_profile_csv(std::istream& in);
DayProfile read_profile_csv(const std::string& path);

}  // namespace upo::pv
