#pragma once

// Run configuration: static/RF/auxiliary fields, pump laser, collision rates,
// effect toggles and numerical knobs. All frequencies here are stored in
// angular units (rad/s); parsing from user-facing Hz lives in config_file.hpp.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "headerr/constants.hpp"

namespace headerr {

enum class Helicity { sigma_plus, sigma_minus };
enum class Geometry { parallel, perpendicular };
enum class ZeemanMode { exact, perturbative };

inline int helicity_sign(Helicity h) { return h == Helicity::sigma_plus ? +1 : -1; }
inline const char* to_string(Helicity h) { return h == Helicity::sigma_plus ? "sigma+" : "sigma-"; }
inline const char* to_string(Geometry g) { return g == Geometry::parallel ? "parallel" : "perpendicular"; }

struct FieldConfig {
  double B0 = 55e-6;   // static field, T; sign encodes field inversion
  double B1 = 5e-9;    // RF amplitude, T
  double Ba = 0.0;     // auxiliary field along the pump axis, T, >= 0
  double theta = 0.0;  // tilt angle pump vs B0, rad
};

struct PumpConfig {
  double rabi = 0.0;     // Omega, rad/s
  double detuning = 0.0; // Delta, rad/s
  Helicity helicity = Helicity::sigma_plus;
};

struct RateConfig {
  double gamma_mix = 0.0;  // excited-state mixing, 1/s
  double gamma_Q = 0.0;    // quenching, 1/s
  double gamma_SD = 0.0;   // ground spin destruction, 1/s
  double gamma_SE = 0.0;   // ground spin exchange, 1/s
};

struct EffectToggles {
  bool nlz = true;
  bool nuz = true;
  bool ls = true;
  bool all_on() const { return nlz && nuz && ls; }
};

struct NumericsConfig {
  ZeemanMode zeeman_mode = ZeemanMode::exact;
  bool rwa_drive = false;        // drop the S_z sin(theta) part of the drive
  bool rwa_signal = false;       // drop S_z sin(theta) in the parallel observable
  bool diagonal_steady_state = true;
  double ss_tol = 1e-10;         // max population change at convergence
  double ss_damping = 0.5;
  int ss_max_iter = 10000;
  int scan_points = 201;
  double root_tol = constants::two_pi * 1e-3;  // rad/s
};

struct SimulationConfig {
  AlkaliSpecies species = AlkaliSpecies::rb85();
  FieldConfig field;
  PumpConfig pump;
  RateConfig rates;
  EffectToggles toggles;
  NumericsConfig numerics;

  void validate() const {
    species.validate();
    if (field.B0 == 0.0) throw std::invalid_argument("field.B0 must be nonzero");
    if (!(std::abs(field.B1 / field.B0) < 1e-2))
      throw std::invalid_argument("require |B1/B0| < 1e-2 (weak RF drive)");
    if (field.Ba < 0.0) throw std::invalid_argument("field.Ba must be >= 0");
    if (!(field.Ba / std::abs(field.B0) < 1e-2))
      throw std::invalid_argument("require Ba/|B0| < 1e-2 (small auxiliary field)");
    if (!(field.theta >= 0.0 && field.theta <= constants::pi / 2 + 1e-12))
      throw std::invalid_argument("theta must lie in [0, pi/2]");
    if (!(pump.rabi > 0.0)) throw std::invalid_argument("pump.rabi must be > 0");
    if (rates.gamma_mix < 0 || rates.gamma_Q < 0 || rates.gamma_SD < 0 || rates.gamma_SE < 0)
      throw std::invalid_argument("rates must be >= 0");
    if (!(rates.gamma_Q + rates.gamma_mix >= 10.0 * pump.rabi))
      throw std::invalid_argument(
          "adiabatic elimination requires gamma_Q + gamma_mix >= 10 * rabi");
    if (numerics.zeeman_mode == ZeemanMode::exact && !toggles.all_on())
      throw std::invalid_argument("effect toggles require the perturbative Zeeman mode");
    if (numerics.zeeman_mode == ZeemanMode::perturbative) {
      double mu_eff_rad = (species.g_S * constants::mu_B_rad_per_sT +
                           species.g_I * constants::mu_N_rad_per_sT) / (species.two_I + 1);
      double ratio = std::abs(mu_eff_rad * field.B0) /
                     (constants::two_pi * species.delta_S_hz);
      if (ratio > 0.05)
        throw std::invalid_argument(
            "perturbative Zeeman mode untrustworthy: |mu_eff B0| / delta_S > 0.05");
    }
  }

  // Rabi frequency from pump power and beam diameter (top-hat profile):
  // intensity I = P / (pi (D/2)^2), field E0 = sqrt(2 I / (eps0 c)),
  // Omega = E0 <J||d||J'> / (2 sqrt(3) hbar).
  static double rabi_from_power(const AlkaliSpecies& sp, double power_W, double beam_diameter_m) {
    double area = constants::pi * 0.25 * beam_diameter_m * beam_diameter_m;
    double intensity = power_W / area;
    double e0 = std::sqrt(2.0 * intensity / (constants::eps0 * constants::c_light));
    return e0 * sp.d1_reduced_dipole_Cm / (2.0 * std::sqrt(3.0) * constants::hbar);
  }
};

}  // namespace headerr
