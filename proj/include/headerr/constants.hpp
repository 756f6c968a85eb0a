#pragma once

// Physical constants (CODATA 2018) and alkali species data for the D1 line.
// Energies are handled internally in angular frequency (rad/s); everything
// user-facing is ordinary frequency (Hz). Magnetic moments are stored as
// frequencies per tesla so that 2*pi conversions stay in one place.

#include <cmath>
#include <stdexcept>
#include <string>

namespace headerr {

namespace constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double mu_B_hz_per_T = 13.996244936e9;  // Bohr magneton / h
inline constexpr double mu_N_hz_per_T = 7.622593285e6;   // nuclear magneton / h

inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double k_B = 1.380649e-23;          // J/K
inline constexpr double eps0 = 8.8541878128e-12;     // F/m
inline constexpr double c_light = 2.99792458e8;      // m/s

inline constexpr double mu_B_rad_per_sT = two_pi * mu_B_hz_per_T;
inline constexpr double mu_N_rad_per_sT = two_pi * mu_N_hz_per_T;

}  // namespace constants

// Ground-state S1/2 and excited P1/2 manifolds of one alkali isotope.
//
// Sign convention: g_I is stored positive (in nuclear magnetons) and the
// nuclear Zeeman term enters the Hamiltonian as -g_I mu_N B I_z. With that
// choice the second-order sublevel energies come out as
//   E(a/b, m) = (+-mu_eff - g_I mu_N) B m -+ omega_rev m^2,
// with mu_eff = (g_S mu_B + g_I mu_N)/(2I+1), and the nuclear splitting
// omega_NuZ = g_I mu_N |B| is a positive frequency.
struct AlkaliSpecies {
  std::string name;
  int two_I = 0;          // 2 * nuclear spin
  double g_S = 0.0;       // electron g-factor
  double g_I = 0.0;       // nuclear g-factor, nuclear magnetons, > 0 for Rb/Cs
  double delta_S_hz = 0.0;  // ground hyperfine splitting, Hz
  double delta_P_hz = 0.0;  // excited (P1/2) hyperfine splitting, Hz
  double d1_reduced_dipole_Cm = 0.0;  // <J=1/2||d||J'=1/2>, C m

  int ground_dim() const { return 2 * (two_I + 1); }
  int full_dim() const { return 4 * (two_I + 1); }
  int two_F_a() const { return two_I + 1; }
  int two_F_b() const { return two_I - 1; }

  void validate() const {
    bool ok_spin = two_I == 1 || two_I == 2 || two_I == 3 || two_I == 5 || two_I == 7;
    if (!ok_spin)
      throw std::invalid_argument("AlkaliSpecies: nuclear spin must be in {1/2, 1, 3/2, 5/2, 7/2}");
    if (!(delta_S_hz > delta_P_hz && delta_P_hz > 0.0))
      throw std::invalid_argument("AlkaliSpecies: require delta_S > delta_P > 0");
  }

  static AlkaliSpecies rb85() {
    // 85Rb: I=5/2. g_I converted from the mu_B-units tabulated value
    // (-0.00029364000) to positive nuclear magnetons.
    AlkaliSpecies s;
    s.name = "Rb85";
    s.two_I = 5;
    s.g_S = 2.0023193043622;
    s.g_I = 0.00029364000 * 1836.15267343;
    s.delta_S_hz = 3.0357324390e9;
    s.delta_P_hz = 361.58e6;
    s.d1_reduced_dipole_Cm = 2.5377e-29;
    return s;
  }

  static AlkaliSpecies rb87() {
    AlkaliSpecies s;
    s.name = "Rb87";
    s.two_I = 3;
    s.g_S = 2.0023193043622;
    s.g_I = 0.0009951414 * 1836.15267343;
    s.delta_S_hz = 6.834682610904e9;
    s.delta_P_hz = 814.5e6;
    s.d1_reduced_dipole_Cm = 2.5377e-29;
    return s;
  }

  static AlkaliSpecies cs133() {
    AlkaliSpecies s;
    s.name = "Cs133";
    s.two_I = 7;
    s.g_S = 2.0023193043622;
    s.g_I = 0.00039885395 * 1836.15267343;
    s.delta_S_hz = 9.192631770e9;
    s.delta_P_hz = 1.16768e9;
    s.d1_reduced_dipole_Cm = 2.6973e-29;
    return s;
  }

  static AlkaliSpecies by_name(const std::string& n) {
    if (n == "Rb85" || n == "rb85") return rb85();
    if (n == "Rb87" || n == "rb87") return rb87();
    if (n == "Cs133" || n == "cs133") return cs133();
    throw std::invalid_argument("unknown species: " + n);
  }
};

}  // namespace headerr
