#pragma once

// Assembly of the master-equation generator
//   d rho/dt = -i[H, rho] + L_PP rho + L_SP rho + L_SS rho
// with H = H_HF + H_B + H_LA + H_aux (+ the RF drive handled separately as a
// perturbation). The spin-exchange mean fields <S_z>, <S_+-> enter L_SS
// linearly, so their unit coefficient superoperators are kept separate and
// recombined per iteration.

#include <Eigen/Dense>

#include "headerr/sim_config.hpp"
#include "headerr/superop.hpp"

namespace headerr {

struct MeanFields {
  double sz = 0.0;
  Complex sp = 0.0;  // <S_+>; <S_-> = conj
};

struct DerivedAngular {
  double mu_eff = 0.0;    // rad/s per T
  double omega_L = 0.0;   // rad/s
  double omega_rev = 0.0; // rad/s
  double omega_nuz = 0.0; // rad/s
};

inline DerivedAngular derived_angular(const AlkaliSpecies& sp, double B0) {
  DerivedAngular d;
  d.mu_eff = (sp.g_S * constants::mu_B_rad_per_sT + sp.g_I * constants::mu_N_rad_per_sT) /
             (sp.two_I + 1);
  d.omega_L = d.mu_eff * std::abs(B0);
  d.omega_rev = d.mu_eff * d.mu_eff * B0 * B0 / (constants::two_pi * sp.delta_S_hz);
  d.omega_nuz = sp.g_I * constants::mu_N_rad_per_sT * std::abs(B0);
  return d;
}

// ---------------------------------------------------------------------------
// Hamiltonian pieces (all in rad/s)

// Rotating-frame hyperfine Hamiltonian: delta_S on |a m>_S, Delta on |a m>_P,
// Delta - delta_P on |b m>_P, 0 on |b m>_S.
inline Matrix hamiltonian_hf(const HyperfineBasis& basis, double detuning) {
  const auto& sp = basis.species();
  double ds = constants::two_pi * sp.delta_S_hz;
  double dp = constants::two_pi * sp.delta_P_hz;
  Matrix h = Matrix::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    const auto& l = basis.label(i);
    bool a = l.two_F == sp.two_F_a();
    if (l.sector == Sector::S)
      h(i, i) = a ? ds : 0.0;
    else
      h(i, i) = a ? detuning : detuning - dp;
  }
  return h;
}

// Static-field interaction. Exact mode: g_S mu_B B S_z - g_I mu_N B I_z on
// both sectors. Perturbative mode: the ground-sector diagonal second-order
// spectrum E(a/b, m) = (+-mu_eff - g_I mu_N [nuz]) B0 m -+ [nlz] w_rev m^2.
inline Matrix hamiltonian_zeeman(const HyperfineBasis& basis, const SpinOperatorSet& ops,
                                 double B_z, ZeemanMode mode,
                                 const EffectToggles& toggles = EffectToggles{}) {
  const auto& sp = basis.species();
  if (mode == ZeemanMode::exact) {
    return sp.g_S * constants::mu_B_rad_per_sT * B_z * ops.sz -
           sp.g_I * constants::mu_N_rad_per_sT * B_z * ops.iz;
  }
  DerivedAngular d = derived_angular(sp, B_z);
  double mu_eff_signed = d.mu_eff * B_z;
  double nuz = toggles.nuz ? sp.g_I * constants::mu_N_rad_per_sT * B_z : 0.0;
  double nlz = toggles.nlz ? d.omega_rev : 0.0;
  Matrix h = Matrix::Zero(basis.dim(), basis.dim());
  for (int i = 0; i < basis.dim(); ++i) {
    const auto& l = basis.label(i);
    if (l.sector != Sector::S) continue;
    double m = 0.5 * l.two_m;
    double sgn = (l.two_F == sp.two_F_a()) ? +1.0 : -1.0;
    h(i, i) = (sgn * mu_eff_signed - nuz) * m - sgn * nlz * m * m;
  }
  return h;
}

// Pump-atom coupling. sigma+:
//   H_LA = -Omega [ (cos t + 1) A_+ + (cos t - 1) A_- + (A_{0+} + A_{0-}) sin t ] + h.c.
// sigma-: the A_+ / A_- coefficients swap.
inline Matrix hamiltonian_light(const DipoleSet& dip, const PumpConfig& pump, double theta) {
  double c = std::cos(theta), s = std::sin(theta);
  double cp = c + 1.0, cm = c - 1.0;
  if (pump.helicity == Helicity::sigma_minus) std::swap(cp, cm);
  Matrix h = -pump.rabi * (cp * dip.ap + cm * dip.am + s * (dip.a0p + dip.a0m));
  return h + h.adjoint().eval();
}

// Auxiliary static field of magnitude Ba along the pump axis, parallel for
// sigma+ and antiparallel for sigma-. Nuclear term kept with the same sign
// convention as the main Zeeman interaction.
inline Matrix hamiltonian_aux(const AlkaliSpecies& sp, const SpinOperatorSet& ops,
                              Helicity helicity, double Ba, double theta) {
  if (Ba == 0.0) return Matrix::Zero(ops.sz.rows(), ops.sz.cols());
  double s = helicity_sign(helicity);
  double c = std::cos(theta), sn = std::sin(theta);
  return s * Ba *
         (sp.g_S * constants::mu_B_rad_per_sT * (ops.sx * sn + ops.sz * c) -
          sp.g_I * constants::mu_N_rad_per_sT * (ops.ix * sn + ops.iz * c));
}

// ---------------------------------------------------------------------------
// Drive and dissipators

// RF drive superoperator with the time dependence removed:
//   L1 rho = -i g_S mu_B B1 [ S_x cos t - S_z sin t, rho ]
// using ground-sector spin operators. rwa drops the S_z sin t part.
inline Superoperator driving_superop(const AlkaliSpecies& sp, const SpinOperatorSet& ops,
                                     double B1, double theta, bool rwa = false) {
  Matrix op = ops.sx_g * std::cos(theta);
  if (!rwa) op -= ops.sz_g * std::sin(theta);
  return commutator_superop((sp.g_S * constants::mu_B_rad_per_sT * B1) * op);
}

// Excited-state mixing: gamma_mix (2 J^P . rho J^P - {rho, J^P . J^P}).
inline Superoperator dissipator_pp(const SpinOperatorSet& ops, double gamma_mix) {
  Superoperator out = lindblad_superop(gamma_mix, ops.jp_x);
  out += lindblad_superop(gamma_mix, ops.jp_y);
  out += lindblad_superop(gamma_mix, ops.jp_z);
  return out;
}

// Quenching: Gamma_Q sum_j (2 A_j rho A_j^dag - {rho, A_j^dag A_j}).
inline Superoperator dissipator_sp(const DipoleSet& dip, double gamma_Q) {
  Superoperator out = lindblad_superop(gamma_Q, dip.a0p);
  out += lindblad_superop(gamma_Q, dip.a0m);
  out += lindblad_superop(gamma_Q, dip.ap);
  out += lindblad_superop(gamma_Q, dip.am);
  return out;
}

// Unit-coefficient mean-field pieces of the ground-state collision term:
// l_ss = iso + <S_z> mfz + <S_+> mfp + <S_-> mfm.
struct SpinExchangeParts {
  Superoperator iso;  // (gamma_SD + gamma_SE)(2 S.rho S - {rho, S.S})
  Superoperator mfz;  // 2 gamma_SE (S+ rho S- - S- rho S+ + {rho, Sz})
  Superoperator mfp;  // 2 gamma_SE (S- rho Sz - Sz rho S- + {rho, S-}/2)
  Superoperator mfm;  // hermitian partner of mfp
};

inline SpinExchangeParts spin_exchange_parts(const SpinOperatorSet& ops, double gamma_SD,
                                             double gamma_SE) {
  int d = static_cast<int>(ops.sz_g.rows());
  SpinExchangeParts p;
  p.iso = lindblad_superop(gamma_SD + gamma_SE, ops.sx_g);
  p.iso += lindblad_superop(gamma_SD + gamma_SE, ops.sy_g);
  p.iso += lindblad_superop(gamma_SD + gamma_SE, ops.sz_g);

  Matrix mfz = sandwich(ops.sp_g, ops.sp_g) - sandwich(ops.sm_g, ops.sm_g) +
               spre(ops.sz_g) + spost(ops.sz_g);
  p.mfz = {2.0 * gamma_SE * mfz, d};

  Matrix mfp = sandwich(ops.sm_g, ops.sz_g) - sandwich(ops.sz_g, ops.sp_g) +
               0.5 * (spre(ops.sm_g) + spost(ops.sm_g));
  p.mfp = {2.0 * gamma_SE * mfp, d};

  Matrix mfm = sandwich(ops.sz_g, ops.sm_g) - sandwich(ops.sp_g, ops.sz_g) +
               0.5 * (spre(ops.sp_g) + spost(ops.sp_g));
  p.mfm = {2.0 * gamma_SE * mfm, d};
  return p;
}

inline Superoperator dissipator_ss(const SpinOperatorSet& ops, double gamma_SD, double gamma_SE,
                                   const MeanFields& mf) {
  if (std::abs(mf.sz) > 0.5)
    throw std::invalid_argument("dissipator_ss: |<S_z>| must not exceed 1/2");
  SpinExchangeParts p = spin_exchange_parts(ops, gamma_SD, gamma_SE);
  Superoperator out = p.iso;
  out.mat += mf.sz * p.mfz.mat;
  out.mat += mf.sp * p.mfp.mat;
  out.mat += std::conj(mf.sp) * p.mfm.mat;
  return out;
}

// ---------------------------------------------------------------------------
// Full model assembly

struct ModelParts {
  HyperfineBasis basis;
  SpinOperatorSet ops;
  DipoleSet dip;
  SimulationConfig config;
  DerivedAngular freqs;

  Matrix h_static;  // H_HF + H_B + H_aux
  Matrix h_light;   // H_LA

  Superoperator l00_base;  // -i[h_static, .] + L_PP + L_SP + L_SS(iso)
  Superoperator l01_light; // -i[h_light, .]
  SpinExchangeParts ss;    // mean-field units
  Superoperator l1_drive;  // RF drive (time dependence removed)

  int dim() const { return basis.dim(); }
  int ground_dim() const { return basis.ground_dim(); }

  // L0^(0): generator without the pump coupling, at given mean fields.
  Matrix l00(const MeanFields& mf) const {
    Matrix m = l00_base.mat + mf.sz * ss.mfz.mat;
    if (mf.sp != 0.0) m += mf.sp * ss.mfp.mat + std::conj(mf.sp) * ss.mfm.mat;
    return m;
  }

  // Complete zero-order generator of the master equation (pump included).
  Superoperator assemble_L0(const MeanFields& mf) const {
    return {l00(mf) + l01_light.mat, dim()};
  }
};

inline ModelParts build_model(const SimulationConfig& cfg) {
  ModelParts mp{HyperfineBasis(cfg.species)};
  mp.ops = spin_operators(mp.basis);
  mp.dip = dipole_jump_operators(mp.basis);
  mp.config = cfg;
  mp.freqs = derived_angular(cfg.species, cfg.field.B0);

  mp.h_static = hamiltonian_hf(mp.basis, cfg.pump.detuning) +
                hamiltonian_zeeman(mp.basis, mp.ops, cfg.field.B0, cfg.numerics.zeeman_mode,
                                   cfg.toggles) +
                hamiltonian_aux(cfg.species, mp.ops, cfg.pump.helicity, cfg.field.Ba,
                                cfg.field.theta);
  mp.h_light = hamiltonian_light(mp.dip, cfg.pump, cfg.field.theta);

  mp.l00_base = commutator_superop(mp.h_static);
  mp.l00_base += dissipator_pp(mp.ops, cfg.rates.gamma_mix);
  mp.l00_base += dissipator_sp(mp.dip, cfg.rates.gamma_Q);
  SpinExchangeParts ss = spin_exchange_parts(mp.ops, cfg.rates.gamma_SD, cfg.rates.gamma_SE);
  mp.l00_base += ss.iso;
  mp.ss = ss;

  mp.l01_light = commutator_superop(mp.h_light);
  mp.l1_drive = driving_superop(cfg.species, mp.ops, cfg.field.B1, cfg.field.theta,
                                cfg.numerics.rwa_drive);
  return mp;
}

}  // namespace headerr
