#pragma once

// Adiabatic elimination of the excited sector and the self-consistent ground
// steady state.
//
// With P projecting onto the ground (x) ground superspace and Q = 1 - P, the
// effective ground generator to second order in the pump coupling L01 is
//
//   L_eff = P L00 P + P L00 G Q L01 G Q L01 P - P L01 G Q L01 P,
//   G = (Q L00 Q)^{-1},
//
// whose second-order part splits uniquely into a commutator ("light shift")
// piece -i[H_ls, .] and a dissipative pumping piece. The split is computed
// from the Choi form of the second-order generator.

#include <Eigen/Dense>

#include <vector>

#include "headerr/model.hpp"

namespace headerr {

struct GroundProjection {
  int full_dim = 0, gdim = 0;
  std::vector<int> p_idx, q_idx;  // superspace indices, vec layout c*D + r

  static GroundProjection make(int full_dim, int gdim) {
    GroundProjection g;
    g.full_dim = full_dim;
    g.gdim = gdim;
    for (int c = 0; c < gdim; ++c)
      for (int r = 0; r < gdim; ++r) g.p_idx.push_back(c * full_dim + r);
    for (int c = 0; c < full_dim; ++c)
      for (int r = 0; r < full_dim; ++r)
        if (r >= gdim || c >= gdim) g.q_idx.push_back(c * full_dim + r);
    return g;
  }

  // dense 0/1 diagonal of P on the superspace, for structural tests
  Matrix p_dense() const {
    Matrix p = Matrix::Zero(full_dim * full_dim, full_dim * full_dim);
    for (int i : p_idx) p(i, i) = 1.0;
    return p;
  }
};

inline GroundProjection projectors(const HyperfineBasis& basis) {
  return GroundProjection::make(basis.dim(), basis.ground_dim());
}

namespace detail {

inline Matrix gather(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  Matrix out(rows.size(), cols.size());
  for (size_t j = 0; j < cols.size(); ++j)
    for (size_t i = 0; i < rows.size(); ++i) out(i, j) = m(rows[i], cols[j]);
  return out;
}

// Orthonormal operator basis {F_0 = 1/sqrt(d), traceless diagonal combos,
// unit off-diagonal matrices}, returned as columns of vec'd operators.
inline Matrix operator_basis(int d) {
  Matrix u = Matrix::Zero(d * d, d * d);
  int col = 0;
  Matrix f0 = Matrix::Identity(d, d) / std::sqrt(double(d));
  u.col(col++) = vectorize(f0);
  for (int r = 1; r < d; ++r) {
    Matrix m = Matrix::Zero(d, d);
    for (int s = 0; s < r; ++s) m(s, s) = 1.0;
    m(r, r) = -double(r);
    m /= std::sqrt(double(r) * (r + 1));
    u.col(col++) = vectorize(m);
  }
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      if (r == c) continue;
      Matrix m = Matrix::Zero(d, d);
      m(r, c) = 1.0;
      u.col(col++) = vectorize(m);
    }
  return u;
}

}  // namespace detail

// Commutator part of a Hermiticity-preserving ground generator: returns the
// traceless Hamiltonian H with M ~ -i[H, .] + (dissipative remainder).
inline Matrix coherent_hamiltonian_part(const Matrix& m2, int d) {
  // Choi rearrangement: C(k*d+i, l*d+j) = M(j*d+i, l*d+k)
  Matrix choi(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) choi(k * d + i, l * d + j) = m2(j * d + i, l * d + k);

  Matrix u = detail::operator_basis(d);
  Matrix c = u.adjoint() * choi * u;

  Matrix k_op = (c(0, 0).real() / (2.0 * d)) * Matrix::Identity(d, d);
  for (int g = 1; g < d * d; ++g) {
    if (std::abs(c(g, 0)) == 0.0) continue;
    k_op += (c(g, 0) / std::sqrt(double(d))) * unvectorize(u.col(g), d);
  }
  Matrix h = 0.5 * kI * (k_op - k_op.adjoint().eval());
  h -= (h.trace() / double(d)) * Matrix::Identity(d, d);
  return h;
}

struct EffectiveLiouvillian {
  int gdim = 0;
  Matrix first_order;        // P L00 P (mean fields folded in)
  Matrix second_dissipative; // pumping part of the second-order terms
  Matrix ls_coherent;        // -i[H_ls, .]
  Matrix h_ls;               // extracted light-shift Hamiltonian
  bool ls_included = true;

  Matrix total() const {
    Matrix t = first_order + second_dissipative;
    if (ls_included) t += ls_coherent;
    return t;
  }
};

struct DegenerateEliminationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline EffectiveLiouvillian effective_liouvillian(const ModelParts& mp, const MeanFields& mf,
                                                  bool include_ls) {
  int D = mp.dim(), gd = mp.ground_dim();
  GroundProjection proj = GroundProjection::make(D, gd);

  Matrix l00 = mp.l00(mf);
  const Matrix& l01 = mp.l01_light.mat;

  Matrix aqq = detail::gather(l00, proj.q_idx, proj.q_idx);
  Eigen::PartialPivLU<Matrix> lu(aqq);
  {
    double rc = (lu.matrixLU().diagonal().cwiseAbs().minCoeff()) /
                (lu.matrixLU().diagonal().cwiseAbs().maxCoeff() + 1e-300);
    if (!(rc > 1e-14))
      throw DegenerateEliminationError("excited-sector block is numerically singular");
  }

  Matrix x1 = detail::gather(l01, proj.q_idx, proj.p_idx);
  Matrix y1 = lu.solve(x1);
  Matrix t3 = -detail::gather(l01, proj.p_idx, proj.q_idx) * y1;
  Matrix x2 = detail::gather(l01, proj.q_idx, proj.q_idx) * y1;
  Matrix y2 = lu.solve(x2);
  Matrix t2 = detail::gather(l00, proj.p_idx, proj.q_idx) * y2;

  EffectiveLiouvillian eff;
  eff.gdim = gd;
  eff.first_order = detail::gather(l00, proj.p_idx, proj.p_idx);
  Matrix second = t2 + t3;
  eff.h_ls = coherent_hamiltonian_part(second, gd);
  Matrix hl = eff.h_ls;
  Matrix idg = Matrix::Identity(gd, gd);
  eff.ls_coherent = -kI * (kron(idg, hl) - kron(hl.transpose(), idg));
  eff.second_dissipative = second - eff.ls_coherent;
  eff.ls_included = include_ls;
  return eff;
}

// Closed-form optical-pumping polarization estimate,
// <S_z> = 2 R cos t / (R[(cos t + 1)^2 + (cos t - 1)^2] + 2 Gamma_rel),
// used to seed the mean-field iteration.
inline double pumping_polarization_estimate(double r_op, double gamma_rel, double theta) {
  double c = std::cos(theta);
  double denom = r_op * ((c + 1) * (c + 1) + (c - 1) * (c - 1)) + 2.0 * gamma_rel;
  if (denom <= 0.0) throw std::invalid_argument("pumping polarization: R_op and Gamma_rel are both zero");
  return 2.0 * r_op * c / denom;
}

struct SteadyState {
  Eigen::VectorXd populations;  // p(F, m) over the ground basis order
  double sz = 0.0;
  Complex sp = 0.0;
  Matrix rho;  // ground-sector density matrix
  int iterations = 0;
  int rebuilds = 0;
  int clipped = 0;
  double residual = 0.0;  // last max population change
  bool converged = false;
};

struct SteadyStateError : std::runtime_error {
  SteadyState diagnostics;
  SteadyStateError(const std::string& what, SteadyState diag)
      : std::runtime_error(what), diagnostics(std::move(diag)) {}
};

struct SteadySolution {
  SteadyState state;
  EffectiveLiouvillian eff;  // built at the converged mean fields
  MeanFields mf;
};

namespace detail {

// population-population block of a ground superspace generator
inline Matrix population_block(const Matrix& eff, int gd) {
  Matrix w(gd, gd);
  for (int i = 0; i < gd; ++i)
    for (int j = 0; j < gd; ++j) w(i, j) = eff(i * gd + i, j * gd + j);
  return w;
}

inline Eigen::VectorXd solve_populations(const Matrix& w_complex, int gd) {
  // replace the first equation by the normalization sum(p) = 1
  Eigen::MatrixXd a(gd, gd);
  for (int i = 0; i < gd; ++i)
    for (int j = 0; j < gd; ++j) a(i, j) = w_complex(i, j).real();
  a.row(0).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(gd);
  b(0) = 1.0;
  return a.colPivHouseholderQr().solve(b);
}

}  // namespace detail

// Crude channel-summed optical pumping rate, used only to seed the iteration.
inline double pumping_rate_estimate(const ModelParts& mp) {
  const auto& cfg = mp.config;
  double gamma_opt = 2.0 * cfg.rates.gamma_Q + 0.75 * cfg.rates.gamma_mix + 1.0;
  double o2 = cfg.pump.rabi * cfg.pump.rabi;
  double ds = constants::two_pi * cfg.species.delta_S_hz;
  double dp = constants::two_pi * cfg.species.delta_P_hz;
  double delta = cfg.pump.detuning;
  double r = 0.0;
  for (double det : {delta, delta - ds, delta - dp, delta - ds - dp})
    r += 4.0 * o2 * gamma_opt / (det * det + gamma_opt * gamma_opt);
  return r;
}

inline SteadySolution solve_steady_state(const ModelParts& mp) {
  const auto& num = mp.config.numerics;
  int gd = mp.ground_dim();
  const bool diagonal = num.diagonal_steady_state;
  const bool include_ls = mp.config.toggles.ls;

  Eigen::VectorXd sz_diag(gd), fz_diag(gd);
  for (int i = 0; i < gd; ++i) {
    sz_diag(i) = mp.ops.sz_g(i, i).real();
    fz_diag(i) = mp.ops.fz(i, i).real();
  }

  double r_est = pumping_rate_estimate(mp);
  double grel = mp.config.rates.gamma_SD + mp.config.rates.gamma_SE;
  MeanFields mf;
  mf.sz = helicity_sign(mp.config.pump.helicity) *
          pumping_polarization_estimate(r_est, grel + 1e-6, mp.config.field.theta);

  SteadyState st;
  st.populations = Eigen::VectorXd::Constant(gd, 1.0 / gd);
  st.rho = st.populations.cast<Complex>().asDiagonal();

  EffectiveLiouvillian eff;
  Eigen::RowVectorXcd trg = trace_row(gd);
  Eigen::RowVectorXcd sp_row = expectation_row(mp.ops.sp_g.topLeftCorner(gd, gd));

  auto mean_fields_of = [&](const SteadyState& s) {
    MeanFields m;
    m.sz = sz_diag.dot(s.populations);
    if (!diagonal) m.sp = (sp_row * vectorize(s.rho))(0);
    return m;
  };

  int total_iter = 0;
  for (int rebuild = 0; rebuild < 8; ++rebuild) {
    eff = effective_liouvillian(mp, mf, include_ls);
    ++st.rebuilds;

    // inner loop: mean fields updated against a frozen second-order part;
    // the first-order dependence on <S_z> (and <S_+-> off the diagonal path)
    // is exact via the unit coefficient superoperators
    GroundProjection proj = GroundProjection::make(mp.dim(), gd);
    Matrix f_mfz = detail::gather(mp.ss.mfz.mat, proj.p_idx, proj.p_idx);
    Matrix f_mfp = detail::gather(mp.ss.mfp.mat, proj.p_idx, proj.p_idx);
    Matrix f_mfm = detail::gather(mp.ss.mfm.mat, proj.p_idx, proj.p_idx);
    Matrix base = eff.total() - mf.sz * f_mfz - mf.sp * f_mfp - std::conj(mf.sp) * f_mfm;

    double step = 1e300;
    MeanFields mf_in = mf;
    for (int it = 0; it < num.ss_max_iter; ++it, ++total_iter) {
      Eigen::VectorXd p_new;
      Matrix rho_new;
      if (diagonal) {
        Matrix w = detail::population_block(base, gd) +
                   mf_in.sz * detail::population_block(f_mfz, gd);
        p_new = detail::solve_populations(w, gd);
      } else {
        Matrix a = base + mf_in.sz * f_mfz + mf_in.sp * f_mfp + std::conj(mf_in.sp) * f_mfm;
        for (int c = 0; c < gd * gd; ++c) a(0, c) = trg(c);
        Vector b = Vector::Zero(gd * gd);
        b(0) = 1.0;
        Vector x = a.partialPivLu().solve(b);
        rho_new = unvectorize(x, gd);
        rho_new = 0.5 * (rho_new + rho_new.adjoint().eval());
        p_new = rho_new.diagonal().real();
      }

      // clip tiny negative populations, reject anything worse
      for (int i = 0; i < gd; ++i) {
        if (p_new(i) < 0.0) {
          if (p_new(i) < -1e-12) {
            st.residual = step;
            st.iterations = total_iter;
            throw SteadyStateError("steady state produced a negative population", st);
          }
          p_new(i) = 0.0;
          ++st.clipped;
        }
      }
      double drift = std::abs(p_new.sum() - 1.0);
      if (drift > 1e-8) {
        st.iterations = total_iter;
        throw SteadyStateError("steady state lost trace normalization", st);
      }
      p_new /= p_new.sum();

      Eigen::VectorXd p_next = (1.0 - num.ss_damping) * st.populations + num.ss_damping * p_new;
      step = (p_next - st.populations).cwiseAbs().maxCoeff();
      st.populations = p_next;
      if (diagonal)
        st.rho = st.populations.cast<Complex>().asDiagonal();
      else
        st.rho = ((1.0 - num.ss_damping) * st.rho + num.ss_damping * rho_new).eval();

      MeanFields m2 = mean_fields_of(st);
      mf_in = m2;
      if (step < num.ss_tol) break;
    }

    MeanFields mf_conv = mean_fields_of(st);
    double mf_shift = std::abs(mf_conv.sz - mf.sz) + std::abs(mf_conv.sp - mf.sp);
    mf = mf_conv;
    if (step >= num.ss_tol) {
      st.residual = step;
      st.iterations = total_iter;
      throw SteadyStateError("steady state did not converge", st);
    }
    st.residual = step;
    if (mf_shift < 1e-9) {
      st.converged = true;
      break;
    }
  }
  st.iterations = total_iter;
  if (!st.converged) throw SteadyStateError("mean-field rebuild loop did not settle", st);

  st.sz = mf.sz;
  st.sp = mf.sp;
  return {st, eff, mf};
}

inline double fz_expectation(const ModelParts& mp, const SteadyState& st) {
  double v = 0.0;
  for (int i = 0; i < mp.ground_dim(); ++i)
    v += st.populations(i) * mp.ops.fz(i, i).real();
  return v;
}

// Population of the upper (F = I + 1/2) ground manifold.
inline double a_manifold_population(const ModelParts& mp, const SteadyState& st) {
  double v = 0.0;
  for (int i = 0; i < mp.ground_dim(); ++i)
    if (mp.basis.label(i).two_F == mp.config.species.two_F_a()) v += st.populations(i);
  return v;
}

}  // namespace headerr
