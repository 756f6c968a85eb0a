#pragma once

// Coupled hyperfine basis |F m> for the ground S1/2 and excited P1/2
// manifolds, and the angular-momentum / dipole jump operators expressed in
// it. Both electronic manifolds carry a pseudo-spin 1/2 (the fine-state
// doublet), so each sector recouples 1/2 (x) I into F = a = I+1/2 and
// F = b = I-1/2.
//
// Half-integer labels are kept exact by storing 2F and 2m as integers;
// Clebsch-Gordan coefficients use the Condon-Shortley convention.

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "headerr/constants.hpp"

namespace headerr {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

enum class Sector { S, P };

struct StateLabel {
  Sector sector;
  int two_F;
  int two_m;
};

class HyperfineBasis {
 public:
  explicit HyperfineBasis(const AlkaliSpecies& species) : species_(species) {
    species.validate();
    for (Sector sec : {Sector::S, Sector::P}) {
      for (int two_F : {species.two_F_a(), species.two_F_b()}) {
        for (int two_m = -two_F; two_m <= two_F; two_m += 2)
          labels_.push_back({sec, two_F, two_m});
      }
    }
    for (int i = 0; i < static_cast<int>(labels_.size()); ++i) {
      const auto& l = labels_[i];
      index_[key(l.sector, l.two_F, l.two_m)] = i;
    }
  }

  const AlkaliSpecies& species() const { return species_; }
  int dim() const { return static_cast<int>(labels_.size()); }
  int ground_dim() const { return species_.ground_dim(); }
  const StateLabel& label(int idx) const { return labels_.at(idx); }

  int index_of(Sector sec, int two_F, int two_m) const {
    auto it = index_.find(key(sec, two_F, two_m));
    if (it == index_.end()) throw std::out_of_range("HyperfineBasis: no such state");
    return it->second;
  }

  bool is_ground(int idx) const { return idx < ground_dim(); }

 private:
  static long key(Sector sec, int two_F, int two_m) {
    return ((sec == Sector::P) ? 1000000L : 0L) + 1000L * two_F + (two_m + 500);
  }

  AlkaliSpecies species_;
  std::vector<StateLabel> labels_;
  std::map<long, int> index_;
};

inline HyperfineBasis build_basis(const AlkaliSpecies& species) { return HyperfineBasis(species); }

// ---------------------------------------------------------------------------
// Angular momentum utilities

struct SpinMatrices {
  Matrix jx, jy, jz, jp, jm;
};

// Spin-j matrices on the basis |j m>, m ascending. two_j = 2j.
inline SpinMatrices spin_matrices(int two_j) {
  int n = two_j + 1;
  Matrix jz = Matrix::Zero(n, n), jp = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    int two_m = -two_j + 2 * k;
    jz(k, k) = 0.5 * two_m;
    if (k + 1 < n) {
      // <m+1| J+ |m> = sqrt(j(j+1) - m(m+1))
      double val = 0.25 * (two_j * (two_j + 2) - two_m * (two_m + 2));
      jp(k + 1, k) = std::sqrt(val);
    }
  }
  Matrix jm = jp.adjoint();
  SpinMatrices s;
  s.jx = 0.5 * (jp + jm);
  s.jy = -0.5 * kI * (jp - jm);
  s.jz = jz;
  s.jp = jp;
  s.jm = jm;
  return s;
}

// Clebsch-Gordan coefficients <j1 m1; j2 m2 | F m> for fixed (j1, j2),
// built by constructing each top state |F F> orthogonal to the higher-F
// ladder and lowering with J- = J1- + J2-. The lowering relation is the
// standard three-term recursion in m with exact 2F/2m bookkeeping.
class ClebschGordan {
 public:
  ClebschGordan(int two_j1, int two_j2) : two_j1_(two_j1), two_j2_(two_j2) {
    int n1 = two_j1 + 1, n2 = two_j2 + 1;
    for (int two_F = two_j1 + two_j2; two_F >= std::abs(two_j1 - two_j2); two_F -= 2) {
      // components of |F, m> over uncoupled (m1, m2), as a dense n1*n2 vector
      Eigen::VectorXd top = Eigen::VectorXd::Zero(n1 * n2);
      if (two_F == two_j1 + two_j2) {
        top(unc_index(two_j1, two_j2)) = 1.0;
      } else {
        // orthogonal complement within the m = F magnetic subspace
        std::vector<int> support;
        for (int two_m1 = -two_j1; two_m1 <= two_j1; two_m1 += 2) {
          int two_m2 = two_F - two_m1;
          if (std::abs(two_m2) <= two_j2) support.push_back(unc_index(two_m1, two_m2));
        }
        Eigen::MatrixXd higher(support.size(), 0);
        for (int two_Fp = two_j1 + two_j2; two_Fp > two_F; two_Fp -= 2) {
          const Eigen::VectorXd& v = states_.at(key(two_Fp, two_F));
          higher.conservativeResize(Eigen::NoChange, higher.cols() + 1);
          for (size_t r = 0; r < support.size(); ++r) higher(r, higher.cols() - 1) = v(support[r]);
        }
        Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(support.size(), support.size()) -
                               higher * higher.transpose();
        Eigen::VectorXd local = Eigen::VectorXd::Zero(support.size());
        // seed with the largest-m1 component; Condon-Shortley fixes its sign
        local(support.size() - 1) = 1.0;
        local = proj * local;
        if (local.norm() < 1e-12) throw std::logic_error("ClebschGordan: degenerate seed");
        local.normalize();
        // support[] is ordered by ascending m1, so the last entry is max m1
        if (local(support.size() - 1) < 0) local = -local;
        for (size_t r = 0; r < support.size(); ++r) top(support[r]) = local(r);
      }
      states_[key(two_F, two_F)] = top;
      // lower through the multiplet
      Eigen::VectorXd cur = top;
      for (int two_m = two_F; two_m > -two_F; two_m -= 2) {
        Eigen::VectorXd next = Eigen::VectorXd::Zero(n1 * n2);
        for (int two_m1 = -two_j1; two_m1 <= two_j1; two_m1 += 2) {
          int two_m2 = two_m - two_m1;
          if (std::abs(two_m2) > two_j2) continue;
          double c = cur(unc_index(two_m1, two_m2));
          if (c == 0.0) continue;
          if (two_m1 - 2 >= -two_j1)
            next(unc_index(two_m1 - 2, two_m2)) += c * lower_amp(two_j1, two_m1);
          if (two_m2 - 2 >= -two_j2)
            next(unc_index(two_m1, two_m2 - 2)) += c * lower_amp(two_j2, two_m2);
        }
        next /= lower_amp(two_F, two_m);
        states_[key(two_F, two_m - 2)] = next;
        cur = next;
      }
    }
  }

  double coeff(int two_m1, int two_m2, int two_F, int two_m) const {
    if (two_m1 + two_m2 != two_m) return 0.0;
    auto it = states_.find(key(two_F, two_m));
    if (it == states_.end()) return 0.0;
    return it->second(unc_index(two_m1, two_m2));
  }

 private:
  static double lower_amp(int two_j, int two_m) {
    // sqrt(j(j+1) - m(m-1))
    return std::sqrt(0.25 * (two_j * (two_j + 2) - two_m * (two_m - 2)));
  }
  int unc_index(int two_m1, int two_m2) const {
    int i1 = (two_m1 + two_j1_) / 2, i2 = (two_m2 + two_j2_) / 2;
    return i1 * (two_j2_ + 1) + i2;
  }
  static long key(int two_F, int two_m) { return 1000L * two_F + (two_m + 500); }

  int two_j1_, two_j2_;
  std::map<long, Eigen::VectorXd> states_;
};

// ---------------------------------------------------------------------------
// Sector recoupling

// Unitary mapping the uncoupled product basis (m_e, m_I) of one sector onto
// the coupled |F m> states of that sector; U(unc, coup).
inline Matrix sector_coupling_matrix(const AlkaliSpecies& species) {
  int two_I = species.two_I;
  int ne = 2, ni = two_I + 1;
  int dim = ne * ni;
  ClebschGordan cg(1, two_I);
  Matrix u = Matrix::Zero(dim, dim);
  int col = 0;
  for (int two_F : {species.two_F_a(), species.two_F_b()}) {
    for (int two_m = -two_F; two_m <= two_F; two_m += 2) {
      for (int e = 0; e < ne; ++e) {
        int two_me = 2 * e - 1;
        for (int i = 0; i < ni; ++i) {
          int two_mi = -two_I + 2 * i;
          u(e * ni + i, col) = cg.coeff(two_me, two_mi, two_F, two_m);
        }
      }
      ++col;
    }
  }
  return u;
}

struct SpinOperatorSet {
  // electron pseudo-spin, block diagonal over both sectors
  Matrix sx, sy, sz, sp, sm;
  // nuclear spin, both sectors
  Matrix ix, iy, iz;
  // total angular momentum
  Matrix fx, fy, fz;
  // excited-sector pseudo-spin (zero on the ground sector)
  Matrix jp_x, jp_y, jp_z;
  // ground-sector restriction of the electron spin (zero on the excited sector)
  Matrix sx_g, sy_g, sz_g, sp_g, sm_g;
};

namespace detail {

// Embed one per-sector operator into the full space on the chosen sectors.
inline Matrix embed(const Matrix& op, int sector_dim, bool on_s, bool on_p) {
  Matrix full = Matrix::Zero(2 * sector_dim, 2 * sector_dim);
  if (on_s) full.topLeftCorner(sector_dim, sector_dim) = op;
  if (on_p) full.bottomRightCorner(sector_dim, sector_dim) = op;
  return full;
}

}  // namespace detail

inline SpinOperatorSet spin_operators(const HyperfineBasis& basis) {
  const auto& species = basis.species();
  int two_I = species.two_I;
  int sd = species.ground_dim();
  Matrix u = sector_coupling_matrix(species);

  SpinMatrices half = spin_matrices(1);
  SpinMatrices nuc = spin_matrices(two_I);
  Matrix id_e = Matrix::Identity(2, 2);
  Matrix id_n = Matrix::Identity(two_I + 1, two_I + 1);

  auto kron = [](const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
      for (int j = 0; j < a.cols(); ++j)
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
  };
  auto coupled = [&](const Matrix& unc) { return (u.adjoint() * unc * u).eval(); };

  Matrix sx_s = coupled(kron(half.jx, id_n));
  Matrix sy_s = coupled(kron(half.jy, id_n));
  Matrix sz_s = coupled(kron(half.jz, id_n));
  Matrix sp_s = coupled(kron(half.jp, id_n));
  Matrix sm_s = coupled(kron(half.jm, id_n));
  Matrix ix_s = coupled(kron(id_e, nuc.jx));
  Matrix iy_s = coupled(kron(id_e, nuc.jy));
  Matrix iz_s = coupled(kron(id_e, nuc.jz));

  SpinOperatorSet ops;
  ops.sx = detail::embed(sx_s, sd, true, true);
  ops.sy = detail::embed(sy_s, sd, true, true);
  ops.sz = detail::embed(sz_s, sd, true, true);
  ops.sp = detail::embed(sp_s, sd, true, true);
  ops.sm = detail::embed(sm_s, sd, true, true);
  ops.ix = detail::embed(ix_s, sd, true, true);
  ops.iy = detail::embed(iy_s, sd, true, true);
  ops.iz = detail::embed(iz_s, sd, true, true);
  ops.fx = ops.sx + ops.ix;
  ops.fy = ops.sy + ops.iy;
  ops.fz = ops.sz + ops.iz;
  ops.jp_x = detail::embed(sx_s, sd, false, true);
  ops.jp_y = detail::embed(sy_s, sd, false, true);
  ops.jp_z = detail::embed(sz_s, sd, false, true);
  ops.sx_g = detail::embed(sx_s, sd, true, false);
  ops.sy_g = detail::embed(sy_s, sd, true, false);
  ops.sz_g = detail::embed(sz_s, sd, true, false);
  ops.sp_g = detail::embed(sp_s, sd, true, false);
  ops.sm_g = detail::embed(sm_s, sd, true, false);
  return ops;
}

// Ground <- excited jump operators for the four fine-state channels:
//   A_{0+} = |+>_S<+|_P,  A_{0-} = |->_S<-|_P,
//   A_{+}  = |->_S<+|_P,  A_{-}  = |+>_S<-|_P,
// each tensored with the nuclear identity and recoupled on both sides.
struct DipoleSet {
  Matrix a0p, a0m, ap, am;
};

inline DipoleSet dipole_jump_operators(const HyperfineBasis& basis) {
  const auto& species = basis.species();
  int two_I = species.two_I;
  int ni = two_I + 1;
  int sd = species.ground_dim();
  int fd = 2 * sd;
  Matrix u = sector_coupling_matrix(species);

  // electronic |e_s><e_p| (x) 1_nuc as an uncoupled sector-block matrix
  auto channel = [&](int e_ket, int e_bra) {
    Matrix unc = Matrix::Zero(sd, sd);
    for (int i = 0; i < ni; ++i) unc(e_ket * ni + i, e_bra * ni + i) = 1.0;
    Matrix sec = u.adjoint() * unc * u;  // coupled on both sides
    Matrix full = Matrix::Zero(fd, fd);
    full.topRightCorner(sd, sd) = sec;  // rows: S sector, cols: P sector
    return full;
  };

  DipoleSet d;
  d.a0p = channel(1, 1);
  d.a0m = channel(0, 0);
  d.ap = channel(0, 1);
  d.am = channel(1, 0);
  return d;
}

inline double hermiticity_defect(const Matrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace headerr
