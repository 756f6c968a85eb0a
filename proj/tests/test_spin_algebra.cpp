#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>

#include "headerr/spin_algebra.hpp"

using namespace headerr;

namespace {

// Independent closed-form recoupling for spin 1/2 (x) I, used to cross-check
// the recursion-built operators:
//   |a, m> =  sqrt((I + m + 1/2)/(2I+1)) |+>|m-1/2>
//           + sqrt((I - m + 1/2)/(2I+1)) |->|m+1/2>
//   |b, m> =  sqrt((I - m + 1/2)/(2I+1)) |+>|m-1/2>
//           - sqrt((I + m + 1/2)/(2I+1)) |->|m+1/2>
Matrix closed_form_coupling(const AlkaliSpecies& sp) {
  int two_I = sp.two_I;
  int ni = two_I + 1;
  int dim = 2 * ni;
  Matrix u = Matrix::Zero(dim, dim);
  int col = 0;
  auto unc = [&](int e, int two_mi) { return e * ni + (two_mi + two_I) / 2; };
  double denom = two_I + 1.0;
  for (int two_m = -(two_I + 1); two_m <= two_I + 1; two_m += 2) {
    double cp = std::sqrt(0.5 * (two_I + two_m + 1) / denom);
    double cm = std::sqrt(0.5 * (two_I - two_m + 1) / denom);
    if (std::abs(two_m - 1) <= two_I) u(unc(1, two_m - 1), col) = cp;
    if (std::abs(two_m + 1) <= two_I) u(unc(0, two_m + 1), col) = cm;
    ++col;
  }
  for (int two_m = -(two_I - 1); two_m <= two_I - 1; two_m += 2) {
    double cp = std::sqrt(0.5 * (two_I - two_m + 1) / denom);
    double cm = std::sqrt(0.5 * (two_I + two_m + 1) / denom);
    u(unc(1, two_m - 1), col) = cp;
    u(unc(0, two_m + 1), col) = -cm;
    ++col;
  }
  return u;
}

}  // namespace

TEST_CASE("basis enumeration and ordering") {
  auto rb85 = AlkaliSpecies::rb85();
  HyperfineBasis basis = build_basis(rb85);

  CHECK(basis.dim() == 24);
  CHECK(basis.ground_dim() == 12);

  // a-manifold of I=5/2 has F=3 -> 7 states, b has F=2 -> 5 states
  int count_a = 0, count_b = 0;
  for (int i = 0; i < basis.ground_dim(); ++i) {
    if (basis.label(i).two_F == 6) ++count_a;
    if (basis.label(i).two_F == 4) ++count_b;
  }
  CHECK(count_a == 7);
  CHECK(count_b == 5);

  // declared ordering: first state is |S, a, m=-3>
  CHECK(basis.index_of(Sector::S, 6, -6) == 0);
  CHECK(basis.label(0).sector == Sector::S);
  CHECK(basis.label(0).two_m == -6);

  HyperfineBasis b87 = build_basis(AlkaliSpecies::rb87());
  CHECK(b87.dim() == 16);
}

TEST_CASE("coupling matrix is unitary and matches the closed form") {
  for (const auto& sp : {AlkaliSpecies::rb85(), AlkaliSpecies::rb87(), AlkaliSpecies::cs133()}) {
    Matrix u = sector_coupling_matrix(sp);
    Matrix uu = u * u.adjoint();
    CHECK((uu - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() < 1e-12);

    Matrix ref = closed_form_coupling(sp);
    CHECK((u - ref).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spin operators obey su(2) and diagonal expectations") {
  auto rb85 = AlkaliSpecies::rb85();
  HyperfineBasis basis = build_basis(rb85);
  SpinOperatorSet ops = spin_operators(basis);
  int gd = basis.ground_dim();

  // F_z diagonal with eigenvalue m
  for (int i = 0; i < basis.dim(); ++i) {
    CHECK(std::abs(ops.fz(i, i).real() - 0.5 * basis.label(i).two_m) < 1e-12);
  }
  CHECK((ops.fz - ops.fz.diagonal().asDiagonal().toDenseMatrix()).cwiseAbs().maxCoeff() < 1e-12);

  // commutator [Sx, Sy] = i Sz on the ground sector
  Matrix comm = ops.sx * ops.sy - ops.sy * ops.sx - kI * ops.sz;
  CHECK(comm.topLeftCorner(gd, gd).cwiseAbs().maxCoeff() < 1e-12);

  // S^2 = 3/4 per sector
  Matrix s2 = ops.sx * ops.sx + ops.sy * ops.sy + ops.sz * ops.sz;
  CHECK((s2 - 0.75 * Matrix::Identity(24, 24)).cwiseAbs().maxCoeff() < 1e-12);

  CHECK(std::abs(ops.sz.trace()) < 1e-12);

  // stretched state |a, 3> is pure |m_s=+1/2, m_I=+5/2>
  int idx = basis.index_of(Sector::S, 6, 6);
  CHECK(std::abs(ops.sz(idx, idx).real() - 0.5) < 1e-12);

  // hermiticity of the set, S+ = S- dagger
  for (const Matrix* m : {&ops.sx, &ops.sy, &ops.sz, &ops.ix, &ops.iz, &ops.fz, &ops.jp_x}) {
    CHECK(hermiticity_defect(*m) < 1e-12);
  }
  CHECK((ops.sp - ops.sm.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dipole jump operators connect sectors with the right selection rules") {
  auto rb85 = AlkaliSpecies::rb85();
  HyperfineBasis basis = build_basis(rb85);
  DipoleSet dip = dipole_jump_operators(basis);
  int gd = basis.ground_dim();

  for (const Matrix* a : {&dip.a0p, &dip.a0m, &dip.ap, &dip.am}) {
    CHECK(a->topLeftCorner(gd, gd).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a->bottomRightCorner(gd, gd).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a->bottomLeftCorner(gd, gd).cwiseAbs().maxCoeff() == 0.0);
  }

  // channel completeness: sum_j A_j^dag A_j = 2 * identity on the P sector
  Matrix sum = dip.a0p.adjoint() * dip.a0p + dip.a0m.adjoint() * dip.a0m +
               dip.ap.adjoint() * dip.ap + dip.am.adjoint() * dip.am;
  Matrix expect = Matrix::Zero(24, 24);
  expect.bottomRightCorner(gd, gd) = 2.0 * Matrix::Identity(gd, gd);
  CHECK((sum - expect).cwiseAbs().maxCoeff() < 1e-12);

  // independent route: build A_+ in the product basis, transform with the
  // closed-form coupling matrix, compare entrywise. A_+ flips the electronic
  // spin from +1/2 (excited) to -1/2 (ground) with m_I spectating.
  int ni = rb85.two_I + 1;
  Matrix unc = Matrix::Zero(gd, gd);
  for (int i = 0; i < ni; ++i) unc(0 * ni + i, 1 * ni + i) = 1.0;
  Matrix u = closed_form_coupling(rb85);
  Matrix sec = u.adjoint() * unc * u;
  CHECK((dip.ap.topRightCorner(gd, gd) - sec).cwiseAbs().maxCoeff() < 1e-12);

  // coupled-label selection rule: m(ground) - m(excited) = -1 for A_+
  for (int r = 0; r < gd; ++r) {
    for (int c = gd; c < 24; ++c) {
      if (std::abs(dip.ap(r, c)) > 1e-14) {
        CHECK(basis.label(r).two_m - basis.label(c).two_m == -2);
      }
    }
  }
}

TEST_CASE("pi rotation about y maps |F,m> to (-1)^(F-m) |F,-m>") {
  auto rb87 = AlkaliSpecies::rb87();
  HyperfineBasis basis = build_basis(rb87);
  SpinOperatorSet ops = spin_operators(basis);

  Eigen::SelfAdjointEigenSolver<Matrix> es(ops.fy);
  Matrix rot = es.eigenvectors() *
               (-kI * constants::pi * es.eigenvalues().cast<Complex>().array()).exp().matrix().asDiagonal() *
               es.eigenvectors().adjoint();

  for (int i = 0; i < basis.dim(); ++i) {
    const auto& l = basis.label(i);
    int j = basis.index_of(l.sector, l.two_F, -l.two_m);
    double sign = ((l.two_F - l.two_m) / 2) % 2 == 0 ? 1.0 : -1.0;
    CHECK(std::abs(rot(j, i) - Complex(sign, 0.0)) < 1e-10);
  }
}
