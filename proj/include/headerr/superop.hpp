#pragma once

// Dense superoperators acting on column-major vectorized density matrices:
// vec(A rho B) = (B^T (x) A) vec(rho). For a state space of dimension d the
// superspace index of the (row r, col c) matrix element is c*d + r.

#include <Eigen/Dense>

#include "headerr/spin_algebra.hpp"

namespace headerr {

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

struct Superoperator {
  Matrix mat;  // d^2 x d^2
  int dim = 0;

  Superoperator() = default;
  Superoperator(Matrix m, int d) : mat(std::move(m)), dim(d) {}

  static Superoperator zero(int d) { return {Matrix::Zero(d * d, d * d), d}; }

  Vector apply(const Matrix& rho) const {
    return mat * Eigen::Map<const Vector>(rho.data(), rho.size());
  }
  Matrix apply_matrix(const Matrix& rho) const {
    Vector v = apply(rho);
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
  }

  Superoperator& operator+=(const Superoperator& o) {
    mat += o.mat;
    return *this;
  }
  Superoperator operator+(const Superoperator& o) const { return {mat + o.mat, dim}; }
  Superoperator operator*(double s) const { return {mat * s, dim}; }
};

inline Matrix spre(const Matrix& a) { return kron(Matrix::Identity(a.rows(), a.cols()), a); }
inline Matrix spost(const Matrix& b) { return kron(b.transpose(), Matrix::Identity(b.rows(), b.cols())); }
// rho -> a rho b^dag
inline Matrix sandwich(const Matrix& a, const Matrix& b) { return kron(b.conjugate(), a); }

// -i [H, rho]
inline Superoperator commutator_superop(const Matrix& h) {
  return {-kI * (spre(h) - spost(h)), static_cast<int>(h.rows())};
}

// rate * (2 L rho L^dag - {rho, L^dag L})
inline Superoperator lindblad_superop(double rate, const Matrix& l) {
  Matrix ldl = l.adjoint() * l;
  Matrix m = 2.0 * sandwich(l, l) - spre(ldl) - spost(ldl);
  return {rate * m, static_cast<int>(l.rows())};
}

// Row vector t with t * vec(rho) = Tr(rho).
inline Eigen::RowVectorXcd trace_row(int d) {
  Eigen::RowVectorXcd t = Eigen::RowVectorXcd::Zero(d * d);
  for (int i = 0; i < d; ++i) t(i * d + i) = 1.0;
  return t;
}

// Row vector with r * vec(rho) = Tr(A rho).
inline Eigen::RowVectorXcd expectation_row(const Matrix& a) {
  int d = static_cast<int>(a.rows());
  Eigen::RowVectorXcd r(d * d);
  for (int c = 0; c < d; ++c)
    for (int rr = 0; rr < d; ++rr) r(c * d + rr) = a(c, rr);
  return r;
}

inline Vector vectorize(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}
inline Matrix unvectorize(const Vector& v, int d) {
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

// Largest |x - x^dag| entry of the matrix a superoperator produced;
// Hermiticity-preserving generators keep this at roundoff level.
inline double antihermitian_defect(const Vector& v, int d) {
  Matrix m = unvectorize(v, d);
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace headerr
