#pragma once

// Linear response of the eliminated ground dynamics to the RF drive and the
// extraction of the precession frequency.
//
// The first-order sideband amplitude solves
//   (L_eff - i w) rho1 + L1 rho0 = 0,
// where L_eff also carries the spin-exchange response terms proportional to
// Tr(S_+- rho1), folded in as a rank-2 update built from rho0. The measured
// signals are
//   parallel probe:      S_par(w) = 2 Re Tr[(S_x cos t - S_z sin t) rho1]
//   perpendicular probe: S_perp(w) = 2 Im Tr[S_y rho1]
// and the magnetometer output w0 is the zero crossing nearest the Larmor
// frequency.

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <vector>

#include "headerr/reduction.hpp"

namespace headerr {

enum class Branch { plus, minus };

struct ResponsePoint {
  double omega = 0.0;  // rad/s
  double s_parallel = 0.0;
  double s_perpendicular = 0.0;
};

struct PrecessionResult {
  double omega0 = 0.0;  // rad/s
  Geometry geometry = Geometry::parallel;
  double bracket_lo = 0.0, bracket_hi = 0.0;
  double residual = 0.0;  // |signal(omega0)|
  double slope = 0.0;     // d signal / d omega at the crossing
};

struct ExtractionError : std::runtime_error {
  std::vector<ResponsePoint> scan;
  ExtractionError(const std::string& what, std::vector<ResponsePoint> trace)
      : std::runtime_error(what), scan(std::move(trace)) {}
};

// Ground-sector response machinery built once per converged steady state.
class ResponseSolver {
 public:
  ResponseSolver(const ModelParts& mp, const SteadySolution& sol)
      : gd_(mp.ground_dim()), theta_(mp.config.field.theta) {
    int gd = gd_;
    Matrix sxg = mp.ops.sx_g.topLeftCorner(gd, gd);
    Matrix syg = mp.ops.sy_g.topLeftCorner(gd, gd);
    Matrix szg = mp.ops.sz_g.topLeftCorner(gd, gd);
    Matrix spg = mp.ops.sp_g.topLeftCorner(gd, gd);
    Matrix smg = mp.ops.sm_g.topLeftCorner(gd, gd);

    obs_par_full_ = expectation_row(sxg * std::cos(theta_) - szg * std::sin(theta_));
    obs_par_rwa_ = expectation_row(sxg * std::cos(theta_));
    obs_perp_ = expectation_row(syg);
    rwa_signal_ = mp.config.numerics.rwa_signal;

    // rank-2 spin-exchange response coupling: terms proportional to
    // Tr(S+ rho1) and Tr(S- rho1) acting through rho0
    const Matrix& rho0 = sol.state.rho;
    double gse = mp.config.rates.gamma_SE;
    Matrix vm = 2.0 * gse *
                (smg * rho0 * szg - szg * rho0 * smg + 0.5 * (rho0 * smg + smg * rho0));
    Matrix vp = 2.0 * gse *
                (szg * rho0 * spg - spg * rho0 * szg + 0.5 * (rho0 * spg + spg * rho0));
    Vector vm_vec = vectorize(vm), vp_vec = vectorize(vp);
    Eigen::RowVectorXcd row_p = expectation_row(spg), row_m = expectation_row(smg);

    system_base_ = sol.eff.total();
    system_base_ += vm_vec * row_p;  // <S+ rho1> source
    system_base_ += vp_vec * row_m;  // <S- rho1> source

    GroundProjection proj = GroundProjection::make(mp.dim(), gd);
    Matrix l1 = detail::gather(mp.l1_drive.mat, proj.p_idx, proj.p_idx);
    rhs_ = -(l1 * vectorize(rho0));
  }

  // rho1^(+); the minus branch is its adjoint
  Vector first_order_state(double omega, Branch branch = Branch::plus) const {
    Matrix a = system_base_;
    a.diagonal().array() -= kI * omega;
    Eigen::PartialPivLU<Matrix> lu(a);
    double rc = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(rc > 0.0)) throw std::runtime_error("response system is singular at this frequency");
    Vector rho1 = lu.solve(rhs_);
    if (branch == Branch::minus) {
      Matrix m = unvectorize(rho1, gd_).adjoint();
      return vectorize(m);
    }
    return rho1;
  }

  double signal_parallel(const Vector& rho1) const {
    const auto& row = rwa_signal_ ? obs_par_rwa_ : obs_par_full_;
    return 2.0 * (row * rho1)(0).real();
  }
  double signal_perpendicular(const Vector& rho1) const {
    return 2.0 * (obs_perp_ * rho1)(0).imag();
  }

  ResponsePoint at(double omega) const {
    Vector rho1 = first_order_state(omega);
    return {omega, signal_parallel(rho1), signal_perpendicular(rho1)};
  }

  double signal(double omega, Geometry g) const {
    Vector rho1 = first_order_state(omega);
    return g == Geometry::parallel ? signal_parallel(rho1) : signal_perpendicular(rho1);
  }

 private:
  int gd_;
  double theta_;
  bool rwa_signal_ = false;
  Matrix system_base_;
  Vector rhs_;
  Eigen::RowVectorXcd obs_par_full_, obs_par_rwa_, obs_perp_;
};

namespace detail {

struct Crossing {
  double lo, hi;      // bracketing pair from the scan
  double root = 0.0;  // refined position
  double slope = 0.0;
};

}  // namespace detail

// Scan [w_L - W, w_L + W], locate sign changes of the selected signal, pick
// the crossing nearest w_L and refine it by bisection.
inline PrecessionResult find_precession_frequency(const ModelParts& mp, const SteadySolution& sol,
                                                  Geometry geometry) {
  const auto& cfg = mp.config;
  ResponseSolver solver(mp, sol);

  double omega_l = mp.freqs.omega_L;
  double linewidth_est = cfg.rates.gamma_SD + cfg.rates.gamma_SE + pumping_rate_estimate(mp);
  double half_width = std::max(20.0 * mp.freqs.omega_nuz, 50.0 * linewidth_est);
  half_width = std::min(half_width, 0.5 * omega_l);  // stay away from w = 0
  double lo = omega_l - half_width, hi = omega_l + half_width;

  int n = std::max(cfg.numerics.scan_points, 9);
  std::vector<ResponsePoint> scan(n);
  for (int i = 0; i < n; ++i) {
    double w = lo + (hi - lo) * i / (n - 1);
    scan[i] = solver.at(w);
  }
  auto value = [&](const ResponsePoint& p) {
    return geometry == Geometry::parallel ? p.s_parallel : p.s_perpendicular;
  };

  std::vector<detail::Crossing> crossings;
  for (int i = 0; i + 1 < n; ++i) {
    double a = value(scan[i]), b = value(scan[i + 1]);
    if (a == 0.0 && b == 0.0) continue;
    if (a == 0.0 || a * b < 0.0) crossings.push_back({scan[i].omega, scan[i + 1].omega});
  }
  if (crossings.empty())
    throw ExtractionError("no zero crossing of the response inside the scan bracket", scan);

  std::sort(crossings.begin(), crossings.end(), [&](const auto& a, const auto& b) {
    return std::abs(0.5 * (a.lo + a.hi) - omega_l) < std::abs(0.5 * (b.lo + b.hi) - omega_l);
  });
  if (crossings.size() > 1) {
    double d0 = std::abs(0.5 * (crossings[0].lo + crossings[0].hi) - omega_l);
    double d1 = std::abs(0.5 * (crossings[1].lo + crossings[1].hi) - omega_l);
    if (std::abs(d0 - d1) < (hi - lo) / (n - 1))
      throw ExtractionError("ambiguous crossings equidistant from the Larmor frequency", scan);
  }

  detail::Crossing c = crossings.front();
  double fa = solver.signal(c.lo, geometry);
  double fb = solver.signal(c.hi, geometry);
  double a = c.lo, b = c.hi;
  while (b - a > cfg.numerics.root_tol) {
    double mid = 0.5 * (a + b);
    double fm = solver.signal(mid, geometry);
    if (fm == 0.0) {
      a = b = mid;
      break;
    }
    if (fa * fm < 0.0) {
      b = mid;
      fb = fm;
    } else {
      a = mid;
      fa = fm;
    }
  }

  PrecessionResult res;
  res.omega0 = 0.5 * (a + b);
  res.geometry = geometry;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.residual = std::abs(solver.signal(res.omega0, geometry));
  double h = std::max(cfg.numerics.root_tol, 1e-9 * res.omega0);
  res.slope = (solver.signal(res.omega0 + h, geometry) - solver.signal(res.omega0 - h, geometry)) /
              (2.0 * h);
  return res;
}

// One full pipeline point: model assembly, steady state, and both-geometry
// extraction from the shared response. This is the unit of work for curves.
struct PipelinePoint {
  double omega0_par = 0.0;   // rad/s
  double omega0_perp = 0.0;  // rad/s
  SteadyState steady;
  double omega_L = 0.0;

  double omega0(Geometry g) const {
    return g == Geometry::parallel ? omega0_par : omega0_perp;
  }
};

inline PipelinePoint run_pipeline_point(const SimulationConfig& cfg) {
  ModelParts mp = build_model(cfg);
  SteadySolution sol = solve_steady_state(mp);
  PipelinePoint out;
  out.omega0_par = find_precession_frequency(mp, sol, Geometry::parallel).omega0;
  out.omega0_perp = find_precession_frequency(mp, sol, Geometry::perpendicular).omega0;
  out.steady = sol.state;
  out.omega_L = mp.freqs.omega_L;
  return out;
}

}  // namespace headerr
