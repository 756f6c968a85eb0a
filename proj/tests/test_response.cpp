#include <catch2/catch_amalgamated.hpp>

#include "headerr/response.hpp"

using namespace headerr;

namespace {

SimulationConfig quick_config(AlkaliSpecies sp = AlkaliSpecies::rb87()) {
  SimulationConfig cfg;
  cfg.species = sp;
  cfg.field.B0 = 55e-6;
  cfg.field.B1 = 5e-9;
  cfg.pump.rabi = constants::two_pi * 5e5;
  cfg.rates = {5.0e9, 1.6e9, 300.0, 3000.0};
  return cfg;
}

}  // namespace

TEST_CASE("first-order state basics") {
  SimulationConfig cfg = quick_config();
  cfg.field.theta = 0.4;
  ModelParts mp = build_model(cfg);
  SteadySolution sol = solve_steady_state(mp);
  ResponseSolver solver(mp, sol);
  double w = mp.freqs.omega_L;

  SECTION("no drive, no response") {
    SimulationConfig c0 = cfg;
    c0.field.B1 = 0.0;
    ModelParts mp0 = build_model(c0);
    SteadySolution sol0 = solve_steady_state(mp0);
    ResponseSolver s0(mp0, sol0);
    CHECK(s0.first_order_state(w).cwiseAbs().maxCoeff() == 0.0);
  }

  SECTION("linearity in the drive amplitude") {
    SimulationConfig c2 = cfg;
    c2.field.B1 = 2.0 * cfg.field.B1;
    ModelParts mp2 = build_model(c2);
    SteadySolution sol2 = solve_steady_state(mp2);
    ResponseSolver s2(mp2, sol2);
    Vector r1 = solver.first_order_state(w);
    Vector r2 = s2.first_order_state(w);
    CHECK((r2 - 2.0 * r1).cwiseAbs().maxCoeff() < 1e-8 * r2.cwiseAbs().maxCoeff());
  }

  SECTION("branches are adjoints of each other") {
    Vector rp = solver.first_order_state(w, Branch::plus);
    Vector rm = solver.first_order_state(w, Branch::minus);
    int gd = mp.ground_dim();
    Matrix sy = mp.ops.sy_g.topLeftCorner(gd, gd);
    Complex tp = (expectation_row(sy) * rp)(0);
    Complex tm = (expectation_row(sy) * rm)(0);
    CHECK(std::abs(tp - std::conj(tm)) < 1e-12 * std::abs(tp));
    // the sign-flipped minus-branch perpendicular signal matches the plus one
    CHECK(-2.0 * std::imag(tm) == Catch::Approx(2.0 * std::imag(tp)).epsilon(1e-10));
  }

  SECTION("drive sign flip flips the signals") {
    SimulationConfig cm = cfg;
    cm.field.B1 = -cfg.field.B1;
    ModelParts mpm = build_model(cm);
    SteadySolution solm = solve_steady_state(mpm);
    ResponseSolver sm(mpm, solm);
    ResponsePoint a = solver.at(w), b = sm.at(w);
    CHECK(a.s_parallel == Catch::Approx(-b.s_parallel).epsilon(1e-9));
    CHECK(a.s_perpendicular == Catch::Approx(-b.s_perpendicular).epsilon(1e-9));
  }
}

TEST_CASE("signal symmetry under tilt reflection") {
  SimulationConfig cfg = quick_config();
  cfg.field.theta = 0.6;
  SimulationConfig neg = cfg;
  neg.field.theta = -0.6;

  ModelParts mp = build_model(cfg), mn = build_model(neg);
  SteadySolution sp = solve_steady_state(mp), sn = solve_steady_state(mn);
  ResponseSolver rp(mp, sp), rn(mn, sn);

  for (double off : {-3000.0, 0.0, 2500.0}) {
    double w = mp.freqs.omega_L + off;
    ResponsePoint a = rp.at(w), b = rn.at(w);
    CHECK(a.s_parallel == Catch::Approx(b.s_parallel).epsilon(1e-7).margin(1e-18));
    CHECK(a.s_perpendicular == Catch::Approx(b.s_perpendicular).epsilon(1e-7).margin(1e-18));
  }
}

TEST_CASE("parallel signal dies out at 90 degrees tilt") {
  SimulationConfig cfg = quick_config();
  cfg.field.theta = constants::pi / 2;
  cfg.numerics.rwa_signal = true;  // exact cos(theta) prefactor
  ModelParts mp = build_model(cfg);
  SteadySolution sol = solve_steady_state(mp);
  CHECK_THROWS_AS(find_precession_frequency(mp, sol, Geometry::parallel), ExtractionError);

  cfg.numerics.rwa_signal = false;
  ModelParts mpf = build_model(cfg);
  SteadySolution solf = solve_steady_state(mpf);
  ResponseSolver full(mpf, solf);

  SimulationConfig small = cfg;
  small.numerics.rwa_signal = false;
  small.field.theta = 0.1;
  ModelParts mps = build_model(small);
  SteadySolution sols = solve_steady_state(mps);
  ResponseSolver ref(mps, sols);

  double w = mpf.freqs.omega_L - mpf.freqs.omega_nuz;
  CHECK(std::abs(full.at(w).s_parallel) < 1e-5 * std::abs(ref.at(w).s_parallel));
}

TEST_CASE("precession frequency extraction at the default working point") {
  SimulationConfig cfg = quick_config(AlkaliSpecies::rb85());
  cfg.field.theta = 0.3;
  ModelParts mp = build_model(cfg);
  SteadySolution sol = solve_steady_state(mp);

  PrecessionResult par = find_precession_frequency(mp, sol, Geometry::parallel);
  PrecessionResult perp = find_precession_frequency(mp, sol, Geometry::perpendicular);

  double wl = mp.freqs.omega_L;
  CHECK(par.omega0 < wl);
  CHECK(perp.omega0 < wl);
  CHECK(par.omega0 > wl - 2.0 * mp.freqs.omega_nuz);
  CHECK(std::abs(par.residual) < 1e-6);
  CHECK(par.omega0 > par.bracket_lo);
  CHECK(par.omega0 < par.bracket_hi);

  SECTION("result is drive-amplitude independent in the linear regime") {
    SimulationConfig c1 = cfg, c2 = cfg;
    c1.field.B1 = 1e-4 * std::abs(cfg.field.B0);
    c2.field.B1 = 1e-3 * std::abs(cfg.field.B0);
    PipelinePoint p1 = run_pipeline_point(c1);
    PipelinePoint p2 = run_pipeline_point(c2);
    CHECK(std::abs(p1.omega0_par - p2.omega0_par) < cfg.numerics.root_tol);
    CHECK(std::abs(p1.omega0_perp - p2.omega0_perp) < cfg.numerics.root_tol);
  }

  SECTION("observable RWA variant is a sub-0.1 Hz effect") {
    SimulationConfig cr = cfg;
    cr.numerics.rwa_signal = true;
    ModelParts mpr = build_model(cr);
    SteadySolution solr = solve_steady_state(mpr);
    PrecessionResult par_r = find_precession_frequency(mpr, solr, Geometry::parallel);
    CHECK(std::abs(par_r.omega0 - par.omega0) < constants::two_pi * 0.1);
  }
}

TEST_CASE("only the nuclear splitting: helicities agree") {
  SimulationConfig cfg = quick_config(AlkaliSpecies::rb87());
  cfg.field.theta = 0.5;
  cfg.numerics.zeeman_mode = ZeemanMode::perturbative;
  cfg.toggles = {false, true, false};

  SimulationConfig minus = cfg;
  minus.pump.helicity = Helicity::sigma_minus;

  PipelinePoint p = run_pipeline_point(cfg);
  PipelinePoint m = run_pipeline_point(minus);
  CHECK(std::abs(p.omega0_par - m.omega0_par) < 2.0 * cfg.numerics.root_tol);
  CHECK(std::abs(p.omega0_perp - m.omega0_perp) < 2.0 * cfg.numerics.root_tol);
}

TEST_CASE("helicity inversion equals field inversion for the output frequency") {
  SimulationConfig lit = quick_config(AlkaliSpecies::rb87());
  lit.field.theta = 0.4;
  lit.pump.helicity = Helicity::sigma_minus;

  SimulationConfig inv = lit;
  inv.pump.helicity = Helicity::sigma_plus;
  inv.field.B0 = -lit.field.B0;

  PipelinePoint a = run_pipeline_point(lit);
  PipelinePoint b = run_pipeline_point(inv);
  CHECK(std::abs(a.omega0_par - b.omega0_par) < 2.0 * lit.numerics.root_tol);
  CHECK(std::abs(a.omega0_perp - b.omega0_perp) < 2.0 * lit.numerics.root_tol);
}

TEST_CASE("tilt parity of the output frequency") {
  SimulationConfig cfg = quick_config(AlkaliSpecies::rb87());
  for (double th : {10.0, 40.0}) {
    SimulationConfig cp = cfg, cn = cfg;
    cp.field.theta = th * constants::pi / 180.0;
    cn.field.theta = -th * constants::pi / 180.0;
    PipelinePoint a = run_pipeline_point(cp);
    PipelinePoint b = run_pipeline_point(cn);
    CHECK(std::abs(a.omega0_par - b.omega0_par) < 2.0 * cfg.numerics.root_tol);
    CHECK(std::abs(a.omega0_perp - b.omega0_perp) < 2.0 * cfg.numerics.root_tol);
  }
}
