#include <doctest.h>

#include <cmath>

#include "slowfast/scenario.hpp"

using namespace slowfast;

namespace {

CrossFormSystem::MapFn affine(double a, double b, double c) {
  return [a, b, c](const VectorXd& x, const VectorXd& ybar, const Vector2d&, double) {
    return (a * x + b * ybar + VectorXd::Constant(x.size(), c)).eval();
  };
}

// f = 0.5 x + 0.25, g = 0.5 ybar for every symbol pair; phi = 0.
CrossFormSystem simple_system() {
  CrossFormSystem sys;
  sys.xy_dim = 1;
  sys.lambda = 0.5;
  sys.R = 1.0;
  sys.D = Domain::box2(-1, 1, -1, 1);
  for (int c = 0; c < 2; ++c)
    for (int cp = 0; cp < 2; ++cp) {
      sys.f[c][cp] = affine(0.5, 0.0, 0.25);
      sys.g[c][cp] = affine(0.0, 0.5, 0.0);
      sys.phi[c][cp] = [](const VectorXd&, const VectorXd&, const Vector2d&, double) {
        return Vector2d::Zero().eval();
      };
    }
  return sys;
}

}  // namespace

TEST_CASE("code indexing over tails and core") {
  const Code c("ab", "ba", "a");
  // Core at [0, 2): "ba".
  CHECK(c.symbol(0) == SYM_B);
  CHECK(c.symbol(1) == SYM_A);
  // Right tail "a" repeats from index 2.
  CHECK(c.symbol(2) == SYM_A);
  CHECK(c.symbol(100) == SYM_A);
  // Left tail "ab" ends at index -1: ..., a(-4), b(-3), a(-2), b(-1).
  CHECK(c.symbol(-1) == SYM_B);
  CHECK(c.symbol(-2) == SYM_A);
  CHECK(c.symbol(-3) == SYM_B);
  CHECK(c.symbol(-4) == SYM_A);

  const Code p = Code::pure('b');
  CHECK(p.symbol(-7) == SYM_B);
  CHECK(p.symbol(0) == SYM_B);
  CHECK(p.core_length() == 0);

  CHECK_THROWS_AS(Code("", "a", "b"), ParameterError);
  CHECK_THROWS_AS(Code("a", "xq", "b"), ParameterError);
}

TEST_CASE("contraction estimates") {
  const CrossFormSystem sys = simple_system();
  const ContractionReport r = check_contraction(sys, 100);
  CHECK(r.pass);
  CHECK(r.lambda_hat == doctest::Approx(0.5).epsilon(1e-6));

  CrossFormSystem expanding = simple_system();
  expanding.f[0][0] = affine(1.2, 0.0, 0.0);
  const ContractionReport r2 = check_contraction(expanding, 100);
  CHECK(!r2.pass);
  CHECK(r2.lambda_hat == doctest::Approx(1.2).epsilon(1e-6));

  CrossFormSystem constant = simple_system();
  for (int c = 0; c < 2; ++c)
    for (int cp = 0; cp < 2; ++cp) {
      constant.f[c][cp] = affine(0.0, 0.0, 0.3);
      constant.g[c][cp] = affine(0.0, 0.0, -0.2);
    }
  CHECK(check_contraction(constant, 50).lambda_hat <= 1e-9);
}

TEST_CASE("orbit for code: fixed points of the coding operator") {
  const CrossFormSystem sys = simple_system();
  const Vector2d z(0.1, -0.2);

  // a^infty: x = 0.5 x + 0.25 -> 0.5; y = 0.5 y -> 0.
  const SymbolicOrbit orb = orbit_for_code(sys, Code::pure('a'), z);
  for (long i = orb.i_lo; i <= orb.i_hi; ++i) {
    CHECK(std::abs(orb.x_at(i)(0) - 0.5) <= 1e-12);
    CHECK(std::abs(orb.y_at(i)(0)) <= 1e-12);
  }
  CHECK(orb.residual <= 1e-12);
  CHECK(orb.convergence_factor <= 0.5 + 1e-3);
  CHECK_THROWS_AS(orb.x_at(orb.i_hi + 1), SurfaceWindowExceeded);

  // Constant maps: the orbit equals those constants everywhere.
  CrossFormSystem constant = simple_system();
  for (int c = 0; c < 2; ++c)
    for (int cp = 0; cp < 2; ++cp) {
      constant.f[c][cp] = affine(0.0, 0.0, 0.3);
      constant.g[c][cp] = affine(0.0, 0.0, -0.2);
    }
  const SymbolicOrbit co = orbit_for_code(constant, Code("a", "ab", "b"), z);
  for (long i = co.i_lo; i <= co.i_hi; ++i) {
    CHECK(std::abs(co.x_at(i)(0) - 0.3) <= 1e-13);
    CHECK(std::abs(co.y_at(i)(0) + 0.2) <= 1e-13);
  }
}

TEST_CASE("(ab)^infty orbit solves the 2x2 linear system") {
  CrossFormSystem sys = simple_system();
  // Distinct affine pairs: f_{cc'} = 0.3 x + 0.2 ybar + c_f[c][c'], g = 0.25 x + 0.25 ybar + c_g.
  const double cf[2][2] = {{0.20, 0.12}, {-0.15, 0.25}};
  const double cg[2][2] = {{-0.10, 0.22}, {0.18, -0.20}};
  for (int c = 0; c < 2; ++c)
    for (int cp = 0; cp < 2; ++cp) {
      sys.f[c][cp] = affine(0.3, 0.2, cf[c][cp]);
      sys.g[c][cp] = affine(0.25, 0.25, cg[c][cp]);
    }
  const Code code("ab", "", "ab");  // (ab)^infty, even indices 'a'
  const SymbolicOrbit orb = orbit_for_code(sys, code, Vector2d(0, 0));

  // 2-periodic orbit (x_a, x_b, y_a, y_b): solve the linear system directly.
  // x_a = 0.3 x_b + 0.2 y_a + cf[b][a], x_b = 0.3 x_a + 0.2 y_b + cf[a][b],
  // y_a = 0.25 x_a + 0.25 y_b + cg[a][b], y_b = 0.25 x_b + 0.25 y_a + cg[b][a].
  Eigen::Matrix4d A;
  Eigen::Vector4d rhs;
  A << 1, -0.3, -0.2, 0, -0.3, 1, 0, -0.2, -0.25, 0, 1, -0.25, 0, -0.25, -0.25, 1;
  rhs << cf[1][0], cf[0][1], cg[0][1], cg[1][0];
  const Eigen::Vector4d sol = A.colPivHouseholderQr().solve(rhs);

  CHECK(std::abs(orb.x_at(0)(0) - sol(0)) <= 1e-11);
  CHECK(std::abs(orb.x_at(1)(0) - sol(1)) <= 1e-11);
  CHECK(std::abs(orb.y_at(0)(0) - sol(2)) <= 1e-11);
  CHECK(std::abs(orb.y_at(1)(0) - sol(3)) <= 1e-11);
  CHECK(std::abs(orb.x_at(2)(0) - sol(0)) <= 1e-11);  // 2-periodicity
}

TEST_CASE("mix estimate margins") {
  const SyntheticScenario sc = make_synthetic_scenario();
  const CrossFormSystem& sys = sc.sys;
  const Vector2d z(0.4, 0.1);

  // Codes agreeing on |i| <= 3, diverging outside.
  const Code c1("aab", "abab", "a");
  const Code c2("baab", "ababbb", "b");
  const int n = 3;
  const auto margins = mix_check(sys, c1, c2, n, z);
  REQUIRE(!margins.empty());
  for (const MixMargin& m : margins) {
    CHECK(std::labs(m.i) <= n);
    CHECK(m.bound == doctest::Approx(2 * sys.R * std::pow(sys.lambda, n - std::labs(m.i))));
    CHECK(m.measured <= m.bound + 1e-12);
  }

  // Identical codes: zero differences.
  for (const MixMargin& m : mix_check(sys, c1, c1, n, z)) CHECK(m.measured <= 1e-12);

  // Disagreement inside the block is rejected.
  CHECK_THROWS_AS(mix_check(sys, Code::pure('a'), Code::pure('b'), 2, z), PreconditionError);
}

TEST_CASE("mollifier cutoff behavior") {
  const SyntheticScenario sc = make_synthetic_scenario();
  const CrossFormSystem& sys = sc.sys;
  const double delta = 0.2;
  const CrossFormSystem m = mollify(sys, delta);

  const VectorXd x = VectorXd::Constant(1, 0.3), y = VectorXd::Constant(1, -0.4);
  // Deep inside: unchanged bit-exactly.
  const Vector2d zin(0.5, 0.0);
  CHECK((m.phi_at(0, 1)(x, y, zin, 0.01) - sys.phi_at(0, 1)(x, y, zin, 0.01)).norm() == 0.0);
  // Within delta/2 of the boundary: exactly zero.
  const Vector2d zb(0.5 + 2.6 - 0.05, 0.0);
  CHECK(m.phi_at(1, 1)(x, y, zb, 0.01).norm() == 0.0);
  // In between: magnitude never exceeds the original.
  for (double r : {2.42, 2.45, 2.48}) {
    const Vector2d zm(0.5 + r, 0.0);
    CHECK(m.phi_at(0, 0)(x, y, zm, 0.01).norm() <=
          sys.phi_at(0, 0)(x, y, zm, 0.01).norm() + 1e-15);
  }

  CHECK_THROWS_AS(mollify(sys, -0.1), ParameterError);
  CHECK_THROWS_AS(mollify(sys, 10.0), ParameterError);
}

TEST_CASE("invariant surfaces: frozen consistency and bounds") {
  const SyntheticScenario sc = make_synthetic_scenario();
  const CrossFormSystem msys = mollify(sc.sys, sc.mollify_delta);
  const Code code("a", "ab", "b");
  SurfaceConfig cfg;
  cfg.grid_resolution = 9;
  cfg.family_window = 3;
  cfg.residual_samples = 4;

  const SurfaceFamily fam0 = invariant_surfaces(msys, code, 0.0, cfg);
  for (long i = fam0.i_lo; i <= fam0.i_hi; ++i) {
    const SurfaceGrid& g = fam0.grid_at(i);
    for (int a = 0; a < g.n; a += 4)
      for (int b = 0; b < g.n; b += 4) {
        const Vector2d z(g.v0 + a * g.hv, g.u0 + b * g.hu);
        const SymbolicOrbit orb = orbit_for_code(msys, code, z);
        CHECK((g.x[a * g.n + b] - orb.x_at(i)).norm() <= 1e-10);
        CHECK((g.y[a * g.n + b] - orb.y_at(i)).norm() <= 1e-10);
      }
  }

  const SurfaceFamily fam = invariant_surfaces(msys, code, 1e-2, cfg);
  CHECK(fam.invariance_residual <= 1e-8);
  for (const SurfaceGrid& g : fam.grids)
    for (size_t k = 0; k < g.x.size(); ++k) {
      CHECK(g.x[k].lpNorm<Eigen::Infinity>() <= msys.R + 1e-12);
      CHECK(g.y[k].lpNorm<Eigen::Infinity>() <= msys.R + 1e-12);
    }
  CHECK(std::isfinite(fam.max_z_derivative));
  CHECK_THROWS_AS(fam.grid_at(fam.i_hi + 1), SurfaceWindowExceeded);
}

TEST_CASE("pure-code surfaces are index independent") {
  const SyntheticScenario sc = make_synthetic_scenario();
  const CrossFormSystem msys = mollify(sc.sys, sc.mollify_delta);
  SurfaceConfig cfg;
  cfg.grid_resolution = 5;
  cfg.family_window = 3;
  cfg.residual_samples = 2;
  const SurfaceFamily fam = invariant_surfaces(msys, Code::pure('a'), 1e-2, cfg);
  const SurfaceGrid& ref = fam.grid_at(0);
  for (long i = fam.i_lo; i <= fam.i_hi; ++i) {
    const SurfaceGrid& g = fam.grid_at(i);
    for (size_t k = 0; k < g.x.size(); ++k) {
      CHECK((g.x[k] - ref.x[k]).norm() <= 1e-10);
      CHECK((g.y[k] - ref.y[k]).norm() <= 1e-10);
    }
  }
}

TEST_CASE("slow map invertibility guard") {
  CrossFormSystem sys = simple_system();
  sys.D = Domain::ball2(0, 0, 1);
  for (int c = 0; c < 2; ++c)
    for (int cp = 0; cp < 2; ++cp)
      sys.phi[c][cp] = [](const VectorXd&, const VectorXd&, const Vector2d& z, double) {
        return (300.0 * z).eval();  // eps |dphi/dz| >= 1 at eps = 1e-2
      };
  CHECK_THROWS_AS(invariant_surfaces(sys, Code::pure('a'), 1e-2), SlowMapNotInvertible);
}
