#include <doctest.h>

#include <cmath>
#include <random>

#include "slowfast/domain.hpp"
#include "slowfast/model.hpp"

using namespace slowfast;

namespace {

HamiltonianModel unit_oscillator() {
  return builtin_oscillator(SlowField::constant(1.0), standard_energy_field(1.0));
}

HamiltonianModel quad_perturbative() {
  // H0 = (p^2 + q^2)/2 - 1, H1 = u q^2.
  FastHamiltonian h0;
  h0.fast_dof = 1;
  h0.value = [](const FastPoint& w) { return 0.5 * (w.p(0) * w.p(0) + w.q(0) * w.q(0)) - 1.0; };
  h0.dHdp = [](const FastPoint& w) { return w.p; };
  h0.dHdq = [](const FastPoint& w) { return w.q; };
  CoupledHamiltonian h1;
  h1.dims = {1, 1};
  h1.value = [](const FastPoint& w, const SlowPoint& z) { return z.u(0) * w.q(0) * w.q(0); };
  h1.dHdp = [](const FastPoint& w, const SlowPoint&) { return VectorXd::Zero(1).eval(); };
  h1.dHdq = [](const FastPoint& w, const SlowPoint& z) {
    return (2 * z.u(0) * w.q).eval();
  };
  h1.dHdv = [](const FastPoint&, const SlowPoint&) { return VectorXd::Zero(1).eval(); };
  h1.dHdu = [](const FastPoint& w, const SlowPoint&) {
    return VectorXd::Constant(1, w.q(0) * w.q(0)).eval();
  };
  return make_perturbative(h0, h1);
}

}  // namespace

TEST_CASE("oscillator evaluation at pinned points") {
  const HamiltonianModel m = unit_oscillator();
  const Evaluation e1 = evaluate(m, FastPoint::make(1, 1), SlowPoint::make(0, 0), 0.0);
  CHECK(e1.H == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(e1.dHdp(0) == doctest::Approx(1.0));
  CHECK(e1.dHdq(0) == doctest::Approx(1.0));
  CHECK(e1.dHdv(0) == doctest::Approx(0.0));
  CHECK(e1.dHdu(0) == doctest::Approx(0.0));

  const Evaluation e2 = evaluate(m, FastPoint::make(0, 0), SlowPoint::make(0, 0), 0.0);
  CHECK(e2.H == doctest::Approx(-1.0));

  const Evaluation e3 = evaluate(m, FastPoint::make(1, 1), SlowPoint::make(0, 1), 0.0);
  CHECK(e3.dHdu(0) == doctest::Approx(-1.0));
}

TEST_CASE("full vector field signs and frozen limit") {
  const HamiltonianModel m = unit_oscillator();
  const FullState s{FastPoint::make(1, 1), SlowPoint::make(0, 0)};
  const FullState d = full_vector_field(m, s, 0.3);
  CHECK(d.w.q(0) == doctest::Approx(1.0));   // qdot = dH/dp
  CHECK(d.w.p(0) == doctest::Approx(-1.0));  // pdot = -dH/dq
  CHECK(d.z.u(0) == doctest::Approx(0.0));
  CHECK(d.z.v(0) == doctest::Approx(0.0));

  const FullState s2{FastPoint::make(1, 1), SlowPoint::make(0, 1)};
  const FullState d2 = full_vector_field(m, s2, 0.1);
  CHECK(d2.z.u(0) == doctest::Approx(0.0));
  CHECK(d2.z.v(0) == doctest::Approx(0.1));  // vdot = -eps dH/du = eps*u

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const FullState r{FastPoint::make(unit(rng), unit(rng)),
                      SlowPoint::make(unit(rng), unit(rng))};
    const FullState dz = full_vector_field(m, r, 0.0);
    CHECK(dz.z.v(0) == 0.0);
    CHECK(dz.z.u(0) == 0.0);
    const FastPoint fw = frozen_vector_field(m, r.w, r.z);
    CHECK(fw.p(0) == dz.w.p(0));
    CHECK(fw.q(0) == dz.w.q(0));
  }
}

TEST_CASE("frozen field pinned value and saddle invariant subspace") {
  const HamiltonianModel m = unit_oscillator();
  const FastPoint d = frozen_vector_field(m, FastPoint::make(0, 1), SlowPoint::make(0, 0));
  CHECK(d.q(0) == doctest::Approx(0.0));
  CHECK(d.p(0) == doctest::Approx(-1.0));

  const HamiltonianModel sad = builtin_saddle_oscillator(0.5, 1.0, 1.0);
  FastPoint w = FastPoint::zero(2);
  w.p(1) = 0.7;
  w.q(1) = 0.3;
  const FastPoint dw = frozen_vector_field(sad, w, SlowPoint::make(0, 0));
  CHECK(dw.p(0) == doctest::Approx(0.0));
  CHECK(dw.q(0) == doctest::Approx(0.0));
}

TEST_CASE("perturbative model assembly") {
  const HamiltonianModel m = quad_perturbative();
  CHECK(m.perturbative);

  const FullState s{FastPoint::make(0.3, 1.2), SlowPoint::make(0.4, -0.7)};
  // vdot = -dH/du = -eps q^2 (perturbative slow equations carry no extra eps).
  const double eps = 0.05;
  const FullState d = full_vector_field(m, s, eps);
  CHECK(d.z.v(0) == doctest::Approx(-eps * 1.2 * 1.2).epsilon(1e-13));

  // Exact linear eps scaling of the slow components.
  const FullState d2 = full_vector_field(m, s, 2 * eps);
  CHECK(d2.z.v(0) == doctest::Approx(2 * d.z.v(0)).epsilon(1e-15));
  CHECK(d2.z.u(0) == doctest::Approx(2 * d.z.u(0)).epsilon(1e-15));

  // eps = 0 frozen field equals the H0 field.
  const FastPoint f0 = frozen_vector_field(m, s.w, s.z);
  CHECK(f0.q(0) == doctest::Approx(0.3));
  CHECK(f0.p(0) == doctest::Approx(-1.2));

  // H1 = 0 -> zero slow components at any eps.
  FastHamiltonian h0;
  h0.fast_dof = 1;
  h0.value = [](const FastPoint& w) { return 0.5 * w.p(0) * w.p(0); };
  h0.dHdp = [](const FastPoint& w) { return w.p; };
  h0.dHdq = [](const FastPoint&) { return VectorXd::Zero(1).eval(); };
  CoupledHamiltonian h1;
  h1.dims = {1, 1};
  h1.value = [](const FastPoint&, const SlowPoint&) { return 0.0; };
  h1.dHdp = h1.dHdq = [](const FastPoint&, const SlowPoint&) { return VectorXd::Zero(1).eval(); };
  h1.dHdv = h1.dHdu = [](const FastPoint&, const SlowPoint&) { return VectorXd::Zero(1).eval(); };
  const HamiltonianModel z = make_perturbative(h0, h1);
  const FullState dz = full_vector_field(z, s, 0.7);
  CHECK(dz.z.v(0) == 0.0);
  CHECK(dz.z.u(0) == 0.0);
}

TEST_CASE("builtin parameter validation") {
  const HamiltonianModel bad =
      builtin_oscillator(SlowField::constant(-1.0), standard_energy_field(1.0));
  CHECK_THROWS_AS(evaluate(bad, FastPoint::make(1, 0), SlowPoint::make(0, 0), 0.0), ModelError);
  CHECK_THROWS_AS(builtin_saddle_oscillator(-0.5, 1.0, 1.0), ModelError);
  CHECK_THROWS_AS(builtin_saddle_oscillator(0.5, 0.0, 1.0), ModelError);
}

TEST_CASE("reference action of the oscillator") {
  const HamiltonianModel m = unit_oscillator();
  REQUIRE(m.reference_action);
  CHECK(m.reference_action(SlowPoint::make(0, 0)) == doctest::Approx(2 * M_PI).epsilon(1e-12));
  CHECK(m.reference_action(SlowPoint::make(1, 0)) == doctest::Approx(3 * M_PI).epsilon(1e-12));
}

TEST_CASE("analytic gradients agree with finite differences") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(-1.5, 1.5);
  const double h = 1e-5;
  for (const HamiltonianModel& m :
       {unit_oscillator(), builtin_saddle_oscillator(0.5, 1.0, 1.0), quad_perturbative()}) {
    const int md = m.dims.fast_dof;
    for (int s = 0; s < 100; ++s) {
      FastPoint w = FastPoint::zero(md);
      for (int k = 0; k < md; ++k) {
        w.p(k) = unit(rng);
        w.q(k) = unit(rng);
      }
      const SlowPoint z = SlowPoint::make(unit(rng), unit(rng));
      const double eps = 0.05;
      const Evaluation e = evaluate(m, w, z, eps);
      auto fd_ok = [&](double analytic, double plus, double minus) {
        const double fd = (plus - minus) / (2 * h);
        CHECK(std::abs(analytic - fd) <= 1e-6 * (1 + std::abs(fd)));
      };
      for (int k = 0; k < md; ++k) {
        FastPoint wp = w, wm = w;
        wp.p(k) += h;
        wm.p(k) -= h;
        fd_ok(e.dHdp(k), m.hamiltonian(wp, z, eps), m.hamiltonian(wm, z, eps));
        wp = wm = w;
        wp.q(k) += h;
        wm.q(k) -= h;
        fd_ok(e.dHdq(k), m.hamiltonian(wp, z, eps), m.hamiltonian(wm, z, eps));
      }
      SlowPoint zp = z, zm = z;
      zp.v(0) += h;
      zm.v(0) -= h;
      fd_ok(e.dHdv(0), m.hamiltonian(w, zp, eps), m.hamiltonian(w, zm, eps));
      zp = zm = z;
      zp.u(0) += h;
      zm.u(0) -= h;
      fd_ok(e.dHdu(0), m.hamiltonian(w, zp, eps), m.hamiltonian(w, zm, eps));
    }
  }
}

TEST_CASE("non-finite evaluator output raises EvaluationError") {
  HamiltonianModel m = unit_oscillator();
  m.hamiltonian = [](const FastPoint&, const SlowPoint&, double) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(evaluate(m, FastPoint::make(1, 0), SlowPoint::make(0, 0), 0.0),
                  EvaluationError);
}

TEST_CASE("domain membership and boundary distance") {
  const Domain box = Domain::box2(-1, 1, -2, 2);
  CHECK(box.contains(Vector2d(0, 0)));
  CHECK(!box.contains(Vector2d(1, 0)));  // open: boundary excluded
  CHECK(!box.contains(Vector2d(1.5, 0)));
  CHECK(box.boundary_distance(Vector2d(0, 0)) == doctest::Approx(1.0));
  CHECK(box.boundary_distance(Vector2d(2, 0)) == 0.0);

  const Domain ball = Domain::ball2(0.5, 0.0, 2.0);
  CHECK(ball.contains(Vector2d(0.5, 1.9)));
  CHECK(!ball.contains(Vector2d(0.5, 2.0)));
  CHECK(ball.boundary_distance(Vector2d(0.5, 0.0)) == doctest::Approx(2.0));
  CHECK(ball.inradius() == doctest::Approx(2.0));

  CHECK_THROWS_AS(Domain::box2(1, -1, 0, 1), ParameterError);
  CHECK_THROWS_AS(Domain::ball2(0, 0, -1), ParameterError);
}

TEST_CASE("dims validation") {
  CHECK_THROWS_AS((Dims{0, 1}).validate(), DimensionError);
  CHECK_THROWS_AS((Dims{1, 0}).validate(), DimensionError);
  CHECK_NOTHROW((Dims{2, 1}).validate());
}
