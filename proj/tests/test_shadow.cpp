#include <doctest.h>

#include <cmath>

#include "slowfast/scenario.hpp"

using namespace slowfast;

namespace {

AccessiblePath validated_segments(const SlowGeneratorSet& gens, const SlowPoint& z0,
                                  std::vector<double> tau, std::vector<int> k) {
  AccessiblePath p;
  p.z0 = z0;
  p.tau = std::move(tau);
  p.k = std::move(k);
  return path_validate(p, gens);
}

}  // namespace

TEST_CASE("plan_code block arithmetic") {
  const SyntheticScenario sc = make_synthetic_scenario();

  // Single segment Delta = 1, eps = 0.01, code "ab" (l0 = 2): N = 50, j = 100.
  const AccessiblePath p1 =
      validated_segments(sc.gens, SlowPoint::make(0.5, 0), {0.0, 1.0}, {0});
  const CodePlan plan1 = plan_code(p1, {"ab", "b"}, 0.01);
  CHECK(plan1.l0 == 2);
  REQUIRE(plan1.N.size() == 1);
  CHECK(plan1.N[0] == 50);
  REQUIRE(plan1.offsets.size() == 1);
  CHECK(plan1.offsets[0] == 100);
  CHECK(plan1.blocks[0].size() == 100);
  CHECK(plan1.blocks[0].substr(0, 4) == "abab");
  CHECK(plan1.padded_codes[0] == "ab");

  // Two segments Delta = (1, 1): offsets (100, 200).
  const AccessiblePath p2 = validated_segments(sc.gens, SlowPoint::make(0.5, 0),
                                               {0.0, 1.0, 2.0}, {0, 1});
  const CodePlan plan2 = plan_code(p2, {"ab", "b"}, 0.01);
  REQUIRE(plan2.offsets.size() == 2);
  CHECK(plan2.offsets[0] == 100);
  CHECK(plan2.offsets[1] == 200);
  CHECK(plan2.total_length == 200);
  REQUIRE(plan2.padded_codes.size() == 2);
  CHECK(plan2.padded_codes[1] == "bb");  // padded by cyclic repetition to l0

  // Emitted code: the planned prefix occupies positions [0, total).
  const Code emitted = plan2.emit();
  CHECK(emitted.core_length() == 200);
  const std::string concat = plan2.blocks[0] + plan2.blocks[1];
  for (long i = 0; i < 200; ++i) CHECK(emitted.symbol(i) == symbol_of(concat[i]));

  // Tiny segment floors to zero copies.
  const AccessiblePath p3 =
      validated_segments(sc.gens, SlowPoint::make(0.5, 0), {0.0, 0.001}, {0});
  CHECK_THROWS_AS(plan_code(p3, {"ab", "b"}, 0.01), EmptyBlock);

  // Unvalidated path and bad parameters are rejected.
  AccessiblePath raw;
  raw.z0 = SlowPoint::make(0.5, 0);
  raw.tau = {0.0, 1.0};
  raw.k = {0};
  CHECK_THROWS_AS(plan_code(raw, {"ab", "b"}, 0.01), PreconditionError);
  CHECK_THROWS_AS(plan_code(p1, {"ab", "b"}, -0.01), ParameterError);
  CHECK_THROWS_AS(plan_code(p1, {""}, 0.01), ParameterError);
}

TEST_CASE("drift iteration basics") {
  const SyntheticScenario sc = make_synthetic_scenario();
  CrossFormSystem sys = sc.sys;
  const Vector2d z0(0.5, 0.0);

  // Constant phi = (0, 1): exactly linear drift.
  for (int c = 0; c < 2; ++c)
    for (int cp = 0; cp < 2; ++cp)
      sys.phi[c][cp] = [](const VectorXd&, const VectorXd&, const Vector2d&, double) {
        return Vector2d(0, 1);
      };
  const DriftTrajectory lin = drift_run(sys, Code::pure('a'), z0, 1e-3, 200);
  CHECK(!lin.exited);
  REQUIRE(lin.steps() == 200);
  CHECK((lin.z.back() - (z0 + Vector2d(0, 0.2))).norm() <= 1e-12);

  // eps = 0: iterates frozen.
  const DriftTrajectory frozen = drift_run(sc.sys, Code::pure('a'), z0, 0.0, 20);
  for (const Vector2d& z : frozen.z) CHECK((z - z0).norm() == 0.0);

  // homogeneous_run is drift_run on the pure code, bit for bit.
  const DriftTrajectory h = homogeneous_run(sc.sys, 'b', z0, 1e-2, 50);
  const DriftTrajectory d = drift_run(sc.sys, Code::pure('b'), z0, 1e-2, 50);
  REQUIRE(h.z.size() == d.z.size());
  for (size_t i = 0; i < h.z.size(); ++i) CHECK((h.z[i] - d.z[i]).norm() == 0.0);

  // Determinism: replay is bit-exact.
  const DriftTrajectory r = drift_run(sc.sys, Code::pure('b'), z0, 1e-2, 50);
  for (size_t i = 0; i < r.z.size(); ++i) CHECK((r.z[i] - d.z[i]).norm() == 0.0);
}

TEST_CASE("rotation generator drift closes its circle") {
  // phi_aa = X_{J_a} with J_a = v^2 + u^2: clockwise rotation at angular speed
  // 2, slow period pi. After floor(pi/eps) steps the drift returns O(eps)-close.
  const SyntheticScenario sc = make_synthetic_scenario();
  const double eps = 1e-3;
  const Vector2d z0(0.5, 0.0);
  const long steps = static_cast<long>(std::floor(M_PI / eps));
  const DriftTrajectory traj = homogeneous_run(sc.sys, 'a', z0, eps, steps);
  CHECK(!traj.exited);
  CHECK((traj.z.back() - z0).norm() <= 50 * eps);
}

TEST_CASE("domain exit stops the drift with a flag") {
  const SyntheticScenario sc = make_synthetic_scenario();
  CrossFormSystem sys = sc.sys;
  for (int c = 0; c < 2; ++c)
    for (int cp = 0; cp < 2; ++cp)
      sys.phi[c][cp] = [](const VectorXd&, const VectorXd&, const Vector2d&, double) {
        return Vector2d(1, 0);
      };
  const DriftTrajectory traj = drift_run(sys, Code::pure('a'), Vector2d(2.9, 0.0), 0.1, 100);
  CHECK(traj.exited);
  CHECK(traj.exit_step >= 0);
  CHECK(traj.steps() < 100);
}

TEST_CASE("block comparison and K1") {
  const SyntheticScenario sc = make_synthetic_scenario();
  const double eps = 1e-2, t0 = 0.5;
  const long steps = static_cast<long>(std::floor(t0 / eps));
  const Vector2d z0(0.5, 0.0);

  const DriftTrajectory t1 = homogeneous_run(sc.sys, 'a', z0, eps, steps);
  const BlockCompareResult same = block_compare(t1, t1, 0, t0);
  CHECK(same.K1 == 0.0);

  const DriftTrajectory t2 = homogeneous_run(sc.sys, 'a', z0 + Vector2d(eps, 0), eps, steps);
  const BlockCompareResult near = block_compare(t1, t2, 0, t0);
  CHECK(near.K1 >= 1.0 - 1e-12);  // N = 0 term: K1 >= K0 = 1
  CHECK(near.K1 <= 10.0);

  const DriftTrajectory tb = homogeneous_run(sc.sys, 'b', z0, eps, steps);
  CHECK_THROWS_AS(block_compare(t1, tb, 0, t0), BlockMismatch);

  const DriftTrajectory te = homogeneous_run(sc.sys, 'a', z0, 5e-3, steps);
  CHECK_THROWS_AS(block_compare(t1, te, 0, t0), ParameterError);
}

TEST_CASE("theorem 1 harness on the synthetic scenario") {
  const SyntheticScenario sc = make_synthetic_scenario();

  // Zero-duration path: error identically zero.
  AccessiblePath zero;
  zero.z0 = SlowPoint::make(0.5, 0);
  zero.tau = {0.0};
  zero.z = {zero.z0};
  zero.validated = true;
  TheoremConfig tcfg;
  tcfg.codes = sc.codes;
  const ShadowReport rz = verify_theorem1(sc.sys, sc.gens, zero, {1e-2}, tcfg);
  REQUIRE(rz.records.size() == 1);
  CHECK(rz.records[0].max_error == 0.0);

  // Full three-segment path at two eps values.
  const ShadowReport r = verify_theorem1(sc.sys, sc.gens, sc.path, {1e-2, 5e-3}, tcfg);
  REQUIRE(r.records.size() == 2);
  for (const ShadowRecord& rec : r.records) {
    CHECK(rec.max_error <= rec.c0 * rec.eps + 1e-15);
    CHECK(rec.endpoint_error <= rec.max_error + 1e-15);
    CHECK(!rec.rows.empty());
    CHECK(rec.segment_max_error.size() == 3);
  }
  REQUIRE(r.scaling_ratios.size() == 1);
  CHECK(!r.scaling_violation);
  CHECK(r.scaling_ratios[0] >= 1.5);
  CHECK(r.scaling_ratios[0] <= 3.0);
}
