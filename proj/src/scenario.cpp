#include "slowfast/scenario.hpp"

namespace slowfast {

namespace {

inline Vector2d rot_a(const Vector2d& z) { return Vector2d(2 * z(1), -2 * z(0)); }
inline Vector2d rot_b(const Vector2d& z) { return Vector2d(2 * z(1), -2 * (z(0) - 1)); }

}  // namespace

ActionField synthetic_field_a(const Domain& D, int res) {
  return ActionField::analytic(
      "J_a", D, res, res, [](const Vector2d& z) { return z.squaredNorm(); },
      [](const Vector2d& z) { return Vector2d(2 * z(0), 2 * z(1)); },
      [](const Vector2d&) { return 1.0; });
}

ActionField synthetic_field_b(const Domain& D, int res) {
  return ActionField::analytic(
      "J_b", D, res, res,
      [](const Vector2d& z) { return (z(0) - 1) * (z(0) - 1) + z(1) * z(1); },
      [](const Vector2d& z) { return Vector2d(2 * (z(0) - 1), 2 * z(1)); },
      [](const Vector2d&) { return 1.0; });
}

CrossFormSystem make_affine_horseshoe(const AffineHorseshoeParams& params) {
  CrossFormSystem sys;
  sys.xy_dim = 1;
  sys.lambda = params.lambda;
  sys.R = params.R;
  sys.D = params.D;
  sys.phi_deriv_bound = 2.0;  // |d(rot)/dz| row sums

  // Affine in (x, ybar) with |a| + |b| = lambda per row; constants, a mild
  // quadratic z-dependence, and an explicit eps term keep every pair distinct
  // while staying well inside the R-ball.
  const double af = 0.6 * params.lambda, bf = 0.4 * params.lambda;
  const double ag = 0.5 * params.lambda, bg = 0.5 * params.lambda;
  const double cf[2][2] = {{0.20, 0.12}, {-0.15, 0.25}};
  const double cg[2][2] = {{-0.10, 0.22}, {0.18, -0.20}};
  const double kf[2][2] = {{1.0, 0.7}, {-0.8, 0.5}};
  const double kg[2][2] = {{0.6, -0.9}, {0.4, 1.0}};
  const double amp = params.z_coupling;
  const double ef = params.eps_term, eg = -0.7 * params.eps_term;

  auto zq = [](const Vector2d& z) { return z(0) * z(1) + 0.75 * z(0) * z(0); };

  for (int c = 0; c < 2; ++c)
    for (int cp = 0; cp < 2; ++cp) {
      const double cf0 = cf[c][cp], kf0 = kf[c][cp];
      const double cg0 = cg[c][cp], kg0 = kg[c][cp];
      sys.f[c][cp] = [=](const VectorXd& x, const VectorXd& ybar, const Vector2d& z,
                         double eps) -> VectorXd {
        return VectorXd::Constant(1, af * x(0) + bf * ybar(0) + cf0 + amp * kf0 * zq(z) + ef * eps);
      };
      sys.g[c][cp] = [=](const VectorXd& x, const VectorXd& ybar, const Vector2d& z,
                         double eps) -> VectorXd {
        return VectorXd::Constant(1, ag * x(0) + bg * ybar(0) + cg0 + amp * kg0 * zq(z) + eg * eps);
      };
    }

  // phi_cc = X_{J_c}(z) (unit per-step return time); transitions average the
  // two generators.
  sys.phi[0][0] = [](const VectorXd&, const VectorXd&, const Vector2d& z, double) {
    return rot_a(z);
  };
  sys.phi[1][1] = [](const VectorXd&, const VectorXd&, const Vector2d& z, double) {
    return rot_b(z);
  };
  sys.phi[0][1] = sys.phi[1][0] = [](const VectorXd&, const VectorXd&, const Vector2d& z,
                                     double) -> Vector2d {
    return 0.5 * (rot_a(z) + rot_b(z));
  };
  return sys;
}

SyntheticScenario make_synthetic_scenario() {
  SyntheticScenario sc;
  sc.sys = make_affine_horseshoe();
  sc.gens.fields = {synthetic_field_a(sc.sys.D), synthetic_field_b(sc.sys.D)};
  sc.codes = {"a", "b"};
  sc.mollify_delta = 0.2;

  AccessiblePath path;
  path.z0 = SlowPoint::make(0.5, 0.0);
  path.k = {0, 1, 0};
  path.tau = {0.0, 0.4, 0.9, 1.5};
  sc.path = path_validate(path, sc.gens);
  return sc;
}

}  // namespace slowfast
