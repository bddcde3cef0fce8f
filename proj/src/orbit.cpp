#include "slowfast/orbit.hpp"

#include <algorithm>
#include <cmath>

namespace slowfast {

namespace {

// Jacobian of the frozen vector field w.r.t. w = (p, q), by central differences
// of the analytic gradients.
MatrixXd frozen_jacobian(const HamiltonianModel& model, const FastPoint& w, const SlowPoint& z) {
  const int n = 2 * w.dof();
  MatrixXd A(n, n);
  VectorXd wf = w.flat();
  for (int j = 0; j < n; ++j) {
    const double h = 1e-7 * (1.0 + std::abs(wf(j)));
    VectorXd wp = wf, wm = wf;
    wp(j) += h;
    wm(j) -= h;
    const FastPoint fp = frozen_vector_field(model, FastPoint::from_flat(wp), z);
    const FastPoint fm = frozen_vector_field(model, FastPoint::from_flat(wm), z);
    A.col(j) = (fp.flat() - fm.flat()) / (2 * h);
  }
  return A;
}

// Integrates w' = X(w), M' = A(w) M over [0, T] from (w0, I).
struct VariationalResult {
  FastPoint w;
  MatrixXd M;
  DenseSolution sol;  // fast variables only
};

VariationalResult integrate_variational(const HamiltonianModel& model, const SlowPoint& z,
                                        const FastPoint& w0, double T,
                                        const IntegratorConfig& cfg) {
  const int n = 2 * w0.dof();
  OdeRhs rhs = [&model, &z, n](double, const VectorXd& y, VectorXd& dy) {
    const FastPoint w = FastPoint::from_flat(y.head(n));
    const FastPoint f = frozen_vector_field(model, w, z);
    const MatrixXd A = frozen_jacobian(model, w, z);
    Eigen::Map<const MatrixXd> M(y.data() + n, n, n);
    dy.resize(n + n * n);
    dy.head(n) = f.flat();
    Eigen::Map<MatrixXd>(dy.data() + n, n, n) = A * M;
  };
  VectorXd y0(n + n * n);
  y0.head(n) = w0.flat();
  Eigen::Map<MatrixXd>(y0.data() + n, n, n) = MatrixXd::Identity(n, n);
  DenseSolution sol = integrate_ode(rhs, y0, 0.0, T, cfg);
  const VectorXd yT = sol.states.back();
  VariationalResult out;
  out.w = FastPoint::from_flat(yT.head(n));
  out.M = Eigen::Map<const MatrixXd>(yT.data() + n, n, n);
  out.sol = std::move(sol);
  return out;
}

// Shooting residual: [phi_T(w0) - w0; H(w0); (dH/dp)_m(w0)].
VectorXd shooting_residual(const HamiltonianModel& model, const SlowPoint& z, const VectorXd& x,
                           const IntegratorConfig& cfg) {
  const int n = static_cast<int>(x.size()) - 1;
  const FastPoint w0 = FastPoint::from_flat(x.head(n));
  const double T = x(n);
  if (T <= 0) throw NoConvergence("find_periodic_orbit: period iterate became non-positive");
  OdeRhs rhs = [&model, &z](double, const VectorXd& y, VectorXd& dy) {
    dy = frozen_vector_field(model, FastPoint::from_flat(y), z).flat();
  };
  const DenseSolution sol = integrate_ode(rhs, w0.flat(), 0.0, T, cfg);
  const Evaluation e0 = evaluate(model, w0, z, 0.0);
  VectorXd F(n + 2);
  F.head(n) = sol.states.back() - w0.flat();
  F(n) = e0.H;
  F(n + 1) = e0.dHdp(w0.dof() - 1);
  return F;
}

}  // namespace

PeriodicOrbit find_periodic_orbit(const HamiltonianModel& model, const SlowPoint& z,
                                  const OrbitGuess& guess, const OrbitConfig& cfg) {
  if (guess.w0.dof() != model.dims.fast_dof || z.dof() != model.dims.slow_dof)
    throw DimensionError("find_periodic_orbit: guess dimensions do not match the model");
  if (guess.period <= 0) throw ParameterError("find_periodic_orbit: period guess must be positive");

  const int n = model.dims.fast_size();
  const int m = model.dims.fast_dof;
  VectorXd x(n + 1);
  x.head(n) = guess.w0.flat();
  x(n) = guess.period;

  VectorXd F = shooting_residual(model, z, x, cfg.ode);
  double res = F.lpNorm<Eigen::Infinity>();
  if (res > cfg.max_initial_residual)
    throw NoConvergence("find_periodic_orbit: initial guess is outside the Newton basin");

  for (int it = 0; it < cfg.max_iter && res > cfg.tol; ++it) {
    const FastPoint w0 = FastPoint::from_flat(x.head(n));
    const double T = x(n);
    const VariationalResult var = integrate_variational(model, z, w0, T, cfg.ode);
    const Evaluation e0 = evaluate(model, w0, z, 0.0);

    // Gauss-Newton Jacobian, (n+2) x (n+1).
    MatrixXd Jac(n + 2, n + 1);
    Jac.block(0, 0, n, n) = var.M - MatrixXd::Identity(n, n);
    Jac.block(0, n, n, 1) = frozen_vector_field(model, var.w, z).flat();
    VectorXd gradH(n);
    gradH << e0.dHdp, e0.dHdq;
    Jac.row(n).head(n) = gradH.transpose();
    Jac(n, n) = 0;
    // Phase condition row: derivative of (dH/dp)_m w.r.t. w0 is row m of A J^{-1};
    // cheaper to difference it directly.
    for (int j = 0; j < n; ++j) {
      const double h = 1e-7 * (1.0 + std::abs(x(j)));
      VectorXd xp = x.head(n), xm = x.head(n);
      xp(j) += h;
      xm(j) -= h;
      const double fp = evaluate(model, FastPoint::from_flat(xp), z, 0.0).dHdp(m - 1);
      const double fm = evaluate(model, FastPoint::from_flat(xm), z, 0.0).dHdp(m - 1);
      Jac(n + 1, j) = (fp - fm) / (2 * h);
    }
    Jac(n + 1, n) = 0;

    Eigen::ColPivHouseholderQR<MatrixXd> qr(Jac);
    if (qr.rank() < n + 1)
      throw SingularJacobian("find_periodic_orbit: shooting Jacobian is rank deficient");
    const VectorXd step = qr.solve(F);

    // Damped update.
    double alpha = 1.0;
    VectorXd xn, Fn;
    double resn = res;
    for (int k = 0; k < 10; ++k) {
      xn = x - alpha * step;
      Fn = shooting_residual(model, z, xn, cfg.ode);
      resn = Fn.lpNorm<Eigen::Infinity>();
      if (resn < res) break;
      alpha *= 0.5;
    }
    if (resn >= res) {
      // Stuck at a least-squares stationary point: report the likeliest cause.
      if (std::abs(F(n)) > cfg.tol && std::abs(F(n)) > 0.5 * res)
        throw EnergyMismatch("find_periodic_orbit: no zero-energy orbit near the guess");
      throw NoConvergence("find_periodic_orbit: Newton iteration stalled");
    }
    x = xn;
    F = Fn;
    res = resn;
  }
  if (res > cfg.tol)
    throw NoConvergence("find_periodic_orbit: residual above tolerance after max iterations");

  PeriodicOrbit orbit;
  orbit.z = z;
  orbit.period = x(n);
  orbit.anchor = FastPoint::from_flat(x.head(n));
  orbit.closure_residual = F.head(n).lpNorm<Eigen::Infinity>();
  orbit.energy_residual = std::abs(F(n));

  // Uniform samples over [0, T) from one dense pass.
  OdeRhs rhs = [&model, &z](double, const VectorXd& y, VectorXd& dy) {
    dy = frozen_vector_field(model, FastPoint::from_flat(y), z).flat();
  };
  const DenseSolution sol = integrate_ode(rhs, orbit.anchor.flat(), 0.0, orbit.period, cfg.ode);
  const int N = cfg.samples;
  orbit.samples.reserve(N);
  orbit.qdot.reserve(N);
  for (int k = 0; k < N; ++k) {
    const double t = orbit.period * k / N;
    FastPoint w = FastPoint::from_flat(sol.eval(t));
    const Evaluation e = evaluate(model, w, z, 0.0);
    orbit.energy_residual = std::max(orbit.energy_residual, std::abs(e.H));
    orbit.samples.push_back(std::move(w));
    orbit.qdot.push_back(e.dHdp);
  }
  return orbit;
}

MatrixXd monodromy(const HamiltonianModel& model, const PeriodicOrbit& orbit,
                   const IntegratorConfig& cfg) {
  try {
    return integrate_variational(model, orbit.z, orbit.anchor, orbit.period, cfg).M;
  } catch (const StiffnessError& e) {
    throw DivergenceError(std::string("monodromy: variational integration failed: ") + e.what());
  }
}

FloquetData floquet(const HamiltonianModel& model, const PeriodicOrbit& orbit,
                    double hyperbolicity_tol) {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-13;
  const MatrixXd M = monodromy(model, orbit, cfg);
  Eigen::EigenSolver<MatrixXd> es(M);
  VectorXcd mu = es.eigenvalues();
  std::vector<int> idx(mu.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(),
            [&mu](int a, int b) { return std::abs(mu(a)) > std::abs(mu(b)); });

  FloquetData out;
  out.tol = hyperbolicity_tol;
  out.multipliers.resize(mu.size());
  for (size_t i = 0; i < idx.size(); ++i) out.multipliers(i) = mu(idx[i]);

  // Discard the trivial pair (the two multipliers closest to 1), then require
  // every remaining modulus to be bounded away from the unit circle.
  std::vector<int> rest(idx.size());
  for (size_t i = 0; i < rest.size(); ++i) rest[i] = static_cast<int>(i);
  std::sort(rest.begin(), rest.end(), [&out](int a, int b) {
    return std::abs(out.multipliers(a) - 1.0) < std::abs(out.multipliers(b) - 1.0);
  });
  out.hyperbolic = out.multipliers.size() > 2;
  for (size_t i = 2; i < rest.size(); ++i)
    if (std::abs(std::abs(out.multipliers(rest[i])) - 1.0) <= hyperbolicity_tol)
      out.hyperbolic = false;
  return out;
}

double action(const PeriodicOrbit& orbit) {
  const int N = static_cast<int>(orbit.samples.size());
  if (N < 256) throw AccuracyError("action: orbit stores fewer than 256 samples");
  double sum = 0;
  for (int k = 0; k < N; ++k) sum += orbit.samples[k].p.dot(orbit.qdot[k]);
  return sum * orbit.period / N;
}

std::pair<VectorXd, VectorXd> action_gradient(const HamiltonianModel& model,
                                              const PeriodicOrbit& orbit) {
  const int N = static_cast<int>(orbit.samples.size());
  if (N < 256) throw AccuracyError("action_gradient: orbit stores fewer than 256 samples");
  const int d = orbit.z.dof();
  VectorXd dJdv = VectorXd::Zero(d), dJdu = VectorXd::Zero(d);
  for (int k = 0; k < N; ++k) {
    const Evaluation e = evaluate(model, orbit.samples[k], orbit.z, 0.0);
    dJdv -= e.dHdv;
    dJdu -= e.dHdu;
  }
  const double h = orbit.period / N;
  return {dJdv * h, dJdu * h};
}

double perturbative_action(const HamiltonianModel& model, const PeriodicOrbit& orbit,
                           const SlowPoint& z) {
  if (!model.perturbative || !model.h1)
    throw ModelError("perturbative_action: model was not built by make_perturbative");
  const int N = static_cast<int>(orbit.samples.size());
  if (N < 256) throw AccuracyError("perturbative_action: orbit stores fewer than 256 samples");
  double sum = 0;
  for (int k = 0; k < N; ++k) sum += model.h1(orbit.samples[k], z);
  return sum * orbit.period / N;
}

}  // namespace slowfast
