#pragma once
#include <utility>
#include <vector>

#include "slowfast/flow.hpp"

namespace slowfast {

struct OrbitGuess {
  FastPoint w0;
  double period = 0;
};

struct OrbitConfig {
  double tol = 1e-11;            // sup norm of the shooting residual
  int max_iter = 30;
  int samples = 512;             // uniform samples stored on the orbit
  double max_initial_residual = 1e2;  // Newton basin guard
  IntegratorConfig ode = [] {
    IntegratorConfig c;
    c.rel_tol = 1e-12;
    c.abs_tol = 1e-13;
    return c;
  }();
};

// Frozen periodic orbit on the zero energy level at slow point z.
struct PeriodicOrbit {
  SlowPoint z;
  double period = 0;
  FastPoint anchor;                // point on the phase section
  std::vector<FastPoint> samples;  // uniform in t over [0, T), size = cfg.samples
  std::vector<VectorXd> qdot;      // dH/dp at the samples
  double closure_residual = 0;
  double energy_residual = 0;
};

struct FloquetData {
  VectorXcd multipliers;  // sorted by modulus, descending
  bool hyperbolic = false;
  double tol = 1e-3;
};

PeriodicOrbit find_periodic_orbit(const HamiltonianModel& model, const SlowPoint& z,
                                  const OrbitGuess& guess, const OrbitConfig& cfg = {});

// Monodromy matrix of the frozen variational equations over one period.
MatrixXd monodromy(const HamiltonianModel& model, const PeriodicOrbit& orbit,
                   const IntegratorConfig& cfg);

FloquetData floquet(const HamiltonianModel& model, const PeriodicOrbit& orbit,
                    double hyperbolicity_tol = 1e-3);

// J = int_0^T p qdot dt (trapezoidal rule on the periodic samples).
double action(const PeriodicOrbit& orbit);

// (dJ/dv, dJ/du) = (-int dH/dv dt, -int dH/du dt) along the orbit at eps = 0.
std::pair<VectorXd, VectorXd> action_gradient(const HamiltonianModel& model,
                                              const PeriodicOrbit& orbit);

// Averaged perturbation term int_0^T H1 dt for models built by make_perturbative.
double perturbative_action(const HamiltonianModel& model, const PeriodicOrbit& orbit,
                           const SlowPoint& z);

}  // namespace slowfast
