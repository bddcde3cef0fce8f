#pragma once
#include <optional>
#include <string>
#include <vector>

#include "slowfast/model.hpp"
#include "slowfast/ode.hpp"

namespace slowfast {

struct Trajectory {
  Dims dims;
  double eps = 0;
  std::vector<double> times;
  std::vector<VectorXd> states;  // packed [p; q; v; u]
  DenseSolution dense;
  double energy_drift = 0;  // max |H(t) - H(0)| over accepted steps

  FullState state_at(size_t i) const { return FullState::from_flat(dims, states.at(i)); }
  FullState eval(double t) const { return FullState::from_flat(dims, dense.eval(t)); }
  double t_begin() const { return times.front(); }
  double t_end() const { return times.back(); }
};

// Oriented Poincare section s(w, z) = 0.
struct Section {
  std::string label;
  std::function<double(const FastPoint&, const SlowPoint&)> s;
  int orientation = +1;  // +1: register crossings with ds/dt > 0, -1: ds/dt < 0
};

struct CrossingEvent {
  double t = 0;
  FullState state;
  SlowPoint z_hat;
  std::string section_label;
  double s_residual = 0;
  bool tangency_warning = false;
};

Trajectory integrate_full(const HamiltonianModel& model, const FullState& state0, double eps,
                          double t0, double t1, const IntegratorConfig& cfg);

// Frozen system: fast variables evolve, z is held constant (stored verbatim).
Trajectory integrate_frozen(const HamiltonianModel& model, const FastPoint& w0,
                            const SlowPoint& z, double t0, double t1,
                            const IntegratorConfig& cfg);

// Fixed-step Stoermer-Verlet for frozen separable models (dH/dp independent of q,
// dH/dq independent of p). Long-run energy control; no dense output.
Trajectory integrate_frozen_symplectic(const HamiltonianModel& model, const FastPoint& w0,
                                       const SlowPoint& z, double t0, double t1, double dt);

struct CrossingConfig {
  double s_tol = 1e-10;
  double time_tol = 1e-12;
  double tangency_threshold = 1e-6;
  int subdivisions = 8;  // samples per accepted step when scanning for sign changes
};

std::vector<CrossingEvent> detect_crossings(const Trajectory& traj, const Section& section,
                                            const CrossingConfig& cfg = {});

}  // namespace slowfast
