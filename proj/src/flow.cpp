#include "slowfast/flow.hpp"

#include <cmath>

namespace slowfast {

namespace {

Trajectory finish_trajectory(const HamiltonianModel& model, double eps, DenseSolution&& sol) {
  Trajectory traj;
  traj.dims = model.dims;
  traj.eps = eps;
  traj.times = sol.times;
  traj.states = sol.states;

  double h0 = 0, drift = 0;
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const FullState s = FullState::from_flat(model.dims, traj.states[i]);
    const double H = model.hamiltonian(s.w, s.z, eps);
    if (!std::isfinite(H)) throw DivergenceError("integrate: non-finite energy");
    if (i == 0)
      h0 = H;
    else
      drift = std::max(drift, std::abs(H - h0));
  }
  traj.energy_drift = drift;
  traj.dense = std::move(sol);
  return traj;
}

}  // namespace

Trajectory integrate_full(const HamiltonianModel& model, const FullState& state0, double eps,
                          double t0, double t1, const IntegratorConfig& cfg) {
  if (!state0.finite()) throw DivergenceError("integrate_full: non-finite initial state");
  const Dims dims = model.dims;
  OdeRhs rhs = [&model, eps, dims](double, const VectorXd& y, VectorXd& dydt) {
    const FullState s = FullState::from_flat(dims, y);
    dydt = full_vector_field(model, s, eps).flat();
  };
  return finish_trajectory(model, eps, integrate_ode(rhs, state0.flat(), t0, t1, cfg));
}

Trajectory integrate_frozen(const HamiltonianModel& model, const FastPoint& w0,
                            const SlowPoint& z, double t0, double t1,
                            const IntegratorConfig& cfg) {
  const Dims dims = model.dims;
  const VectorXd zflat = z.flat();
  OdeRhs rhs = [&model, &z, dims](double, const VectorXd& y, VectorXd& dydt) {
    const FullState s = FullState::from_flat(dims, y);
    const FastPoint der = frozen_vector_field(model, s.w, z);
    dydt.resize(y.size());
    dydt << der.p, der.q, VectorXd::Zero(dims.slow_size());
  };
  FullState s0{w0, z};
  Trajectory traj = finish_trajectory(model, 0.0, integrate_ode(rhs, s0.flat(), t0, t1, cfg));
  // z is a parameter: pin it bit-exactly in the stored states.
  for (auto& st : traj.states) st.tail(dims.slow_size()) = zflat;
  return traj;
}

Trajectory integrate_frozen_symplectic(const HamiltonianModel& model, const FastPoint& w0,
                                       const SlowPoint& z, double t0, double t1, double dt) {
  if (dt <= 0) throw ParameterError("integrate_frozen_symplectic: dt must be positive");
  const long nsteps = std::lround(std::ceil((t1 - t0) / dt - 1e-12));
  Trajectory traj;
  traj.dims = model.dims;
  traj.eps = 0;

  FastPoint w = w0;
  const double H0 = model.hamiltonian(w, z, 0.0);
  double drift = 0;
  auto push = [&](double t) {
    traj.times.push_back(t);
    traj.states.push_back(FullState{w, z}.flat());
    drift = std::max(drift, std::abs(model.hamiltonian(w, z, 0.0) - H0));
  };
  push(t0);
  for (long i = 0; i < nsteps; ++i) {
    const double h = std::min(dt, t1 - (t0 + i * dt));
    // kick - drift - kick
    w.p -= 0.5 * h * model.dHdq(w, z, 0.0);
    w.q += h * model.dHdp(w, z, 0.0);
    w.p -= 0.5 * h * model.dHdq(w, z, 0.0);
    if (!w.finite()) throw DivergenceError("integrate_frozen_symplectic: divergence");
    push(t0 + std::min((i + 1) * dt, t1 - t0));
  }
  traj.energy_drift = drift;
  return traj;
}

std::vector<CrossingEvent> detect_crossings(const Trajectory& traj, const Section& section,
                                            const CrossingConfig& cfg) {
  if (traj.dense.segments.empty() && traj.states.size() > 1)
    throw PreconditionError("detect_crossings: trajectory has no dense output");

  auto s_at = [&](double t) {
    const FullState s = traj.eval(t);
    return section.s(s.w, s.z);
  };

  std::vector<CrossingEvent> events;
  auto refine = [&](double ta, double tb, double sa, double sb) {
    // bisection on the dense output
    for (int it = 0; it < 200; ++it) {
      const double tm = 0.5 * (ta + tb);
      const double sm = s_at(tm);
      if ((sm >= 0) == (sb >= 0)) {
        tb = tm;
        sb = sm;
      } else {
        ta = tm;
        sa = sm;
      }
      if (std::abs(sb) <= cfg.s_tol && tb - ta <= cfg.time_tol * (1.0 + std::abs(tb))) break;
    }
    const double t_root = tb;
    CrossingEvent ev;
    ev.t = t_root;
    ev.state = traj.eval(t_root);
    ev.z_hat = ev.state.z;
    ev.section_label = section.label;
    ev.s_residual = std::abs(s_at(t_root));
    const double dt = 1e-7 * (1.0 + std::abs(t_root));
    const double dsdt = (s_at(std::min(t_root + dt, traj.t_end())) -
                         s_at(std::max(t_root - dt, traj.t_begin()))) /
                        (2 * dt);
    ev.tangency_warning = std::abs(dsdt) < cfg.tangency_threshold;
    events.push_back(std::move(ev));
  };

  // a start exactly on the section counts as a crossing when the orientation matches
  const double s0 = s_at(traj.t_begin());
  if (std::abs(s0) <= cfg.s_tol && !traj.dense.segments.empty()) {
    const double dt = 1e-7 * (1.0 + std::abs(traj.t_begin()));
    const double dsdt = (s_at(traj.t_begin() + dt) - s0) / dt;
    if (static_cast<double>(section.orientation) * dsdt > 0) {
      CrossingEvent ev;
      ev.t = traj.t_begin();
      ev.state = traj.state_at(0);
      ev.z_hat = ev.state.z;
      ev.section_label = section.label;
      ev.s_residual = std::abs(s0);
      ev.tangency_warning = std::abs(dsdt) < cfg.tangency_threshold;
      events.push_back(std::move(ev));
    }
  }

  for (const auto& seg : traj.dense.segments) {
    double tprev = seg.t0;
    double sprev = s_at(tprev);
    for (int k = 1; k <= cfg.subdivisions; ++k) {
      const double t = seg.t0 + seg.h * k / cfg.subdivisions;
      const double s = s_at(t);
      const bool rising = sprev < 0 && s >= 0;
      const bool falling = sprev > 0 && s <= 0;
      if ((section.orientation > 0 && rising) || (section.orientation < 0 && falling))
        refine(tprev, t, sprev, s);
      tprev = t;
      sprev = s;
    }
  }
  return events;
}

}  // namespace slowfast
