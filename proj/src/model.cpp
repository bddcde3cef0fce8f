#include "slowfast/model.hpp"

#include <cmath>

namespace slowfast {

namespace {

// Central-difference gradient of a slow scalar field, step 1e-6*(1+|x|).
std::pair<VectorXd, VectorXd> fd_slow_grad(const std::function<double(const SlowPoint&)>& f,
                                           const SlowPoint& z) {
  const int d = z.dof();
  VectorXd gv(d), gu(d);
  SlowPoint zp = z, zm = z;
  for (int i = 0; i < d; ++i) {
    const double hv = 1e-6 * (1.0 + std::abs(z.v(i)));
    zp.v(i) = z.v(i) + hv;
    zm.v(i) = z.v(i) - hv;
    gv(i) = (f(zp) - f(zm)) / (2 * hv);
    zp.v(i) = zm.v(i) = z.v(i);
    const double hu = 1e-6 * (1.0 + std::abs(z.u(i)));
    zp.u(i) = z.u(i) + hu;
    zm.u(i) = z.u(i) - hu;
    gu(i) = (f(zp) - f(zm)) / (2 * hu);
    zp.u(i) = zm.u(i) = z.u(i);
  }
  return {gv, gu};
}

}  // namespace

SlowField SlowField::constant(double c) {
  SlowField f;
  f.value = [c](const SlowPoint&) { return c; };
  f.grad = [](const SlowPoint& z) {
    return std::make_pair(VectorXd::Zero(z.dof()).eval(), VectorXd::Zero(z.dof()).eval());
  };
  return f;
}

SlowField standard_energy_field(double scale) {
  SlowField f;
  f.value = [scale](const SlowPoint& z) {
    return scale * (1.0 + 0.5 * (z.u.squaredNorm() + z.v.squaredNorm()));
  };
  f.grad = [scale](const SlowPoint& z) {
    return std::make_pair((scale * z.v).eval(), (scale * z.u).eval());
  };
  return f;
}

Evaluation evaluate(const HamiltonianModel& model, const FastPoint& w, const SlowPoint& z,
                    double eps) {
  if (w.dof() != model.dims.fast_dof || z.dof() != model.dims.slow_dof)
    throw DimensionError("evaluate: point dimensions do not match the model");
  Evaluation out;
  out.H = model.hamiltonian(w, z, eps);
  out.dHdp = model.dHdp(w, z, eps);
  out.dHdq = model.dHdq(w, z, eps);
  out.dHdv = model.dHdv(w, z, eps);
  out.dHdu = model.dHdu(w, z, eps);
  if (!std::isfinite(out.H) || !out.dHdp.allFinite() || !out.dHdq.allFinite() ||
      !out.dHdv.allFinite() || !out.dHdu.allFinite())
    throw EvaluationError("evaluate: non-finite Hamiltonian data at the requested point");
  return out;
}

FullState full_vector_field(const HamiltonianModel& model, const FullState& state, double eps) {
  const Evaluation e = evaluate(model, state.w, state.z, eps);
  const double scale = model.perturbative ? 1.0 : eps;
  FullState der;
  der.w.q = e.dHdp;
  der.w.p = -e.dHdq;
  der.z.u = scale * e.dHdv;
  der.z.v = -scale * e.dHdu;
  return der;
}

FastPoint frozen_vector_field(const HamiltonianModel& model, const FastPoint& w,
                              const SlowPoint& z) {
  const Evaluation e = evaluate(model, w, z, 0.0);
  FastPoint der;
  der.q = e.dHdp;
  der.p = -e.dHdq;
  return der;
}

HamiltonianModel builtin_oscillator(const SlowField& omega, const SlowField& energy) {
  HamiltonianModel m;
  m.dims = {1, 1};
  m.name = "oscillator";
  m.uses_fd_gradients = !omega.grad || !energy.grad;

  auto omega_at = [omega](const SlowPoint& z) {
    const double w = omega.value(z);
    if (!(w > 0)) throw ModelError("oscillator: omega must be positive on D");
    return w;
  };
  auto omega_grad = [omega](const SlowPoint& z) {
    return omega.grad ? omega.grad(z) : fd_slow_grad(omega.value, z);
  };
  auto energy_grad = [energy](const SlowPoint& z) {
    return energy.grad ? energy.grad(z) : fd_slow_grad(energy.value, z);
  };

  m.hamiltonian = [omega_at, energy](const FastPoint& w, const SlowPoint& z, double) {
    const double om = omega_at(z);
    return 0.5 * (w.p(0) * w.p(0) + om * om * w.q(0) * w.q(0)) - energy.value(z);
  };
  m.dHdp = [](const FastPoint& w, const SlowPoint&, double) { return w.p; };
  m.dHdq = [omega_at](const FastPoint& w, const SlowPoint& z, double) {
    const double om = omega_at(z);
    return (om * om * w.q).eval();
  };
  m.dHdv = [omega_at, omega_grad, energy_grad](const FastPoint& w, const SlowPoint& z, double) {
    const double om = omega_at(z);
    return (om * w.q(0) * w.q(0) * omega_grad(z).first - energy_grad(z).first).eval();
  };
  m.dHdu = [omega_at, omega_grad, energy_grad](const FastPoint& w, const SlowPoint& z, double) {
    const double om = omega_at(z);
    return (om * w.q(0) * w.q(0) * omega_grad(z).second - energy_grad(z).second).eval();
  };
  m.reference_action = [omega_at, energy](const SlowPoint& z) {
    return 2.0 * M_PI * energy.value(z) / omega_at(z);
  };
  return m;
}

HamiltonianModel builtin_saddle_oscillator(double lambda, double omega, double energy) {
  if (lambda <= 0 || omega <= 0 || energy <= 0)
    throw ModelError("saddle_oscillator: parameters must be positive");
  HamiltonianModel m;
  m.dims = {2, 1};
  m.name = "saddle_oscillator";
  const SlowField E = standard_energy_field(energy);

  m.hamiltonian = [lambda, omega, E](const FastPoint& w, const SlowPoint& z, double) {
    return lambda * w.p(0) * w.q(0) + 0.5 * omega * (w.p(1) * w.p(1) + w.q(1) * w.q(1)) -
           E.value(z);
  };
  m.dHdp = [lambda, omega](const FastPoint& w, const SlowPoint&, double) {
    VectorXd g(2);
    g << lambda * w.q(0), omega * w.p(1);
    return g;
  };
  m.dHdq = [lambda, omega](const FastPoint& w, const SlowPoint&, double) {
    VectorXd g(2);
    g << lambda * w.p(0), omega * w.q(1);
    return g;
  };
  m.dHdv = [E](const FastPoint&, const SlowPoint& z, double) { return (-E.grad(z).first).eval(); };
  m.dHdu = [E](const FastPoint&, const SlowPoint& z, double) { return (-E.grad(z).second).eval(); };
  m.reference_action = [omega, E](const SlowPoint& z) { return 2.0 * M_PI * E.value(z) / omega; };
  return m;
}

HamiltonianModel make_perturbative(const FastHamiltonian& h0, const CoupledHamiltonian& h1) {
  if (h0.fast_dof != h1.dims.fast_dof)
    throw DimensionError("make_perturbative: fast dimension mismatch between H0 and H1");
  HamiltonianModel m;
  m.dims = h1.dims;
  m.name = "perturbative";
  m.perturbative = true;
  m.hamiltonian = [h0, h1](const FastPoint& w, const SlowPoint& z, double eps) {
    return h0.value(w) + eps * h1.value(w, z);
  };
  m.dHdp = [h0, h1](const FastPoint& w, const SlowPoint& z, double eps) {
    return (h0.dHdp(w) + eps * h1.dHdp(w, z)).eval();
  };
  m.dHdq = [h0, h1](const FastPoint& w, const SlowPoint& z, double eps) {
    return (h0.dHdq(w) + eps * h1.dHdq(w, z)).eval();
  };
  m.dHdv = [h1](const FastPoint& w, const SlowPoint& z, double eps) {
    return (eps * h1.dHdv(w, z)).eval();
  };
  m.dHdu = [h1](const FastPoint& w, const SlowPoint& z, double eps) {
    return (eps * h1.dHdu(w, z)).eval();
  };
  m.h1 = [h1](const FastPoint& w, const SlowPoint& z) { return h1.value(w, z); };
  return m;
}

}  // namespace slowfast
