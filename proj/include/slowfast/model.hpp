#pragma once
#include <functional>
#include <string>
#include <utility>

#include "slowfast/types.hpp"

namespace slowfast {

// Scalar function of the slow variables with an optional analytic gradient
// (d/dv, d/du). Without one, a central-difference fallback is used and the
// owning model is flagged.
struct SlowField {
  std::function<double(const SlowPoint&)> value;
  std::function<std::pair<VectorXd, VectorXd>(const SlowPoint&)> grad;  // optional

  static SlowField constant(double c);
};

// H = (p^2 + omega(z)^2 q^2)/2 - E(z) with E(z) = scale*(1 + (u^2+v^2)/2).
SlowField standard_energy_field(double scale);

struct FastHamiltonian {
  int fast_dof = 1;
  std::function<double(const FastPoint&)> value;
  std::function<VectorXd(const FastPoint&)> dHdp, dHdq;
};

struct CoupledHamiltonian {
  Dims dims;
  std::function<double(const FastPoint&, const SlowPoint&)> value;
  std::function<VectorXd(const FastPoint&, const SlowPoint&)> dHdp, dHdq, dHdv, dHdu;
};

struct HamiltonianModel {
  Dims dims;
  std::string name;
  std::function<double(const FastPoint&, const SlowPoint&, double)> hamiltonian;
  std::function<VectorXd(const FastPoint&, const SlowPoint&, double)> dHdp, dHdq, dHdv, dHdu;
  bool uses_fd_gradients = false;
  // Perturbative models (H = H0 + eps*H1, standard symplectic form) evolve the
  // slow variables by udot = dH/dv, vdot = -dH/du without the extra eps factor.
  bool perturbative = false;
  // Closed-form action J(z), when the model family has one (reference metadata).
  std::function<double(const SlowPoint&)> reference_action;
  // Set by make_perturbative: the coupling term H1 evaluated at eps-independent args.
  std::function<double(const FastPoint&, const SlowPoint&)> h1;
};

struct Evaluation {
  double H;
  VectorXd dHdp, dHdq, dHdv, dHdu;
};

Evaluation evaluate(const HamiltonianModel& model, const FastPoint& w, const SlowPoint& z,
                    double eps);

// Right-hand side of the equations of motion:
// qdot = dH/dp, pdot = -dH/dq, udot = eps dH/dv, vdot = -eps dH/du.
FullState full_vector_field(const HamiltonianModel& model, const FullState& state, double eps);

// Fast part of the eps=0 system; z is a frozen parameter.
FastPoint frozen_vector_field(const HamiltonianModel& model, const FastPoint& w,
                              const SlowPoint& z);

HamiltonianModel builtin_oscillator(const SlowField& omega, const SlowField& energy);
HamiltonianModel builtin_saddle_oscillator(double lambda, double omega, double energy);
HamiltonianModel make_perturbative(const FastHamiltonian& h0, const CoupledHamiltonian& h1);

}  // namespace slowfast
