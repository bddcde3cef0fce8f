#pragma once
#include <vector>

#include "slowfast/action_field.hpp"
#include "slowfast/ode.hpp"

namespace slowfast {

// Ordered family of slow generators {J_k, T_k} sharing one domain.
struct SlowGeneratorSet {
  std::vector<ActionField> fields;

  const ActionField& at(int k) const {
    if (k < 0 || k >= static_cast<int>(fields.size()))
      throw ParameterError("SlowGeneratorSet: generator index out of range");
    return fields[k];
  }
  const Domain& domain() const {
    if (fields.empty()) throw ParameterError("SlowGeneratorSet: empty generator set");
    return fields.front().domain();
  }
};

struct ExitTime {
  double value = 0;
  bool infinite = false;  // no exit up to the cap; value holds the cap
};

struct SlowFlowConfig {
  IntegratorConfig ode = [] {
    IntegratorConfig c;
    c.rel_tol = 1e-12;
    c.abs_tol = 1e-13;
    return c;
  }();
  double chunk = 0.5;       // integration window between domain checks
  double time_tol = 1e-12;  // bisection tolerance for boundary crossings
};

// Piecewise slow-flow curve Gamma: segment i flows generator k_i over
// [tau_i, tau_{i+1}] from the cached breakpoint state z_i.
struct AccessiblePath {
  SlowPoint z0;
  std::vector<double> tau;      // breakpoints, tau[0] = 0, size N+1
  std::vector<int> k;           // generator index per segment, size N
  std::vector<SlowPoint> z;     // cached breakpoint states, size N+1 once validated
  bool validated = false;

  int segments() const { return static_cast<int>(k.size()); }
  double duration() const { return tau.empty() ? 0.0 : tau.back(); }
};

// (v', u') = ((1/T) dJ/du, -(1/T) dJ/dv); the sign convention matching the
// per-return displacement v -> v + eps dJ/du, u -> u - eps dJ/dv.
Vector2d slow_vector_field(const ActionField& field, const SlowPoint& z);

SlowPoint slow_flow(const ActionField& field, const SlowPoint& z0, double tau,
                    const SlowFlowConfig& cfg = {});

// Sampled flow curve for export; throws DomainExit like slow_flow.
std::vector<std::pair<double, Vector2d>> slow_flow_samples(const ActionField& field,
                                                           const SlowPoint& z0, double tau,
                                                           int samples,
                                                           const SlowFlowConfig& cfg = {});

ExitTime exit_time(const ActionField& field, const SlowPoint& z, double tau_max = 1e3,
                   const SlowFlowConfig& cfg = {});

AccessiblePath path_validate(const AccessiblePath& path, const SlowGeneratorSet& gens,
                             const SlowFlowConfig& cfg = {});

SlowPoint path_eval(const AccessiblePath& path, const SlowGeneratorSet& gens, double tau,
                    const SlowFlowConfig& cfg = {});

struct PlannerConfig {
  double target_tol = 1e-6;
  double coarse_tol = 1e-4;
  double max_segment_time = 200.0;
  SlowFlowConfig flow;
};

// d = 1 accessibility planner alternating the two generators' level lines.
AccessiblePath plan_level_lines(const ActionField& Ja, const ActionField& Jb, const SlowPoint& z0,
                                const SlowPoint& z1, const Domain& D,
                                const PlannerConfig& cfg = {});

}  // namespace slowfast
