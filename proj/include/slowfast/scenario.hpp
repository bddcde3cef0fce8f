#pragma once
#include "slowfast/shadow.hpp"

namespace slowfast {

struct AffineHorseshoeParams {
  double lambda = 0.5;
  double R = 1.0;
  Domain D = Domain::ball2(0.5, 0.0, 2.6);
  double z_coupling = 0.004;  // amplitude of the quadratic z-dependence in f, g
  double eps_term = 0.3;      // explicit eps-dependence of f, g
};

// Affine cross-form maps with row sums equal to lambda; phi built from the
// slow generators J_a = v^2 + u^2 and J_b = (v-1)^2 + u^2 (unit return times),
// so [H1]-[H3] hold by construction.
CrossFormSystem make_affine_horseshoe(const AffineHorseshoeParams& params = {});

struct SyntheticScenario {
  CrossFormSystem sys;  // unmollified
  SlowGeneratorSet gens;
  AccessiblePath path;  // validated three-segment path from (0.5, 0)
  std::vector<std::string> codes;  // orbit code per generator
  double mollify_delta = 0.2;
};

SyntheticScenario make_synthetic_scenario();

// Analytic generators of the synthetic scenario on a given domain.
ActionField synthetic_field_a(const Domain& D, int res = 21);
ActionField synthetic_field_b(const Domain& D, int res = 21);

}  // namespace slowfast
