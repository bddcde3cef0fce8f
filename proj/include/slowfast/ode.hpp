#pragma once
#include <functional>
#include <vector>

#include "slowfast/types.hpp"

namespace slowfast {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 1e3;
  int method_order = 5;
  // When positive, take fixed steps of this size (no error control).
  double fixed_step = 0.0;
  long max_steps = 50'000'000;

  void validate() const {
    if (rel_tol <= 0 || abs_tol <= 0 || max_step <= 0)
      throw ParameterError("IntegratorConfig: tolerances and max_step must be positive");
    if (method_order < 5)
      throw ParameterError("IntegratorConfig: method order must be >= 5");
  }
};

using OdeRhs = std::function<void(double t, const VectorXd& y, VectorXd& dydt)>;

// One accepted step with the quartic interpolation polynomial.
struct DenseSegment {
  double t0 = 0, h = 0;
  VectorXd r1, r2, r3, r4, r5;

  VectorXd eval(double t) const {
    const double theta = (t - t0) / h;
    const double omt = 1.0 - theta;
    return r1 + theta * (r2 + omt * (r3 + theta * (r4 + omt * r5)));
  }
};

struct DenseSolution {
  std::vector<double> times;        // accepted step boundaries, size = segments+1
  std::vector<VectorXd> states;     // states at `times`
  std::vector<DenseSegment> segments;

  double t_front() const { return times.front(); }
  double t_back() const { return times.back(); }
  VectorXd eval(double t) const;
};

DenseSolution integrate_ode(const OdeRhs& rhs, const VectorXd& y0, double t0, double t1,
                            const IntegratorConfig& cfg);

}  // namespace slowfast
