#include "slowfast/ode.hpp"

#include <algorithm>
#include <cmath>

#include "slowfast/errors.hpp"

namespace slowfast {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

double initial_step(const OdeRhs& rhs, const VectorXd& y0, double t0, double span,
                    const IntegratorConfig& cfg) {
  VectorXd f0(y0.size());
  rhs(t0, y0, f0);
  const double d0 = y0.norm(), dfn = f0.norm();
  double h = (dfn > 1e-10) ? 0.01 * (d0 + 1.0) / dfn : 1e-6 * span;
  h = std::min({h, span, cfg.max_step});
  return std::max(h, 1e-12 * span);
}

}  // namespace

VectorXd DenseSolution::eval(double t) const {
  if (segments.empty()) return states.front();
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  // binary search for the segment containing t
  auto it = std::upper_bound(times.begin(), times.end(), t);
  size_t i = static_cast<size_t>(it - times.begin());
  i = std::min(std::max<size_t>(i, 1) - 1, segments.size() - 1);
  return segments[i].eval(t);
}

DenseSolution integrate_ode(const OdeRhs& rhs, const VectorXd& y0, double t0, double t1,
                            const IntegratorConfig& cfg) {
  cfg.validate();
  if (t1 < t0) throw ParameterError("integrate_ode: t1 must be >= t0");
  if (!y0.allFinite()) throw DivergenceError("integrate_ode: non-finite initial state");

  DenseSolution sol;
  sol.times.push_back(t0);
  sol.states.push_back(y0);
  if (t1 == t0) return sol;

  const long n = y0.size();
  VectorXd y = y0;
  VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), yerr(n), ytmp(n);
  double t = t0;
  rhs(t, y, k1);  // FSAL

  double h = cfg.fixed_step > 0 ? cfg.fixed_step : initial_step(rhs, y, t0, t1 - t0, cfg);
  const bool adaptive = cfg.fixed_step <= 0;

  long steps = 0;
  while (t < t1) {
    if (++steps > cfg.max_steps)
      throw StiffnessError("integrate_ode: step budget exhausted");
    h = std::min(h, t1 - t);
    if (adaptive && h < 1e4 * std::numeric_limits<double>::epsilon() * (std::abs(t) + 1.0))
      throw StiffnessError("integrate_ode: step size underflow");

    ytmp = y + h * (a21 * k1);
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + h, ynew, k7);

    if (!ynew.allFinite()) {
      if (!adaptive) throw DivergenceError("integrate_ode: non-finite state");
      h *= 0.25;
      continue;
    }

    double err = 0.0;
    if (adaptive) {
      yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      for (long i = 0; i < n; ++i) {
        const double sc =
            cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
        const double r = yerr(i) / sc;
        err += r * r;
      }
      err = std::sqrt(err / static_cast<double>(n));
    }

    if (!adaptive || err <= 1.0) {
      DenseSegment seg;
      seg.t0 = t;
      seg.h = h;
      seg.r1 = y;
      seg.r2 = ynew - y;
      seg.r3 = h * k1 - seg.r2;
      seg.r4 = seg.r2 - h * k7 - seg.r3;
      seg.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      sol.segments.push_back(std::move(seg));

      t += h;
      y = ynew;
      k1 = k7;
      sol.times.push_back(t);
      sol.states.push_back(y);
    }
    if (adaptive) {
      const double fac =
          std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 10.0);
      h = std::min(h * fac, cfg.max_step);
    }
  }
  return sol;
}

}  // namespace slowfast
