#include "slowfast/slowdrive.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace slowfast {

namespace {

Vector2d raw_field(const ActionField& field, const Vector2d& z) {
  const SlowPoint p = SlowPoint::from_vec2(z);
  const Vector2d g = field.gradient(p);
  const double T = field.period(p);
  return Vector2d(g(1) / T, -g(0) / T);
}

struct FlowOutcome {
  bool exited = false;
  double t_exit = 0;
  Vector2d z_end;
  // Chunked dense output: chunk i covers [chunk_t0[i], chunk_t0[i] + span].
  std::vector<double> chunk_t0;
  std::vector<DenseSolution> chunks;

  Vector2d eval(double t) const {
    int i = static_cast<int>(std::upper_bound(chunk_t0.begin(), chunk_t0.end(), t) -
                             chunk_t0.begin()) -
            1;
    i = std::clamp(i, 0, static_cast<int>(chunks.size()) - 1);
    return chunks[i].eval(t - chunk_t0[i]);
  }
};

// Integrates the slow flow over [0, tau] in chunks, stopping at the first
// boundary crossing of D (bisected to cfg.time_tol).
FlowOutcome flow_core(const ActionField& field, const Vector2d& z0, double tau,
                      const SlowFlowConfig& cfg) {
  const Domain& D = field.domain();
  OdeRhs rhs = [&field](double, const VectorXd& y, VectorXd& dy) {
    dy = raw_field(field, Vector2d(y(0), y(1)));
  };
  FlowOutcome out;
  out.z_end = z0;
  double t = 0;
  VectorXd y = z0;
  while (t < tau) {
    const double t2 = std::min(t + cfg.chunk, tau);
    DenseSolution sol = integrate_ode(rhs, y, 0.0, t2 - t, cfg.ode);
    // Scan for an exit: subdivide each solver step.
    double sprev = D.signed_inside(sol.states.front());
    double tprev = 0;
    for (size_t k = 1; k < sol.times.size(); ++k) {
      for (int m = 1; m <= 16; ++m) {
        const double tc = sol.times[k - 1] + (sol.times[k] - sol.times[k - 1]) * m / 16.0;
        const double sc = D.signed_inside(sol.eval(tc));
        if (sprev > 0 && sc <= 0) {
          double ta = tprev, tb = tc;
          while (tb - ta > cfg.time_tol) {
            const double tm = 0.5 * (ta + tb);
            (D.signed_inside(sol.eval(tm)) > 0 ? ta : tb) = tm;
          }
          out.exited = true;
          out.t_exit = t + 0.5 * (ta + tb);
          out.z_end = sol.eval(0.5 * (ta + tb));
          out.chunk_t0.push_back(t);
          out.chunks.push_back(std::move(sol));
          return out;
        }
        sprev = sc;
        tprev = tc;
      }
    }
    y = sol.states.back();
    out.chunk_t0.push_back(t);
    out.chunks.push_back(std::move(sol));
    t = t2;
  }
  out.z_end = Vector2d(y(0), y(1));
  return out;
}

}  // namespace

Vector2d slow_vector_field(const ActionField& field, const SlowPoint& z) {
  if (!field.domain().contains(z))
    throw DomainError("slow_vector_field: point is outside the domain");
  return raw_field(field, z.vec2());
}

SlowPoint slow_flow(const ActionField& field, const SlowPoint& z0, double tau,
                    const SlowFlowConfig& cfg) {
  if (!field.domain().contains(z0)) throw DomainError("slow_flow: start is outside the domain");
  if (tau < 0) throw ParameterError("slow_flow: negative flow time");
  if (tau == 0) return z0;
  const FlowOutcome out = flow_core(field, z0.vec2(), tau, cfg);
  if (out.exited) throw DomainExit(out.t_exit);
  return SlowPoint::from_vec2(out.z_end);
}

std::vector<std::pair<double, Vector2d>> slow_flow_samples(const ActionField& field,
                                                           const SlowPoint& z0, double tau,
                                                           int samples, const SlowFlowConfig& cfg) {
  if (!field.domain().contains(z0)) throw DomainError("slow_flow: start is outside the domain");
  if (tau < 0 || samples < 2) throw ParameterError("slow_flow_samples: bad arguments");
  std::vector<std::pair<double, Vector2d>> pts;
  if (tau == 0) {
    pts.emplace_back(0.0, z0.vec2());
    return pts;
  }
  const FlowOutcome out = flow_core(field, z0.vec2(), tau, cfg);
  if (out.exited) throw DomainExit(out.t_exit);
  pts.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double t = tau * i / (samples - 1);
    pts.emplace_back(t, out.eval(t));
  }
  return pts;
}

ExitTime exit_time(const ActionField& field, const SlowPoint& z, double tau_max,
                   const SlowFlowConfig& cfg) {
  if (!field.domain().contains(z)) throw DomainError("exit_time: point is outside the domain");
  const FlowOutcome out = flow_core(field, z.vec2(), tau_max, cfg);
  if (out.exited) return {out.t_exit, false};
  return {tau_max, true};
}

AccessiblePath path_validate(const AccessiblePath& path, const SlowGeneratorSet& gens,
                             const SlowFlowConfig& cfg) {
  AccessiblePath out = path;
  const int N = out.segments();
  if (out.tau.size() != static_cast<size_t>(N) + 1)
    throw ParameterError("path_validate: breakpoint/segment count mismatch");
  for (int i = 0; i < N; ++i)
    if (!(out.tau[i + 1] > out.tau[i]))
      throw NonIncreasingBreakpoints("path_validate: breakpoints must strictly increase");
  if (!gens.domain().contains(out.z0))
    throw DomainError("path_validate: start is outside the domain");
  out.z.assign(1, out.z0);
  for (int i = 0; i < N; ++i) {
    const ActionField& field = gens.at(out.k[i]);
    SlowPoint zi;
    try {
      zi = slow_flow(field, out.z.back(), out.tau[i + 1] - out.tau[i], cfg);
    } catch (const DomainExit& e) {
      throw SegmentExit(i);
    }
    if (!gens.domain().contains(zi)) throw SegmentExit(i);
    out.z.push_back(std::move(zi));
  }
  out.validated = true;
  return out;
}

SlowPoint path_eval(const AccessiblePath& path, const SlowGeneratorSet& gens, double tau,
                    const SlowFlowConfig& cfg) {
  if (!path.validated) throw PreconditionError("path_eval: path has not been validated");
  if (tau < 0 || tau > path.duration() + 1e-15)
    throw ParameterError("path_eval: tau outside [0, T]");
  if (path.segments() == 0) return path.z0;
  // Segment i covers [tau_i, tau_{i+1}]; breakpoints return the cached state.
  int i = static_cast<int>(std::upper_bound(path.tau.begin(), path.tau.end(), tau) -
                           path.tau.begin()) -
          1;
  i = std::clamp(i, 0, path.segments() - 1);
  const double dt = tau - path.tau[i];
  if (dt == 0) return path.z[i];
  if (tau >= path.tau[i + 1]) return path.z[i + 1];
  return slow_flow(gens.at(path.k[i]), path.z[i], dt, cfg);
}

namespace {

struct EventHit {
  double t;
  Vector2d z;
};

// Flows along `field` from z0 and returns the nth sign change of g (1-based),
// bisected to cfg.time_tol; oriented = true demands negative-to-positive.
std::optional<EventHit> flow_event(const ActionField& field,
                                   const std::function<double(const Vector2d&)>& g,
                                   const Vector2d& z0, double max_time, int nth, bool oriented,
                                   const SlowFlowConfig& cfg) {
  OdeRhs rhs = [&field](double, const VectorXd& y, VectorXd& dy) {
    dy = raw_field(field, Vector2d(y(0), y(1)));
  };
  double t = 0;
  VectorXd y = z0;
  int found = 0;
  double sprev = g(z0);
  while (t < max_time) {
    const double t2 = std::min(t + cfg.chunk, max_time);
    DenseSolution sol = integrate_ode(rhs, y, 0.0, t2 - t, cfg.ode);
    double tprev = 0;
    for (size_t k = 1; k < sol.times.size(); ++k) {
      for (int m = 1; m <= 16; ++m) {
        const double tc = sol.times[k - 1] + (sol.times[k] - sol.times[k - 1]) * m / 16.0;
        const VectorXd zc = sol.eval(tc);
        // Closed level lines: give up after one full loop back to the start.
        if (t + tc > 0.5 && (Vector2d(zc(0), zc(1)) - z0).norm() < 1e-8) return std::nullopt;
        const double sc = g(Vector2d(zc(0), zc(1)));
        const bool crossing = oriented ? (sprev < 0 && sc >= 0) : (sprev < 0) != (sc < 0);
        if (crossing && tc > 1e-12) {
          double ta = tprev, tb = tc;
          while (tb - ta > cfg.time_tol) {
            const double tm = 0.5 * (ta + tb);
            const VectorXd zm = sol.eval(tm);
            const double sm = g(Vector2d(zm(0), zm(1)));
            ((sm < 0) == (sprev < 0) ? ta : tb) = tm;
          }
          if (++found == nth) {
            const double th = 0.5 * (ta + tb);
            const VectorXd zh = sol.eval(th);
            return EventHit{t + th, Vector2d(zh(0), zh(1))};
          }
        }
        sprev = sc;
        tprev = tc;
      }
    }
    y = sol.states.back();
    t = t2;
  }
  return std::nullopt;
}

}  // namespace

AccessiblePath plan_level_lines(const ActionField& Ja, const ActionField& Jb, const SlowPoint& z0,
                                const SlowPoint& z1, const Domain& D, const PlannerConfig& cfg) {
  if (Ja.domain().dim() != 2 || Jb.domain().dim() != 2)
    throw DimensionError("plan_level_lines: planner is defined for d = 1 only");
  if (!D.contains(z0) || !D.contains(z1))
    throw DomainError("plan_level_lines: endpoints must lie inside the domain");

  const Vector2d p0 = z0.vec2(), p1 = z1.vec2();
  SlowGeneratorSet gens;
  gens.fields = {Ja, Jb};

  AccessiblePath path;
  path.z0 = z0;
  path.tau = {0.0};
  if ((p1 - p0).norm() <= cfg.target_tol) {
    path.z = {z0};
    path.validated = true;
    return path;
  }

  const double a1 = Ja.value(z1), b1 = Jb.value(z1);
  const double level_tol = 1e-10 * (1.0 + std::abs(a1) + std::abs(b1));

  // Greedy alternation: flow along J_a to reach the target's J_b level, along
  // J_b to reach the target's J_a level, then along J_a again to close the
  // remaining distance on the shared level set. Crossing multiplicity gives a
  // small retry tree.
  for (int r1 = 1; r1 <= 2; ++r1) {
    for (int r2 = 1; r2 <= 2; ++r2) {
      std::vector<std::pair<int, double>> segs;  // (generator, duration)
      Vector2d zc = p0;
      bool ok = true;

      if (std::abs(Jb.value(SlowPoint::from_vec2(zc)) - b1) > level_tol) {
        auto hit = flow_event(
            Ja, [&](const Vector2d& z) { return Jb.value(SlowPoint::from_vec2(z)) - b1; }, zc,
            cfg.max_segment_time, r1, false, cfg.flow);
        if (!hit) {
          ok = false;
        } else {
          segs.emplace_back(0, hit->t);
          zc = hit->z;
        }
      }
      if (ok && std::abs(Ja.value(SlowPoint::from_vec2(zc)) - a1) > level_tol) {
        auto hit = flow_event(
            Jb, [&](const Vector2d& z) { return Ja.value(SlowPoint::from_vec2(z)) - a1; }, zc,
            cfg.max_segment_time, r2, false, cfg.flow);
        if (!hit) {
          ok = false;
        } else {
          segs.emplace_back(1, hit->t);
          zc = hit->z;
        }
      }
      if (ok && (zc - p1).norm() > cfg.target_tol) {
        // Closest-approach events along the J_a level line through zc (which
        // also contains z1): minima of |z - z1|^2.
        bool closed = false;
        for (int nth = 1; nth <= 4 && !closed; ++nth) {
          auto hit = flow_event(
              Ja,
              [&](const Vector2d& z) { return (z - p1).dot(raw_field(Ja, z)); }, zc,
              cfg.max_segment_time, nth, true, cfg.flow);
          if (!hit) break;
          if ((hit->z - p1).norm() <= cfg.target_tol) {
            segs.emplace_back(0, hit->t);
            zc = hit->z;
            closed = true;
          }
        }
        if (!closed) ok = false;
      }
      if (!ok || (zc - p1).norm() > cfg.target_tol) continue;

      AccessiblePath cand;
      cand.z0 = z0;
      cand.tau = {0.0};
      for (const auto& [gen, dt] : segs) {
        if (dt <= 0) continue;
        cand.k.push_back(gen);
        cand.tau.push_back(cand.tau.back() + dt);
      }
      try {
        AccessiblePath valid = path_validate(cand, gens, cfg.flow);
        if ((valid.z.back().vec2() - p1).norm() <= cfg.target_tol) return valid;
      } catch (const Error&) {
        // segment left D or degenerated; try the next crossing combination
      }
    }
  }
  throw NotAccessible("plan_level_lines: no alternating level-line route reaches the target");
}

}  // namespace slowfast
