#include "slowfast/shadow.hpp"

#include <algorithm>
#include <cmath>

namespace slowfast {

namespace {

std::string pad_to(const std::string& word, int l0) {
  std::string out;
  out.reserve(l0);
  for (int i = 0; i < l0; ++i) out.push_back(word[i % word.size()]);
  return out;
}

}  // namespace

Code CodePlan::emit() const {
  std::string core;
  for (const std::string& b : blocks) core += b;
  const std::string left = padded_codes.empty() ? "a" : padded_codes.front();
  const std::string right = padded_codes.empty() ? "a" : padded_codes.back();
  return Code(left, core, right);
}

CodePlan plan_code(const AccessiblePath& path, const std::vector<std::string>& orbit_codes,
                   double eps) {
  if (!path.validated) throw PreconditionError("plan_code: path has not been validated");
  if (eps <= 0) throw ParameterError("plan_code: eps must be positive");
  for (int k : path.k)
    if (k < 0 || k >= static_cast<int>(orbit_codes.size()))
      throw ParameterError("plan_code: segment generator has no orbit code");
  for (const std::string& w : orbit_codes)
    if (w.empty()) throw ParameterError("plan_code: orbit codes must be nonempty");

  CodePlan plan;
  plan.l0 = 1;
  for (const std::string& w : orbit_codes)
    plan.l0 = std::max(plan.l0, static_cast<int>(w.size()));

  long cum = 0;
  for (int i = 0; i < path.segments(); ++i) {
    const double delta = path.tau[i + 1] - path.tau[i];
    const long Ni = static_cast<long>(std::floor(delta / (eps * plan.l0)));
    if (Ni == 0) throw EmptyBlock("plan_code: eps too large for segment " + std::to_string(i));
    const std::string word = pad_to(orbit_codes[path.k[i]], plan.l0);
    plan.padded_codes.push_back(word);
    std::string block;
    block.reserve(word.size() * Ni);
    for (long r = 0; r < Ni; ++r) block += word;
    plan.N.push_back(Ni);
    plan.blocks.push_back(std::move(block));
    cum += Ni;
    plan.offsets.push_back(plan.l0 * cum);
  }
  plan.total_length = plan.offsets.empty() ? 0 : plan.offsets.back();
  return plan;
}

DriftTrajectory drift_run(const CrossFormSystem& sys, const SurfaceEvaluator& surfaces,
                          const Vector2d& z0, long steps) {
  DriftTrajectory traj;
  traj.code = surfaces.code();
  traj.eps = surfaces.eps();
  traj.z0 = z0;
  traj.z.push_back(z0);
  for (long i = 0; i < steps; ++i) {
    const Vector2d& zi = traj.z.back();
    if (!sys.D.contains(zi)) {
      traj.exited = true;
      traj.exit_step = i;
      break;
    }
    const SurfaceEvaluator::Sample s = surfaces.eval(i, zi);
    const Vector2d zn =
        zi + traj.eps * sys.phi_at(traj.code.symbol(i), traj.code.symbol(i + 1))(s.x, s.y, zi,
                                                                                 traj.eps);
    traj.x.push_back(s.x);
    traj.y.push_back(s.y);
    traj.z.push_back(zn);
  }
  return traj;
}

DriftTrajectory drift_run(const CrossFormSystem& sys, const Code& code, const Vector2d& z0,
                          double eps, long steps, const OrbitSolveConfig& cfg) {
  const SurfaceEvaluator ev(sys, code, eps, cfg);
  return drift_run(sys, ev, z0, steps);
}

DriftTrajectory drift_run(const CrossFormSystem& sys, const SurfaceFamily& surfaces,
                          const Vector2d& z0, long steps) {
  DriftTrajectory traj;
  traj.code = surfaces.code;
  traj.eps = surfaces.eps;
  traj.z0 = z0;
  traj.z.push_back(z0);
  for (long i = 0; i < steps; ++i) {
    const Vector2d& zi = traj.z.back();
    if (!sys.D.contains(zi)) {
      traj.exited = true;
      traj.exit_step = i;
      break;
    }
    const VectorXd x = surfaces.x_at(i, zi);
    const VectorXd y = surfaces.y_at(i, zi);
    const Vector2d zn =
        zi + traj.eps * sys.phi_at(traj.code.symbol(i), traj.code.symbol(i + 1))(x, y, zi,
                                                                                 traj.eps);
    traj.x.push_back(x);
    traj.y.push_back(y);
    traj.z.push_back(zn);
  }
  return traj;
}

DriftTrajectory homogeneous_run(const CrossFormSystem& sys, char c, const Vector2d& z0, double eps,
                                long steps, const OrbitSolveConfig& cfg) {
  return drift_run(sys, Code::pure(c), z0, eps, steps, cfg);
}

BlockCompareResult block_compare(const DriftTrajectory& traj1, const DriftTrajectory& traj2,
                                 long j, double t0) {
  if (traj1.eps != traj2.eps) throw ParameterError("block_compare: eps mismatch");
  const double eps = traj1.eps;
  if (eps <= 0) throw ParameterError("block_compare: eps must be positive");
  const long M = static_cast<long>(std::floor(t0 / eps));
  for (long i = 0; i <= M; ++i)
    if (traj1.code.symbol(j + i) != traj2.code.symbol(i))
      throw BlockMismatch("block_compare: codes disagree inside the common block");
  if (static_cast<long>(traj1.z.size()) <= j + M || static_cast<long>(traj2.z.size()) <= M)
    throw ParameterError("block_compare: trajectories shorter than the common block");
  BlockCompareResult out;
  out.diffs.reserve(M + 1);
  for (long N = 0; N <= M; ++N) {
    const double d = (traj1.z[j + N] - traj2.z[N]).norm();
    out.diffs.push_back(d);
    out.K1 = std::max(out.K1, d / eps);
  }
  return out;
}

namespace {

// Dense, linearly interpolated samples of Gamma per segment.
class PathSampler {
 public:
  PathSampler(const AccessiblePath& path, const SlowGeneratorSet& gens, int samples)
      : path_(path) {
    for (int s = 0; s < path.segments(); ++s) {
      const double delta = path.tau[s + 1] - path.tau[s];
      seg_.push_back(
          slow_flow_samples(gens.at(path.k[s]), path.z[s], delta, samples));
    }
  }

  Vector2d eval(double tau) const {
    if (path_.segments() == 0) return path_.z0.vec2();
    tau = std::clamp(tau, 0.0, path_.duration());
    int s = static_cast<int>(std::upper_bound(path_.tau.begin(), path_.tau.end(), tau) -
                             path_.tau.begin()) -
            1;
    s = std::clamp(s, 0, path_.segments() - 1);
    const auto& pts = seg_[s];
    const double t = tau - path_.tau[s];
    const double span = path_.tau[s + 1] - path_.tau[s];
    const double r = std::clamp(t / span, 0.0, 1.0) * (pts.size() - 1);
    const size_t i = std::min(static_cast<size_t>(r), pts.size() - 2);
    const double w = r - i;
    return (1 - w) * pts[i].second + w * pts[i + 1].second;
  }

 private:
  const AccessiblePath& path_;
  std::vector<std::vector<std::pair<double, Vector2d>>> seg_;
};

}  // namespace

ShadowReport verify_theorem1(const CrossFormSystem& sys, const SlowGeneratorSet& gens,
                             const AccessiblePath& path, const std::vector<double>& eps_list,
                             const TheoremConfig& cfg) {
  if (!path.validated) throw PreconditionError("verify_theorem1: path has not been validated");
  std::vector<std::string> codes = cfg.codes;
  if (codes.empty()) codes = {"a", "b"};

  const CrossFormSystem msys = mollify(sys, cfg.mollify_delta);
  const PathSampler gamma(path, gens, cfg.gamma_samples);
  const double T = path.duration();
  const Vector2d z0 = path.z0.vec2();

  ShadowReport report;
  for (double eps : eps_list) {
    ShadowRecord rec;
    rec.eps = eps;
    rec.plan = plan_code(path, codes, eps);
    const Code code = rec.plan.emit();
    const SurfaceEvaluator ev(msys, code, eps, cfg.solver);
    const DriftTrajectory traj = drift_run(msys, ev, z0, rec.plan.total_length);

    rec.segment_max_error.assign(std::max(1, path.segments()), 0.0);
    for (long i = 0; i < static_cast<long>(traj.z.size()); ++i) {
      ShadowRow row;
      row.step = i;
      row.slow_time = std::min(eps * i, T);
      row.z_drift = traj.z[i];
      row.gamma = gamma.eval(row.slow_time);
      row.error = (row.z_drift - row.gamma).norm();
      rec.max_error = std::max(rec.max_error, row.error);
      if (path.segments() > 0) {
        int s = 0;
        while (s + 1 < path.segments() && i > rec.plan.offsets[s]) ++s;
        rec.segment_max_error[s] = std::max(rec.segment_max_error[s], row.error);
      }
      rec.rows.push_back(std::move(row));
    }
    rec.endpoint_error = (traj.z.back() - gamma.eval(T)).norm();
    rec.c0 = rec.max_error / eps;
    report.records.push_back(std::move(rec));
  }

  for (size_t k = 0; k + 1 < report.records.size(); ++k) {
    const double e0 = report.records[k].max_error, e1 = report.records[k + 1].max_error;
    const double ratio = e1 > 0 ? e0 / e1 : 0.0;
    report.scaling_ratios.push_back(ratio);
    if (ratio < cfg.scaling_lo || ratio > cfg.scaling_hi) report.scaling_violation = true;
  }
  return report;
}

}  // namespace slowfast
