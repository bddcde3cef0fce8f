#pragma once
#include <string>
#include <vector>

#include "slowfast/horseshoe.hpp"
#include "slowfast/slowdrive.hpp"

namespace slowfast {

// Symbol-block plan for following an accessible path (one block per segment).
struct CodePlan {
  std::vector<std::string> padded_codes;  // c_k repeated up to length l0
  int l0 = 1;
  std::vector<long> N;        // block counts N_i = floor(Delta_i / (eps l0))
  std::vector<std::string> blocks;  // omega_i = padded code repeated N_i times
  std::vector<long> offsets;  // j_i = l0 * sum_{l<=i} N_l (block end positions)
  long total_length = 0;

  // Emitted code: core = omega_1 ... omega_N starting at position 0; the left
  // tail repeats the first segment's word, the right tail the last one's.
  Code emit() const;
};

CodePlan plan_code(const AccessiblePath& path, const std::vector<std::string>& orbit_codes,
                   double eps);

struct DriftTrajectory {
  Code code;
  double eps = 0;
  Vector2d z0;
  std::vector<Vector2d> z;     // iterates, z[0] = z0
  std::vector<VectorXd> x, y;  // surface values used at each completed step
  bool exited = false;
  long exit_step = -1;

  long steps() const { return static_cast<long>(z.size()) - 1; }
};

// Iterates z_{i+1} = z_i + eps phi_{xi_i xi_{i+1}}(x_i(z_i), y_i(z_i), z_i, eps)
// with surface values from the pointwise chain solver.
DriftTrajectory drift_run(const CrossFormSystem& sys, const SurfaceEvaluator& surfaces,
                          const Vector2d& z0, long steps);

DriftTrajectory drift_run(const CrossFormSystem& sys, const Code& code, const Vector2d& z0,
                          double eps, long steps, const OrbitSolveConfig& cfg = {});

// Grid-interpolated variant; indices must stay inside the family window.
DriftTrajectory drift_run(const CrossFormSystem& sys, const SurfaceFamily& surfaces,
                          const Vector2d& z0, long steps);

DriftTrajectory homogeneous_run(const CrossFormSystem& sys, char c, const Vector2d& z0, double eps,
                                long steps, const OrbitSolveConfig& cfg = {});

struct BlockCompareResult {
  std::vector<double> diffs;  // ||z1_{j+N} - z2_N|| for N = 0..M
  double K1 = 0;              // max diff / eps
};

// Lemma 5.1/5.2 measurement over the common block of length floor(t0/eps).
BlockCompareResult block_compare(const DriftTrajectory& traj1, const DriftTrajectory& traj2,
                                 long j, double t0);

struct ShadowRow {
  long step;
  double slow_time;
  Vector2d z_drift;
  Vector2d gamma;
  double error;
};

struct ShadowRecord {
  double eps = 0;
  double max_error = 0;
  double endpoint_error = 0;
  double c0 = 0;  // max_error / eps
  std::vector<double> segment_max_error;
  CodePlan plan;
  std::vector<ShadowRow> rows;
};

struct ShadowReport {
  std::vector<ShadowRecord> records;  // one per eps, in input order
  std::vector<double> scaling_ratios;  // max_error ratios between consecutive eps
  bool scaling_violation = false;
};

struct TheoremConfig {
  double mollify_delta = 0.2;
  std::vector<std::string> codes;  // per generator; default {"a", "b"}
  OrbitSolveConfig solver;
  double scaling_lo = 1.5, scaling_hi = 3.0;
  int gamma_samples = 2048;  // dense samples per path segment
};

// End-to-end shadowing check: mollify, plan, solve surfaces on the fly, drift,
// and compare against Gamma at slow time eps * step.
ShadowReport verify_theorem1(const CrossFormSystem& sys, const SlowGeneratorSet& gens,
                             const AccessiblePath& path, const std::vector<double>& eps_list,
                             const TheoremConfig& cfg = {});

}  // namespace slowfast
