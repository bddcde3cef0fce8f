#include "slowfast/horseshoe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>

namespace slowfast {

namespace {

double sup_diff(const VectorXd& a, const VectorXd& b) {
  return (a - b).lpNorm<Eigen::Infinity>();
}

// Periodic (frozen or eps-fixed-z) fixed point of the coding operator for the
// pure code word^infty at slow value z: one (x_p, y_p) per word position.
struct TailOrbit {
  std::vector<VectorXd> x, y;
};

TailOrbit tail_fixed_point(const CrossFormSystem& sys, const std::string& word, const Vector2d& z,
                           double eps) {
  const int L = static_cast<int>(word.size());
  TailOrbit t;
  t.x.assign(L, VectorXd::Zero(sys.xy_dim));
  t.y.assign(L, VectorXd::Zero(sys.xy_dim));
  auto sym = [&](int p) { return symbol_of(word[((p % L) + L) % L]); };
  for (int it = 0; it < 300; ++it) {
    double delta = 0;
    std::vector<VectorXd> nx(L), ny(L);
    for (int p = 0; p < L; ++p)
      nx[p] = sys.f_at(sym(p - 1), sym(p))(t.x[(p + L - 1) % L], t.y[p], z, eps);
    for (int p = 0; p < L; ++p)
      ny[p] = sys.g_at(sym(p), sym(p + 1))(nx[p], t.y[(p + 1) % L], z, eps);
    for (int p = 0; p < L; ++p) {
      delta = std::max({delta, sup_diff(nx[p], t.x[p]), sup_diff(ny[p], t.y[p])});
      t.x[p] = nx[p];
      t.y[p] = ny[p];
    }
    if (delta < 1e-15) break;
  }
  return t;
}

// Tail values aligned with Code indexing.
VectorXd left_tail_x(const CrossFormSystem& sys, const Code& code, const Vector2d& z, double eps,
                     long i) {
  const std::string& w = code.left_tail();
  const long m = w.size();
  const TailOrbit t = tail_fixed_point(sys, w, z, eps);
  const long p = m - 1 - ((-i - 1) % m);
  return t.x[p];
}

VectorXd right_tail_y(const CrossFormSystem& sys, const Code& code, const Vector2d& z, double eps,
                      long i) {
  const std::string& w = code.right_tail();
  const long m = w.size();
  const long n = code.core_length();
  const TailOrbit t = tail_fixed_point(sys, w, z, eps);
  const long p = (i - n) % m;
  return t.y[p];
}

}  // namespace

ContractionReport check_contraction(const CrossFormSystem& sys, int samples, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const VectorXd lo = sys.D.bbox_lo(), hi = sys.D.bbox_hi();
  const int n = sys.xy_dim;
  const double h = 1e-6;
  double lam = 0;
  for (int s = 0; s < samples; ++s) {
    VectorXd x(n), y(n);
    for (int k = 0; k < n; ++k) {
      x(k) = sys.R * unit(rng);
      y(k) = sys.R * unit(rng);
    }
    Vector2d z;
    do {
      z(0) = lo(0) + 0.5 * (unit(rng) + 1) * (hi(0) - lo(0));
      z(1) = lo(1) + 0.5 * (unit(rng) + 1) * (hi(1) - lo(1));
    } while (!sys.D.contains(z));
    for (int c = 0; c < 2; ++c)
      for (int cp = 0; cp < 2; ++cp) {
        // Rows of d(f,g)/d(x, ybar); operator norm for the max norm is the
        // largest absolute row sum.
        MatrixXd Jrow(2 * n, 2 * n);
        for (int j = 0; j < 2 * n; ++j) {
          VectorXd xp = x, xm = x, yp = y, ym = y;
          if (j < n) {
            xp(j) += h;
            xm(j) -= h;
          } else {
            yp(j - n) += h;
            ym(j - n) -= h;
          }
          const VectorXd fp = sys.f_at(c, cp)(xp, yp, z, 0.0);
          const VectorXd fm = sys.f_at(c, cp)(xm, ym, z, 0.0);
          const VectorXd gp = sys.g_at(c, cp)(xp, yp, z, 0.0);
          const VectorXd gm = sys.g_at(c, cp)(xm, ym, z, 0.0);
          if (!fp.allFinite() || !gp.allFinite() || !fm.allFinite() || !gm.allFinite())
            throw EvaluationError("check_contraction: map returned non-finite values");
          Jrow.col(j).head(n) = (fp - fm) / (2 * h);
          Jrow.col(j).tail(n) = (gp - gm) / (2 * h);
        }
        lam = std::max(lam, Jrow.cwiseAbs().rowwise().sum().maxCoeff());
      }
  }
  ContractionReport rep;
  rep.lambda_hat = lam;
  rep.pass = lam <= sys.lambda * (1 + 1e-9) + 1e-12;
  return rep;
}

SymbolicOrbit orbit_for_code(const CrossFormSystem& sys, const Code& code, const Vector2d& z,
                             const OrbitSolveConfig& cfg) {
  const int core = code.core_length();
  const int W = cfg.window > 0 ? cfg.window : 20 + core;
  SymbolicOrbit orb;
  orb.i_lo = -W;
  orb.i_hi = core - 1 + W;
  orb.z = z;
  orb.truncation_bound = 2 * sys.R * std::pow(sys.lambda, W);
  const long N = orb.i_hi - orb.i_lo + 1;
  orb.x.assign(N, VectorXd::Zero(sys.xy_dim));
  orb.y.assign(N, VectorXd::Zero(sys.xy_dim));

  const VectorXd xb = left_tail_x(sys, code, z, 0.0, orb.i_lo - 1);
  const VectorXd yb = right_tail_y(sys, code, z, 0.0, orb.i_hi + 1);
  auto sym = [&](long i) { return code.symbol(i); };

  double prev_delta = 0;
  for (int it = 0; it < cfg.max_sweeps; ++it) {
    // Jacobi sweep: the full update is computed from the previous iterate so
    // successive deltas contract by the operator's Lipschitz constant.
    std::vector<VectorXd> nx(N), ny(N);
    for (long i = orb.i_lo; i <= orb.i_hi; ++i) {
      const VectorXd& xprev = (i == orb.i_lo) ? xb : orb.x[i - 1 - orb.i_lo];
      nx[i - orb.i_lo] = sys.f_at(sym(i - 1), sym(i))(xprev, orb.y[i - orb.i_lo], z, 0.0);
    }
    for (long i = orb.i_hi; i >= orb.i_lo; --i) {
      const VectorXd& ynext = (i == orb.i_hi) ? yb : orb.y[i + 1 - orb.i_lo];
      ny[i - orb.i_lo] = sys.g_at(sym(i), sym(i + 1))(nx[i - orb.i_lo], ynext, z, 0.0);
    }
    double delta = 0;
    for (long k = 0; k < N; ++k) {
      delta = std::max({delta, sup_diff(nx[k], orb.x[k]), sup_diff(ny[k], orb.y[k])});
      orb.x[k] = std::move(nx[k]);
      orb.y[k] = std::move(ny[k]);
    }
    if (it >= 2 && prev_delta > 100 * cfg.tol && delta > 0)
      orb.convergence_factor = std::max(orb.convergence_factor, delta / prev_delta);
    prev_delta = delta;
    if (delta <= cfg.tol) break;
    if (it == cfg.max_sweeps - 1)
      throw NonConvergence("orbit_for_code: fixed-point iteration did not converge");
  }

  double res = 0;
  for (long i = orb.i_lo; i <= orb.i_hi; ++i) {
    const VectorXd& xprev = (i == orb.i_lo) ? xb : orb.x[i - 1 - orb.i_lo];
    const VectorXd& ynext = (i == orb.i_hi) ? yb : orb.y[i + 1 - orb.i_lo];
    res = std::max(res, sup_diff(orb.x[i - orb.i_lo],
                                 sys.f_at(sym(i - 1), sym(i))(xprev, orb.y[i - orb.i_lo], z, 0.0)));
    res = std::max(res, sup_diff(orb.y[i - orb.i_lo],
                                 sys.g_at(sym(i), sym(i + 1))(orb.x[i - orb.i_lo], ynext, z, 0.0)));
  }
  orb.residual = res;
  return orb;
}

std::vector<MixMargin> mix_check(const CrossFormSystem& sys, const Code& code1, const Code& code2,
                                 int n, const Vector2d& z, const OrbitSolveConfig& cfg) {
  for (long i = -n; i <= n; ++i)
    if (code1.symbol(i) != code2.symbol(i))
      throw PreconditionError("mix_check: codes disagree inside the shared block");
  OrbitSolveConfig c = cfg;
  c.window = std::max(c.window, n + 20 + std::max(code1.core_length(), code2.core_length()));
  const SymbolicOrbit o1 = orbit_for_code(sys, code1, z, c);
  const SymbolicOrbit o2 = orbit_for_code(sys, code2, z, c);
  std::vector<MixMargin> out;
  out.reserve(2 * n + 1);
  for (long i = -n; i <= n; ++i) {
    MixMargin m;
    m.i = i;
    m.measured = std::max(sup_diff(o1.x_at(i), o2.x_at(i)), sup_diff(o1.y_at(i), o2.y_at(i)));
    m.bound = 2 * sys.R * std::pow(sys.lambda, n - std::labs(i));
    out.push_back(m);
  }
  return out;
}

CrossFormSystem mollify(const CrossFormSystem& sys, double delta) {
  if (delta <= 0) throw ParameterError("mollify: delta must be positive");
  if (delta >= sys.D.inradius())
    throw ParameterError("mollify: delta must be smaller than the domain inradius");
  CrossFormSystem out = sys;
  out.mollify_delta = delta;
  const Domain D = sys.D;
  for (int c = 0; c < 2; ++c)
    for (int cp = 0; cp < 2; ++cp) {
      const CrossFormSystem::PhiFn base = sys.phi[c][cp];
      out.phi[c][cp] = [base, D, delta](const VectorXd& x, const VectorXd& ybar, const Vector2d& z,
                                        double eps) -> Vector2d {
        const double dist = D.boundary_distance(VectorXd(z));
        if (dist >= delta) return base(x, ybar, z, eps);
        if (dist <= 0.5 * delta) return Vector2d::Zero();
        const double s = (dist - 0.5 * delta) / (0.5 * delta);
        return s * s * (3 - 2 * s) * base(x, ybar, z, eps);
      };
    }
  return out;
}

SurfaceEvaluator::SurfaceEvaluator(const CrossFormSystem& sys, Code code, double eps,
                                   const OrbitSolveConfig& cfg)
    : sys_(&sys), code_(std::move(code)), eps_(eps), cfg_(cfg) {
  window_ = cfg.window > 0 ? cfg.window : std::max(40, 20 + code_.core_length());
}

SurfaceEvaluator::Sample SurfaceEvaluator::eval(long i, const Vector2d& z) const {
  const CrossFormSystem& sys = *sys_;
  const long lo = i - window_, hi = i + window_;
  const long N = hi - lo + 1;
  auto sym = [&](long j) { return code_.symbol(j); };

  std::vector<VectorXd> x(N, VectorXd::Zero(sys.xy_dim)), y(N, VectorXd::Zero(sys.xy_dim));
  std::vector<Vector2d> zc(N, z);
  {
    // Seed with the frozen orbit at fixed z.
    OrbitSolveConfig c0 = cfg_;
    c0.window = window_ + std::max<long>(std::labs(i), code_.core_length()) + 1;
    const SymbolicOrbit frozen = orbit_for_code(sys, code_, z, c0);
    for (long j = lo; j <= hi; ++j) {
      x[j - lo] = frozen.x_at(j);
      y[j - lo] = frozen.y_at(j);
    }
  }
  if (eps_ == 0.0) {
    Sample s;
    s.x = x[i - lo];
    s.y = y[i - lo];
    s.z_next = z;
    s.x_next = x[i + 1 - lo];
    s.y_next = y[i + 1 - lo];
    return s;
  }

  const int max_sweeps = cfg_.max_sweeps;
  for (int it = 0; it < max_sweeps; ++it) {
    double delta = 0;
    // Slow chain, pinned at index i: forward transport above i, one implicit
    // fixed-point update per sweep below i.
    for (long j = i; j < hi; ++j) {
      const Vector2d zn =
          zc[j - lo] + eps_ * sys.phi_at(sym(j), sym(j + 1))(x[j - lo], y[j + 1 - lo], zc[j - lo],
                                                            eps_);
      delta = std::max(delta, (zn - zc[j + 1 - lo]).lpNorm<Eigen::Infinity>());
      zc[j + 1 - lo] = zn;
    }
    for (long j = i - 1; j >= lo; --j) {
      // Implicit step z_j = z_{j+1} - eps phi(..., z_j): solved to convergence
      // here, since once-per-sweep updates can amplify through the chain when
      // eps |dphi/dz| is sizeable (mollifier shoulder).
      Vector2d zj = zc[j - lo];
      for (int inner = 0; inner < 200; ++inner) {
        const Vector2d zn = zc[j + 1 - lo] -
                            eps_ * sys.phi_at(sym(j), sym(j + 1))(x[j - lo], y[j + 1 - lo], zj,
                                                                  eps_);
        const double d = (zn - zj).lpNorm<Eigen::Infinity>();
        zj = zn;
        if (d <= 0.05 * cfg_.tol) break;
      }
      delta = std::max(delta, (zj - zc[j - lo]).lpNorm<Eigen::Infinity>());
      zc[j - lo] = zj;
    }
    // Boundary data from the pure-tail fixed points at the edge slow values.
    const VectorXd xb = left_tail_x(sys, code_, zc[0], eps_, lo - 1);
    const VectorXd yb = right_tail_y(sys, code_, zc[N - 1], eps_, hi + 1);
    for (long j = lo; j <= hi; ++j) {
      const VectorXd& xprev = (j == lo) ? xb : x[j - 1 - lo];
      const Vector2d& zprev = (j == lo) ? zc[0] : zc[j - 1 - lo];
      const VectorXd xn = sys.f_at(sym(j - 1), sym(j))(xprev, y[j - lo], zprev, eps_);
      delta = std::max(delta, sup_diff(xn, x[j - lo]));
      x[j - lo] = xn;
    }
    for (long j = hi; j >= lo; --j) {
      const VectorXd& ynext = (j == hi) ? yb : y[j + 1 - lo];
      const VectorXd yn = sys.g_at(sym(j), sym(j + 1))(x[j - lo], ynext, zc[j - lo], eps_);
      delta = std::max(delta, sup_diff(yn, y[j - lo]));
      y[j - lo] = yn;
    }
    if (delta <= cfg_.tol) break;
    if (it == max_sweeps - 1)
      throw NonConvergence("SurfaceEvaluator: chain iteration did not converge");
  }

  Sample s;
  s.x = x[i - lo];
  s.y = y[i - lo];
  s.z_next = zc[i + 1 - lo];
  s.x_next = x[i + 1 - lo];
  s.y_next = y[i + 1 - lo];
  return s;
}

namespace {

// Catmull-Rom weights for the 4 nodes around parameter t in [0,1].
inline void catmull(double t, double w[4]) {
  w[0] = 0.5 * (-t + 2 * t * t - t * t * t);
  w[1] = 0.5 * (2 - 5 * t * t + 3 * t * t * t);
  w[2] = 0.5 * (t + 4 * t * t - 3 * t * t * t);
  w[3] = 0.5 * (-t * t + t * t * t);
}

VectorXd grid_interp(const SurfaceGrid& g, const std::vector<VectorXd>& F, const Vector2d& z) {
  const int n = g.n;
  int i = static_cast<int>(std::floor((z(0) - g.v0) / g.hv));
  int j = static_cast<int>(std::floor((z(1) - g.u0) / g.hu));
  i = std::clamp(i, 0, n - 2);
  j = std::clamp(j, 0, n - 2);
  const double s = (z(0) - (g.v0 + i * g.hv)) / g.hv;
  const double t = (z(1) - (g.u0 + j * g.hu)) / g.hu;
  double ws[4], wt[4];
  catmull(s, ws);
  catmull(t, wt);
  VectorXd out = VectorXd::Zero(F[0].size());
  for (int a = -1; a <= 2; ++a)
    for (int b = -1; b <= 2; ++b) {
      const int ia = std::clamp(i + a, 0, n - 1);
      const int jb = std::clamp(j + b, 0, n - 1);
      out += ws[a + 1] * wt[b + 1] * F[ia * n + jb];
    }
  return out;
}

}  // namespace

VectorXd SurfaceFamily::x_at(long i, const Vector2d& z) const {
  const SurfaceGrid& g = grid_at(i);
  return grid_interp(g, g.x, z);
}

VectorXd SurfaceFamily::y_at(long i, const Vector2d& z) const {
  const SurfaceGrid& g = grid_at(i);
  return grid_interp(g, g.y, z);
}

void SurfaceFamily::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IOError("SurfaceFamily::save_csv: cannot open " + path);
  char buf[256];
  out << "# surface_family v1, eps=" << eps << ", mollify_delta=" << mollify_delta
      << ", window=" << window_used << "\n";
  out << "i,v,u";
  const int dim = grids.empty() || grids[0].x.empty() ? 0 : static_cast<int>(grids[0].x[0].size());
  if (dim == 1) {
    out << ",x,y\n";
  } else {
    for (int k = 0; k < dim; ++k) out << ",x" << k;
    for (int k = 0; k < dim; ++k) out << ",y" << k;
    out << "\n";
  }
  for (long i = i_lo; i <= i_hi; ++i) {
    const SurfaceGrid& g = grid_at(i);
    for (int a = 0; a < g.n; ++a)
      for (int b = 0; b < g.n; ++b) {
        out << i;
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g", g.v0 + a * g.hv, g.u0 + b * g.hu);
        out << buf;
        const VectorXd& xv = g.x[a * g.n + b];
        const VectorXd& yv = g.y[a * g.n + b];
        for (int k = 0; k < dim; ++k) {
          std::snprintf(buf, sizeof buf, ",%.17g", xv(k));
          out << buf;
        }
        for (int k = 0; k < dim; ++k) {
          std::snprintf(buf, sizeof buf, ",%.17g", yv(k));
          out << buf;
        }
        out << "\n";
      }
  }
}

SurfaceFamily invariant_surfaces(const CrossFormSystem& sys, const Code& code, double eps,
                                 const SurfaceConfig& cfg) {
  // Invertibility of the slow map zbar = z + eps phi on D: sampled Jacobian.
  if (eps != 0) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const VectorXd lo = sys.D.bbox_lo(), hi = sys.D.bbox_hi();
    const double h = 1e-6;
    for (int s = 0; s < 50; ++s) {
      VectorXd x(sys.xy_dim), y(sys.xy_dim);
      for (int k = 0; k < sys.xy_dim; ++k) {
        x(k) = sys.R * unit(rng);
        y(k) = sys.R * unit(rng);
      }
      Vector2d z;
      do {
        z(0) = lo(0) + 0.5 * (unit(rng) + 1) * (hi(0) - lo(0));
        z(1) = lo(1) + 0.5 * (unit(rng) + 1) * (hi(1) - lo(1));
      } while (!sys.D.contains(z));
      for (int c = 0; c < 2; ++c)
        for (int cp = 0; cp < 2; ++cp) {
          Matrix2d J;
          for (int k = 0; k < 2; ++k) {
            Vector2d zp = z, zm = z;
            zp(k) += h;
            zm(k) -= h;
            J.col(k) = (sys.phi_at(c, cp)(x, y, zp, eps) - sys.phi_at(c, cp)(x, y, zm, eps)) /
                       (2 * h);
          }
          if (std::abs(eps) * J.cwiseAbs().rowwise().sum().maxCoeff() >= 1.0)
            throw SlowMapNotInvertible(
                "invariant_surfaces: eps * dphi/dz reaches 1; slow map may fold");
        }
    }
  }

  SurfaceEvaluator ev(sys, code, eps, cfg.solver);
  SurfaceFamily fam;
  fam.code = code;
  fam.eps = eps;
  fam.mollify_delta = sys.mollify_delta;
  fam.window_used = ev.window();
  fam.i_lo = -cfg.family_window;
  fam.i_hi = code.core_length() + cfg.family_window;

  const VectorXd lo = sys.D.bbox_lo(), hi = sys.D.bbox_hi();
  const int n = cfg.grid_resolution;
  for (long i = fam.i_lo; i <= fam.i_hi; ++i) {
    SurfaceGrid g;
    g.n = n;
    g.v0 = lo(0);
    g.u0 = lo(1);
    g.hv = (hi(0) - lo(0)) / (n - 1);
    g.hu = (hi(1) - lo(1)) / (n - 1);
    g.x.resize(n * n);
    g.y.resize(n * n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const Vector2d z(g.v0 + a * g.hv, g.u0 + b * g.hu);
        const SurfaceEvaluator::Sample s = ev.eval(i, z);
        g.x[a * n + b] = s.x;
        g.y[a * n + b] = s.y;
      }
    fam.grids.push_back(std::move(g));
  }

  // Sampled z-derivative bound from the stored grids.
  double dmax = 0;
  for (const SurfaceGrid& g : fam.grids)
    for (int a = 0; a + 1 < g.n; ++a)
      for (int b = 0; b + 1 < g.n; ++b) {
        dmax = std::max(dmax, (g.x[(a + 1) * g.n + b] - g.x[a * g.n + b]).lpNorm<Eigen::Infinity>() / g.hv);
        dmax = std::max(dmax, (g.x[a * g.n + b + 1] - g.x[a * g.n + b]).lpNorm<Eigen::Infinity>() / g.hu);
        dmax = std::max(dmax, (g.y[(a + 1) * g.n + b] - g.y[a * g.n + b]).lpNorm<Eigen::Infinity>() / g.hv);
        dmax = std::max(dmax, (g.y[a * g.n + b + 1] - g.y[a * g.n + b]).lpNorm<Eigen::Infinity>() / g.hu);
      }
  fam.max_z_derivative = dmax;

  // Invariance residual, measured with the pointwise solver: the chain values
  // at index i+1 must match the surface evaluated at the transported z.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double res = 0;
  for (long i = fam.i_lo; i < fam.i_hi; ++i) {
    for (int s = 0; s < cfg.residual_samples; ++s) {
      Vector2d z;
      do {
        z(0) = lo(0) + 0.5 * (unit(rng) + 1) * (hi(0) - lo(0));
        z(1) = lo(1) + 0.5 * (unit(rng) + 1) * (hi(1) - lo(1));
      } while (!sys.D.contains(z));
      const SurfaceEvaluator::Sample s1 = ev.eval(i, z);
      const SurfaceEvaluator::Sample s2 = ev.eval(i + 1, s1.z_next);
      res = std::max({res, sup_diff(s2.x, s1.x_next), sup_diff(s2.y, s1.y_next)});
    }
  }
  fam.invariance_residual = res;
  return fam;
}

}  // namespace slowfast
