#pragma once
#include <array>
#include <functional>
#include <string>
#include <vector>

#include "slowfast/domain.hpp"

namespace slowfast {

// Symbols of the two cross sections.
enum : int { SYM_A = 0, SYM_B = 1 };

inline int symbol_of(char c) {
  if (c == 'a') return SYM_A;
  if (c == 'b') return SYM_B;
  throw ParameterError("Code: symbols must be 'a' or 'b'");
}

// Bi-infinite code: left-periodic tail, core word starting at index 0,
// right-periodic tail.
class Code {
 public:
  Code() = default;
  Code(std::string left_tail, std::string core, std::string right_tail)
      : left_(std::move(left_tail)), core_(std::move(core)), right_(std::move(right_tail)) {
    if (left_.empty() || right_.empty())
      throw ParameterError("Code: tail words must be nonempty");
    for (char c : left_ + core_ + right_) symbol_of(c);
  }
  // c^infty
  static Code pure(char c) { return Code(std::string(1, c), "", std::string(1, c)); }

  const std::string& core() const { return core_; }
  int core_length() const { return static_cast<int>(core_.size()); }

  // Symbol xi_i, total over all integers; core occupies [0, core_length).
  int symbol(long i) const {
    const long n = core_.size();
    if (i >= 0 && i < n) return symbol_of(core_[i]);
    if (i >= n) {
      const long m = right_.size();
      return symbol_of(right_[(i - n) % m]);
    }
    const long m = left_.size();
    const long r = ((-i - 1) % m);  // distance from the right end of the left tail
    return symbol_of(left_[m - 1 - r]);
  }

  const std::string& left_tail() const { return left_; }
  const std::string& right_tail() const { return right_; }

 private:
  std::string left_ = "a", core_, right_ = "a";
};

// Cross-form Poincare maps xbar = f(x, ybar, z, eps), y = g(x, ybar, z, eps),
// zbar = z + eps phi(x, ybar, z, eps) for each symbol pair, with declared
// contraction constant lambda and ball radius R.
struct CrossFormSystem {
  using MapFn = std::function<VectorXd(const VectorXd& x, const VectorXd& ybar, const Vector2d& z,
                                       double eps)>;
  using PhiFn = std::function<Vector2d(const VectorXd& x, const VectorXd& ybar, const Vector2d& z,
                                       double eps)>;

  int xy_dim = 1;  // dimension of x and y (m - 1)
  std::array<std::array<MapFn, 2>, 2> f, g;  // [c][c']
  std::array<std::array<PhiFn, 2>, 2> phi;
  double lambda = 0.5;
  double R = 1.0;
  Domain D = Domain::box2(-1, 1, -1, 1);
  double phi_deriv_bound = 0;  // metadata: sup of |dphi/d(x,y,z)| if known
  double mollify_delta = 0;    // 0 = unmodified

  const MapFn& f_at(int c, int cp) const { return f[c][cp]; }
  const MapFn& g_at(int c, int cp) const { return g[c][cp]; }
  const PhiFn& phi_at(int c, int cp) const { return phi[c][cp]; }
};

struct ContractionReport {
  double lambda_hat = 0;
  bool pass = false;
};

// Sampled max-norm operator bound of d(f,g)/d(x, ybar) over random points in
// the R-ball and z in D.
ContractionReport check_contraction(const CrossFormSystem& sys, int samples,
                                    unsigned long seed = 1);

// Frozen (eps = 0) orbit with a given code at fixed z: window-truncated fixed
// point of the coding operator.
struct SymbolicOrbit {
  long i_lo = 0, i_hi = 0;
  std::vector<VectorXd> x, y;  // index i - i_lo
  Vector2d z;
  double eps = 0;
  double residual = 0;
  double convergence_factor = 0;  // max ratio of successive sweep deltas
  double truncation_bound = 0;    // 2 R lambda^W

  const VectorXd& x_at(long i) const { return x.at(check(i)); }
  const VectorXd& y_at(long i) const { return y.at(check(i)); }

 private:
  size_t check(long i) const {
    if (i < i_lo || i > i_hi)
      throw SurfaceWindowExceeded("SymbolicOrbit: index outside the solved window");
    return static_cast<size_t>(i - i_lo);
  }
};

struct OrbitSolveConfig {
  int window = 0;  // extra half-width beyond the core; 0 = default 20 + core
  double tol = 1e-13;
  int max_sweeps = 400;
};

SymbolicOrbit orbit_for_code(const CrossFormSystem& sys, const Code& code, const Vector2d& z,
                             const OrbitSolveConfig& cfg = {});

struct MixMargin {
  long i;
  double measured;
  double bound;  // 2 R lambda^{n - |i|}
};

std::vector<MixMargin> mix_check(const CrossFormSystem& sys, const Code& code1, const Code& code2,
                                 int n, const Vector2d& z, const OrbitSolveConfig& cfg = {});

// Returns a copy whose phi are multiplied by a C^1 cutoff in the distance to
// dD: 1 at distance >= delta, 0 at distance <= delta/2.
CrossFormSystem mollify(const CrossFormSystem& sys, double delta);

// Pointwise solver for the Lemma-1 surfaces: solves the eps-coupled chain in a
// window around index i with the slow value pinned to z at i.
class SurfaceEvaluator {
 public:
  struct Sample {
    VectorXd x, y;   // surface values x_i(z), y_i(z)
    Vector2d z_next; // z_{i+1} = z + eps phi_{xi_i xi_{i+1}}(x_i, y_{i+1}, z, eps)
    VectorXd x_next, y_next;  // chain values at index i+1 (at z_next)
  };

  SurfaceEvaluator(const CrossFormSystem& sys, Code code, double eps,
                   const OrbitSolveConfig& cfg = {});
  Sample eval(long i, const Vector2d& z) const;
  double eps() const { return eps_; }
  const Code& code() const { return code_; }
  int window() const { return window_; }

 private:
  const CrossFormSystem* sys_;
  Code code_;
  double eps_;
  OrbitSolveConfig cfg_;
  int window_;
};

// Grid storage of one surface family index: values over the bbox of D with a
// C^1 Hermite interpolant (finite-difference derivatives).
struct SurfaceGrid {
  int n = 0;  // n x n nodes
  double v0 = 0, u0 = 0, hv = 0, hu = 0;
  std::vector<VectorXd> x, y;  // node (i,j) at index i*n + j

  double x_scalar(int i, int j) const { return x[i * n + j](0); }
};

struct SurfaceFamily {
  Code code;
  double eps = 0;
  long i_lo = 0, i_hi = 0;
  std::vector<SurfaceGrid> grids;  // index i - i_lo
  double invariance_residual = 0;
  double max_z_derivative = 0;  // sampled
  double mollify_delta = 0;
  int window_used = 0;

  const SurfaceGrid& grid_at(long i) const {
    if (i < i_lo || i > i_hi)
      throw SurfaceWindowExceeded("SurfaceFamily: index outside the stored window");
    return grids[static_cast<size_t>(i - i_lo)];
  }
  // Catmull-Rom style Hermite interpolation of the stored grid.
  VectorXd x_at(long i, const Vector2d& z) const;
  VectorXd y_at(long i, const Vector2d& z) const;

  void save_csv(const std::string& path) const;
};

struct SurfaceConfig {
  int grid_resolution = 17;
  int family_window = 6;         // stored indices [-window, core_len + window]
  int residual_samples = 12;     // z samples per stored index for the residual
  OrbitSolveConfig solver;
};

SurfaceFamily invariant_surfaces(const CrossFormSystem& sys, const Code& code, double eps,
                                 const SurfaceConfig& cfg = {});

}  // namespace slowfast
