#pragma once
#include <Eigen/Dense>

#include "slowfast/errors.hpp"

namespace slowfast {

using Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct Dims {
  int fast_dof = 1;  // m
  int slow_dof = 1;  // d

  int fast_size() const { return 2 * fast_dof; }
  int slow_size() const { return 2 * slow_dof; }
  int full_size() const { return fast_size() + slow_size(); }
  void validate() const {
    if (fast_dof < 1 || slow_dof < 1)
      throw DimensionError("Dims: degrees of freedom must be >= 1");
  }
  bool operator==(const Dims&) const = default;
};

// Fast phase point (p, q), each of length m.
struct FastPoint {
  VectorXd p, q;

  int dof() const { return static_cast<int>(p.size()); }
  bool finite() const { return p.allFinite() && q.allFinite(); }

  VectorXd flat() const {
    VectorXd out(p.size() + q.size());
    out << p, q;
    return out;
  }
  static FastPoint from_flat(const VectorXd& w) {
    const long m = w.size() / 2;
    return {w.head(m), w.tail(m)};
  }
  static FastPoint zero(int m) { return {VectorXd::Zero(m), VectorXd::Zero(m)}; }
  static FastPoint make(double p0, double q0) {
    FastPoint w;
    w.p = VectorXd::Constant(1, p0);
    w.q = VectorXd::Constant(1, q0);
    return w;
  }
};

// Slow phase point (v, u), each of length d.
struct SlowPoint {
  VectorXd v, u;

  int dof() const { return static_cast<int>(v.size()); }
  bool finite() const { return v.allFinite() && u.allFinite(); }

  VectorXd flat() const {
    VectorXd out(v.size() + u.size());
    out << v, u;
    return out;
  }
  Vector2d vec2() const {
    if (v.size() != 1) throw DimensionError("SlowPoint::vec2 requires d = 1");
    return Vector2d(v(0), u(0));
  }
  static SlowPoint from_flat(const VectorXd& z) {
    const long d = z.size() / 2;
    return {z.head(d), z.tail(d)};
  }
  static SlowPoint from_vec2(const Vector2d& z) {
    SlowPoint out;
    out.v = VectorXd::Constant(1, z(0));
    out.u = VectorXd::Constant(1, z(1));
    return out;
  }
  static SlowPoint zero(int d) { return {VectorXd::Zero(d), VectorXd::Zero(d)}; }
  static SlowPoint make(double v0, double u0) { return from_vec2(Vector2d(v0, u0)); }
};

struct FullState {
  FastPoint w;
  SlowPoint z;

  bool finite() const { return w.finite() && z.finite(); }
  VectorXd flat() const {
    VectorXd out(w.p.size() * 2 + z.v.size() * 2);
    out << w.p, w.q, z.v, z.u;
    return out;
  }
  static FullState from_flat(const Dims& dims, const VectorXd& y) {
    const int m = dims.fast_dof, d = dims.slow_dof;
    FullState s;
    s.w.p = y.segment(0, m);
    s.w.q = y.segment(m, m);
    s.z.v = y.segment(2 * m, d);
    s.z.u = y.segment(2 * m + d, d);
    return s;
  }
};

}  // namespace slowfast
