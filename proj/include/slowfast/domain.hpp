#pragma once
#include <algorithm>
#include <cmath>

#include "slowfast/types.hpp"

namespace slowfast {

// Bounded open domain D in the slow phase space R^{2d}: axis-aligned box or ball.
class Domain {
 public:
  enum class Kind { Box, Ball };

  static Domain box(const VectorXd& lo, const VectorXd& hi) {
    if (lo.size() != hi.size() || lo.size() == 0)
      throw DimensionError("Domain::box: bound size mismatch");
    if (((hi - lo).array() <= 0).any())
      throw ParameterError("Domain::box: empty box");
    Domain d;
    d.kind_ = Kind::Box;
    d.lo_ = lo;
    d.hi_ = hi;
    return d;
  }
  static Domain box2(double v0, double v1, double u0, double u1) {
    VectorXd lo(2), hi(2);
    lo << v0, u0;
    hi << v1, u1;
    return box(lo, hi);
  }
  static Domain ball(const VectorXd& center, double radius) {
    if (radius <= 0) throw ParameterError("Domain::ball: radius must be positive");
    Domain d;
    d.kind_ = Kind::Ball;
    d.center_ = center;
    d.radius_ = radius;
    return d;
  }
  static Domain ball2(double cv, double cu, double radius) {
    VectorXd c(2);
    c << cv, cu;
    return ball(c, radius);
  }

  Kind kind() const { return kind_; }
  int dim() const {
    return static_cast<int>(kind_ == Kind::Box ? lo_.size() : center_.size());
  }

  // Positive inside, negative outside, zero on the boundary.
  double signed_inside(const VectorXd& z) const {
    if (kind_ == Kind::Ball) return radius_ - (z - center_).norm();
    double s = std::numeric_limits<double>::infinity();
    for (long i = 0; i < z.size(); ++i)
      s = std::min({s, z(i) - lo_(i), hi_(i) - z(i)});
    return s;
  }
  bool contains(const VectorXd& z) const { return signed_inside(z) > 0; }
  bool contains(const SlowPoint& z) const { return contains(z.flat()); }

  // Distance to the boundary; 0 outside or on the boundary.
  double boundary_distance(const VectorXd& z) const {
    return std::max(0.0, signed_inside(z));
  }
  double boundary_distance(const SlowPoint& z) const { return boundary_distance(z.flat()); }

  double inradius() const {
    if (kind_ == Kind::Ball) return radius_;
    return 0.5 * (hi_ - lo_).minCoeff();
  }

  VectorXd bbox_lo() const {
    if (kind_ == Kind::Box) return lo_;
    return center_.array() - radius_;
  }
  VectorXd bbox_hi() const {
    if (kind_ == Kind::Box) return hi_;
    return center_.array() + radius_;
  }

  // Serialization helpers for CSV headers.
  VectorXd param_a() const { return kind_ == Kind::Box ? lo_ : center_; }
  VectorXd param_b() const {
    if (kind_ == Kind::Box) return hi_;
    return VectorXd::Constant(1, radius_);
  }

 private:
  Kind kind_ = Kind::Box;
  VectorXd lo_, hi_;      // box
  VectorXd center_;       // ball
  double radius_ = 0;     // ball
};

}  // namespace slowfast
