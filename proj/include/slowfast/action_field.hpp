#pragma once
#include <functional>
#include <string>
#include <vector>

#include "slowfast/domain.hpp"
#include "slowfast/orbit.hpp"

namespace slowfast {

// Grid of action data J(z), T(z), grad J(z) over the bounding box of D, with a
// C^1 Hermite bicubic interpolant. Only d = 1 (two slow variables) is
// supported; the grid is uniform, nv x nu nodes, node (i, j) at
// (v0 + i hv, u0 + j hu).
class ActionField {
 public:
  ActionField() = default;
  ActionField(std::string label, const Domain& domain, int nv, int nu);

  const std::string& label() const { return label_; }
  const Domain& domain() const { return dom_; }
  int nv() const { return nv_; }
  int nu() const { return nu_; }
  double node_v(int i) const { return v0_ + i * hv_; }
  double node_u(int j) const { return u0_ + j * hu_; }

  double& J(int i, int j) { return J_[idx(i, j)]; }
  double& T(int i, int j) { return T_[idx(i, j)]; }
  double& dJdv(int i, int j) { return dJdv_[idx(i, j)]; }
  double& dJdu(int i, int j) { return dJdu_[idx(i, j)]; }
  double J(int i, int j) const { return J_[idx(i, j)]; }
  double T(int i, int j) const { return T_[idx(i, j)]; }
  double dJdv(int i, int j) const { return dJdv_[idx(i, j)]; }
  double dJdu(int i, int j) const { return dJdu_[idx(i, j)]; }

  // Call once after filling the nodes; computes cross derivatives.
  void finalize();

  double value(const SlowPoint& z) const;
  Vector2d gradient(const SlowPoint& z) const;  // (dJ/dv, dJ/du)
  double period(const SlowPoint& z) const;

  void save_csv(const std::string& path) const;
  static ActionField load_csv(const std::string& path);

  // Grid built from closed forms (exact at nodes); grad = (dJ/dv, dJ/du).
  static ActionField analytic(std::string label, const Domain& domain, int nv, int nu,
                              const std::function<double(const Vector2d&)>& J,
                              const std::function<Vector2d(const Vector2d&)>& gradJ,
                              const std::function<double(const Vector2d&)>& T);

 private:
  int idx(int i, int j) const { return i * nu_ + j; }
  // Hermite data for one cell of one scalar field.
  void cell_of(double v, double u, int& i, int& j, double& s, double& t) const;
  double interp(const std::vector<double>& F, const std::vector<double>& Fv,
                const std::vector<double>& Fu, const std::vector<double>& Fvu, double v, double u,
                int deriv) const;  // deriv: 0 value, 1 d/dv, 2 d/du

  std::string label_;
  Domain dom_;
  int nv_ = 0, nu_ = 0;
  double v0_ = 0, u0_ = 0, hv_ = 0, hu_ = 0;
  std::vector<double> J_, T_, dJdv_, dJdu_;
  std::vector<double> Jvu_;              // cross derivatives d2J/dvdu (finite differenced)
  std::vector<double> Tv_, Tu_, Tvu_;    // FD derivatives of the period field
  bool finalized_ = false;
};

struct ActionFieldConfig {
  OrbitConfig orbit;
};

// Warm-started Newton continuation over the grid, breadth-first from the node
// nearest the seed orbit's slow point.
ActionField build_action_field(const HamiltonianModel& model, const PeriodicOrbit& seed,
                               const Domain& domain, int nv, int nu,
                               const ActionFieldConfig& cfg = {});

}  // namespace slowfast
