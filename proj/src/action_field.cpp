#include "slowfast/action_field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>

namespace slowfast {

namespace {

// Cubic Hermite basis on [0,1] and its derivative.
inline void hermite(double s, double h[4]) {
  h[0] = (1 + 2 * s) * (1 - s) * (1 - s);  // value at 0
  h[1] = s * s * (3 - 2 * s);              // value at 1
  h[2] = s * (1 - s) * (1 - s);            // slope at 0
  h[3] = s * s * (s - 1);                  // slope at 1
}
inline void hermite_d(double s, double h[4]) {
  h[0] = 6 * s * (s - 1);
  h[1] = -6 * s * (s - 1);
  h[2] = (1 - s) * (1 - 3 * s);
  h[3] = s * (3 * s - 2);
}

}  // namespace

ActionField::ActionField(std::string label, const Domain& domain, int nv, int nu)
    : label_(std::move(label)), dom_(domain), nv_(nv), nu_(nu) {
  if (domain.dim() != 2) throw DimensionError("ActionField: only d = 1 slow spaces supported");
  if (nv < 4 || nu < 4) throw ParameterError("ActionField: grid needs at least 4x4 nodes");
  const VectorXd lo = domain.bbox_lo(), hi = domain.bbox_hi();
  v0_ = lo(0);
  u0_ = lo(1);
  hv_ = (hi(0) - lo(0)) / (nv - 1);
  hu_ = (hi(1) - lo(1)) / (nu - 1);
  const int n = nv * nu;
  J_.assign(n, 0);
  T_.assign(n, 0);
  dJdv_.assign(n, 0);
  dJdu_.assign(n, 0);
}

void ActionField::finalize() {
  const int n = nv_ * nu_;
  Jvu_.assign(n, 0);
  Tv_.assign(n, 0);
  Tu_.assign(n, 0);
  Tvu_.assign(n, 0);
  auto dv = [&](const std::vector<double>& F, int i, int j) {
    if (i == 0) return (F[idx(1, j)] - F[idx(0, j)]) / hv_;
    if (i == nv_ - 1) return (F[idx(nv_ - 1, j)] - F[idx(nv_ - 2, j)]) / hv_;
    return (F[idx(i + 1, j)] - F[idx(i - 1, j)]) / (2 * hv_);
  };
  auto du = [&](const std::vector<double>& F, int i, int j) {
    if (j == 0) return (F[idx(i, 1)] - F[idx(i, 0)]) / hu_;
    if (j == nu_ - 1) return (F[idx(i, nu_ - 1)] - F[idx(i, nu_ - 2)]) / hu_;
    return (F[idx(i, j + 1)] - F[idx(i, j - 1)]) / (2 * hu_);
  };
  for (int i = 0; i < nv_; ++i)
    for (int j = 0; j < nu_; ++j) {
      Jvu_[idx(i, j)] = du(dJdv_, i, j);
      Tv_[idx(i, j)] = dv(T_, i, j);
      Tu_[idx(i, j)] = du(T_, i, j);
    }
  for (int i = 0; i < nv_; ++i)
    for (int j = 0; j < nu_; ++j) Tvu_[idx(i, j)] = du(Tv_, i, j);
  finalized_ = true;
}

void ActionField::cell_of(double v, double u, int& i, int& j, double& s, double& t) const {
  i = static_cast<int>(std::floor((v - v0_) / hv_));
  j = static_cast<int>(std::floor((u - u0_) / hu_));
  i = std::clamp(i, 0, nv_ - 2);
  j = std::clamp(j, 0, nu_ - 2);
  s = (v - node_v(i)) / hv_;
  t = (u - node_u(j)) / hu_;
}

double ActionField::interp(const std::vector<double>& F, const std::vector<double>& Fv,
                           const std::vector<double>& Fu, const std::vector<double>& Fvu, double v,
                           double u, int deriv) const {
  if (!finalized_) throw PreconditionError("ActionField: finalize() not called");
  int i, j;
  double s, t;
  cell_of(v, u, i, j, s, t);
  double hs[4], ht[4];
  (deriv == 1 ? hermite_d : hermite)(s, hs);
  (deriv == 2 ? hermite_d : hermite)(t, ht);
  // Bicubic Hermite coefficient matrix for the cell: rows index the v basis
  // (value at i, value at i+1, slope at i, slope at i+1), columns the u basis.
  double Q[4][4];
  const int a = idx(i, j), b = idx(i + 1, j), c = idx(i, j + 1), d = idx(i + 1, j + 1);
  Q[0][0] = F[a];
  Q[1][0] = F[b];
  Q[0][1] = F[c];
  Q[1][1] = F[d];
  Q[2][0] = Fv[a] * hv_;
  Q[3][0] = Fv[b] * hv_;
  Q[2][1] = Fv[c] * hv_;
  Q[3][1] = Fv[d] * hv_;
  Q[0][2] = Fu[a] * hu_;
  Q[1][2] = Fu[b] * hu_;
  Q[0][3] = Fu[c] * hu_;
  Q[1][3] = Fu[d] * hu_;
  Q[2][2] = Fvu[a] * hv_ * hu_;
  Q[3][2] = Fvu[b] * hv_ * hu_;
  Q[2][3] = Fvu[c] * hv_ * hu_;
  Q[3][3] = Fvu[d] * hv_ * hu_;
  double out = 0;
  for (int r = 0; r < 4; ++r)
    for (int cidx = 0; cidx < 4; ++cidx) out += hs[r] * Q[r][cidx] * ht[cidx];
  if (deriv == 1) out /= hv_;
  if (deriv == 2) out /= hu_;
  return out;
}

double ActionField::value(const SlowPoint& z) const {
  const Vector2d p = z.vec2();
  return interp(J_, dJdv_, dJdu_, Jvu_, p(0), p(1), 0);
}

Vector2d ActionField::gradient(const SlowPoint& z) const {
  const Vector2d p = z.vec2();
  return Vector2d(interp(J_, dJdv_, dJdu_, Jvu_, p(0), p(1), 1),
                  interp(J_, dJdv_, dJdu_, Jvu_, p(0), p(1), 2));
}

double ActionField::period(const SlowPoint& z) const {
  const Vector2d p = z.vec2();
  const double T = interp(T_, Tv_, Tu_, Tvu_, p(0), p(1), 0);
  if (!(T > 0)) throw EvaluationError("ActionField::period: non-positive interpolated period");
  return T;
}

void ActionField::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IOError("ActionField::save_csv: cannot open " + path);
  char buf[512];
  const VectorXd a = dom_.param_a(), b = dom_.param_b();
  out << "# action_field v1\n";
  out << "# label," << label_ << "\n";
  out << "# domain," << (dom_.kind() == Domain::Kind::Box ? "box" : "ball");
  for (long k = 0; k < a.size(); ++k) {
    std::snprintf(buf, sizeof buf, ",%.17g", a(k));
    out << buf;
  }
  for (long k = 0; k < b.size(); ++k) {
    std::snprintf(buf, sizeof buf, ",%.17g", b(k));
    out << buf;
  }
  out << "\n# resolution," << nv_ << "," << nu_ << "\n";
  out << "v,u,J,T,dJdv,dJdu\n";
  for (int i = 0; i < nv_; ++i)
    for (int j = 0; j < nu_; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", node_v(i),
                    node_u(j), J(i, j), T(i, j), dJdv(i, j), dJdu(i, j));
      out << buf;
    }
}

ActionField ActionField::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("ActionField::load_csv: cannot open " + path);
  std::string line;
  auto next = [&] {
    if (!std::getline(in, line)) throw IOError("ActionField::load_csv: truncated file " + path);
    return line;
  };
  if (next() != "# action_field v1") throw IOError("ActionField::load_csv: bad header in " + path);
  next();
  if (line.rfind("# label,", 0) != 0) throw IOError("ActionField::load_csv: missing label");
  const std::string label = line.substr(8);
  next();
  std::vector<std::string> tok;
  {
    std::stringstream ss(line.substr(2));
    std::string t;
    while (std::getline(ss, t, ',')) tok.push_back(t);
  }
  if (tok.size() < 2 || tok[0] != "domain") throw IOError("ActionField::load_csv: missing domain");
  Domain dom = Domain::box2(0, 1, 0, 1);
  if (tok[1] == "box" && tok.size() == 6)
    dom = Domain::box2(std::stod(tok[2]), std::stod(tok[4]), std::stod(tok[3]), std::stod(tok[5]));
  else if (tok[1] == "ball" && tok.size() == 5)
    dom = Domain::ball2(std::stod(tok[2]), std::stod(tok[3]), std::stod(tok[4]));
  else
    throw IOError("ActionField::load_csv: malformed domain line");
  next();
  int nv = 0, nu = 0;
  if (std::sscanf(line.c_str(), "# resolution,%d,%d", &nv, &nu) != 2)
    throw IOError("ActionField::load_csv: malformed resolution line");
  next();  // column header
  ActionField f(label, dom, nv, nu);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nu; ++j) {
      double v, u, Jv, Tv, gv, gu;
      if (std::sscanf(next().c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &v, &u, &Jv, &Tv, &gv, &gu) != 6)
        throw IOError("ActionField::load_csv: malformed row");
      f.J(i, j) = Jv;
      f.T(i, j) = Tv;
      f.dJdv(i, j) = gv;
      f.dJdu(i, j) = gu;
    }
  f.finalize();
  return f;
}

ActionField ActionField::analytic(std::string label, const Domain& domain, int nv, int nu,
                                  const std::function<double(const Vector2d&)>& J,
                                  const std::function<Vector2d(const Vector2d&)>& gradJ,
                                  const std::function<double(const Vector2d&)>& T) {
  ActionField f(std::move(label), domain, nv, nu);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nu; ++j) {
      const Vector2d z(f.node_v(i), f.node_u(j));
      f.J(i, j) = J(z);
      f.T(i, j) = T(z);
      const Vector2d g = gradJ(z);
      f.dJdv(i, j) = g(0);
      f.dJdu(i, j) = g(1);
    }
  f.finalize();
  return f;
}

ActionField build_action_field(const HamiltonianModel& model, const PeriodicOrbit& seed,
                               const Domain& domain, int nv, int nu, const ActionFieldConfig& cfg) {
  if (model.dims.slow_dof != 1)
    throw DimensionError("build_action_field: only d = 1 slow spaces supported");
  ActionField f("J_" + model.name, domain, nv, nu);

  struct NodeSolution {
    bool done = false;
    FastPoint anchor;
    double period = 0;
  };
  std::vector<NodeSolution> sol(nv * nu);
  auto node_index = [nu](int i, int j) { return i * nu + j; };

  // Start from the node nearest the seed orbit.
  const Vector2d zs = seed.z.vec2();
  int i0 = std::clamp(static_cast<int>(std::lround((zs(0) - f.node_v(0)) / (f.node_v(1) - f.node_v(0)))), 0, nv - 1);
  int j0 = std::clamp(static_cast<int>(std::lround((zs(1) - f.node_u(0)) / (f.node_u(1) - f.node_u(0)))), 0, nu - 1);

  std::deque<std::pair<int, int>> frontier;
  auto solve_node = [&](int i, int j, const NodeSolution& warm) {
    const SlowPoint z = SlowPoint::make(f.node_v(i), f.node_u(j));
    OrbitGuess guess{warm.anchor, warm.period};
    PeriodicOrbit orb;
    try {
      orb = find_periodic_orbit(model, z, guess, cfg.orbit);
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "build_action_field: continuation failed at node (" << i << "," << j << "), z = ("
          << f.node_v(i) << "," << f.node_u(j) << "): " << e.what();
      int solved = 0;
      for (const auto& s : sol) solved += s.done;
      msg << " [" << solved << "/" << nv * nu << " nodes solved]";
      throw ContinuationBreakdown(msg.str());
    }
    f.J(i, j) = action(orb);
    f.T(i, j) = orb.period;
    const auto [gv, gu] = action_gradient(model, orb);
    f.dJdv(i, j) = gv(0);
    f.dJdu(i, j) = gu(0);
    sol[node_index(i, j)] = {true, orb.anchor, orb.period};
  };

  solve_node(i0, j0, {false, seed.anchor, seed.period});
  frontier.emplace_back(i0, j0);
  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
  while (!frontier.empty()) {
    auto [i, j] = frontier.front();
    frontier.pop_front();
    for (int k = 0; k < 4; ++k) {
      const int ni = i + di[k], nj = j + dj[k];
      if (ni < 0 || ni >= nv || nj < 0 || nj >= nu) continue;
      if (sol[node_index(ni, nj)].done) continue;
      solve_node(ni, nj, sol[node_index(i, j)]);
      frontier.emplace_back(ni, nj);
    }
  }
  f.finalize();
  return f;
}

}  // namespace slowfast
