#include "slowfast/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "slowfast/flow.hpp"

namespace slowfast {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw IOError("cannot open output file " + path.string());
    out_ << header << "\n";
  }
  void row(const std::vector<double>& vals, const std::vector<std::string>& prefix = {}) {
    bool first = true;
    for (const std::string& p : prefix) {
      out_ << (first ? "" : ",") << p;
      first = false;
    }
    for (double v : vals) {
      out_ << (first ? "" : ",") << fmt17(v);
      first = false;
    }
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

struct Check {
  std::string name;
  bool pass;
  double value;
};

struct PipelineResult {
  std::vector<Check> checks;
  json summary = json::object();
  std::vector<std::pair<std::string, std::string>> files;
};

HamiltonianModel lemma_oscillator() {
  SlowField omega;
  omega.value = [](const SlowPoint& z) { return 1.0 + 0.1 * z.v(0); };
  omega.grad = [](const SlowPoint& z) {
    return std::make_pair(VectorXd::Constant(1, 0.1).eval(), VectorXd::Zero(1).eval());
  };
  return builtin_oscillator(omega, standard_energy_field(1.0));
}

PeriodicOrbit oscillator_orbit(const HamiltonianModel& model, const SlowPoint& z) {
  // Closed-form warm start: p = 0, q = sqrt(2E)/omega, T = 2pi/omega.
  const double E = 1.0 + 0.5 * (z.v(0) * z.v(0) + z.u(0) * z.u(0));
  const double om = 1.0 + 0.1 * z.v(0);
  OrbitGuess guess{FastPoint::make(0.0, std::sqrt(2 * E) / om), 2 * M_PI / om};
  return find_periodic_orbit(model, z, guess);
}

PipelineResult pipeline_lemma_stab(const ExperimentConfig& cfg, const fs::path& out) {
  std::vector<double> eps = cfg.eps.empty() ? std::vector<double>{1e-2, 5e-3} : cfg.eps;
  const json params = json::parse(cfg.params_json);
  require_keys(params, {"z0", "horizon", "grid"}, "lemma_stab params");
  const double horizon = params.value("horizon", 1.0);
  const int grid = params.value("grid", 21);
  Vector2d z0(0.4, 0.0);
  if (params.contains("z0")) z0 = Vector2d(params["z0"][0], params["z0"][1]);

  const HamiltonianModel model = lemma_oscillator();
  const Domain D = Domain::box2(-1, 1, -1, 1);
  const SlowPoint zp = SlowPoint::from_vec2(z0);
  const PeriodicOrbit seed = oscillator_orbit(model, zp);
  const ActionField field = build_action_field(model, seed, D, grid, grid);

  PipelineResult res;
  IntegratorConfig icfg;
  icfg.rel_tol = 1e-11;
  icfg.abs_tol = 1e-12;
  const int K = 2000;
  const auto gamma = slow_flow_samples(field, zp, horizon, K + 1);

  std::vector<double> max_err;
  for (double e : eps) {
    FullState s0;
    s0.w = seed.anchor;
    s0.z = zp;
    const Trajectory traj = integrate_full(model, s0, e, 0.0, horizon / e, icfg);
    CsvFile csv(out / ("lemma_stab_eps" + fmt17(e) + ".csv"), "t,v,u,v_slow,u_slow,error");
    double emax = 0;
    for (int k = 0; k <= K; ++k) {
      const double t = (horizon / e) * k / K;
      const FullState st = traj.eval(t);
      const Vector2d zf(st.z.v(0), st.z.u(0));
      const Vector2d zs = gamma[k].second;
      const double err = (zf - zs).norm();
      emax = std::max(emax, err);
      csv.row({t, zf(0), zf(1), zs(0), zs(1), err});
    }
    res.files.emplace_back("lemma_stab_eps" + fmt17(e) + ".csv", "tracking error trace");
    max_err.push_back(emax);
    res.summary["per_eps"].push_back({{"eps", e}, {"max_error", emax}, {"C2", emax / e}});
    res.checks.push_back({"lemma_stab: error finite at eps=" + fmt17(e), std::isfinite(emax), emax});
  }
  for (size_t i = 0; i + 1 < eps.size(); ++i) {
    const double ratio = max_err[i] / max_err[i + 1];
    res.summary["ratios"].push_back(ratio);
    res.checks.push_back({"lemma_stab: scaling ratio in [1.5,3]", ratio >= 1.5 && ratio <= 3.0, ratio});
  }
  return res;
}

PipelineResult pipeline_action_identity(const ExperimentConfig& cfg, const fs::path& out) {
  const json params = json::parse(cfg.params_json);
  require_keys(params, {"points", "fd_step"}, "action_identity params");
  const int points = params.value("points", 10);
  const double h0 = params.value("fd_step", 1e-5);

  const HamiltonianModel model = lemma_oscillator();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(-0.8, 0.8);

  PipelineResult res;
  CsvFile csv(out / "action_identity.csv", "v,u,J,dJdv,dJdu,fd_dJdv,fd_dJdu,rel_error");
  res.files.emplace_back("action_identity.csv", "gradient identity table");
  double worst = 0;
  for (int i = 0; i < points; ++i) {
    const SlowPoint z = SlowPoint::make(unit(rng), unit(rng));
    const PeriodicOrbit orb = oscillator_orbit(model, z);
    const double J = action(orb);
    const auto [gv, gu] = action_gradient(model, orb);
    auto J_at = [&](double dv, double du) {
      return action(oscillator_orbit(model, SlowPoint::make(z.v(0) + dv, z.u(0) + du)));
    };
    const double fdv = (J_at(h0, 0) - J_at(-h0, 0)) / (2 * h0);
    const double fdu = (J_at(0, h0) - J_at(0, -h0)) / (2 * h0);
    const double scale = std::max({1.0, std::abs(fdv), std::abs(fdu)});
    const double rel = std::max(std::abs(gv(0) - fdv), std::abs(gu(0) - fdu)) / scale;
    worst = std::max(worst, rel);
    csv.row({z.v(0), z.u(0), J, gv(0), gu(0), fdv, fdu, rel});
  }
  res.summary["max_rel_error"] = worst;
  res.checks.push_back({"action gradient identity rel error <= 1e-6", worst <= 1e-6, worst});
  return res;
}

PipelineResult pipeline_floquet(const ExperimentConfig& cfg, const fs::path& out) {
  const json params = json::parse(cfg.params_json);
  require_keys(params, {"lambdas", "omega", "energy"}, "floquet params");
  std::vector<double> lambdas = {0.25, 0.5, 1.0};
  if (params.contains("lambdas")) lambdas = params["lambdas"].get<std::vector<double>>();
  const double omega = params.value("omega", 1.0);
  const double energy = params.value("energy", 1.0);

  PipelineResult res;
  CsvFile csv(out / "floquet.csv", "lambda,T,mu_max,mu_min,expected,rel_error,product");
  res.files.emplace_back("floquet.csv", "Floquet multiplier table");
  double worst = 0;
  for (double lam : lambdas) {
    const HamiltonianModel model = builtin_saddle_oscillator(lam, omega, energy);
    const SlowPoint z = SlowPoint::make(0.0, 0.0);
    const double E = energy;
    VectorXd p0 = VectorXd::Zero(2), q0 = VectorXd::Zero(2);
    q0(1) = std::sqrt(2 * E / omega);
    const PeriodicOrbit orb = find_periodic_orbit(model, z, {{p0, q0}, 2 * M_PI / omega});
    const FloquetData fl = floquet(model, orb);
    const double expected = std::exp(lam * orb.period);
    const double mu_max = std::abs(fl.multipliers(0));
    const double mu_min = std::abs(fl.multipliers(fl.multipliers.size() - 1));
    const double rel = std::max(std::abs(mu_max - expected) / expected,
                                std::abs(mu_min - 1 / expected) * expected);
    double prod = 1;
    for (long i = 0; i < fl.multipliers.size(); ++i) prod *= std::abs(fl.multipliers(i));
    worst = std::max(worst, rel);
    csv.row({lam, orb.period, mu_max, mu_min, expected, rel, prod});
    res.checks.push_back({"floquet hyperbolic at lambda=" + fmt17(lam), fl.hyperbolic, mu_max});
  }
  res.summary["max_rel_error"] = worst;
  res.checks.push_back({"floquet multipliers match exp(+-lambda T) to 1e-6", worst <= 1e-6, worst});
  return res;
}

PipelineResult pipeline_horseshoe_lemmas(const ExperimentConfig& cfg, const fs::path& out) {
  const json params = json::parse(cfg.params_json);
  require_keys(params, {"mix_pairs", "eps", "t0"}, "horseshoe_lemmas params");
  const int mix_pairs = params.value("mix_pairs", 100);
  const double t0 = params.value("t0", 1.0);

  const SyntheticScenario sc = make_synthetic_scenario();
  const CrossFormSystem& sys = sc.sys;
  const CrossFormSystem msys = mollify(sys, sc.mollify_delta);
  PipelineResult res;

  // [H3] contraction.
  const ContractionReport con = check_contraction(sys, 200, cfg.seed);
  res.summary["lambda_hat"] = con.lambda_hat;
  res.checks.push_back({"contraction lambda_hat <= lambda", con.pass, con.lambda_hat});

  // Coding operator fixed point.
  const Vector2d zc(0.5, 0.3);
  const SymbolicOrbit orb = orbit_for_code(sys, Code("a", "abab", "b"), zc);
  res.summary["controp_residual"] = orb.residual;
  res.summary["controp_factor"] = orb.convergence_factor;
  res.checks.push_back({"coding operator residual <= 1e-12", orb.residual <= 1e-12, orb.residual});
  res.checks.push_back({"coding operator contraction factor <= lambda + 1e-3",
                        orb.convergence_factor <= sys.lambda + 1e-3, orb.convergence_factor});
  {
    CsvFile csv(out / "controp.csv", "i,x,y");
    for (long i = orb.i_lo; i <= orb.i_hi; ++i)
      csv.row({static_cast<double>(i), orb.x_at(i)(0), orb.y_at(i)(0)});
    res.files.emplace_back("controp.csv", "coding-operator fixed point");
  }

  // Mix bound on random code pairs sharing a central block.
  std::mt19937_64 rng(cfg.seed);
  auto rnd_word = [&rng](int len) {
    std::string w;
    for (int i = 0; i < len; ++i) w.push_back((rng() & 1) ? 'b' : 'a');
    return w;
  };
  int violations = 0;
  double worst_margin = 0;  // largest measured/bound
  CsvFile mix_csv(out / "mix.csv", "pair,n,i,measured,bound");
  for (int p = 0; p < mix_pairs; ++p) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const std::string shared_neg = rnd_word(n), shared_pos = rnd_word(n + 1);
    const Code c1(rnd_word(3) + shared_neg, shared_pos + rnd_word(3), rnd_word(1));
    const Code c2(rnd_word(3) + shared_neg, shared_pos + rnd_word(3), rnd_word(1));
    Vector2d z;
    do {
      z = Vector2d(0.5 + 5.2 * (static_cast<double>(rng()) / static_cast<double>(rng.max()) - 0.5),
                   5.2 * (static_cast<double>(rng()) / static_cast<double>(rng.max()) - 0.5));
    } while (!sys.D.contains(z));
    for (const MixMargin& m : mix_check(sys, c1, c2, n, z)) {
      if (m.measured > m.bound + 1e-12) ++violations;
      if (m.bound > 0) worst_margin = std::max(worst_margin, m.measured / m.bound);
      mix_csv.row({static_cast<double>(p), static_cast<double>(n), static_cast<double>(m.i),
                   m.measured, m.bound});
    }
  }
  res.files.emplace_back("mix.csv", "mix estimate margins");
  res.summary["mix_violations"] = violations;
  res.summary["mix_worst_ratio"] = worst_margin;
  res.checks.push_back({"mix bound violations == 0", violations == 0,
                        static_cast<double>(violations)});

  // Lemma 1 surfaces.
  std::vector<double> eps_list = {1e-2, 5e-3};
  if (params.contains("eps")) eps_list = params["eps"].get<std::vector<double>>();
  const Code scode("a", "ab", "b");
  SurfaceConfig scfg;
  const SurfaceFamily fam0 = invariant_surfaces(msys, scode, 0.0, scfg);
  std::vector<double> dev_ratio;
  for (double e : eps_list) {
    const SurfaceFamily fam = invariant_surfaces(msys, scode, e, scfg);
    double dev = 0;
    for (size_t gi = 0; gi < fam.grids.size(); ++gi)
      for (size_t k = 0; k < fam.grids[gi].x.size(); ++k) {
        dev = std::max(dev, (fam.grids[gi].x[k] - fam0.grids[gi].x[k]).lpNorm<Eigen::Infinity>());
        dev = std::max(dev, (fam.grids[gi].y[k] - fam0.grids[gi].y[k]).lpNorm<Eigen::Infinity>());
      }
    dev_ratio.push_back(dev / e);
    fam.save_csv((out / ("surfaces_eps" + fmt17(e) + ".csv")).string());
    res.files.emplace_back("surfaces_eps" + fmt17(e) + ".csv", "invariant surface grids");
    res.summary["surfaces"].push_back(
        {{"eps", e}, {"invariance_residual", fam.invariance_residual}, {"dev_over_eps", dev / e}});
    res.checks.push_back({"surface invariance residual <= 1e-8 at eps=" + fmt17(e),
                          fam.invariance_residual <= 1e-8, fam.invariance_residual});
  }
  for (size_t i = 0; i + 1 < dev_ratio.size(); ++i) {
    const double r = dev_ratio[i] / dev_ratio[i + 1];
    res.checks.push_back({"surface eps-deviation ratio in [0.5,2]", r >= 0.5 && r <= 2.0, r});
  }

  // Lemma 5.1 block closeness for homogeneous codes.
  CsvFile l51(out / "lemma51.csv", "eps,K1");
  std::vector<double> k1s;
  for (double e : {1e-2, 5e-3, 2.5e-3}) {
    const long steps = static_cast<long>(std::floor(t0 / e));
    const Vector2d za(0.5, 0.0);
    const DriftTrajectory t1 = homogeneous_run(msys, 'a', za, e, steps);
    const DriftTrajectory t2 = homogeneous_run(msys, 'a', za + Vector2d(e, 0), e, steps);
    const BlockCompareResult bc = block_compare(t1, t2, 0, t0);
    k1s.push_back(bc.K1);
    l51.row({e, bc.K1});
  }
  res.files.emplace_back("lemma51.csv", "block closeness constants");
  const double kmax = *std::max_element(k1s.begin(), k1s.end());
  const double kmin = *std::min_element(k1s.begin(), k1s.end());
  res.summary["K1"] = k1s;
  res.checks.push_back({"K1 uniformly bounded (max/min <= 2)", kmax / kmin <= 2.0, kmax / kmin});
  return res;
}

PipelineResult pipeline_theorem1(const ExperimentConfig& cfg, const fs::path& out) {
  const json params = json::parse(cfg.params_json);
  require_keys(params, {"mollify_delta"}, "theorem1 params");
  const std::vector<double> eps = cfg.eps.empty() ? std::vector<double>{1e-2, 5e-3} : cfg.eps;

  const SyntheticScenario sc = make_synthetic_scenario();
  TheoremConfig tcfg;
  tcfg.codes = sc.codes;
  tcfg.mollify_delta = params.value("mollify_delta", sc.mollify_delta);
  const ShadowReport report = verify_theorem1(sc.sys, sc.gens, sc.path, eps, tcfg);

  PipelineResult res;
  for (const ShadowRecord& rec : report.records) {
    CsvFile csv(out / ("shadow_eps" + fmt17(rec.eps) + ".csv"),
                "step,slow_time,v_drift,u_drift,v_gamma,u_gamma,error");
    for (const ShadowRow& r : rec.rows)
      csv.row({static_cast<double>(r.step), r.slow_time, r.z_drift(0), r.z_drift(1), r.gamma(0),
               r.gamma(1), r.error});
    res.files.emplace_back("shadow_eps" + fmt17(rec.eps) + ".csv", "shadowing trace");
    res.summary["per_eps"].push_back({{"eps", rec.eps},
                                      {"max_error", rec.max_error},
                                      {"endpoint_error", rec.endpoint_error},
                                      {"C0", rec.c0}});
    res.checks.push_back({"theorem1: endpoint error <= C0*eps at eps=" + fmt17(rec.eps),
                          rec.endpoint_error <= rec.c0 * rec.eps + 1e-15, rec.endpoint_error});
  }
  for (double r : report.scaling_ratios) {
    res.summary["ratios"].push_back(r);
    res.checks.push_back({"theorem1: scaling ratio in [1.5,3]", r >= 1.5 && r <= 3.0, r});
  }
  return res;
}

PipelineResult pipeline_orbit_find(const ExperimentConfig& cfg, const fs::path& out) {
  const json params = json::parse(cfg.params_json);
  require_keys(params, {"model", "lambda", "omega", "energy", "z", "guess"}, "orbit_find params");
  const std::string name = params.value("model", "oscillator");
  HamiltonianModel model;
  if (name == "oscillator") {
    model = lemma_oscillator();
  } else if (name == "saddle_oscillator") {
    model = builtin_saddle_oscillator(params.value("lambda", 0.5), params.value("omega", 1.0),
                                      params.value("energy", 1.0));
  } else {
    throw ConfigError("orbit_find: unknown model '" + name + "'");
  }
  SlowPoint z = SlowPoint::make(0.0, 0.0);
  if (params.contains("z")) z = SlowPoint::make(params["z"][0], params["z"][1]);
  OrbitGuess guess;
  const int m = model.dims.fast_dof;
  guess.w0 = FastPoint::zero(m);
  guess.period = 2 * M_PI;
  if (params.contains("guess")) {
    const json& g = params["guess"];
    require_keys(g, {"p", "q", "period"}, "orbit_find guess");
    for (int i = 0; i < m; ++i) {
      guess.w0.p(i) = g["p"][i];
      guess.w0.q(i) = g["q"][i];
    }
    guess.period = g.value("period", 2 * M_PI);
  } else if (name == "oscillator") {
    guess.w0.q(0) = 1.5;
  } else {
    guess.w0.q(1) = std::sqrt(2.0);
  }

  const PeriodicOrbit orb = find_periodic_orbit(model, z, guess);
  const FloquetData fl = floquet(model, orb);
  PipelineResult res;
  CsvFile csv(out / "orbit.csv", "t,p,q");
  const int N = static_cast<int>(orb.samples.size());
  for (int k = 0; k < N; ++k) {
    std::vector<double> vals{orb.period * k / N};
    for (int i = 0; i < m; ++i) vals.push_back(orb.samples[k].p(i));
    for (int i = 0; i < m; ++i) vals.push_back(orb.samples[k].q(i));
    csv.row(vals);
  }
  res.files.emplace_back("orbit.csv", "periodic orbit samples");
  res.summary["period"] = orb.period;
  res.summary["action"] = action(orb);
  res.summary["hyperbolic"] = fl.hyperbolic;
  res.checks.push_back({"orbit residual <= 1e-9", orb.closure_residual <= 1e-9,
                        orb.closure_residual});
  res.checks.push_back({"orbit energy residual <= 1e-9", orb.energy_residual <= 1e-9,
                        orb.energy_residual});
  return res;
}

PipelineResult pipeline_action_map(const ExperimentConfig& cfg, const fs::path& out) {
  const json params = json::parse(cfg.params_json);
  require_keys(params, {"grid", "box"}, "action_map params");
  const int grid = params.value("grid", 21);
  Domain D = Domain::box2(-1, 1, -1, 1);
  if (params.contains("box")) {
    const json& b = params["box"];
    D = Domain::box2(b[0], b[1], b[2], b[3]);
  }
  const HamiltonianModel model = lemma_oscillator();
  const PeriodicOrbit seed = oscillator_orbit(model, SlowPoint::make(0.0, 0.0));
  const ActionField field = build_action_field(model, seed, D, grid, grid);
  field.save_csv((out / "action_map.csv").string());
  PipelineResult res;
  res.files.emplace_back("action_map.csv", "action field grid");
  res.summary["grid"] = grid;
  res.checks.push_back({"action map solved on the full grid", true, static_cast<double>(grid)});
  return res;
}

PipelineResult pipeline_slow_flow(const ExperimentConfig& cfg, const fs::path& out) {
  const json params = json::parse(cfg.params_json);
  require_keys(params, {"generator", "z0", "tau", "samples"}, "slow_flow params");
  const std::string gen = params.value("generator", "a");
  const double tau = params.value("tau", 1.0);
  const int samples = params.value("samples", 201);
  SlowPoint z0 = SlowPoint::make(0.5, 0.0);
  if (params.contains("z0")) z0 = SlowPoint::make(params["z0"][0], params["z0"][1]);

  const SyntheticScenario sc = make_synthetic_scenario();
  const ActionField& field = gen == "b" ? sc.gens.at(1) : sc.gens.at(0);
  const auto pts = slow_flow_samples(field, z0, tau, samples);
  PipelineResult res;
  CsvFile csv(out / "slow_flow.csv", "tau,v,u,J");
  for (const auto& [t, z] : pts)
    csv.row({t, z(0), z(1), field.value(SlowPoint::from_vec2(z))});
  res.files.emplace_back("slow_flow.csv", "slow flow trace");
  const double j0 = field.value(z0);
  const double j1 = field.value(SlowPoint::from_vec2(pts.back().second));
  res.summary["J_drift"] = std::abs(j1 - j0);
  res.checks.push_back({"slow flow conserves J to 1e-8", std::abs(j1 - j0) <= 1e-8,
                        std::abs(j1 - j0)});
  return res;
}

PipelineResult pipeline_path_plan(const ExperimentConfig& cfg, const fs::path& out) {
  const json params = json::parse(cfg.params_json);
  require_keys(params, {"z0", "z1"}, "path_plan params");
  SlowPoint z0 = SlowPoint::make(0.5, 0.0), z1 = SlowPoint::make(0.5, 0.3);
  if (params.contains("z0")) z0 = SlowPoint::make(params["z0"][0], params["z0"][1]);
  if (params.contains("z1")) z1 = SlowPoint::make(params["z1"][0], params["z1"][1]);

  const SyntheticScenario sc = make_synthetic_scenario();
  const AccessiblePath path = plan_level_lines(sc.gens.at(0), sc.gens.at(1), z0, z1, sc.sys.D);
  PipelineResult res;
  CsvFile csv(out / "path.csv", "segment,k,tau,v,u");
  for (int i = 0; i <= path.segments(); ++i)
    csv.row({static_cast<double>(i), static_cast<double>(i < path.segments() ? path.k[i] : -1),
             path.tau[i], path.z[i].v(0), path.z[i].u(0)});
  res.files.emplace_back("path.csv", "planned accessible path");
  const double err = (path.z.back().vec2() - z1.vec2()).norm();
  res.summary["endpoint_error"] = err;
  res.summary["segments"] = path.segments();
  res.checks.push_back({"planned path reaches target within 1e-6", err <= 1e-6, err});
  return res;
}

PipelineResult pipeline_drift_run(const ExperimentConfig& cfg, const fs::path& out) {
  const json params = json::parse(cfg.params_json);
  require_keys(params, {"core", "left_tail", "right_tail", "z0", "steps"}, "drift_run params");
  const double eps = cfg.eps.empty() ? 1e-2 : cfg.eps.front();
  const long steps = params.value("steps", 100L);
  Vector2d z0(0.5, 0.0);
  if (params.contains("z0")) z0 = Vector2d(params["z0"][0], params["z0"][1]);
  const Code code(params.value("left_tail", std::string("a")),
                  params.value("core", std::string("")),
                  params.value("right_tail", std::string("a")));

  const SyntheticScenario sc = make_synthetic_scenario();
  const CrossFormSystem msys = mollify(sc.sys, sc.mollify_delta);
  const DriftTrajectory traj = drift_run(msys, code, z0, eps, steps);
  PipelineResult res;
  CsvFile csv(out / "drift.csv", "step,v,u,x,y");
  for (size_t i = 0; i < traj.z.size(); ++i) {
    std::vector<double> vals{static_cast<double>(i), traj.z[i](0), traj.z[i](1)};
    if (i < traj.x.size()) {
      vals.push_back(traj.x[i](0));
      vals.push_back(traj.y[i](0));
    }
    csv.row(vals);
  }
  res.files.emplace_back("drift.csv", "slow drift iterates");
  res.summary["steps_taken"] = traj.steps();
  res.summary["exited"] = traj.exited;
  res.checks.push_back({"drift run completed", !traj.exited, static_cast<double>(traj.steps())});
  return res;
}

}  // namespace

unsigned long long fnv1a(const std::string& text) {
  unsigned long long h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string ExperimentConfig::canonical() const {
  json j;
  j["schema"] = schema;
  j["pipeline"] = pipeline;
  j["scenario"] = scenario;
  j["eps"] = eps;
  j["seed"] = seed;
  j["out"] = out_dir;
  j["params"] = json::parse(params_json);
  return j.dump();
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  require_keys(j, {"schema", "pipeline", "scenario", "eps", "seed", "out", "params"}, "config");
  ExperimentConfig cfg;
  cfg.schema = j.value("schema", std::string("slowfast-config/1"));
  if (cfg.schema != "slowfast-config/1")
    throw ConfigError("config: unsupported schema '" + cfg.schema + "'");
  if (!j.contains("pipeline")) throw ConfigError("config: missing 'pipeline'");
  cfg.pipeline = j["pipeline"];
  cfg.scenario = j.value("scenario", std::string("synthetic"));
  if (j.contains("eps")) {
    for (const auto& e : j["eps"]) {
      const double v = e.get<double>();
      if (!(v > 0)) throw ConfigError("config: eps values must be positive");
      cfg.eps.push_back(v);
    }
  }
  cfg.seed = j.value("seed", 1ul);
  cfg.out_dir = j.value("out", std::string("out"));
  cfg.params_json = j.value("params", json::object()).dump();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

RunArtifacts run_experiment(const ExperimentConfig& config) {
  const fs::path out(config.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IOError("cannot create output directory " + out.string());

  PipelineResult pres;
  if (config.pipeline == "lemma_stab")
    pres = pipeline_lemma_stab(config, out);
  else if (config.pipeline == "action_identity")
    pres = pipeline_action_identity(config, out);
  else if (config.pipeline == "floquet")
    pres = pipeline_floquet(config, out);
  else if (config.pipeline == "horseshoe_lemmas")
    pres = pipeline_horseshoe_lemmas(config, out);
  else if (config.pipeline == "theorem1")
    pres = pipeline_theorem1(config, out);
  else if (config.pipeline == "orbit_find")
    pres = pipeline_orbit_find(config, out);
  else if (config.pipeline == "action_map")
    pres = pipeline_action_map(config, out);
  else if (config.pipeline == "slow_flow")
    pres = pipeline_slow_flow(config, out);
  else if (config.pipeline == "path_plan")
    pres = pipeline_path_plan(config, out);
  else if (config.pipeline == "drift_run")
    pres = pipeline_drift_run(config, out);
  else
    throw ConfigError("config: unknown pipeline '" + config.pipeline + "'");

  RunArtifacts art;
  art.out_dir = out.string();
  art.files = pres.files;
  art.checks_passed = true;

  json checks = json::array();
  for (const Check& c : pres.checks) {
    checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}});
    art.checks_passed = art.checks_passed && c.pass;
  }
  json summary;
  summary["pipeline"] = config.pipeline;
  summary["checks"] = checks;
  summary["results"] = pres.summary;
  art.summary_json = summary.dump(2);
  {
    std::ofstream sf(out / "summary.json");
    sf << art.summary_json << "\n";
    art.files.emplace_back("summary.json", "pipeline summary");
  }

  json manifest;
  manifest["schema"] = "slowfast-manifest/1";
  manifest["toolkit"] = "slowfast/1.0.0";
  manifest["config_hash"] = fnv1a(config.canonical());
  const auto now = std::chrono::system_clock::now();
  manifest["timestamp"] =
      static_cast<long long>(std::chrono::duration_cast<std::chrono::seconds>(
                                 now.time_since_epoch())
                                 .count());
  manifest["checks_passed"] = art.checks_passed;
  manifest["files"] = json::array();
  for (const auto& [name, role] : art.files) {
    if (!fs::exists(out / name)) continue;
    manifest["files"].push_back({{"name", name}, {"role", role}});
  }
  const fs::path mpath = out / "manifest.json";
  std::ofstream mf(mpath);
  if (!mf) throw IOError("cannot write manifest " + mpath.string());
  mf << manifest.dump(2) << "\n";
  art.manifest_path = mpath.string();
  return art;
}

int emit_summary(const RunArtifacts& artifacts) {
  if (!fs::exists(artifacts.manifest_path))
    throw IOError("emit_summary: manifest does not exist");
  const json summary = json::parse(artifacts.summary_json);
  std::printf("pipeline: %s\n", summary["pipeline"].get<std::string>().c_str());
  for (const auto& c : summary["checks"])
    std::printf("  [%s] %-60s value=%.6g\n", c["pass"].get<bool>() ? "PASS" : "FAIL",
                c["name"].get<std::string>().c_str(), c["value"].get<double>());
  return artifacts.checks_passed ? 0 : 1;
}

}  // namespace slowfast
