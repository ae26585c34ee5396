#include "runner/commands.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <thread>

#include "boussctl/diagnostics.h"
#include "boussctl/errors.h"
#include "boussctl/exact_control.h"
#include "boussctl/linear_flow.h"
#include "boussctl/mode_basis.h"
#include "boussctl/moment_problem.h"
#include "boussctl/nonlinear_flow.h"
#include "boussctl/sobolev.h"
#include "boussctl/stabilization.h"
#include "runner/artifacts.h"

namespace boussctl::runner {

namespace fs = std::filesystem;

namespace {

constexpr double kTiny = 1e-300;

class Session {
 public:
  Session(RunConfig c, fs::path out) : cfg(std::move(c)), dir(std::move(out)) {}

  RunConfig cfg;
  fs::path dir;
  json results = json::object();
  json checks = json::array();
  json phases = json::object();
  std::vector<std::string> artifacts;

  void check(const std::string& name, double measured, const std::string& rel, double bound) {
    bool pass = false;
    if (rel == "<=") pass = measured <= bound;
    else if (rel == "<") pass = measured < bound;
    else if (rel == ">=") pass = measured >= bound;
    else if (rel == ">") pass = measured > bound;
    checks.push_back({{"name", name}, {"measured", measured}, {"relation", rel}, {"tolerance", bound}, {"pass", pass}});
  }

  void check_flag(const std::string& name, bool ok) {
    checks.push_back({{"name", name}, {"measured", ok}, {"relation", "=="}, {"tolerance", true}, {"pass", ok}});
  }

  fs::path file(const std::string& name) {
    artifacts.push_back(name);
    return dir / name;
  }

  template <class F>
  decltype(auto) phase(const std::string& name, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    struct Stamp {
      json& phases;
      std::string name;
      std::chrono::steady_clock::time_point t0;
      ~Stamp() {
        phases[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      }
    } stamp{phases, name, t0};
    return f();
  }
};

double x0_norm(const StateVector& w, Beta beta) {
  return xs_norm(w, SobolevIndex(0.0), NormConvention::equivalent, beta);
}

json fit_json(const DecayFit& f) {
  return {{"gamma_hat", f.gamma_hat}, {"C_hat", f.C_hat}, {"r2", f.r2}, {"window", {f.t0, f.t1}}, {"points", f.points}};
}

json integrator_json(double dt) { return {{"scheme", "ETD2RK"}, {"order", 2}, {"dt", dt}}; }

void write_endpoints(Session& s, const std::string& prefix, const StateVector& w) {
  write_field_csv(s.file(prefix + "_u.csv"), w.u);
  write_field_csv(s.file(prefix + "_v.csv"), w.v);
}

// ---------------------------------------------------------------- spectrum

void cmd_spectrum(Session& s) {
  const RunConfig& c = s.cfg;
  const ModeBasis basis(c.N, c.beta, SobolevIndex(c.s));
  const BasisDiagnostics d = s.phase("basis", [&] { return basis_diagnostics(basis); });

  json omega = json::array();
  {
    auto os_path = s.file("spectrum.csv");
    std::vector<std::array<double, 8>> rows;
    for (int n = 1; n <= c.N; ++n) {
      const cplx det = eigvec_det(n, c.beta);
      const cplx lam = basis.lambda(n);
      rows.push_back({static_cast<double>(n), basis.omega(n), lam.real(), lam.imag(), basis.norm_constant(1, n),
                      basis.norm_constant(2, n), det.real(), det.imag()});
      omega.push_back(basis.omega(n));
    }
    std::ofstream os(os_path);
    os << "n,omega,lambda_re,lambda_im,m1,m2,det_re,det_im\n";
    char buf[32];
    for (const auto& r : rows) {
      os << static_cast<int>(r[0]);
      for (std::size_t i = 1; i < r.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", r[i]);
        os << ',' << buf;
      }
      os << '\n';
    }
  }
  s.results["omega"] = omega;
  s.results["orthonormality_deviation"] = d.orthonormality_deviation;
  s.results["eigen_residual"] = d.eigen_residual;
  s.results["det_monotone"] = d.det_monotone;
  s.results["det_monotone_from"] = d.det_monotone_from;
  s.results["det_gap_last"] = d.det_gap_last;
  s.check("orthonormality", d.orthonormality_deviation, "<=", c.tol.orthonormality);
  s.check("eigen_residual", d.eigen_residual, "<=", c.tol.eigen_residual);
  s.check_flag("det_monotone", d.det_monotone);
}

// ---------------------------------------------------------------- simulate

void cmd_simulate(Session& s) {
  const RunConfig& c = s.cfg;
  const StateVector w0 = make_state(c.initial, c, 0);
  EvolveOptions eo;
  eo.T = c.T;
  eo.dt = c.dt;
  eo.beta = c.beta;
  eo.nonlinear = c.nonlinear;
  eo.record_every = c.simulate.record_every;
  const Trajectory traj = s.phase("evolve", [&] { return evolve(w0, eo); });

  const ConservationReport cons = conservation_check(traj.times, traj.states);
  s.results["integrator"] = integrator_json(c.dt);
  s.results["mean_v_drift"] = cons.mean_v_drift;
  s.results["mean_u_drift"] = cons.mean_u_drift;
  s.check("mean_v_conservation", cons.mean_v_drift, "<=", c.tol.conservation);
  s.check("mean_u_affine", cons.mean_u_drift, "<=", c.tol.affine_mean);

  const EnergySeries es = energy_series(traj, c.s);
  const double e0 = es.E.front();
  double drift = 0.0;
  for (double e : es.E) drift = std::max(drift, std::abs(e - e0));
  drift /= std::max(e0, kTiny);
  s.results["energy_initial"] = e0;
  s.results["energy_final"] = es.E.back();
  s.results["energy_relative_drift"] = drift;
  s.results["xs_norm_initial"] = es.xs_norm.front();
  s.results["xs_norm_final"] = es.xs_norm.back();

  if (!c.nonlinear) {
    // Without forcing the integrator propagates each mode exactly.
    double dev = 0.0;
    const double scale = std::max(x0_norm(w0, c.beta), kTiny);
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      dev = std::max(dev, x0_norm(traj.states[i] - W_group(w0, traj.times[i], c.beta), c.beta) / scale);
    }
    s.results["max_deviation_from_group"] = dev;
    s.check("linear_exactness", dev, "<=", c.tol.conservation);
    s.check("energy_conservation", drift, "<=", c.tol.energy_drift);
  }

  write_endpoints(s, "initial", w0);
  write_endpoints(s, "final", traj.final_state());
  write_energy_csv(s.file("energy.csv"), es.times, es.E, es.xs_norm);
  if (c.simulate.write_trajectory) write_trajectory_csv(s.file("trajectory.csv"), traj);
}

// ---------------------------------------------------------------- control

ControlConfig control_config(const RunConfig& c) {
  ControlConfig cc;
  cc.max_mode = c.N;
  cc.beta = c.beta;
  cc.s = c.s;
  cc.T = c.T;
  cc.g = make_g(c);
  cc.max_condition = c.control.max_condition;
  cc.delta_floor = c.control.delta_floor;
  cc.verify = true;
  // The verification error is reported as a check rather than thrown.
  cc.tol = std::numeric_limits<double>::infinity();
  cc.verify_dt = c.dt;
  cc.time_samples = c.control.time_samples;
  return cc;
}

json diag_json(const ControlDiagnostics& d) {
  return {{"condition", d.condition},
          {"duality_residual", d.duality_residual},
          {"moment_residual", d.moment_residual},
          {"min_normalized_delta", d.min_normalized_delta},
          {"terminal_error", d.terminal_error},
          {"terminal_error_abs", d.terminal_error_abs},
          {"mean_u_drift", d.mean_u_drift},
          {"mean_v_drift", d.mean_v_drift}};
}

void cmd_control(Session& s) {
  const RunConfig& c = s.cfg;
  const StateVector u0 = make_state(c.initial, c, 0);
  const StateVector uT = make_state(c.terminal, c, 1);
  const Controller ctl = s.phase("setup", [&] { return Controller(control_config(c)); });
  const SobolevIndex xs(c.s);
  const double n0 = xs_norm(u0, xs, NormConvention::equivalent, c.beta);
  const double nT = xs_norm(uT, xs, NormConvention::equivalent, c.beta);

  ControlSignal h;
  if (c.control.mode == "linear") {
    ControlDiagnostics d;
    h = s.phase("synthesize", [&] { return ctl.synthesize(u0, uT, d); });
    s.results["diagnostics"] = diag_json(d);
    s.check("terminal_error", d.terminal_error, "<=", c.tol.terminal);
    s.check("duality_residual", d.duality_residual, "<=", c.tol.duality);
    s.check("moment_residual", d.moment_residual, "<=", c.tol.moment);

    // Endpoints already joined by the free flow need no control.
    const double scale = std::max({n0, nT, 1.0});
    const double gap = xs_norm(uT - W_group(u0, c.T, c.beta), xs, NormConvention::equivalent, c.beta);
    const bool free_flight = gap <= 1e-14 * scale;
    s.results["free_flight"] = free_flight;
    if (free_flight) s.check("free_flight_control_norm", h.norm / scale, "<=", c.tol.free_flight);
  } else {
    NonlinearControlOptions opt;
    opt.tol = c.tol.fixed_point;
    opt.max_iter = c.control.max_iter;
    opt.dt = c.control.nonlinear_dt;
    if (c.control.delta) opt.delta = *c.control.delta;
    const NonlinearControlResult r = s.phase("fixed_point", [&] { return nonlinear_exact_control(u0, uT, ctl, opt); });
    h = r.control;
    s.results["diagnostics"] = diag_json(r.linear_diagnostics);
    s.results["iterations"] = r.iterations;
    s.results["differences"] = r.differences;
    s.results["ratios"] = r.ratios;
    s.results["terminal_error"] = r.terminal_error;
    s.results["terminal_error_refined"] = r.terminal_error_refined;
    s.check("nonlinear_terminal_error", r.terminal_error, "<=", c.tol.nonlinear_terminal);
    if (r.terminal_error_refined >= 0.0) {
      s.check("nonlinear_terminal_error_half_step", r.terminal_error_refined, "<=", c.tol.nonlinear_terminal);
    }
    if (!r.ratios.empty()) {
      s.check("max_contraction_ratio", *std::max_element(r.ratios.begin(), r.ratios.end()), "<", 1.0);
    }
    write_endpoints(s, "achieved", r.trajectory.final_state());
  }
  s.results["integrator"] = integrator_json(c.control.mode == "linear" ? c.dt : c.control.nonlinear_dt);
  s.results["control_norm"] = h.norm;
  s.results["bound_ratio"] = h.bound_ratio;
  s.results["max_imag"] = h.max_imag;
  s.results["endpoint_norms"] = {n0, nT};
  write_endpoints(s, "initial", u0);
  write_endpoints(s, "terminal", uT);
  write_control_csv(s.file("control.csv"), h);
  write_control_coefficients_csv(s.file("control_coefficients.csv"), h.coeffs);
}

// ---------------------------------------------------------------- stabilize

struct LongRun {
  EnergySeries series;
  StateVector final_state;
  DissipationCheck dissipation;
  double t_end = 0.0;
  int chunks = 0;
  bool target_reached = false;
};

LongRun closed_loop_run(const RunConfig& c, const StateVector& w0, const GProfile& g) {
  ClosedLoopOptions o;
  o.K = c.K;
  o.g = g;
  o.T = c.T;
  o.dt = c.dt;
  o.beta = c.beta;
  o.nonlinear = c.nonlinear;
  o.s = c.s;
  o.record_every = 1;  // dense samples for the dissipation integral

  LongRun r;
  r.final_state = w0;
  double e0 = -1.0;
  const int every = c.stabilize.record_every;
  while (true) {
    const ClosedLoopRun run = evolve_closed_loop(r.final_state, o);
    const EnergySeries& es = run.energy;
    if (e0 < 0.0) e0 = es.E.front();
    if (!c.nonlinear) {
      const DissipationCheck d = dissipation_residual(run.trajectory, c.K, g);
      r.dissipation.lhs += d.lhs;
      r.dissipation.rhs += d.rhs;
    }
    const std::size_t last = es.times.size() - 1;
    for (std::size_t i = r.chunks == 0 ? 0 : 1; i <= last; ++i) {
      if (i % static_cast<std::size_t>(every) != 0 && i != last) continue;
      r.series.times.push_back(r.t_end + es.times[i]);
      r.series.E.push_back(es.E[i]);
      r.series.xs_norm.push_back(es.xs_norm[i]);
    }
    r.t_end += c.T;
    r.final_state = run.trajectory.final_state();
    ++r.chunks;
    r.target_reached = es.E.back() <= e0 / c.stabilize.target_drop;
    if (c.K == 0.0 || e0 == 0.0 || r.target_reached || r.t_end + c.T > c.stabilize.max_T * (1.0 + 1e-12)) break;
  }
  r.dissipation.residual = std::abs(r.dissipation.lhs - r.dissipation.rhs) / std::max(e0, kTiny);
  return r;
}

void cmd_stabilize(Session& s) {
  const RunConfig& c = s.cfg;
  const StateVector w0 = make_state(c.initial, c, 0);
  const GProfile g = make_g(c);
  const LongRun r = s.phase("evolve", [&] { return closed_loop_run(c, w0, g); });
  const EnergySeries& es = r.series;
  const double e0 = es.E.front();

  s.results["integrator"] = integrator_json(c.dt);
  s.results["t_end"] = r.t_end;
  s.results["chunks"] = r.chunks;
  s.results["target_reached"] = r.target_reached;
  s.results["energy_initial"] = e0;
  s.results["energy_final"] = es.E.back();
  s.results["xs_norm_initial"] = es.xs_norm.front();
  s.results["xs_norm_final"] = es.xs_norm.back();
  s.results["mean_u"] = {mean_value(w0.u), mean_value(r.final_state.u)};
  write_energy_csv(s.file("energy.csv"), es.times, es.E, es.xs_norm);
  write_endpoints(s, "initial", w0);
  write_endpoints(s, "final", r.final_state);

  if (e0 == 0.0 && es.xs_norm.front() == 0.0) {
    // Constant data: an equilibrium of the closed loop.
    const double dev = *std::max_element(es.xs_norm.begin(), es.xs_norm.end());
    s.results["equilibrium"] = true;
    s.check("equilibrium_stationary", dev, "<=", c.tol.conservation);
    return;
  }
  s.results["equilibrium"] = false;

  std::optional<double> t0, t1;
  if (c.stabilize.fit_window) {
    t0 = c.stabilize.fit_window->first;
    t1 = std::min(c.stabilize.fit_window->second, r.t_end);
  }
  const DecayFit fit_norm = decay_fit(es.times, es.xs_norm, t0, t1);
  const DecayFit fit_energy = decay_fit(es.times, es.E, t0, t1);
  s.results["decay_fit_xs_norm"] = fit_json(fit_norm);
  s.results["decay_fit_energy"] = fit_json(fit_energy);
  write_json(s.file("decay_fit.json"), {{"xs_norm", fit_json(fit_norm)}, {"energy", fit_json(fit_energy)}});

  // Per-period energy ratios while the energy is well above rounding.
  const double p = c.stabilize.period;
  const double r1 = sample_at(es.times, es.E, p) / e0;
  double max_ratio = 0.0;
  double prev = e0;
  for (int k = 1; k * p <= r.t_end * (1.0 + 1e-12); ++k) {
    const double e = sample_at(es.times, es.E, k * p);
    if (prev < 1e-12 * e0) break;
    max_ratio = std::max(max_ratio, e / prev);
    prev = e;
  }
  s.results["one_period_ratio"] = r1;
  s.results["max_period_ratio"] = max_ratio;

  double max_increase = 0.0;
  for (std::size_t i = 1; i < es.E.size(); ++i) max_increase = std::max(max_increase, (es.E[i] - es.E[i - 1]) / e0);
  s.results["max_energy_increase"] = max_increase;

  if (c.K == 0.0) {
    double drift = 0.0;
    for (double e : es.E) drift = std::max(drift, std::abs(e - e0) / e0);
    s.results["energy_relative_drift"] = drift;
    if (!c.nonlinear) s.check("energy_conservation", drift, "<=", c.tol.energy_drift);
    s.check("decay_rate_zero", std::abs(fit_norm.gamma_hat), "<=", c.tol.energy_drift);
    return;
  }

  if (!c.nonlinear) {
    s.results["dissipation"] = {{"lhs", r.dissipation.lhs}, {"rhs", r.dissipation.rhs},
                                {"residual", r.dissipation.residual}};
    s.check("dissipation_identity", r.dissipation.residual, "<=", c.tol.dissipation);
    s.check("energy_monotone", max_increase, "<=", c.tol.energy_drift);
    s.check("one_period_ratio", r1, "<", 1.0);
    s.check("max_period_ratio", max_ratio, "<", 1.0);

    if (c.g_profile == "uniform") {
      // Every mode is a damped oscillator u'' + a u' + omega^2 u = 0 with a = K / 2pi.
      const double a = c.K / kTwoPi;
      const double w1 = omega(1, c.beta);
      const double rate = a / 2.0;
      s.results["closed_form_rate"] = rate;
      if (a < 2.0 * w1) {
        s.check("uniform_rate_relative_error", std::abs(fit_norm.gamma_hat - rate) / rate, "<=", c.tol.rate);
      } else {
        s.results["closed_form_note"] = "overdamped low mode, no single closed-form rate";
      }
    }
  }
  s.check("decay_rate_positive", fit_norm.gamma_hat, ">", 0.0);
  s.check("decay_fit_r2", fit_norm.r2, ">=", c.tol.r2_min);
}

// ---------------------------------------------------------------- verify

void cmd_verify(Session& s) {
  const RunConfig& c = s.cfg;
  const ModeBasis basis(c.N, c.beta, SobolevIndex(c.s));
  const BasisDiagnostics bd = s.phase("basis", [&] { return basis_diagnostics(basis); });
  s.results["basis"] = {{"orthonormality_deviation", bd.orthonormality_deviation},
                        {"eigen_residual", bd.eigen_residual},
                        {"det_monotone", bd.det_monotone},
                        {"det_monotone_from", bd.det_monotone_from}};
  s.check("orthonormality", bd.orthonormality_deviation, "<=", c.tol.orthonormality);
  s.check("eigen_residual", bd.eigen_residual, "<=", c.tol.eigen_residual);
  s.check_flag("det_monotone", bd.det_monotone);

  const GroupDiagnostics gd =
      s.phase("group", [&] { return group_diagnostics(c.N, c.beta, c.s, c.verify.group_trials, c.seed); });
  s.results["group"] = {{"trials", gd.trials}, {"group_law", gd.group_law}, {"inverse", gd.inverse},
                        {"conservation", gd.conservation}};
  s.check("group_law", gd.group_law, "<=", c.tol.group);
  s.check("group_inverse", gd.inverse, "<=", c.tol.group);
  s.check("group_norm_conservation", gd.conservation, "<=", c.tol.group);

  const GProfile g = make_g(c);
  const GOperatorDiagnostics god =
      s.phase("g_operator", [&] { return g_operator_diagnostics(g, c.verify.g_trials, c.seed + 1); });
  s.results["g_operator"] = {{"trials", god.trials}, {"total_mass", g.total_mass()}, {"max_mean", god.max_mean},
                             {"max_asymmetry", god.max_asymmetry}, {"max_imag", god.max_imag}};
  s.check("g_mean_zero", god.max_mean, "<=", c.tol.g_operator);
  s.check("g_symmetric", god.max_asymmetry, "<=", c.tol.g_operator);

  std::vector<cplx> freqs = basis.frequencies();
  if (c.verify.force_duplicate_frequencies && freqs.size() >= 2) freqs[1] = freqs[0];
  const DualBasisRep dual = s.phase("duality", [&] { return dual_basis(c.T, freqs, c.control.max_condition); });
  s.results["duality"] = {{"condition", dual.condition}, {"residual", dual.duality_residual}};
  s.check("duality_residual", dual.duality_residual, "<=", c.tol.duality);

  const StateVector w0 = make_state(c.initial, c, 0);
  ClosedLoopOptions o;
  o.K = c.K;
  o.g = g;
  o.T = c.T;
  o.dt = c.dt;
  o.beta = c.beta;
  const ClosedLoopRun run = s.phase("dissipation", [&] { return evolve_closed_loop(w0, o); });
  const DissipationCheck d = dissipation_residual(run.trajectory, c.K, g);
  s.results["dissipation"] = {{"lhs", d.lhs}, {"rhs", d.rhs}, {"residual", d.residual}};
  s.check("dissipation_identity", d.residual, "<=", c.tol.dissipation);

  const WkIdentity wk = s.phase("wk", [&] { return wk_identity_residual(w0, c.K, g, c.verify.wk_t, c.beta, c.dt); });
  s.results["wk_identity"] = {{"t", c.verify.wk_t}, {"residual", wk.residual}, {"absolute", wk.absolute}};
  s.check("wk_identity", wk.residual, "<=", c.tol.wk);
}

// ---------------------------------------------------------------- sweep

RunOutcome cmd_sweep(Session& s, const json& base) {
  const RunConfig& c = s.cfg;
  const std::size_t n = c.sweep.values.size();
  std::vector<json> configs;
  for (std::size_t i = 0; i < n; ++i) {
    json sub = base;
    try {
      apply_override(sub, c.sweep.parameter + "=" + c.sweep.values[i].dump());
    } catch (const UsageError& e) {
      throw ConstraintViolation(std::string("sweep.parameter: ") + e.what());
    }
    configs.push_back(std::move(sub));
  }

  std::vector<RunOutcome> outcomes(n);
  unsigned jobs = c.sweep.jobs > 0 ? static_cast<unsigned>(c.sweep.jobs) : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(n));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      outcomes[i] = run(c.sweep.command, configs[i], s.dir / ("job_" + std::to_string(i)));
    }
  };
  s.phase("jobs", [&] {
    std::vector<std::future<void>> futs;
    for (unsigned j = 0; j < jobs; ++j) futs.push_back(std::async(std::launch::async, worker));
    for (auto& f : futs) f.get();
    return 0;
  });

  json runs = json::array();
  int worst = kOk;
  for (std::size_t i = 0; i < n; ++i) {
    const json& rep = outcomes[i].report;
    worst = std::max(worst, outcomes[i].exit_code);
    runs.push_back({{"index", i},
                    {"value", c.sweep.values[i]},
                    {"dir", "job_" + std::to_string(i)},
                    {"exit_code", outcomes[i].exit_code},
                    {"status", rep.value("status", "")},
                    {"failures", rep.value("failures", json::array())},
                    {"results", rep.value("results", json::object())}});
  }
  s.results["command"] = c.sweep.command;
  s.results["parameter"] = c.sweep.parameter;
  s.results["runs"] = runs;
  RunOutcome o;
  o.exit_code = worst;
  return o;
}

json error_json(const std::string& type, const std::string& message, std::optional<double> time = std::nullopt) {
  json e{{"type", type}, {"message", message}};
  if (time) e["time"] = *time;
  return e;
}

}  // namespace

bool is_command(const std::string& name) {
  return name == "spectrum" || name == "simulate" || name == "control" || name == "stabilize" || name == "verify" ||
         name == "sweep";
}

RunOutcome run(const std::string& command, const json& config, const fs::path& out) {
  const auto wall0 = std::chrono::steady_clock::now();
  fs::create_directories(out);
  const std::string hash = sha256_hex(config.dump());
  json report{{"schema_version", kSchemaVersion}, {"command", command}, {"config_hash", hash}, {"config", config}};

  Session s(RunConfig{}, out);
  int code = kOk;
  int sweep_code = kOk;
  json error;
  try {
    if (!is_command(command)) throw ConstraintViolation("unknown command " + command);
    s.cfg = parse_config(config);
    if (command == "spectrum") cmd_spectrum(s);
    else if (command == "simulate") cmd_simulate(s);
    else if (command == "control") cmd_control(s);
    else if (command == "stabilize") cmd_stabilize(s);
    else if (command == "verify") cmd_verify(s);
    else sweep_code = cmd_sweep(s, config).exit_code;
  } catch (const BlowUp& e) {
    code = kNumerical;
    error = error_json("BlowUp", e.what(), e.time());
  } catch (const VerificationFailure& e) {
    code = kInvariant;
    error = error_json("VerificationFailure", e.what());
    error["achieved"] = e.achieved();
  } catch (const SingularSystem& e) {
    code = kNumerical;
    error = error_json("SingularSystem", e.what());
  } catch (const NonConvergence& e) {
    code = kNumerical;
    error = error_json("NonConvergence", e.what());
  } catch (const NumericalFailure& e) {
    code = kNumerical;
    error = error_json("NumericalFailure", e.what());
  } catch (const DimensionError& e) {
    code = kConstraint;
    error = error_json("DimensionError", e.what());
  } catch (const ConstraintViolation& e) {
    code = kConstraint;
    error = error_json("ConstraintViolation", e.what());
  } catch (const std::exception& e) {
    code = kNumerical;
    error = error_json("InternalError", e.what());
  }

  json failures = json::array();
  for (const json& chk : s.checks) {
    if (!chk.at("pass").get<bool>()) failures.push_back(chk.at("name"));
  }
  if (code == kOk && !failures.empty()) code = kInvariant;
  if (code == kOk) code = sweep_code;

  report["status"] = code == kOk ? "ok" : (error.is_null() ? "checks_failed" : "error");
  report["exit_code"] = code;
  report["checks"] = s.checks;
  report["failures"] = failures;
  report["results"] = s.results;
  report["error"] = error;

  json manifest{{"schema_version", kSchemaVersion},
                {"command", command},
                {"config_hash", hash},
                {"config", config},
                {"artifacts", s.artifacts}};
  write_json(out / "report.json", report);
  write_json(out / "manifest.json", manifest);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  write_json(out / "timing.json", {{"command", command}, {"wall_seconds", wall}, {"phases", s.phases}});
  return {code, report};
}

}  // namespace boussctl::runner
