#include "runner/config.h"

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "boussctl/errors.h"
#include "boussctl/mode_basis.h"
#include "boussctl/random_fields.h"

namespace boussctl::runner {

namespace {

json data_defaults(const std::string& preset) {
  return {{"preset", preset}, {"amplitude", 1.0}, {"mode", 1},   {"mean", 0.0},
          {"decay", 0.5},     {"u", nullptr},     {"v", nullptr}};
}

[[noreturn]] void bad(const std::string& field, const std::string& why) {
  throw ConstraintViolation("config: " + field + " " + why);
}

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) bad(field, why);
}

bool divides(double T, double dt) {
  const double q = T / dt;
  return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
}

// [[k, re, im], ...] onto a field; a missing -k entry mirrors +k so the field stays real.
FourierField parse_coefficients(const json& list, int n, const std::string& field) {
  require(list.is_array(), field, "must be a list of [k, re, im] triples");
  std::map<int, cplx> given;
  for (const json& e : list) {
    require(e.is_array() && (e.size() == 2 || e.size() == 3), field, "entries must be [k, re] or [k, re, im]");
    const int k = e.at(0).get<int>();
    require(std::abs(k) <= n, field, "mode index exceeds N");
    given[k] = cplx(e.at(1).get<double>(), e.size() == 3 ? e.at(2).get<double>() : 0.0);
  }
  FourierField f(n);
  for (const auto& [k, z] : given) {
    f[k] = z;
    if (k != 0 && !given.count(-k)) f[-k] = std::conj(z);
  }
  return f;
}

DataSpec parse_data(const json& j, const std::string& field, int n) {
  static const std::set<std::string> presets{"zero", "constant", "cosine", "eigenmode", "random", "coefficients"};
  DataSpec d;
  d.preset = j.at("preset").get<std::string>();
  require(presets.count(d.preset) > 0, field + ".preset",
          "must be one of zero, constant, cosine, eigenmode, random, coefficients");
  d.amplitude = j.at("amplitude").get<double>();
  d.mode = j.at("mode").get<int>();
  d.mean = j.at("mean").get<double>();
  d.decay = j.at("decay").get<double>();
  d.u = j.at("u");
  d.v = j.at("v");
  require(std::isfinite(d.amplitude) && d.amplitude >= 0.0, field + ".amplitude", "must be finite and >= 0");
  require(std::isfinite(d.mean), field + ".mean", "must be finite");
  require(d.decay > 0.0 && d.decay <= 1.0, field + ".decay", "must lie in (0, 1]");
  if (d.preset == "cosine" || d.preset == "eigenmode") {
    require(d.mode >= 1 && d.mode <= n, field + ".mode", "must lie in 1..N");
  }
  if (d.preset == "coefficients") {
    require(!d.u.is_null() || !d.v.is_null(), field, "coefficients preset needs u and/or v");
  }
  return d;
}

}  // namespace

json default_config() {
  return {
      {"beta", 1},
      {"N", 16},
      {"s", 0.0},
      {"T", 1.0},
      {"dt", 1e-3},
      {"K", 1.0},
      {"nonlinear", false},
      {"seed", 42},
      {"g", {{"profile", "raised_cosine"}, {"coefficients", nullptr}, {"validation", "strict"}}},
      {"initial", data_defaults("cosine")},
      {"terminal", data_defaults("zero")},
      {"tolerances",
       {{"orthonormality", 1e-12},
        {"eigen_residual", 1e-10},
        {"group", 1e-12},
        {"g_operator", 1e-12},
        {"conservation", 1e-10},
        {"affine_mean", 1e-8},
        {"terminal", 1e-6},
        {"nonlinear_terminal", 1e-5},
        {"duality", 1e-8},
        {"moment", 1e-8},
        {"free_flight", 1e-10},
        {"fixed_point", 1e-8},
        {"dissipation", 1e-6},
        {"wk", 1e-6},
        {"rate", 0.05},
        {"r2_min", 0.99},
        {"energy_drift", 1e-10}}},
      {"control",
       {{"mode", "linear"},
        {"max_iter", 20},
        {"nonlinear_dt", 1e-4},
        {"max_condition", 1e10},
        {"delta_floor", 1e-12},
        {"time_samples", 101},
        {"delta", nullptr}}},
      {"simulate", {{"record_every", 10}, {"write_trajectory", true}}},
      {"stabilize",
       {{"fit_window", nullptr}, {"target_drop", 1e4}, {"max_T", 200.0}, {"period", 1.0}, {"record_every", 10}}},
      {"verify", {{"g_trials", 1000}, {"group_trials", 50}, {"force_duplicate_frequencies", false}, {"wk_t", 1.0}}},
      {"sweep", {{"command", "stabilize"}, {"parameter", "K"}, {"values", {0.5, 1.0, 2.0, 4.0}}, {"jobs", 0}}},
  };
}

namespace {

void merge_into(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConstraintViolation("config: " + (path.empty() ? "root" : path) + " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConstraintViolation("config: unknown key " + key);
    json& slot = base[it.key()];
    if (slot.is_object()) {
      merge_into(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

}  // namespace

json merge_config(json base, const json& patch) {
  merge_into(base, patch, "");
  return base;
}

void apply_override(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("--override expects KEY=VALUE, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }
  json patch = value;
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string p; std::getline(ss, p, '.');) {
    if (p.empty()) throw UsageError("--override: empty path segment in '" + key + "'");
    parts.push_back(p);
  }
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
  try {
    cfg = merge_config(cfg, patch);
  } catch (const ConstraintViolation& e) {
    throw UsageError(std::string("--override: ") + e.what());
  }
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  try {
    const int b = j.at("beta").get<int>();
    require(b == 1 || b == -1, "beta", "must be 1 or -1");
    c.beta = beta_from_int(b);
    c.N = j.at("N").get<int>();
    require(c.N >= 1 && c.N <= 1024, "N", "must lie in 1..1024");
    c.s = j.at("s").get<double>();
    require(c.s >= 0.0 && c.s <= 12.0, "s", "must lie in [0, 12]");
    c.T = j.at("T").get<double>();
    require(c.T > 0.0 && c.T <= 1e5, "T", "must lie in (0, 1e5]");
    c.dt = j.at("dt").get<double>();
    require(c.dt > 0.0 && c.dt <= c.T, "dt", "must lie in (0, T]");
    require(divides(c.T, c.dt), "dt", "must divide T");
    c.K = j.at("K").get<double>();
    require(c.K >= 0.0 && c.K <= 1e4, "K", "must lie in [0, 1e4]");
    c.nonlinear = j.at("nonlinear").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();

    const json& g = j.at("g");
    c.g_profile = g.at("profile").get<std::string>();
    require(c.g_profile == "uniform" || c.g_profile == "raised_cosine" || c.g_profile == "custom", "g.profile",
            "must be uniform, raised_cosine or custom");
    c.g_coefficients = g.at("coefficients");
    require(c.g_profile != "custom" || c.g_coefficients.is_array(), "g.coefficients",
            "required for the custom profile");
    const std::string val = g.at("validation").get<std::string>();
    require(val == "strict" || val == "relaxed", "g.validation", "must be strict or relaxed");
    c.g_strict = val == "strict";

    c.initial = parse_data(j.at("initial"), "initial", c.N);
    c.terminal = parse_data(j.at("terminal"), "terminal", c.N);

    const json& t = j.at("tolerances");
    Tolerances& tol = c.tol;
    for (auto [name, slot] : std::initializer_list<std::pair<const char*, double*>>{
             {"orthonormality", &tol.orthonormality},
             {"eigen_residual", &tol.eigen_residual},
             {"group", &tol.group},
             {"g_operator", &tol.g_operator},
             {"conservation", &tol.conservation},
             {"affine_mean", &tol.affine_mean},
             {"terminal", &tol.terminal},
             {"nonlinear_terminal", &tol.nonlinear_terminal},
             {"duality", &tol.duality},
             {"moment", &tol.moment},
             {"free_flight", &tol.free_flight},
             {"fixed_point", &tol.fixed_point},
             {"dissipation", &tol.dissipation},
             {"wk", &tol.wk},
             {"rate", &tol.rate},
             {"r2_min", &tol.r2_min},
             {"energy_drift", &tol.energy_drift}}) {
      *slot = t.at(name).get<double>();
      require(*slot > 0.0 && std::isfinite(*slot), std::string("tolerances.") + name, "must be positive");
    }
    require(tol.r2_min <= 1.0, "tolerances.r2_min", "must not exceed 1");

    const json& ctl = j.at("control");
    c.control.mode = ctl.at("mode").get<std::string>();
    require(c.control.mode == "linear" || c.control.mode == "nonlinear", "control.mode", "must be linear or nonlinear");
    c.control.max_iter = ctl.at("max_iter").get<int>();
    require(c.control.max_iter >= 1, "control.max_iter", "must be >= 1");
    c.control.nonlinear_dt = ctl.at("nonlinear_dt").get<double>();
    require(c.control.nonlinear_dt > 0.0 && divides(c.T, c.control.nonlinear_dt), "control.nonlinear_dt",
            "must be positive and divide T");
    c.control.max_condition = ctl.at("max_condition").get<double>();
    require(c.control.max_condition > 1.0, "control.max_condition", "must exceed 1");
    c.control.delta_floor = ctl.at("delta_floor").get<double>();
    require(c.control.delta_floor > 0.0 && c.control.delta_floor < 1.0, "control.delta_floor", "must lie in (0, 1)");
    c.control.time_samples = ctl.at("time_samples").get<int>();
    require(c.control.time_samples >= 2, "control.time_samples", "must be >= 2");
    if (!ctl.at("delta").is_null()) {
      c.control.delta = ctl.at("delta").get<double>();
      require(*c.control.delta > 0.0, "control.delta", "must be positive");
    }

    const json& sim = j.at("simulate");
    c.simulate.record_every = sim.at("record_every").get<int>();
    require(c.simulate.record_every >= 1, "simulate.record_every", "must be >= 1");
    c.simulate.write_trajectory = sim.at("write_trajectory").get<bool>();

    const json& st = j.at("stabilize");
    if (!st.at("fit_window").is_null()) {
      const auto w = st.at("fit_window").get<std::vector<double>>();
      require(w.size() == 2 && w[0] >= 0.0 && w[0] < w[1], "stabilize.fit_window", "must be [t0, t1] with t0 < t1");
      c.stabilize.fit_window = std::make_pair(w[0], w[1]);
    }
    c.stabilize.target_drop = st.at("target_drop").get<double>();
    require(c.stabilize.target_drop > 1.0, "stabilize.target_drop", "must exceed 1");
    c.stabilize.max_T = st.at("max_T").get<double>();
    require(c.stabilize.max_T >= c.T, "stabilize.max_T", "must be >= T");
    c.stabilize.period = st.at("period").get<double>();
    require(c.stabilize.period > 0.0 && c.stabilize.period <= c.T, "stabilize.period", "must lie in (0, T]");
    c.stabilize.record_every = st.at("record_every").get<int>();
    require(c.stabilize.record_every >= 1, "stabilize.record_every", "must be >= 1");

    const json& v = j.at("verify");
    c.verify.g_trials = v.at("g_trials").get<int>();
    c.verify.group_trials = v.at("group_trials").get<int>();
    require(c.verify.g_trials >= 1 && c.verify.group_trials >= 1, "verify", "trial counts must be >= 1");
    c.verify.force_duplicate_frequencies = v.at("force_duplicate_frequencies").get<bool>();
    c.verify.wk_t = v.at("wk_t").get<double>();
    require(c.verify.wk_t > 0.0 && divides(c.verify.wk_t, c.dt), "verify.wk_t", "must be positive and a multiple of dt");

    const json& sw = j.at("sweep");
    c.sweep.command = sw.at("command").get<std::string>();
    static const std::set<std::string> cmds{"spectrum", "simulate", "control", "stabilize", "verify"};
    require(cmds.count(c.sweep.command) > 0, "sweep.command", "must name a single-run subcommand");
    c.sweep.parameter = sw.at("parameter").get<std::string>();
    c.sweep.values = sw.at("values");
    require(c.sweep.values.is_array() && !c.sweep.values.empty(), "sweep.values", "must be a nonempty list");
    c.sweep.jobs = sw.at("jobs").get<int>();
    require(c.sweep.jobs >= 0, "sweep.jobs", "must be >= 0");
  } catch (const json::exception& e) {
    throw ConstraintViolation(std::string("config: ") + e.what());
  }
  return c;
}

GProfile make_g(const RunConfig& c) {
  if (c.g_profile == "uniform") return GProfile::uniform(c.N);
  if (c.g_profile == "raised_cosine") return GProfile::raised_cosine(c.N);
  return GProfile(parse_coefficients(c.g_coefficients, c.N, "g.coefficients"),
                  c.g_strict ? GProfile::Validation::strict : GProfile::Validation::relaxed);
}

StateVector make_state(const DataSpec& d, const RunConfig& c, int role) {
  const int n = c.N;
  StateVector w(n);
  if (d.preset == "zero") return w;
  if (d.preset == "constant") {
    w.u[0] = d.mean;
  } else if (d.preset == "cosine") {
    w.u = FourierField::cosine(n, d.mode, d.amplitude);
    w.u[0] = d.mean;
  } else if (d.preset == "eigenmode") {
    // travelling wave A cos(kx - omega t) at t = 0
    w.u = FourierField::cosine(n, d.mode, d.amplitude);
    w.v = FourierField::sine(n, d.mode, d.amplitude * omega(d.mode, c.beta));
    w.u[0] = d.mean;
  } else if (d.preset == "random") {
    std::seed_seq seq{static_cast<std::uint32_t>(c.seed), static_cast<std::uint32_t>(c.seed >> 32),
                      static_cast<std::uint32_t>(role)};
    std::mt19937_64 rng(seq);
    w = random_state(rng, n, d.decay, /*zero_mean=*/true);
    const double norm = xs_norm(w, SobolevIndex(c.s), NormConvention::equivalent, c.beta);
    if (norm > 0.0) w = cplx(d.amplitude / norm) * w;
    w.u[0] = d.mean;
  } else {
    if (!d.u.is_null()) w.u = parse_coefficients(d.u, n, "data.u");
    if (!d.v.is_null()) w.v = parse_coefficients(d.v, n, "data.v");
  }
  return w;
}

}  // namespace boussctl::runner
