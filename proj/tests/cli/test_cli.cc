#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "boussctl/errors.h"
#include "boussctl/linear_flow.h"
#include "boussctl/mode_basis.h"
#include "runner/artifacts.h"
#include "runner/commands.h"
#include "runner/config.h"

namespace fs = std::filesystem;
using namespace boussctl;
using namespace boussctl::runner;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("boussctl_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

json cfg_with(std::initializer_list<std::string> overrides) {
  json c = default_config();
  for (const auto& o : overrides) apply_override(c, o);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

const json& find_check(const json& report, const std::string& name) {
  for (const json& c : report.at("checks")) {
    if (c.at("name") == name) return c;
  }
  throw std::runtime_error("no check " + name);
}

int cli(const std::string& args) {
  const int st = std::system((std::string(BOUSSCTL_BIN) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

// ------------------------------------------------------------------ config

TEST(Config, DefaultsParse) {
  const RunConfig c = parse_config(default_config());
  EXPECT_EQ(c.N, 16);
  EXPECT_EQ(c.beta, Beta::plus_one);
  EXPECT_DOUBLE_EQ(c.dt, 1e-3);
  EXPECT_EQ(c.initial.preset, "cosine");
  EXPECT_EQ(c.terminal.preset, "zero");
}

TEST(Config, MergeAndOverrides) {
  json c = merge_config(default_config(), json::parse(R"({"N": 8, "tolerances": {"wk": 1e-5}})"));
  EXPECT_EQ(c["N"], 8);
  EXPECT_EQ(c["tolerances"]["wk"], 1e-5);
  EXPECT_EQ(c["tolerances"]["dissipation"], 1e-6);  // siblings kept
  apply_override(c, "control.mode=nonlinear");
  EXPECT_EQ(c["control"]["mode"], "nonlinear");
  apply_override(c, "initial.u=[[1, 0.5, 0]]");
  EXPECT_TRUE(c["initial"]["u"].is_array());

  EXPECT_THROW(merge_config(default_config(), json::parse(R"({"tolerances": {"nope": 1}})")), ConstraintViolation);
  EXPECT_THROW(apply_override(c, "nope=1"), UsageError);
  EXPECT_THROW(apply_override(c, "N"), UsageError);
  EXPECT_THROW(apply_override(c, "a..b=1"), UsageError);
}

TEST(Config, RangeChecks) {
  EXPECT_THROW(parse_config(cfg_with({"beta=0"})), ConstraintViolation);
  EXPECT_THROW(parse_config(cfg_with({"N=0"})), ConstraintViolation);
  EXPECT_THROW(parse_config(cfg_with({"dt=0.3"})), ConstraintViolation);  // does not divide T
  EXPECT_THROW(parse_config(cfg_with({"K=-1"})), ConstraintViolation);
  EXPECT_THROW(parse_config(cfg_with({"N=\"sixteen\""})), ConstraintViolation);
  EXPECT_THROW(parse_config(cfg_with({"g.profile=custom"})), ConstraintViolation);
}

TEST(Config, DataPresets) {
  const RunConfig c = parse_config(cfg_with({"N=6", "initial.preset=eigenmode", "initial.mode=2",
                                             "initial.amplitude=0.5"}));
  const StateVector w = make_state(c.initial, c, 0);
  const double om = omega(2, Beta::plus_one);
  EXPECT_NEAR(w.u[2].real(), 0.25, 1e-15);
  EXPECT_NEAR(w.u[-2].real(), 0.25, 1e-15);
  // v = A omega sin 2x
  EXPECT_NEAR(w.v[2].imag(), -0.25 * om, 1e-12);
  EXPECT_NEAR(w.v[-2].imag(), 0.25 * om, 1e-12);

  const RunConfig cc = parse_config(cfg_with({"N=4", "initial.preset=coefficients", "initial.u=[[1, 0.5, 0.25]]"}));
  const StateVector z = make_state(cc.initial, cc, 0);
  EXPECT_EQ(z.u[1], cplx(0.5, 0.25));
  EXPECT_EQ(z.u[-1], cplx(0.5, -0.25));

  const RunConfig cr = parse_config(cfg_with({"initial.preset=random", "initial.amplitude=0.01"}));
  const StateVector r1 = make_state(cr.initial, cr, 0), r2 = make_state(cr.initial, cr, 0);
  EXPECT_EQ(r1.u[3], r2.u[3]);
  EXPECT_TRUE(r1.is_real(1e-15));
  EXPECT_NEAR(xs_norm(r1, SobolevIndex(0.0), NormConvention::equivalent, Beta::plus_one), 0.01, 1e-15);
}

TEST(Artifacts, Sha256) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

// ------------------------------------------------------------------ commands

TEST(Spectrum, FrequenciesAndFiles) {
  const fs::path out = scratch("spectrum");
  const RunOutcome r = run("spectrum", cfg_with({"N=4"}), out);
  ASSERT_EQ(r.exit_code, kOk) << r.report.dump(2);
  const auto om = r.report["results"]["omega"].get<std::vector<double>>();
  const double want[] = {std::sqrt(3.0), std::sqrt(84.0), std::sqrt(819.0), std::sqrt(4368.0)};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(om[i], want[i], 1e-12 * want[i]);
  EXPECT_TRUE(fs::exists(out / "spectrum.csv"));
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_TRUE(fs::exists(out / "timing.json"));

  const RunOutcome m = run("spectrum", cfg_with({"N=4", "beta=-1"}), scratch("spectrum_m"));
  ASSERT_EQ(m.exit_code, kOk);
  EXPECT_NEAR(m.report["results"]["omega"][0].get<double>(), 1.0, 1e-15);
  EXPECT_EQ(m.report["results"]["det_monotone_from"], 2);
}

TEST(Report, SchemaAndManifest) {
  const fs::path out = scratch("schema");
  const json cfg = cfg_with({"N=4"});
  const RunOutcome r = run("spectrum", cfg, out);
  const json rep = json::parse(slurp(out / "report.json"));
  EXPECT_EQ(rep, r.report);
  for (const char* key : {"schema_version", "command", "config_hash", "config", "status", "exit_code", "checks",
                          "failures", "results", "error"}) {
    EXPECT_TRUE(rep.contains(key)) << key;
  }
  const json man = json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(man["config_hash"], sha256_hex(cfg.dump()));
  EXPECT_EQ(man["config"], cfg);
  for (const json& c : rep["checks"]) {
    for (const char* key : {"name", "measured", "relation", "tolerance", "pass"}) EXPECT_TRUE(c.contains(key));
  }
}

TEST(Simulate, LinearEigenmodeIsExact) {
  const fs::path out = scratch("sim_eig");
  const RunOutcome r =
      run("simulate", cfg_with({"N=8", "T=2", "initial.preset=eigenmode", "initial.mode=3"}), out);
  ASSERT_EQ(r.exit_code, kOk) << r.report.dump(2);
  EXPECT_LE(r.report["results"]["max_deviation_from_group"].get<double>(), 1e-12);
  EXPECT_LE(r.report["results"]["energy_relative_drift"].get<double>(), 1e-12);
  EXPECT_TRUE(fs::exists(out / "trajectory.csv"));
  EXPECT_EQ(slurp(out / "trajectory.csv").substr(0, 24), "t,k,re_u,im_u,re_v,im_v\n");
}

TEST(Simulate, ZeroDataStayZero) {
  const RunOutcome r = run("simulate", cfg_with({"initial.preset=zero", "nonlinear=true"}), scratch("sim_zero"));
  ASSERT_EQ(r.exit_code, kOk) << r.report.dump(2);
  EXPECT_EQ(r.report["results"]["xs_norm_final"].get<double>(), 0.0);
  EXPECT_EQ(r.report["results"]["mean_v_drift"].get<double>(), 0.0);
  EXPECT_EQ(r.report["results"]["mean_u_drift"].get<double>(), 0.0);
}

TEST(Simulate, NonlinearConservation) {
  const RunOutcome r = run("simulate",
                           cfg_with({"nonlinear=true", "T=10", "initial.preset=random", "initial.amplitude=0.01",
                                     "initial.mean=0.2", "simulate.write_trajectory=false"}),
                           scratch("sim_nl"));
  ASSERT_EQ(r.exit_code, kOk) << r.report.dump(2);
  EXPECT_LE(r.report["results"]["mean_v_drift"].get<double>(), 1e-10);
}

TEST(Simulate, BlowUpIsNumericalFailure) {
  const RunOutcome r = run("simulate", cfg_with({"nonlinear=true", "initial.amplitude=1000"}), scratch("sim_blow"));
  EXPECT_EQ(r.exit_code, kNumerical);
  EXPECT_EQ(r.report["error"]["type"], "BlowUp");
  EXPECT_GT(r.report["error"]["time"].get<double>(), 0.0);
}

TEST(Control, LinearDefault) {
  const fs::path out = scratch("control");
  const RunOutcome r = run("control", default_config(), out);
  ASSERT_EQ(r.exit_code, kOk) << r.report.dump(2);
  EXPECT_LE(find_check(r.report, "terminal_error")["measured"].get<double>(), 1e-6);
  const std::string csv = slurp(out / "control.csv");
  std::string header = "t";
  for (int j = 0; j < 33; ++j) header += ",h_" + std::to_string(j);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), header);
  EXPECT_TRUE(fs::exists(out / "control_coefficients.csv"));
}

TEST(Control, FreeFlightNeedsNoControl) {
  const RunOutcome r = run("control", cfg_with({"initial.preset=zero"}), scratch("control_ff"));
  ASSERT_EQ(r.exit_code, kOk);
  EXPECT_TRUE(r.report["results"]["free_flight"].get<bool>());
  EXPECT_EQ(r.report["results"]["control_norm"].get<double>(), 0.0);
}

TEST(Control, MeanConstraintIsRejected) {
  const RunOutcome r = run("control", cfg_with({"terminal.preset=constant", "terminal.mean=0.5"}), scratch("control_mean"));
  EXPECT_EQ(r.exit_code, kConstraint);
  EXPECT_EQ(r.report["error"]["type"], "ConstraintViolation");
}

TEST(Control, NonlinearFixedPoint) {
  const RunOutcome r =
      run("control", cfg_with({"control.mode=nonlinear", "initial.amplitude=0.01"}), scratch("control_nl"));
  ASSERT_EQ(r.exit_code, kOk) << r.report.dump(2);
  EXPECT_LE(r.report["results"]["terminal_error"].get<double>(), 1e-5);
  EXPECT_GE(r.report["results"]["iterations"].get<int>(), 1);

  const RunOutcome big = run("control", cfg_with({"control.mode=nonlinear", "initial.amplitude=0.01", "control.delta=0.001"}),
                             scratch("control_delta"));
  EXPECT_EQ(big.exit_code, kConstraint);
}

TEST(Stabilize, DefaultProfileDecays) {
  const fs::path out = scratch("stab");
  const RunOutcome r = run("stabilize", cfg_with({"stabilize.target_drop=100"}), out);
  ASSERT_EQ(r.exit_code, kOk) << r.report.dump(2);
  EXPECT_TRUE(r.report["results"]["target_reached"].get<bool>());
  EXPECT_LT(r.report["results"]["one_period_ratio"].get<double>(), 1.0);
  const json fit = json::parse(slurp(out / "decay_fit.json"));
  EXPECT_GT(fit["xs_norm"]["gamma_hat"].get<double>(), 0.0);
  EXPECT_EQ(slurp(out / "energy.csv").substr(0, 12), "t,E,xs_norm\n");
}

TEST(Stabilize, UniformProfileMatchesClosedForm) {
  const RunOutcome r = run("stabilize", cfg_with({"g.profile=uniform", "K=2"}), scratch("stab_uniform"));
  ASSERT_EQ(r.exit_code, kOk) << r.report.dump(2);
  EXPECT_NEAR(r.report["results"]["closed_form_rate"].get<double>(), 2.0 / (4.0 * kPi), 1e-15);
  EXPECT_LE(find_check(r.report, "uniform_rate_relative_error")["measured"].get<double>(), 0.05);
}

TEST(Stabilize, ZeroGainConserves) {
  const RunOutcome r = run("stabilize", cfg_with({"K=0"}), scratch("stab_k0"));
  ASSERT_EQ(r.exit_code, kOk) << r.report.dump(2);
  EXPECT_EQ(r.report["results"]["chunks"], 1);
  EXPECT_LE(std::abs(r.report["results"]["decay_fit_xs_norm"]["gamma_hat"].get<double>()), 1e-10);
}

TEST(Stabilize, NonzeroVelocityMeanRejected) {
  const RunOutcome r = run("stabilize", cfg_with({"initial.preset=coefficients", "initial.u=[[1, 0.5, 0]]",
                                                  "initial.v=[[0, 0.5, 0]]"}),
                           scratch("stab_mean"));
  EXPECT_EQ(r.exit_code, kConstraint);
  EXPECT_NE(r.report["error"]["message"].get<std::string>().find("[psi_0] = 0"), std::string::npos);
}

TEST(Stabilize, ConstantIsEquilibrium) {
  const RunOutcome r = run("stabilize", cfg_with({"initial.preset=constant", "initial.mean=0.3"}), scratch("stab_eq"));
  ASSERT_EQ(r.exit_code, kOk);
  EXPECT_TRUE(r.report["results"]["equilibrium"].get<bool>());
}

TEST(Stabilize, NonlinearSmallData) {
  const RunOutcome r = run("stabilize", cfg_with({"nonlinear=true", "initial.amplitude=0.01", "stabilize.target_drop=100"}),
                           scratch("stab_nl"));
  ASSERT_EQ(r.exit_code, kOk) << r.report.dump(2);
  EXPECT_GT(r.report["results"]["decay_fit_xs_norm"]["gamma_hat"].get<double>(), 0.0);
}

TEST(Verify, DefaultPasses) {
  const RunOutcome r = run("verify", cfg_with({"verify.g_trials=200"}), scratch("verify"));
  ASSERT_EQ(r.exit_code, kOk) << r.report.dump(2);
  EXPECT_TRUE(r.report["failures"].empty());
}

TEST(Verify, UnnormalizedProfileFailsInvariant) {
  // g = 2 / 2pi carries mass 2.
  const RunOutcome r = run("verify",
                           cfg_with({"verify.g_trials=50", R"(g={"profile": "custom", "coefficients": [[0, 0.3183098861837907, 0]], "validation": "relaxed"})"}),
                           scratch("verify_mass"));
  EXPECT_EQ(r.exit_code, kInvariant);
  EXPECT_EQ(r.report["failures"], json::array({"g_mean_zero"}));
  EXPECT_EQ(r.report["status"], "checks_failed");
}

TEST(Verify, StrictProfileRejectsWrongMass) {
  const RunOutcome r = run("verify", cfg_with({R"(g={"profile": "custom", "coefficients": [[0, 0.3183098861837907, 0]]})"}),
                           scratch("verify_strict"));
  EXPECT_EQ(r.exit_code, kConstraint);
  EXPECT_NE(r.report["error"]["message"].get<std::string>().find("g"), std::string::npos) << r.report["error"];
}

TEST(Verify, DuplicateFrequenciesSurfaceSingularGram) {
  const RunOutcome r =
      run("verify", cfg_with({"verify.g_trials=10", "verify.force_duplicate_frequencies=true"}), scratch("verify_dup"));
  EXPECT_EQ(r.exit_code, kNumerical);
  EXPECT_EQ(r.report["error"]["type"], "SingularSystem");
}

TEST(Sweep, OrderedAndWorstExitCode) {
  const fs::path out = scratch("sweep");
  const RunOutcome r = run("sweep",
                           cfg_with({"sweep.command=spectrum", "sweep.parameter=N", "sweep.values=[2, 0, 4]",
                                     "sweep.jobs=3"}),
                           out);
  EXPECT_EQ(r.exit_code, kConstraint);  // N = 0 is out of range
  const json& runs = r.report["results"]["runs"];
  ASSERT_EQ(runs.size(), 3u);
  EXPECT_EQ(runs[0]["value"], 2);
  EXPECT_EQ(runs[1]["exit_code"], kConstraint);
  EXPECT_EQ(runs[2]["results"]["omega"].size(), 4u);
  EXPECT_TRUE(fs::exists(out / "job_2" / "report.json"));

  const RunOutcome bad = run("sweep", cfg_with({"sweep.parameter=nope"}), scratch("sweep_bad"));
  EXPECT_EQ(bad.exit_code, kConstraint);
}

TEST(Determinism, ReportsAreByteIdentical) {
  for (const char* cmd : {"simulate", "control", "verify"}) {
    const json cfg = cfg_with({"initial.preset=random", "initial.amplitude=0.01", "verify.g_trials=50",
                               "simulate.write_trajectory=false"});
    const fs::path a = scratch(std::string("det_a_") + cmd), b = scratch(std::string("det_b_") + cmd);
    run(cmd, cfg, a);
    run(cmd, cfg, b);
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json")) << cmd;
    EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json")) << cmd;
  }
  const json s1 = cfg_with({"sweep.command=spectrum", "sweep.parameter=N", "sweep.values=[3, 5, 7]", "sweep.jobs=3"});
  const fs::path a = scratch("det_sweep_a"), b = scratch("det_sweep_b");
  run("sweep", s1, a);
  run("sweep", s1, b);
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
}

TEST(Binary, ExitCodes) {
  const fs::path dir = scratch("bin");
  fs::create_directories(dir);
  EXPECT_EQ(cli("spectrum --override N=4 --out " + (dir / "ok").string()), 0);
  EXPECT_EQ(cli(""), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("spectrum --override nope=1 --out " + (dir / "x").string()), 1);
  EXPECT_EQ(cli("spectrum --config " + (dir / "missing.json").string()), 1);
  {
    std::ofstream(dir / "bad.json") << R"({"N": 4, "unknown": 1})";
  }
  EXPECT_EQ(cli("spectrum --config " + (dir / "bad.json").string() + " --out " + (dir / "y").string()), 2);
  {
    std::ofstream(dir / "good.json") << R"({"N": 4, "beta": -1})";
  }
  EXPECT_EQ(cli("spectrum --config " + (dir / "good.json").string() + " --seed 7 --out " + (dir / "z").string()), 0);
  const json rep = json::parse(slurp(dir / "z" / "report.json"));
  EXPECT_EQ(rep["config"]["beta"], -1);
  EXPECT_EQ(rep["config"]["seed"], 7);
  EXPECT_EQ(cli("simulate --override nonlinear=true --override initial.amplitude=1000 --out " + (dir / "w").string()),
            3);
}
