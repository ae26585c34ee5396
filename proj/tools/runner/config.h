#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "boussctl/control_profile.h"
#include "boussctl/fourier_field.h"
#include "boussctl/sobolev.h"

namespace boussctl::runner {

using json = nlohmann::json;

// Malformed command line or override; maps to exit status 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every key the runner understands, with its default. Optional entries are null.
json default_config();

// Deep merge of `patch` into `base`; keys absent from the defaults are rejected.
json merge_config(json base, const json& patch);

// KEY=VALUE with a dotted KEY; VALUE is parsed as JSON and falls back to a
// plain string. Throws UsageError for malformed input or unknown keys.
void apply_override(json& cfg, const std::string& assignment);

// Initial or terminal data.
struct DataSpec {
  std::string preset = "zero";  // zero | constant | cosine | eigenmode | random | coefficients
  double amplitude = 1.0;
  int mode = 1;
  double mean = 0.0;
  double decay = 0.5;
  json u, v;  // [[k, re, im], ...] for the coefficients preset
};

struct Tolerances {
  double orthonormality = 1e-12;
  double eigen_residual = 1e-10;
  double group = 1e-12;
  double g_operator = 1e-12;
  double conservation = 1e-10;
  double affine_mean = 1e-8;
  double terminal = 1e-6;
  double nonlinear_terminal = 1e-5;
  double duality = 1e-8;
  double moment = 1e-8;
  double free_flight = 1e-10;
  double fixed_point = 1e-8;
  double dissipation = 1e-6;
  double wk = 1e-6;
  double rate = 0.05;
  double r2_min = 0.99;
  double energy_drift = 1e-10;
};

struct ControlSettings {
  std::string mode = "linear";  // linear | nonlinear
  int max_iter = 20;
  double nonlinear_dt = 1e-4;
  double max_condition = 1e10;
  double delta_floor = 1e-12;
  int time_samples = 101;
  std::optional<double> delta;
};

struct SimulateSettings {
  int record_every = 10;
  bool write_trajectory = true;
};

struct StabilizeSettings {
  std::optional<std::pair<double, double>> fit_window;
  double target_drop = 1e4;
  double max_T = 200.0;
  double period = 1.0;
  int record_every = 10;
};

struct VerifySettings {
  int g_trials = 1000;
  int group_trials = 50;
  bool force_duplicate_frequencies = false;
  double wk_t = 1.0;
};

struct SweepSettings {
  std::string command = "stabilize";
  std::string parameter = "K";
  json values = json::array();
  int jobs = 0;  // 0: hardware concurrency
};

struct RunConfig {
  Beta beta = Beta::plus_one;
  int N = 16;
  double s = 0.0;
  double T = 1.0;
  double dt = 1e-3;
  double K = 1.0;
  bool nonlinear = false;
  std::uint64_t seed = 42;
  std::string g_profile = "raised_cosine";
  json g_coefficients;
  bool g_strict = true;
  DataSpec initial, terminal;
  Tolerances tol;
  ControlSettings control;
  SimulateSettings simulate;
  StabilizeSettings stabilize;
  VerifySettings verify;
  SweepSettings sweep;
};

// Range checks; throws ConstraintViolation naming the field.
RunConfig parse_config(const json& cfg);

GProfile make_g(const RunConfig& c);
// role 0: initial data, role 1: terminal data (separate random streams).
StateVector make_state(const DataSpec& d, const RunConfig& c, int role);

}  // namespace boussctl::runner
