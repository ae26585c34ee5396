#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "boussctl/errors.h"
#include "runner/commands.h"
#include "runner/config.h"

namespace {

using boussctl::runner::json;

struct Args {
  std::string config_path;
  std::string out;
  std::vector<std::string> overrides;
  long long seed = -1;
};

}  // namespace

int main(int argc, char** argv) {
  namespace rn = boussctl::runner;
  CLI::App app{"Sixth-order Boussinesq spectral simulation and control runner"};
  app.require_subcommand(1, 1);

  Args args;
  bool print_config = false;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"spectrum", "eigenvalues, eigenvector normalization and basis diagnostics"},
      {"simulate", "open-loop linear or nonlinear evolution"},
      {"control", "exact boundary-free control between two states"},
      {"stabilize", "closed loop with feedback -K G u_t"},
      {"verify", "invariant checks: basis, group, G, duality, dissipation"},
      {"sweep", "parallel batch of one subcommand over a parameter list"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", args.config_path, "JSON config merged over the defaults");
    sub->add_option("--out", args.out, "output directory (default runs/<command>)");
    sub->add_option("--seed", args.seed, "random seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--override", args.overrides, "KEY=VALUE with dotted KEY, repeatable")->allow_extra_args(false);
    sub->add_flag("--print-config", print_config, "print the merged config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : rn::kUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  json cfg = rn::default_config();
  try {
    if (!args.config_path.empty()) {
      std::ifstream is(args.config_path);
      if (!is) throw rn::UsageError("cannot read config " + args.config_path);
      json file;
      try {
        file = json::parse(is);
      } catch (const json::parse_error& e) {
        throw rn::UsageError("config " + args.config_path + ": " + e.what());
      }
      cfg = rn::merge_config(std::move(cfg), file);
    }
    for (const std::string& o : args.overrides) rn::apply_override(cfg, o);
    if (args.seed >= 0) cfg["seed"] = args.seed;
  } catch (const rn::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return rn::kUsage;
  } catch (const boussctl::ConstraintViolation& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return rn::kConstraint;
  }

  if (print_config) {
    std::cout << cfg.dump(2) << '\n';
    return rn::kOk;
  }

  const std::string out = args.out.empty() ? "runs/" + command : args.out;
  rn::RunOutcome r;
  try {
    r = rn::run(command, cfg, out);
  } catch (const std::exception& e) {
    std::cerr << "cannot write results to " << out << ": " << e.what() << '\n';
    return rn::kNumerical;
  }
  std::cout << command << ": " << r.report.at("status").get<std::string>() << " (exit " << r.exit_code << "), report "
            << out << "/report.json\n";
  for (const auto& f : r.report.at("failures")) std::cout << "  failed check: " << f.get<std::string>() << '\n';
  if (!r.report.at("error").is_null()) {
    std::cout << "  " << r.report["error"]["type"].get<std::string>() << ": "
              << r.report["error"]["message"].get<std::string>() << '\n';
  }
  return r.exit_code;
}
