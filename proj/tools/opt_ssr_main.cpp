#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "optssr/config.hpp"
#include "optssr/errors.hpp"
#include "optssr/runner.hpp"

namespace {

struct Overrides {
  int levels = 0;
  std::string alpha;
  std::string scheme;
  std::string out;
};

void add_common_options(CLI::App* cmd, std::string& config_path, Overrides& ov) {
  cmd->add_option("config", config_path, "run configuration file")->required();
  cmd->add_option("--levels", ov.levels, "override the number of mesh levels");
  cmd->add_option("--alpha", ov.alpha,
                  "override the regularization (a number or 'auto')");
  cmd->add_option("--scheme", ov.scheme,
                  "override the reduction scheme "
                  "(associated, davis-a, davis-b, davis-c)");
  cmd->add_option("--out", ov.out, "override the output directory");
}

int load_and_dispatch(const std::string& config_path, const Overrides& ov,
                      bool compare) {
  optssr::RunConfig cfg;
  try {
    cfg = optssr::load_config(config_path);
    if (ov.levels > 0) cfg.levels = ov.levels;
    if (!ov.alpha.empty()) {
      if (ov.alpha == "auto") {
        cfg.alpha_auto = true;
      } else {
        try {
          cfg.alpha = std::stod(ov.alpha);
        } catch (const std::exception&) {
          throw optssr::ConfigError("--alpha expects a number or 'auto'");
        }
        cfg.alpha_auto = false;
        if (!(cfg.alpha > 0.0)) {
          throw optssr::ConfigError("--alpha must be positive");
        }
      }
    }
    if (!ov.scheme.empty()) cfg.scheme = optssr::parse_scheme(ov.scheme);
    if (!ov.out.empty()) cfg.out_dir = ov.out;
  } catch (const optssr::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return optssr::kExitConfig;
  }
  return compare ? optssr::cmd_compare(cfg) : optssr::cmd_run(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "opt-ssr: slope stability factors of safety by optimization-based "
      "shear strength reduction"};
  app.require_subcommand(1);

  std::string config_path;
  std::string mesh_path;
  Overrides ov;

  CLI::App* run =
      app.add_subcommand("run", "adaptive factor-of-safety computation");
  add_common_options(run, config_path, ov);

  CLI::App* compare = app.add_subcommand(
      "compare", "run every reduction scheme on a shared mesh trajectory");
  add_common_options(compare, config_path, ov);

  CLI::App* info = app.add_subcommand("mesh-info", "print mesh statistics");
  info->add_option("mesh", mesh_path, "mesh file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return load_and_dispatch(config_path, ov, false);
  if (compare->parsed()) return load_and_dispatch(config_path, ov, true);
  return optssr::cmd_mesh_info(mesh_path);
}
