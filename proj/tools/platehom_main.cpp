#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "platehom/config.hpp"
#include "platehom/errors.hpp"

namespace {

int dispatch(const std::string& command, const std::string& config_path,
             const platehom::CliOverrides& overrides) {
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open config file '" << config_path << "'\n";
    return 2;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    platehom::RunConfig config = platehom::parse_config(ss.str());
    if (config.run.command != command) {
      config.run.command = command;
      // re-validate the command/chart pairing
      config = platehom::parse_config(platehom::serialize_config(config));
    }
    auto written = platehom::run(config, overrides);
    for (const auto& path : written) std::cout << path << "\n";
    return 0;
  } catch (const platehom::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.kind() == platehom::ErrKind::QuadratureNotConverged) return 3;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Homogenized plate bending: cell problems, developable charts, "
               "recovery sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  platehom::CliOverrides overrides;
  std::string out_dir;
  int threads = 0;
  std::uint64_t seed = 0;
  int quad_nodes = 0;
  double rtol = 0.0;
  bool mesh = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "config file (JSON)")->required();
    cmd->add_option("-o,--out", out_dir, "output directory");
    cmd->add_option("--threads", threads, "worker threads");
    cmd->add_option("--seed", seed, "seed for random material generation");
    cmd->add_option("--quad-nodes", quad_nodes, "Gauss nodes per quadrature cell");
    cmd->add_option("--richardson-tol", rtol, "quadrature acceptance tolerance");
    cmd->add_flag("--mesh", mesh, "export the chart immersion as an ASCII mesh");
  };

  for (const char* name : {"cell", "classify", "energy", "recover", "twoscale"})
    add_common(app.add_subcommand(name));

  CLI11_PARSE(app, argc, argv);

  if (!out_dir.empty()) overrides.out_dir = out_dir;
  if (threads > 0) overrides.threads = threads;
  if (seed != 0) overrides.seed = seed;
  if (quad_nodes > 0) overrides.quad_nodes = quad_nodes;
  if (rtol > 0) overrides.richardson_tol = rtol;
  overrides.mesh = mesh;

  return dispatch(app.get_subcommands().front()->get_name(), config_path, overrides);
}
