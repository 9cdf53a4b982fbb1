#include <filesystem>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"

#include "screenbem/cli/commands.hpp"

namespace sc = screenbem::cli;

int main(int argc, char** argv) {
  CLI::App app{"Scattering by flat perfectly conducting screens: forward solve and inverse reconstruction"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  bool verbose = false;
  app.add_option("--config", config_path, "Run configuration file (sectioned key = value)");
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--verbose", verbose, "Progress messages on stderr");

  auto* mesh = app.add_subcommand("mesh", "Generate the screen mesh");
  auto* solve = app.add_subcommand("solve", "Solve for the jump density");
  auto* farfield = app.add_subcommand("farfield", "Sample far-field patterns from a density file");
  auto* reconstruct = app.add_subcommand("reconstruct", "Image the screen support from a far-field file");
  auto* planefit = app.add_subcommand("planefit", "Recover the supporting plane from a far-field file");
  auto* demo = app.add_subcommand("demo-uniqueness", "Compare the far fields of two screens and invert both");

  std::string density_path, farfield_path;
  farfield->add_option("density", density_path, "Density file (default: <out>/density.txt)");
  reconstruct->add_option("farfield", farfield_path, "Far-field file (default: <out>/farfield.txt)");
  planefit->add_option("farfield", farfield_path, "Far-field file (default: <out>/farfield.txt)");

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  sc::CommandResult result;
  std::string command = "?";
  try {
    sc::RunContext ctx;
    ctx.config = config_path.empty() ? sc::RunConfig{} : sc::load_config(config_path);
    ctx.out_dir = out_dir;
    ctx.verbose = verbose;
    std::filesystem::create_directories(ctx.out_dir);
    if (farfield->parsed() && density_path.empty()) density_path = ctx.path(ctx.config.output.density);
    if ((reconstruct->parsed() || planefit->parsed()) && farfield_path.empty()) {
      farfield_path = ctx.path(ctx.config.output.farfield);
    }

    if (mesh->parsed()) result = sc::cmd_mesh(ctx);
    else if (solve->parsed()) result = sc::cmd_solve(ctx);
    else if (farfield->parsed()) result = sc::cmd_farfield(ctx, density_path);
    else if (reconstruct->parsed()) result = sc::cmd_reconstruct(ctx, farfield_path);
    else if (planefit->parsed()) result = sc::cmd_planefit(ctx, farfield_path);
    else if (demo->parsed()) result = sc::cmd_demo_uniqueness(ctx);
    command = result.summary.value("command", std::string("?"));
  } catch (const std::exception& e) {
    std::cerr << "screenbem: error: " << e.what() << '\n';
    sc::json summary = {{"ok", false}, {"error", e.what()}};
    std::cout << summary.dump(2) << '\n';
    return 2;
  }
  result.summary["ok"] = result.ok;
  std::cout << result.summary.dump(2) << '\n';
  if (!result.ok) std::cerr << "screenbem: " << command << ": stage check failed\n";
  return result.ok ? 0 : 1;
}
