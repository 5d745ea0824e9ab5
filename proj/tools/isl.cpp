#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "isl/error.hpp"
#include "isl/pipeline.hpp"

namespace
{

constexpr int kInvalidInput = 3;

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{
      "Bounds on nonreal and exceptional eigenvalues of indefinite Sturm-Liouville problems"};
  app.require_subcommand(1);

  std::string config_path, out_dir, format = "text";
  long panels = 0;
  int grid_n = 0;
  double eps_resolution = 0.0, trust_window = 0.0;

  auto add_common = [&](CLI::App *cmd)
  {
    cmd->add_option("config", config_path, "problem configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--grid-n", grid_n, "coarse mesh size N (the ladder solves N and 2N)");
    cmd->add_option("--panels", panels, "panels for sublevel-set measures");
    cmd->add_option("--eps-resolution", eps_resolution, "relative resolution of the eps search");
    cmd->add_option("--trust-window", trust_window, "only eigenvalues with |lambda| <= this");
    cmd->add_option("--out", out_dir, "directory for report.json, spectrum.csv, bounds.csv");
    cmd->add_option("--format", format, "stdout format")
        ->check(CLI::IsMember({"json", "csv", "text"}));
  };
  auto *bounds = app.add_subcommand("bounds", "compute eigenvalue bounds");
  auto *solve = app.add_subcommand("solve", "compute and classify the spectrum");
  auto *verify = app.add_subcommand("verify", "bounds, spectrum and all consistency checks");
  for (auto *c : {bounds, solve, verify})
  {
    add_common(c);
  }
  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    // --help and --version exit 0; malformed command lines are invalid input.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInvalidInput;
  }

  try
  {
    auto cfg = isl::load_config(config_path);
    auto &s = cfg.settings;
    if (grid_n > 0)
    {
      s.grid_n = grid_n;
    }
    if (panels > 0)
    {
      s.panels = panels;
    }
    if (eps_resolution > 0.0)
    {
      s.eps_resolution = eps_resolution;
    }
    if (trust_window > 0.0)
    {
      s.trust_window = trust_window;
    }
    isl::refresh_resolved(cfg);

    isl::RunResult r;
    if (bounds->parsed())
    {
      r = isl::cmd_bounds(cfg);
    }
    else if (solve->parsed())
    {
      r = isl::cmd_solve(cfg);
    }
    else
    {
      r = isl::cmd_verify(cfg);
    }
    if (!out_dir.empty())
    {
      isl::write_outputs(r, out_dir);
    }
    if (format == "json")
    {
      std::cout << r.report.dump(2) << '\n';
    }
    else if (format == "csv")
    {
      std::cout << r.bounds_csv << r.spectrum_csv;
    }
    else
    {
      std::cout << r.text;
    }
    return r.exit_code;
  }
  catch (const isl::InvalidInput &e)
  {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  }
  catch (const isl::Unsatisfiable &e)
  {
    std::cerr << "unsatisfiable: " << e.what() << '\n';
    return 2;
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
