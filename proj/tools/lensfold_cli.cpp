#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lensfold/errors.hpp"
#include "lensfold/io.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> profile;
  std::optional<double> amp, height;
  std::optional<std::vector<double>> coeffs;
  std::optional<std::string> table;
  std::optional<double> u, v, vstar;
  std::optional<std::size_t> samples, frames;
  std::optional<int> rows, cols;
  std::optional<std::string> out_dir, report;
  bool no_verify = false;
  bool no_convergence = false;
  std::optional<double> tol_angle, tol_length;
  std::optional<std::uint64_t> seed;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON config file; flags override its values");
  cmd->add_option("--profile", f.profile, "sine | circular_arc | polynomial | tabulated");
  cmd->add_option("--amp", f.amp, "sine amplitude");
  cmd->add_option("--height", f.height, "circular arc height");
  cmd->add_option("--coeffs", f.coeffs, "polynomial coefficients c0 c1 ...")->expected(1, -1);
  cmd->add_option("--table", f.table, "CSV of t, ell samples");
  cmd->add_option("--u", f.u, "row offset");
  cmd->add_option("--v", f.v, "row spacing");
  cmd->add_option("--vstar", f.vstar, "folded apex distance");
  cmd->add_option("--samples", f.samples, "crease samples per module");
  cmd->add_option("--rows", f.rows, "tiling rows");
  cmd->add_option("--cols", f.cols, "tiling columns");
  cmd->add_option("--frames", f.frames, "sweep frames");
  cmd->add_option("--out-dir", f.out_dir, "output directory");
  cmd->add_option("--report", f.report, "report path");
  cmd->add_flag("--no-verify", f.no_verify, "skip verification");
  cmd->add_flag("--no-convergence", f.no_convergence, "skip the 2n rebuild");
  cmd->add_option("--tol-angle", f.tol_angle, "bisection tolerance [rad]");
  cmd->add_option("--tol-length", f.tol_length, "relative length tolerance");
  cmd->add_option("--seed", f.seed, "seed for random chords");
}

lensfold::JobConfig resolve(const Flags& f) {
  lensfold::JobConfig c = f.config.empty() ? lensfold::JobConfig{} : lensfold::load_config(f.config);
  if (f.profile) c.profile.kind = *f.profile;
  if (f.amp) c.profile.amp = *f.amp;
  if (f.height) c.profile.height = *f.height;
  if (f.coeffs) c.profile.coeffs = *f.coeffs;
  if (f.table) c.profile.table = *f.table;
  if (f.u) c.u = *f.u;
  if (f.v) c.v = *f.v;
  if (f.vstar) c.vstar = *f.vstar;
  if (f.samples) c.samples = *f.samples;
  if (f.frames) c.frames = *f.frames;
  if (f.rows) c.rows = *f.rows;
  if (f.cols) c.cols = *f.cols;
  if (f.out_dir) c.out_dir = *f.out_dir;
  if (f.report) c.report = *f.report;
  if (f.no_verify) c.verify = false;
  if (f.no_convergence) c.convergence = false;
  if (f.tol_angle) c.tol.angle = *f.tol_angle;
  if (f.tol_length) c.tol.length = *f.tol_length;
  if (f.seed) c.seed = *f.seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lens tessellation folding: crease patterns, fold limits, folded meshes and sweeps"};
  app.require_subcommand(1);
  Flags flags;
  CLI::App* pattern = app.add_subcommand("pattern", "write the crease pattern as SVG and JSON");
  CLI::App* limits = app.add_subcommand("limits", "print the visible vertex and v*_lim");
  CLI::App* fold = app.add_subcommand("fold", "fold one module (or a tiling), export OBJ and a report");
  CLI::App* sweep = app.add_subcommand("sweep", "fold a sequence of v* values between the limit and flat");
  for (CLI::App* cmd : {pattern, limits, fold, sweep}) add_flags(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : lensfold::kExitConfig;
  }

  lensfold::JobConfig cfg;
  try {
    cfg = resolve(flags);
  } catch (const lensfold::LensError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lensfold::exit_code_for(e.code());
  }
  if (pattern->parsed()) return lensfold::cmd_pattern(cfg, std::cerr);
  if (limits->parsed()) return lensfold::cmd_limits(cfg, std::cout, std::cerr);
  if (fold->parsed()) return lensfold::cmd_fold(cfg, std::cerr);
  return lensfold::cmd_sweep(cfg, std::cerr);
}
