#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lensfold/folding.hpp"
#include "lensfold/profile.hpp"
#include "lensfold/tessellation.hpp"
#include "lensfold/tolerances.hpp"
#include "lensfold/verification.hpp"

namespace lensfold {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfig = 2,
  kExitUnfoldable = 3,
  kExitInfeasibleVstar = 4,
};

/// Exit code for a library error.
int exit_code_for(Errc code);

struct ProfileSpec {
  std::string kind = "sine";  // sine | circular_arc | polynomial | tabulated
  double amp = 0.3;
  double height = 0.25;
  std::vector<double> coeffs;
  std::string table;  // CSV with columns t, ell
};

struct JobConfig {
  ProfileSpec profile;
  double u = 0.5;
  double v = 2.0;
  std::optional<double> vstar;
  std::size_t samples = 512;
  int rows = 1;
  int cols = 1;
  std::size_t frames = 16;
  std::string out_dir = ".";
  std::string report;  // empty: <out_dir>/report.json
  bool verify = true;
  bool convergence = true;
  std::set<std::string> checks;  // empty: all
  Tolerances tol;
  std::uint64_t seed = 1;
  std::size_t chords = 100;
};

/// Reads a JSON config; unknown keys are an error. Throws InvalidConfig.
JobConfig load_config(const std::string& path);
/// Overlays the keys present in `json_text` onto `base`.
JobConfig parse_config(const std::string& json_text, JobConfig base = {});
/// Range checks run before any computation. Throws InvalidConfig.
void validate(const JobConfig& cfg);

LensProfile make_profile(const ProfileSpec& spec);
/// Two columns t, ell; a header row is skipped.
LensProfile read_table_profile(const std::string& path);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

// Crease pattern over columns [0, cols) and the given lens rows.
std::string pattern_svg(const LensTessellation& tess, int cols = 3, int row_lo = 0, int row_hi = 1,
                        std::size_t samples = 129);
std::string pattern_json(const LensTessellation& tess, int cols = 3, int row_lo = 0, int row_hi = 1,
                         std::size_t samples = 129);

/// Wavefront OBJ, y-up: (x, y, z) is written as (x, z, -y). One object
/// `module_i_j/patch_{U,M,L}` per patch and tile.
std::string tiling_obj(const TiledFolding& tiling);
std::string module_obj(const KiteModule& module);

/// Per-sample CSV (s, x, y[, z], K, tau) of a crease, for debugging.
std::string curve_csv(const SampledCurve2D& curve);
std::string curve_csv(const SampledCurve3D& curve, const Tolerances& tol = default_tolerances());

struct FoldSummary {
  int visible_vertex = 0;
  double vstar_lim = 0.0;
  double theta_end = 0.0;
  double total_turn = 0.0;
  int rows = 1;
  int cols = 1;
  std::vector<VertexKink> kinks;
};

std::string report_json(const FoldReport& report, const FoldSummary& summary);
std::string limits_json(const FoldSetup& setup);

struct ManifestRow {
  std::size_t frame = 0;
  double vstar = 0.0;
  double theta_total = 0.0;
  double max_residual = 0.0;  // largest residual / tolerance over the frame's checks
};
std::string manifest_csv(const std::vector<ManifestRow>& rows);

/// Subcommands. Messages go to `log`; the return value is the exit code.
int cmd_pattern(const JobConfig& cfg, std::ostream& log);
int cmd_limits(const JobConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_fold(const JobConfig& cfg, std::ostream& log);
int cmd_sweep(const JobConfig& cfg, std::ostream& log);

}  // namespace lensfold
