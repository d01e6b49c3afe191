#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "lensfold/io.hpp"
#include "oracles.hpp"

using namespace lensfold;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lensfold_test_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LENSFOLD_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("config parsing and overlay") {
  const JobConfig c = parse_config(R"({"profile": {"kind": "circular_arc", "height": 0.2}, "u": 0.25,
                                       "vstar": 1.5, "rows": 3, "checks": ["bisection", "seams"],
                                       "tolerances": {"angle": 1e-5}})");
  CHECK(c.profile.kind == "circular_arc");
  CHECK(c.profile.height == 0.2);
  CHECK(c.u == 0.25);
  CHECK(c.v == 2.0);
  REQUIRE(c.vstar.has_value());
  CHECK(*c.vstar == 1.5);
  CHECK(c.rows == 3);
  CHECK(c.checks.count("seams") == 1);
  CHECK(c.tol.angle == 1e-5);
  CHECK(c.tol.length == default_tolerances().length);
  const JobConfig d = parse_config(R"({"v": 3})", c);
  CHECK(d.v == 3.0);
  CHECK(d.u == 0.25);
}

TEST_CASE("config errors") {
  auto code = [](const std::string& text) {
    try {
      validate(parse_config(text));
    } catch (const LensError& e) {
      return e.code();
    }
    return Errc::DegenerateCurve;
  };
  CHECK(code("{") == Errc::InvalidConfig);
  CHECK(code("[1]") == Errc::InvalidConfig);
  CHECK(code(R"({"colour": 1})") == Errc::InvalidConfig);
  CHECK(code(R"({"u": "half"})") == Errc::InvalidConfig);
  CHECK(code(R"({"profile": {"shape": 1}})") == Errc::InvalidConfig);
  CHECK(code(R"({"checks": ["everything"]})") == Errc::InvalidConfig);
  CHECK(code(R"({"tolerances": {"angle": "small"}})") == Errc::InvalidConfig);
  CHECK(code(R"({"u": 1.0})") == Errc::InvalidConfig);
  CHECK(code(R"({"samples": 10})") == Errc::InvalidConfig);
  CHECK(code(R"({"profile": {"kind": "spline"}})") == Errc::InvalidConfig);
  CHECK(code(R"({"profile": {"kind": "polynomial"}})") == Errc::InvalidConfig);
  CHECK_THROWS_AS(load_config("/nonexistent/lensfold.json"), LensError);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(Errc::InvalidConfig) == 2);
  CHECK(exit_code_for(Errc::InvalidProfile) == 2);
  CHECK(exit_code_for(Errc::InfeasiblePattern) == 3);
  CHECK(exit_code_for(Errc::InvalidPattern) == 3);
  CHECK(exit_code_for(Errc::FoldDepthInfeasible) == 4);
  CHECK(exit_code_for(Errc::TrapezoidInfeasible) == 4);
  CHECK(exit_code_for(Errc::MVInconsistent) == 1);
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 2.5e17, -7.125, 0.87990028715432755}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(-0.0) == "0");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("pattern SVG and JSON") {
  const LensTessellation T(LensProfile::sine(0.3), 0.5, 2.0);
  const std::string svg = pattern_svg(T, 3, 0, 1);
  CHECK(count(svg, "<polyline") == 12);
  CHECK(count(svg, "class=\"mountain\"") == 6);
  CHECK(count(svg, "class=\"valley\"") == 6);
  CHECK(count(svg, "stroke-dasharray") == 6);
  CHECK(count(svg, "<circle") == 8);

  const auto j = nlohmann::json::parse(pattern_json(T, 2, 0, 1, 33));
  CHECK(j["creases"].size() == 8);
  const auto& c = j["creases"][0];
  CHECK(c["mv"] == "mountain");
  CHECK(c["points"].size() == 33);
  CHECK(c["points"][16][1].get<double>() == Approx(0.3));
}

TEST_CASE("u = 0 puts the odd-row vertices above the even ones") {
  const LensTessellation T(LensProfile::sine(0.2), 0.0, 1.0);
  const auto j = nlohmann::json::parse(pattern_json(T, 2, 0, 1, 17));
  for (const auto& c : j["creases"]) {
    if (c["j"] == 1) {
      const double x0 = c["points"][0][0], x1 = c["points"][16][0];
      CHECK(std::abs(x0 - std::round(x0)) < 1e-15);
      CHECK(std::abs(x1 - std::round(x1)) < 1e-15);
    }
  }
}

TEST_CASE("tabulated profile from CSV matches the analytic pattern") {
  const fs::path dir = scratch_dir("table");
  const oracle::Sine o{0.3};
  {
    std::ofstream f(dir / "sine.csv");
    f << "t,ell\n";
    for (int i = 0; i <= 200; ++i) f << format_double(i / 200.0) << "," << format_double(i == 200 ? 0.0 : o.l(i / 200.0)) << "\n";
  }
  ProfileSpec spec;
  spec.kind = "tabulated";
  spec.table = (dir / "sine.csv").string();
  const LensTessellation tab(make_profile(spec), 0.5, 2.0);
  const LensTessellation ana(LensProfile::sine(0.3), 0.5, 2.0);
  const auto a = nlohmann::json::parse(pattern_json(tab, 2, 0, 1, 65));
  const auto b = nlohmann::json::parse(pattern_json(ana, 2, 0, 1, 65));
  double worst = 0.0;
  for (std::size_t c = 0; c < a["creases"].size(); ++c) {
    for (std::size_t k = 0; k < 65; ++k) {
      for (int d = 0; d < 2; ++d) {
        worst = std::max(worst, std::abs(a["creases"][c]["points"][k][d].get<double>() -
                                         b["creases"][c]["points"][k][d].get<double>()));
      }
    }
  }
  CHECK(worst < 1e-7);

  std::ofstream(dir / "bad.csv") << "t,ell\n0,0\n0.5,oops\n1,0\n";
  spec.table = (dir / "bad.csv").string();
  CHECK_THROWS_AS(make_profile(spec), LensError);
}

TEST_CASE("OBJ export groups every module and patch") {
  const LensTessellation T(LensProfile::sine(0.3), 0.5, 2.0);
  const KiteModule m = build_kite_module(T, 1.6, 65);
  const std::string obj = tiling_obj(tile(m, 3, 3));
  CHECK(count(obj, "\ng module_") + (obj.rfind("g module_", 0) == 0 ? 1 : 0) == 9);
  CHECK(count(obj, "\no module_") == 27);
  CHECK(count(obj, "/patch_M\n") == 9);
  CHECK(count(obj, "\nv ") == count(obj, "\nvt "));
  // y-up: the folded module lies below the paper plane, so written y < 0.
  std::istringstream in(module_obj(m));
  std::string line;
  double max_written_y = -1.0;
  while (std::getline(in, line)) {
    if (line.rfind("v ", 0) == 0) {
      double x, y, z;
      std::sscanf(line.c_str(), "v %lf %lf %lf", &x, &y, &z);
      max_written_y = std::max(max_written_y, y);
    }
  }
  CHECK(max_written_y <= 1e-12);
}

TEST_CASE("report JSON writes null for non-finite residuals") {
  FoldReport rep;
  rep.pattern_hash = "0123456789abcdef";
  rep.checks.push_back(make_record("broken", std::nan(""), 1.0, 0.0));
  rep.checks.back().status = "error";
  const auto j = nlohmann::json::parse(report_json(rep, FoldSummary{}));
  CHECK(j.dump().find("null") != std::string::npos);
  CHECK(j.dump().find("broken") != std::string::npos);
}

TEST_CASE("manifest CSV") {
  const std::string csv = manifest_csv({{0, 1.9, 0.1, 0.2}, {1, 1.5, 0.9, 0.3}});
  CHECK(csv.rfind("frame,vstar,theta_total,max_residual\n", 0) == 0);
  CHECK(count(csv, "\n") == 3);
}

TEST_CASE("CLI exit codes") {
  const fs::path dir = scratch_dir("cli");
  const std::string out = " --out-dir " + dir.string();
  CHECK(run_cli("limits --amp 0.3 --u 0.5 --v 2") == 0);
  CHECK(run_cli("pattern --amp 0.3 --u 0.5 --v 2" + out) == 0);
  CHECK(fs::exists(dir / "pattern.svg"));
  CHECK(run_cli("fold --amp 0.3 --u 0.5 --v 2 --vstar 1.6 --samples 256 --no-convergence" + out) == 0);
  CHECK(fs::exists(dir / "fold.obj"));
  CHECK(run_cli("fold --amp 0.3 --u 0 --v 1.5 --vstar 1.2" + out) == 3);
  CHECK(run_cli("fold --amp 0.45 --u 0.5 --v 1 --vstar 0.9" + out) == 3);
  CHECK(run_cli("fold --amp 0.3 --u 0.5 --v 2 --vstar 0.44" + out) == 4);
  // Too coarse for the length tolerance: verification fails.
  CHECK(run_cli("fold --amp 0.3 --u 0.5 --v 2 --vstar 1.2 --samples 96 --no-convergence" + out) == 1);
  CHECK(run_cli("fold --amp 0.3 --u 0.5 --v 2 --vstar 1.6 --samples 10" + out) == 2);
  CHECK(run_cli("fold --amp 0.3 --u 0.5 --v 2" + out) == 2);
  CHECK(run_cli("fold --config /nonexistent.json" + out) == 2);
  CHECK(run_cli("limits --amp -1") == 2);
  std::ofstream(dir / "cfg.json") << R"({"profile": {"kind": "sine", "amp": 0.3}, "u": 0.5, "v": 2, "vstar": 1.2,
                                        "samples": 512, "convergence": false})";
  CHECK(run_cli("fold --config " + (dir / "cfg.json").string() + out) == 0);
  const auto rep = nlohmann::json::parse(slurp(dir / "report.json"));
  CHECK(rep.dump().find("1.2") != std::string::npos);
}
