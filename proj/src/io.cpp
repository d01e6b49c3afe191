#include "lensfold/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "lensfold/errors.hpp"

namespace lensfold {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::InvalidConfig:
    case Errc::InvalidProfile:
    case Errc::OutOfDomain:
      return kExitConfig;
    case Errc::InvalidPattern:
    case Errc::InfeasiblePattern:
      return kExitUnfoldable;
    case Errc::FoldDepthInfeasible:
    case Errc::TrapezoidInfeasible:
    case Errc::SingularHeight:
      return kExitInfeasibleVstar;
    default:
      return kExitCheckFailed;
  }
}

std::string format_double(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

// ---------------------------------------------------------------- config

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw LensError(Errc::InvalidConfig, msg); }

template <typename T>
T get_as(const ordered_json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    config_error(std::string("config key '") + key + "' has the wrong type");
  }
}

void apply_tolerances(const ordered_json& j, Tolerances& tol) {
  const std::map<std::string, double*> fields{
      {"arc", &tol.arc},
      {"unit", &tol.unit},
      {"orth", &tol.orth},
      {"geo", &tol.geo},
      {"k_min", &tol.k_min},
      {"angle", &tol.angle},
      {"length", &tol.length},
      {"chord", &tol.chord},
      {"curvature_relation", &tol.curvature_relation},
      {"fold_angle_floor", &tol.fold_angle_floor},
      {"ruling_angle_floor", &tol.ruling_angle_floor},
      {"developable", &tol.developable},
      {"semikink_envelope", &tol.semikink_envelope},
      {"seam", &tol.seam},
      {"seam_normal", &tol.seam_normal},
      {"contact", &tol.contact},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) config_error("unknown tolerance '" + key + "'");
    if (!value.is_number()) config_error("tolerance '" + key + "' must be a number");
    *it->second = value.get<double>();
  }
}

}  // namespace

JobConfig parse_config(const std::string& text, JobConfig cfg) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "profile") {
      if (!value.is_object()) config_error("'profile' must be an object");
      for (const auto& [pk, pv] : value.items()) {
        if (pk == "kind") cfg.profile.kind = get_as<std::string>(value, "kind");
        else if (pk == "amp") cfg.profile.amp = get_as<double>(value, "amp");
        else if (pk == "height") cfg.profile.height = get_as<double>(value, "height");
        else if (pk == "coeffs") cfg.profile.coeffs = get_as<std::vector<double>>(value, "coeffs");
        else if (pk == "table") cfg.profile.table = get_as<std::string>(value, "table");
        else config_error("unknown profile key '" + pk + "'");
        (void)pv;
      }
    } else if (key == "u") {
      cfg.u = get_as<double>(j, "u");
    } else if (key == "v") {
      cfg.v = get_as<double>(j, "v");
    } else if (key == "vstar") {
      cfg.vstar = get_as<double>(j, "vstar");
    } else if (key == "samples") {
      cfg.samples = get_as<std::size_t>(j, "samples");
    } else if (key == "rows") {
      cfg.rows = get_as<int>(j, "rows");
    } else if (key == "cols") {
      cfg.cols = get_as<int>(j, "cols");
    } else if (key == "frames") {
      cfg.frames = get_as<std::size_t>(j, "frames");
    } else if (key == "out_dir") {
      cfg.out_dir = get_as<std::string>(j, "out_dir");
    } else if (key == "report") {
      cfg.report = get_as<std::string>(j, "report");
    } else if (key == "verify") {
      cfg.verify = get_as<bool>(j, "verify");
    } else if (key == "convergence") {
      cfg.convergence = get_as<bool>(j, "convergence");
    } else if (key == "checks") {
      const auto names = get_as<std::vector<std::string>>(j, "checks");
      const auto& known = check_families();
      for (const auto& n : names) {
        if (std::find(known.begin(), known.end(), n) == known.end()) config_error("unknown check '" + n + "'");
      }
      cfg.checks = {names.begin(), names.end()};
    } else if (key == "tolerances") {
      if (!value.is_object()) config_error("'tolerances' must be an object");
      apply_tolerances(value, cfg.tol);
    } else if (key == "seed") {
      cfg.seed = get_as<std::uint64_t>(j, "seed");
    } else if (key == "chords") {
      cfg.chords = get_as<std::size_t>(j, "chords");
    } else {
      config_error("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

JobConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const JobConfig& c) {
  if (!(c.u >= 0.0 && c.u < 1.0)) config_error("u must lie in [0, 1)");
  if (!(c.v > 0.0) || !std::isfinite(c.v)) config_error("v must be positive");
  if (c.samples < 64) config_error("samples must be at least 64");
  if (c.rows < 1 || c.cols < 1) config_error("rows and cols must be at least 1");
  if (c.frames < 2) config_error("frames must be at least 2");
  if (c.vstar && !std::isfinite(*c.vstar)) config_error("vstar must be finite");
  if (c.chords < 1) config_error("chords must be at least 1");
  const auto& k = c.profile.kind;
  if (k != "sine" && k != "circular_arc" && k != "polynomial" && k != "tabulated") {
    config_error("unknown profile kind '" + k + "'");
  }
  if (k == "polynomial" && c.profile.coeffs.empty()) config_error("polynomial profile needs coeffs");
  if (k == "tabulated" && c.profile.table.empty()) config_error("tabulated profile needs a table file");
}

LensProfile read_table_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LensError(Errc::InvalidConfig, "cannot read profile table " + path);
  std::vector<double> t, l;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a = 0.0, b = 0.0;
    if (!(ls >> a >> b)) {
      if (t.empty()) continue;  // header
      throw LensError(Errc::InvalidConfig, path + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    t.push_back(a);
    l.push_back(b);
  }
  return LensProfile::tabulated(std::move(t), std::move(l));
}

LensProfile make_profile(const ProfileSpec& p) {
  if (p.kind == "sine") return LensProfile::sine(p.amp);
  if (p.kind == "circular_arc") return LensProfile::circular_arc(p.height);
  if (p.kind == "polynomial") return LensProfile::polynomial(p.coeffs);
  if (p.kind == "tabulated") return read_table_profile(p.table);
  throw LensError(Errc::InvalidConfig, "unknown profile kind '" + p.kind + "'");
}

// ---------------------------------------------------------------- pattern

namespace {

struct CreaseLine {
  int i, j, sign;
  MV mv;
  std::vector<Vec2> points;
};

std::vector<CreaseLine> pattern_creases(const LensTessellation& tess, int cols, int row_lo, int row_hi,
                                        std::size_t samples) {
  std::vector<CreaseLine> out;
  for (int j = row_lo; j <= row_hi; ++j) {
    for (int i = 0; i < cols; ++i) {
      for (int sign : {1, -1}) {
        CreaseLine c{i, j, sign, LensTessellation::crease_mv(j), {}};
        for (std::size_t k = 0; k < samples; ++k) {
          const double t = static_cast<double>(k) / static_cast<double>(samples - 1);
          c.points.push_back(tess.crease_point(i, j, sign, t));
        }
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

std::vector<std::pair<std::array<int, 2>, Vec2>> pattern_vertices(const LensTessellation& tess, int cols, int row_lo,
                                                                   int row_hi) {
  std::vector<std::pair<std::array<int, 2>, Vec2>> out;
  for (int j = row_lo; j <= row_hi; ++j) {
    for (int i = 0; i <= cols; ++i) out.push_back({{i, j}, tess.vertex(i, j)});
  }
  return out;
}

}  // namespace

std::string pattern_svg(const LensTessellation& tess, int cols, int row_lo, int row_hi, std::size_t samples) {
  const auto creases = pattern_creases(tess, cols, row_lo, row_hi, samples);
  const auto verts = pattern_vertices(tess, cols, row_lo, row_hi);
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& c : creases) {
    for (const auto& p : c.points) {
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
  }
  const double scale = 100.0;
  const double pad = 0.1;
  const auto X = [&](double x) { return format_double(std::round((x - xmin + pad) * scale * 1e4) / 1e4); };
  const auto Y = [&](double y) { return format_double(std::round((ymax - y + pad) * scale * 1e4) / 1e4); };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_double((xmax - xmin + 2 * pad) * scale)
    << "\" height=\"" << format_double((ymax - ymin + 2 * pad) * scale) << "\">\n";
  o << "<!-- " << tess.canonical() << " -->\n";
  for (const auto& c : creases) {
    o << "<polyline class=\"" << to_string(c.mv) << "\" data-i=\"" << c.i << "\" data-j=\"" << c.j
      << "\" data-sign=\"" << (c.sign > 0 ? "+" : "-") << "\" fill=\"none\" stroke=\""
      << (c.mv == MV::Mountain ? "#c0392b" : "#2c6fbb") << "\" stroke-width=\"1.5\"";
    if (c.mv == MV::Valley) o << " stroke-dasharray=\"6 4\"";
    o << " points=\"";
    for (std::size_t k = 0; k < c.points.size(); ++k) {
      if (k) o << ' ';
      o << X(c.points[k].x()) << ',' << Y(c.points[k].y());
    }
    o << "\"/>\n";
  }
  for (const auto& [ij, p] : verts) {
    o << "<circle cx=\"" << X(p.x()) << "\" cy=\"" << Y(p.y()) << "\" r=\"2.5\" fill=\"black\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string pattern_json(const LensTessellation& tess, int cols, int row_lo, int row_hi, std::size_t samples) {
  ordered_json j;
  j["profile"] = {{"kind", tess.profile().kind_name()}, {"parameters", tess.profile().parameters()}};
  j["u"] = tess.u();
  j["v"] = tess.v();
  ordered_json creases = ordered_json::array();
  for (const auto& c : pattern_creases(tess, cols, row_lo, row_hi, samples)) {
    ordered_json pts = ordered_json::array();
    for (const auto& p : c.points) pts.push_back({p.x(), p.y()});
    creases.push_back({{"i", c.i}, {"j", c.j}, {"sign", c.sign}, {"mv", to_string(c.mv)}, {"points", pts}});
  }
  j["creases"] = creases;
  ordered_json verts = ordered_json::array();
  for (const auto& [ij, p] : pattern_vertices(tess, cols, row_lo, row_hi)) {
    verts.push_back({{"i", ij[0]}, {"j", ij[1]}, {"x", p.x()}, {"y", p.y()}});
  }
  j["vertices"] = verts;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- meshes

std::string tiling_obj(const TiledFolding& tf) {
  const KiteModule& m = *tf.module;
  std::array<TriangleMesh, 3> meshes{mesh_patch(m, PatchId::U), mesh_patch(m, PatchId::M), mesh_patch(m, PatchId::L)};
  std::ostringstream o;
  o << "# " << m.tess.canonical() << " vstar=" << format_double(m.vstar) << " n=" << m.t.size() << "\n";
  std::size_t base = 1;
  for (const Tile& t : tf.tiles) {
    const std::string group = "module_" + std::to_string(t.col) + "_" + std::to_string(t.row);
    o << "g " << group << "\n";
    for (PatchId id : {PatchId::U, PatchId::M, PatchId::L}) {
      const TriangleMesh& mesh = meshes[static_cast<int>(id)];
      o << "o " << group << "/patch_" << to_string(id) << "\n";
      for (const Vec3& p : mesh.vertices) {
        const Vec3 q = t.map.apply(p);
        o << "v " << format_double(q.x()) << ' ' << format_double(q.z()) << ' ' << format_double(-q.y()) << "\n";
      }
      for (const Vec2& uv : mesh.uv) {
        const Vec2 q = t.map2d.apply(uv);
        o << "vt " << format_double(q.x()) << ' ' << format_double(q.y()) << "\n";
      }
      for (const auto& f : mesh.faces) {
        o << 'f';
        for (int k : f) o << ' ' << base + k << '/' << base + k;
        o << "\n";
      }
      base += mesh.vertices.size();
    }
  }
  return o.str();
}

std::string module_obj(const KiteModule& module) { return tiling_obj(tile(module, 1, 1)); }

std::string curve_csv(const SampledCurve2D& c) {
  std::ostringstream o;
  o << "s,x,y,K\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    o << format_double(c.s(i)) << ',' << format_double(c.point(i).x()) << ',' << format_double(c.point(i).y()) << ','
      << format_double(signed_curvature_2d_at(c, i)) << "\n";
  }
  return o.str();
}

std::string curve_csv(const SampledCurve3D& c, const Tolerances& tol) {
  const auto frames = compute_frames(c, tol);
  std::ostringstream o;
  o << "s,x,y,z,K,tau\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec3& p = c.point(i);
    o << format_double(c.s(i)) << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
      << format_double(p.z()) << ',' << format_double(frames[i].K) << ','
      << (frames[i].frenet ? format_double(frames[i].frenet->torsion) : std::string()) << "\n";
  }
  return o.str();
}

// ---------------------------------------------------------------- reports

namespace {

ordered_json number(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

}  // namespace

std::string report_json(const FoldReport& r, const FoldSummary& s) {
  ordered_json j;
  j["pattern_hash"] = r.pattern_hash;
  j["vstar"] = r.vstar;
  j["n"] = r.n;
  j["visible_vertex"] = s.visible_vertex;
  j["vstar_lim"] = s.vstar_lim;
  j["theta_end"] = s.theta_end;
  j["total_turn"] = s.total_turn;
  j["rows"] = s.rows;
  j["cols"] = s.cols;
  j["all_pass"] = r.all_pass();
  j["max_residual_ratio"] = number(r.max_residual_ratio());
  ordered_json checks = ordered_json::array();
  for (const auto& c : r.checks) {
    ordered_json e;
    e["name"] = c.name;
    e["max_residual"] = number(c.max_residual);
    e["tolerance"] = c.tolerance;
    e["pass"] = c.pass;
    e["worst_sample"] = number(c.worst_sample);
    e["status"] = c.status;
    if (!c.detail.empty()) e["detail"] = c.detail;
    checks.push_back(e);
  }
  j["checks"] = checks;
  if (!s.kinks.empty()) {
    ordered_json kinks = ordered_json::array();
    for (const auto& k : s.kinks) {
      kinks.push_back({{"x", k.position2d.x()}, {"y", k.position2d.y()}, {"angle3d", k.angle3d}, {"angle2d", k.angle2d}});
    }
    j["kinks"] = kinks;
  }
  return j.dump(2) + "\n";
}

std::string limits_json(const FoldSetup& setup) {
  ordered_json j;
  j["pattern_hash"] = pattern_hash(setup.tess);
  j["visible_vertex"] = setup.visible_vertex;
  j["vstar_lim"] = setup.limit.vstar_lim;
  j["t_argmin"] = setup.limit.t_argmin;
  j["support_margin"] = setup.limit.support_margin;
  j["v"] = setup.tess.v();
  return j.dump(2) + "\n";
}

std::string manifest_csv(const std::vector<ManifestRow>& rows) {
  std::ostringstream o;
  o << "frame,vstar,theta_total,max_residual\n";
  for (const auto& r : rows) {
    o << r.frame << ',' << format_double(r.vstar) << ',' << format_double(r.theta_total) << ','
      << format_double(r.max_residual) << "\n";
  }
  return o.str();
}

// ---------------------------------------------------------------- commands

namespace {

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LensError(Errc::InvalidConfig, "cannot write " + path.string());
  out << text;
}

LensTessellation make_tessellation(const JobConfig& cfg) {
  return LensTessellation(make_profile(cfg.profile), cfg.u, cfg.v);
}

VerifyOptions verify_options(const JobConfig& cfg) {
  VerifyOptions o;
  o.tol = cfg.tol;
  o.enabled = cfg.checks;
  o.chords_per_patch = cfg.chords;
  o.seed = cfg.seed;
  o.convergence = cfg.convergence;
  return o;
}

template <typename F>
int run_guarded(std::ostream& log, F&& f) {
  try {
    return f();
  } catch (const LensError& e) {
    log << "error: " << e.what();
    if (e.where()) log << " (at " << format_double(*e.where()) << ")";
    log << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

void print_failures(const FoldReport& r, std::ostream& log) {
  for (const auto& c : r.checks) {
    if (!c.pass) {
      log << "check " << c.name << " " << c.status << ": residual " << format_double(c.max_residual)
          << " > tolerance " << format_double(c.tolerance);
      if (!c.detail.empty()) log << " (" << c.detail << ")";
      log << "\n";
    }
  }
}

}  // namespace

int cmd_pattern(const JobConfig& cfg, std::ostream& log) {
  return run_guarded(log, [&] {
    validate(cfg);
    const LensTessellation tess = make_tessellation(cfg);
    const fs::path dir(cfg.out_dir);
    write_file(dir / "pattern.svg", pattern_svg(tess));
    write_file(dir / "pattern.json", pattern_json(tess));
    log << "wrote " << (dir / "pattern.svg").string() << " and " << (dir / "pattern.json").string() << "\n";
    return int(kExitOk);
  });
}

int cmd_limits(const JobConfig& cfg, std::ostream& out, std::ostream& log) {
  return run_guarded(log, [&] {
    validate(cfg);
    const FoldSetup setup = prepare_fold(make_tessellation(cfg), cfg.tol);
    const std::string text = limits_json(setup);
    out << text;
    if (!cfg.report.empty()) write_file(cfg.report, text);
    return int(kExitOk);
  });
}

int cmd_fold(const JobConfig& cfg, std::ostream& log) {
  return run_guarded(log, [&] {
    validate(cfg);
    if (!cfg.vstar) config_error("fold needs --vstar");
    const FoldSetup setup = prepare_fold(make_tessellation(cfg), cfg.tol);
    const KiteModule module = build_kite_module(setup.tess, *cfg.vstar, cfg.samples);
    const TiledFolding tiling = tile(module, cfg.rows, cfg.cols, cfg.tol);
    const fs::path dir(cfg.out_dir);
    write_file(dir / "fold.obj", tiling_obj(tiling));

    FoldSummary summary{setup.visible_vertex, setup.limit.vstar_lim, module.theta_end, module.total_turn,
                        cfg.rows, cfg.cols, {}};
    FoldReport report;
    report.pattern_hash = pattern_hash(setup.tess);
    report.vstar = module.vstar;
    report.n = module.t.size();
    const VerifyOptions opts = verify_options(cfg);
    if (cfg.verify) {
      report = verify_module(module, opts);
      verify_tiling(tiling, report, opts);
      if (opts.convergence) {
        verify_convergence(module, build_kite_module(setup.tess, *cfg.vstar, 2 * cfg.samples - 1), report, opts);
      }
      if (tiling.tiles.size() > 1) summary.kinks = check_kinks_at_vertices(tiling, cfg.tol).kinks;
    }
    const fs::path report_path = cfg.report.empty() ? dir / "report.json" : fs::path(cfg.report);
    write_file(report_path, report_json(report, summary));
    log << "wrote " << (dir / "fold.obj").string() << " and " << report_path.string() << "\n";
    if (!report.all_pass()) {
      print_failures(report, log);
      return int(kExitCheckFailed);
    }
    return int(kExitOk);
  });
}

int cmd_sweep(const JobConfig& cfg, std::ostream& log) {
  return run_guarded(log, [&] {
    validate(cfg);
    const FoldSetup setup = prepare_fold(make_tessellation(cfg), cfg.tol);
    const std::vector<double> values = sweep_values(setup.tess, cfg.frames);
    const fs::path dir(cfg.out_dir);
    VerifyOptions opts = verify_options(cfg);
    opts.convergence = false;
    std::vector<ManifestRow> rows;
    char name[32];
    double last_turn = -1.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      KiteModule module = [&] {
        try {
          return build_kite_module(setup.tess, values[k], cfg.samples);
        } catch (const LensError& e) {
          throw LensError(e.code(), "frame " + std::to_string(k) + ": " + e.what(), e.where());
        }
      }();
      const TiledFolding tiling = tile(module, cfg.rows, cfg.cols, cfg.tol);
      std::snprintf(name, sizeof name, "frame_%03zu", k);
      write_file(dir / (std::string(name) + ".obj"), tiling_obj(tiling));
      FoldReport report;
      report.pattern_hash = pattern_hash(setup.tess);
      report.vstar = module.vstar;
      report.n = module.t.size();
      if (cfg.verify) {
        report = verify_module(module, opts);
        verify_tiling(tiling, report, opts);
      }
      FoldSummary summary{setup.visible_vertex, setup.limit.vstar_lim, module.theta_end, module.total_turn,
                          cfg.rows, cfg.cols, {}};
      write_file(dir / (std::string(name) + ".json"), report_json(report, summary));
      rows.push_back({k, module.vstar, module.total_turn, report.max_residual_ratio()});
      if (k > 0 && !(module.total_turn > last_turn)) {
        log << "note: theta_total does not increase from frame " << k - 1 << " to " << k << "\n";
      }
      last_turn = module.total_turn;
      if (!report.all_pass()) {
        write_file(dir / "manifest.csv", manifest_csv(rows));
        log << "frame " << k << " (v* = " << format_double(module.vstar) << ") failed verification\n";
        print_failures(report, log);
        return int(kExitCheckFailed);
      }
    }
    write_file(dir / "manifest.csv", manifest_csv(rows));
    log << "wrote " << values.size() << " frames and " << (dir / "manifest.csv").string() << "\n";
    return int(kExitOk);
  });
}

}  // namespace lensfold
