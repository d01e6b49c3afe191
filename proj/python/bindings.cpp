#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lensfold/errors.hpp"
#include "lensfold/folding.hpp"
#include "lensfold/io.hpp"
#include "lensfold/profile.hpp"
#include "lensfold/tessellation.hpp"
#include "lensfold/verification.hpp"

namespace py = pybind11;
using namespace lensfold;

namespace {

template <typename P>
Eigen::MatrixXd stack(const std::vector<P>& pts) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(pts.size()), P::RowsAtCompileTime);
  for (std::size_t i = 0; i < pts.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return out;
}

py::dict patch_dict(const RuledPatch& p) {
  py::dict d;
  d["from3"] = stack(p.from3);
  d["to3"] = stack(p.to3);
  d["from2"] = stack(p.from2);
  d["to2"] = stack(p.to2);
  return d;
}

}  // namespace

PYBIND11_MODULE(_lensfold, m) {
  m.doc() = "Folding of lens tessellations with curved creases";

  // Held for the lifetime of the interpreter.
  static py::handle lens_error = py::exception<LensError>(m, "LensError", PyExc_RuntimeError).inc_ref();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const LensError& e) {
      py::object inst = lens_error(e.what());
      inst.attr("code") = to_string(e.code());
      inst.attr("where") = e.where() ? py::cast(*e.where()) : py::none();
      PyErr_SetObject(lens_error.ptr(), inst.ptr());
    }
  });

  py::enum_<MV>(m, "MV").value("Mountain", MV::Mountain).value("Valley", MV::Valley);
  py::enum_<PatchId>(m, "PatchId").value("U", PatchId::U).value("M", PatchId::M).value("L", PatchId::L);

  py::class_<ProfileJet>(m, "ProfileJet")
      .def_readonly("value", &ProfileJet::value)
      .def_readonly("d1", &ProfileJet::d1)
      .def_readonly("d2", &ProfileJet::d2);

  py::class_<LensProfile>(m, "LensProfile")
      .def_static("sine", &LensProfile::sine, py::arg("amplitude"))
      .def_static("circular_arc", &LensProfile::circular_arc, py::arg("height"))
      .def_static("polynomial", &LensProfile::polynomial, py::arg("coefficients"))
      .def_static("tabulated", &LensProfile::tabulated, py::arg("t"), py::arg("values"))
      .def("__call__", &LensProfile::operator(), py::arg("t"))
      .def("jet", &LensProfile::jet, py::arg("t"))
      .def_property_readonly("kind", &LensProfile::kind_name)
      .def_property_readonly("parameters", &LensProfile::parameters)
      .def_property_readonly("apex_t", &LensProfile::apex_t)
      .def_property_readonly("apex_value", &LensProfile::apex_value)
      .def("arclength", &LensProfile::arclength, py::arg("t"))
      .def_property_readonly("total_arclength", &LensProfile::total_arclength)
      .def("t_at_arclength", &LensProfile::t_at_arclength, py::arg("s"))
      .def("__repr__", &LensProfile::canonical);

  py::class_<LensTessellation>(m, "LensTessellation")
      .def(py::init<LensProfile, double, double>(), py::arg("profile"), py::arg("u"), py::arg("v"))
      .def("shifted", &LensTessellation::shifted, py::arg("n"))
      .def_property_readonly("profile", &LensTessellation::profile)
      .def_property_readonly("u", &LensTessellation::u)
      .def_property_readonly("v", &LensTessellation::v)
      .def_property_readonly("shift", &LensTessellation::shift)
      .def("crease_point", &LensTessellation::crease_point, py::arg("i"), py::arg("j"), py::arg("sign"), py::arg("t"))
      .def("vertex", &LensTessellation::vertex, py::arg("i"), py::arg("j"))
      .def_static("crease_mv", &LensTessellation::crease_mv, py::arg("j"))
      .def("min_row_gap", &LensTessellation::min_row_gap)
      .def("__repr__", &LensTessellation::canonical);

  py::class_<VisibilityFailure>(m, "VisibilityFailure")
      .def_readonly("candidate", &VisibilityFailure::candidate)
      .def_readonly("t", &VisibilityFailure::t)
      .def_readonly("reason", &VisibilityFailure::reason);
  py::class_<VisibilityResult>(m, "VisibilityResult")
      .def_readonly("visible_vertex", &VisibilityResult::visible_vertex)
      .def_readonly("passing", &VisibilityResult::passing)
      .def_readonly("failures", &VisibilityResult::failures);
  m.def("visibility_check", [](const LensTessellation& t, std::size_t n) { return visibility_check(t, n); },
        py::arg("tess"), py::arg("n_samples") = 1024);

  py::class_<VStarLimit>(m, "VStarLimit")
      .def_readonly("vstar_lim", &VStarLimit::vstar_lim)
      .def_readonly("t_argmin", &VStarLimit::t_argmin)
      .def_readonly("support_margin", &VStarLimit::support_margin);
  m.def("vstar_limit", &vstar_limit, py::arg("tess"), py::arg("n_samples") = 10000);

  py::class_<FoldSetup>(m, "FoldSetup")
      .def_readonly("tess", &FoldSetup::tess)
      .def_readonly("visible_vertex", &FoldSetup::visible_vertex)
      .def_readonly("limit", &FoldSetup::limit);
  m.def("prepare_fold", [](const LensTessellation& t) { return prepare_fold(t); }, py::arg("tess"));

  py::class_<ThetaProfile>(m, "ThetaProfile")
      .def_readonly("t", &ThetaProfile::t)
      .def_readonly("theta", &ThetaProfile::theta)
      .def_readonly("theta_end", &ThetaProfile::theta_end)
      .def_readonly("total_turn", &ThetaProfile::total_turn);
  m.def("integrate_theta",
        py::overload_cast<const LensTessellation&, double, std::size_t>(&integrate_theta), py::arg("tess"),
        py::arg("vstar"), py::arg("n"));

  py::class_<KiteModule>(m, "KiteModule")
      .def_readonly("tess", &KiteModule::tess)
      .def_readonly("vstar", &KiteModule::vstar)
      .def_readonly("t", &KiteModule::t)
      .def_readonly("theta", &KiteModule::theta)
      .def_readonly("theta_end", &KiteModule::theta_end)
      .def_readonly("total_turn", &KiteModule::total_turn)
      .def_readonly("corner_00", &KiteModule::corner_00)
      .def_readonly("corner_10", &KiteModule::corner_10)
      .def_readonly("apex_upper", &KiteModule::apex_upper)
      .def_readonly("apex_lower", &KiteModule::apex_lower)
      .def_property_readonly("crease_plus", [](const KiteModule& k) { return stack(k.folded_crease_plus.points()); })
      .def_property_readonly("crease_minus", [](const KiteModule& k) { return stack(k.folded_crease_minus.points()); })
      .def_property_readonly("crease_plus_2d", [](const KiteModule& k) { return stack(k.crease_plus_2d.points()); })
      .def_property_readonly("crease_minus_2d", [](const KiteModule& k) { return stack(k.crease_minus_2d.points()); })
      .def("patch", [](const KiteModule& k, PatchId id) { return patch_dict(k.patch(id)); }, py::arg("id"))
      .def("obj", &module_obj);
  m.def("build_kite_module", &build_kite_module, py::arg("tess"), py::arg("vstar"), py::arg("n") = 512,
        py::call_guard<py::gil_scoped_release>());
  m.def("sweep_values", &sweep_values, py::arg("tess"), py::arg("frames"));

  py::class_<TiledFolding>(m, "TiledFolding")
      .def_readonly("rows", &TiledFolding::rows)
      .def_readonly("cols", &TiledFolding::cols)
      .def_property_readonly("tile_count", [](const TiledFolding& t) { return t.tiles.size(); })
      .def_property_readonly("seam_gaps",
                             [](const TiledFolding& t) {
                               std::vector<double> g;
                               for (const auto& s : t.seams) g.push_back(s.max_gap);
                               return g;
                             })
      .def("obj", &tiling_obj);
  m.def("tile", [](const KiteModule& k, int rows, int cols) { return tile(k, rows, cols); }, py::arg("module"),
        py::arg("rows"), py::arg("cols"));

  py::class_<CheckRecord>(m, "CheckRecord")
      .def_readonly("name", &CheckRecord::name)
      .def_readonly("max_residual", &CheckRecord::max_residual)
      .def_readonly("tolerance", &CheckRecord::tolerance)
      .def_readonly("passed", &CheckRecord::pass)
      .def_readonly("worst_sample", &CheckRecord::worst_sample)
      .def_readonly("status", &CheckRecord::status)
      .def_readonly("detail", &CheckRecord::detail)
      .def("__repr__", [](const CheckRecord& c) {
        return "<CheckRecord " + c.name + " " + c.status + " " + format_double(c.max_residual) + ">";
      });
  py::class_<FoldReport>(m, "FoldReport")
      .def_readonly("pattern_hash", &FoldReport::pattern_hash)
      .def_readonly("vstar", &FoldReport::vstar)
      .def_readonly("n", &FoldReport::n)
      .def_readonly("checks", &FoldReport::checks)
      .def("all_pass", &FoldReport::all_pass)
      .def("max_residual_ratio", &FoldReport::max_residual_ratio);

  m.def(
      "verify",
      [](const KiteModule& k, int rows, int cols, bool convergence, std::uint64_t seed) {
        VerifyOptions opts;
        opts.convergence = convergence;
        opts.seed = seed;
        FoldReport rep = verify_module(k, opts);
        if (rows > 1 || cols > 1) verify_tiling(tile(k, rows, cols), rep, opts);
        if (convergence) verify_convergence(k, build_kite_module(k.tess, k.vstar, 2 * k.t.size() - 1), rep, opts);
        return rep;
      },
      py::arg("module"), py::arg("rows") = 1, py::arg("cols") = 1, py::arg("convergence") = false,
      py::arg("seed") = 1, py::call_guard<py::gil_scoped_release>());
  m.def("check_families", &check_families);
  m.def("flat_correspondence_distance", &flat_correspondence_distance);
  m.def("kite_diameter", &kite_diameter);
  m.def("pattern_hash", &pattern_hash);

  m.def("pattern_svg", &pattern_svg, py::arg("tess"), py::arg("cols") = 3, py::arg("row_lo") = 0,
        py::arg("row_hi") = 1, py::arg("samples") = 129);
  m.def("pattern_json", &pattern_json, py::arg("tess"), py::arg("cols") = 3, py::arg("row_lo") = 0,
        py::arg("row_hi") = 1, py::arg("samples") = 129);
}
