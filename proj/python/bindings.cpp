// Thin pybind11 layer. Structured results cross the boundary as JSON text and
// are decoded on the Python side.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "opmap/cli.hpp"
#include "opmap/decomposition.hpp"
#include "opmap/element_io.hpp"
#include "opmap/gallery.hpp"
#include "opmap/map_spec.hpp"

namespace py = pybind11;
using namespace opmap;

namespace {

Element to_element(const Shape& shape, const py::object& x) {
  if (py::isinstance<py::list>(x) || py::isinstance<py::tuple>(x)) {
    std::vector<Mat> blocks;
    for (auto b : x) blocks.push_back(b.cast<Mat>());
    return Element(shape, std::move(blocks));
  }
  Mat m = x.cast<Mat>();
  if (shape.block_count() != 1) throw ShapeMismatch("expected a list of blocks for shape " + shape.str());
  return Element(shape, {m});
}

py::object from_element(const Element& x) {
  if (x.blocks().size() == 1) return py::cast(x.blocks()[0]);
  py::list out;
  for (const auto& b : x.blocks()) out.append(py::cast(b));
  return out;
}

TrialOptions trial_options(long trials, std::uint64_t seed, double tol, int threads, bool real_inputs) {
  TrialOptions o;
  o.trials = trials;
  o.seed = seed;
  o.tol.psd = tol;
  o.tol.validate();
  o.threads = threads;
  o.real_inputs = real_inputs;
  return o;
}

}  // namespace

PYBIND11_MODULE(_opmap, m) {
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<MapDescriptor>(m, "Map")
      .def_static("from_spec", [](const std::string& spec) { return build_map(json::parse(spec)); })
      .def_property_readonly("name", &MapDescriptor::name)
      .def_property_readonly("arity", &MapDescriptor::arity)
      .def_property_readonly("domains",
                             [](const MapDescriptor& map) {
                               std::vector<std::vector<int>> out;
                               for (const auto& s : map.domain_shapes()) out.push_back(s.dims());
                               return out;
                             })
      .def_property_readonly("codomain", [](const MapDescriptor& map) { return map.codomain().dims(); })
      .def_property_readonly("spec_json", [](const MapDescriptor& map) { return map.spec().dump(); })
      .def("__call__", [](const MapDescriptor& map, py::args args) {
        if (static_cast<int>(args.size()) != map.arity())
          throw InputError("expected " + std::to_string(map.arity()) + " arguments");
        Args in;
        for (int i = 0; i < map.arity(); ++i) in.push_back(to_element(map.domain(i), args[i]));
        return from_element(map(in));
      });

  m.def(
      "test_positive",
      [](const MapDescriptor& map, const std::string& notion, long trials, std::uint64_t seed, double tol,
         int threads, bool real_inputs) {
        auto opts = trial_options(trials, seed, tol, threads, real_inputs);
        py::gil_scoped_release release;
        return report_to_json(test_positive(map, Notion::parse(notion), opts)).dump();
      },
      py::arg("map"), py::arg("notion") = "type2(1)", py::arg("trials") = 1000, py::arg("seed") = 0xC5A1,
      py::arg("tol") = 1e-9, py::arg("threads") = 1, py::arg("real_inputs") = false);

  m.def(
      "decompose",
      [](const MapDescriptor& map, int degree, long samples, std::uint64_t seed, int threads) {
        DecompositionOptions o;
        o.samples = samples;
        o.seed = seed;
        o.threads = threads;
        py::gil_scoped_release release;
        auto d = degree < 0 ? decompose_tracial(map, o) : decompose_tracial_nonlinear(map, degree, o);
        return decomposition_to_json(d).dump();
      },
      py::arg("map"), py::arg("degree") = -1, py::arg("samples") = 50, py::arg("seed") = 0xC5A1,
      py::arg("threads") = 1);

  m.def("gallery_list", [] {
    json out = json::array();
    for (const auto& c : gallery::list_cases()) out.push_back(gallery::case_to_json(c));
    return out.dump();
  });

  m.def(
      "gallery_run",
      [](const std::string& id, const std::string& params, std::uint64_t seed, long trials, int threads) {
        gallery::RunOptions o;
        o.seed = seed;
        o.trials = trials;
        o.threads = threads;
        json p = json::parse(params);
        py::gil_scoped_release release;
        return gallery::result_to_json(gallery::run_case(id, p, o)).dump();
      },
      py::arg("id"), py::arg("params") = "{}", py::arg("seed") = 0xC5A1, py::arg("trials") = -1,
      py::arg("threads") = 1);

  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "opmap");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
