#include <complex>
#include <optional>

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "hyperlab/hausdorff.hpp"
#include "hyperlab/pipeline.hpp"
#include "hyperlab/shadows.hpp"

namespace py = pybind11;
using namespace hyperlab;

namespace {

// Python side: points are complex numbers, boundary points are floats or None
// for infinity, product points are pairs.
using Pt = std::complex<double>;
using PPt = std::pair<Pt, Pt>;
using Bnd = std::optional<double>;

HPoint hp(Pt z) { return HPoint{z.real(), z.imag()}; }
PPoint pp(const PPt& x) { return {hp(x.first), hp(x.second)}; }
HBoundaryPoint hb(Bnd v) { return v ? HBoundaryPoint::finite(*v) : HBoundaryPoint::infinity(); }
Bnd from_hb(const HBoundaryPoint& b) { return b.is_finite() ? Bnd{b.value()} : std::nullopt; }
PPt from_pp(const PPoint& x) { return {x.p1.z(), x.p2.z()}; }

PBoundaryPoint pb(Bnd xi1, Bnd xi2, double theta) {
  const Slope s{theta};
  if (theta == 0.0) return PBoundaryPoint::sing1(hb(xi1));
  if (theta == kHalfPi) return PBoundaryPoint::sing2(hb(xi2));
  return PBoundaryPoint::regular(hb(xi1), hb(xi2), s);
}

RunConfig config(const std::string& text) { return RunConfig::from_json(Json::parse(text)); }

py::dict estimate_dict(const GrowthEstimate& e) {
  py::dict d;
  d["theta"] = e.theta;
  d["value"] = e.value;
  d["stderr"] = e.stderr_;
  d["counts"] = e.counts;
  d["window"] = std::pair{e.window.n_min, e.window.n_max};
  d["flags"] = e.flags;
  d["low_confidence"] = e.low_confidence;
  return d;
}

template <class T>
py::array_t<T> column(const std::vector<OrbitAtom>& atoms, T (*get)(const OrbitAtom&)) {
  std::vector<T> v;
  v.reserve(atoms.size());
  for (const OrbitAtom& a : atoms) v.push_back(get(a));
  return py::array_t<T>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict atoms_dict(const std::vector<OrbitAtom>& atoms) {
  using C = std::complex<double>;
  py::list w1, w2;
  for (const OrbitAtom& a : atoms) {
    w1.append(a.word1.to_string());
    w2.append(a.word2.to_string());
  }
  py::dict d;
  d["word1"] = w1;
  d["word2"] = w2;
  d["dist"] = column<double>(atoms, [](const OrbitAtom& a) { return a.dist; });
  d["h1"] = column<double>(atoms, [](const OrbitAtom& a) { return a.hvec.h1; });
  d["h2"] = column<double>(atoms, [](const OrbitAtom& a) { return a.hvec.h2; });
  d["theta"] = column<double>(atoms, [](const OrbitAtom& a) { return a.slope.value(); });
  d["p1"] = column<C>(atoms, [](const OrbitAtom& a) { return a.point.p1.z(); });
  d["p2"] = column<C>(atoms, [](const OrbitAtom& a) { return a.point.p2.z(); });
  return d;
}

// Stage results cross as JSON text; the Python wrapper decodes them.
std::string dump(const Json& j) { return j.dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geometry, orbit growth and limit-set tools for products of two hyperbolic planes";
  m.attr("__version__") = tool_version();
  m.attr("HALF_PI") = kHalfPi;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DependencyError>(m, "DependencyError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<InsufficientData>(m, "InsufficientData", PyExc_RuntimeError);
  py::register_exception<AtomBudgetExceeded>(m, "AtomBudgetExceeded", PyExc_RuntimeError);

  m.def("h_distance", [](Pt x, Pt z) { return h_distance(hp(x), hp(z)); });
  m.def("busemann", [](Bnd xi, Pt x, Pt y) { return busemann(hb(xi), hp(x), hp(y)); }, py::arg("xi"),
        py::arg("x"), py::arg("y"));
  m.def("ray_point", [](Pt x, Bnd xi, double t) { return ray_point(hp(x), hb(xi), t).z(); });
  m.def("dist_to_ray", [](Pt z, Pt x, Bnd xi) { return dist_to_ray(hp(z), hp(x), hb(xi)); });

  m.def("p_distance", [](const PPt& x, const PPt& y) { return p_distance(pp(x), pp(y)); });
  m.def("distance_vector", [](const PPt& x, const PPt& y) {
    const DistanceVector h = distance_vector(pp(x), pp(y));
    return std::pair{h.h1, h.h2};
  });
  m.def("slope_of", [](const PPt& x, const PPt& y) { return slope_of(pp(x), pp(y)).value(); });
  m.def("directional_distance",
        [](double theta, const PPt& x, const PPt& y) { return directional_distance(Slope{theta}, pp(x), pp(y)); },
        py::arg("theta"), py::arg("x"), py::arg("y"));
  m.def("product_busemann",
        [](Bnd xi1, Bnd xi2, double theta, const PPt& x, const PPt& y) {
          return product_busemann(pb(xi1, xi2, theta), pp(x), pp(y));
        },
        py::arg("xi1"), py::arg("xi2"), py::arg("theta"), py::arg("x"), py::arg("y"),
        "Busemann function of the boundary point (xi1, xi2) at slope theta; theta 0 or pi/2 gives the "
        "singular points, ignoring the unused coordinate.");
  m.def("p_ray_point",
        [](const PPt& x, Bnd xi1, Bnd xi2, double theta, double t) {
          return from_pp(p_ray_point(pp(x), pb(xi1, xi2, theta), t));
        });
  m.def("dist_to_chamber", [](const PPt& y, const PPt& apex, Bnd xi1, Bnd xi2, double theta) {
    return dist_to_chamber(pp(y), pp(apex), pb(xi1, xi2, theta));
  });
  m.def("shadow_contains", [](const PPt& apex, const PPt& center, double c, Bnd xi1, Bnd xi2, double theta) {
    return shadow_contains(ShadowSpec{pp(apex), pp(center), c}, pb(xi1, xi2, theta));
  });

  m.def("config_defaults", [] { return dump(RunConfig{}.to_json()); });
  m.def("config_normalize", [](const std::string& text) { return dump(config(text).to_json()); });
  m.def("config_hash", [](const std::string& text) { return config_hash(config(text)); });

  m.def("certify", [](const std::string& text) {
    const CertificateReport r = certify(config(text).group());
    py::list checks;
    for (const auto& c : r.checks) checks.append(py::make_tuple(c.name, c.passed, c.witness));
    return py::make_tuple(r.passed(), checks);
  });
  m.def(
      "orbit_ball",
      [](const std::string& text, std::optional<double> radius, int threads) {
        const RunConfig c = config(text);
        std::vector<OrbitAtom> atoms;
        {
          py::gil_scoped_release release;
          atoms = orbit_ball(c.group(), c.basepoint, radius.value_or(c.radius), c.max_atoms, threads);
        }
        return atoms_dict(atoms);
      },
      py::arg("config"), py::arg("radius") = py::none(), py::arg("threads") = 1);
  m.def(
      "factor_exponent",
      [](const std::string& text, int factor, std::optional<double> radius) {
        const RunConfig c = config(text);
        const double r = radius.value_or(c.factor_radius);
        const ProductGroup g = c.group();
        if (factor != 1 && factor != 2) throw std::invalid_argument("factor must be 1 or 2");
        const auto ball = factor == 1 ? factor_ball(g.factor1, c.basepoint.p1, r, c.max_atoms)
                                      : factor_ball(g.factor2, c.basepoint.p2, r, c.max_atoms);
        return estimate_dict(estimate_factor_exponent(ball, r, default_window(r)));
      },
      py::arg("config"), py::arg("factor"), py::arg("radius") = py::none());
  m.def(
      "psi_grid",
      [](const std::string& text, std::optional<double> radius) {
        const RunConfig c = config(text);
        const double r = radius.value_or(c.radius);
        PsiGrid g;
        {
          py::gil_scoped_release release;
          const auto atoms = orbit_ball(c.group(), c.basepoint, r, c.max_atoms);
          g = psi_grid(atoms, r, c.thetas(), c.eps_schedule, default_window(r));
        }
        py::dict d;
        d["thetas"] = g.thetas;
        d["deltas"] = g.deltas;
        d["stderrs"] = g.stderrs;
        d["theta_star"] = g.theta_star;
        d["delta_gamma"] = g.delta_gamma;
        return d;
      },
      py::arg("config"), py::arg("radius") = py::none());
  m.def(
      "supporting_line",
      [](std::vector<double> thetas, std::vector<double> deltas, double theta) {
        const SupportingLine s = supporting_line(make_grid(std::move(thetas), std::move(deltas)), Slope{theta});
        return std::pair{s.b.b1, s.b.b2};
      },
      py::arg("thetas"), py::arg("deltas"), py::arg("theta"));

  py::class_<Pipeline>(m, "Pipeline")
      .def(py::init([](const std::string& text, const std::filesystem::path& out, int threads) {
             return std::make_unique<Pipeline>(config(text), out, threads);
           }),
           py::arg("config"), py::arg("out"), py::arg("threads") = 1)
      .def("certify", [](Pipeline& p) { return dump(p.certify()); })
      .def("orbit", [](Pipeline& p) { return dump(p.orbit()); }, py::call_guard<py::gil_scoped_release>())
      .def("growth", [](Pipeline& p) { return dump(p.growth()); }, py::call_guard<py::gil_scoped_release>())
      .def("density", [](Pipeline& p) { return dump(p.density()); }, py::call_guard<py::gil_scoped_release>())
      .def("shadow", [](Pipeline& p) { return dump(p.shadow()); }, py::call_guard<py::gil_scoped_release>())
      .def("hausdorff", [](Pipeline& p) { return dump(p.hausdorff()); }, py::call_guard<py::gil_scoped_release>())
      .def("report", [](Pipeline& p) { return dump(p.report()); })
      .def_property_readonly("out", [](const Pipeline& p) { return p.out(); })
      .def_property_readonly("config_hash", [](const Pipeline& p) { return config_hash(p.config()); });
}
