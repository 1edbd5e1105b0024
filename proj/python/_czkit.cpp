#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "czkit/czdecomp.hpp"
#include "czkit/io.hpp"
#include "czkit/mainlemma.hpp"
#include "czkit/maximal.hpp"
#include "czkit/spaces.hpp"

namespace py = pybind11;
using namespace czkit;

namespace {

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

json from_py(const py::object& o) {
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

MaximalKind kind_of(const std::string& s) {
    if (s == "grand_upper") return MaximalKind::grand_upper;
    if (s == "grand_lower") return MaximalKind::grand_lower;
    if (s == "hl_lower") return MaximalKind::hl_lower;
    if (s == "hl_upper") return MaximalKind::hl_upper;
    throw Error(ErrorKind::InvalidArgument, "unknown maximal kind '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(_czkit, m) {
    py::register_exception<Error>(m, "CzkitError");

    py::class_<DiscreteMeasure>(m, "Measure")
        .def(py::init<int, double, std::vector<Point>, std::vector<double>>(), py::arg("dim"), py::arg("n"),
             py::arg("points"), py::arg("weights"))
        .def_property_readonly("dim", &DiscreteMeasure::dim)
        .def_property_readonly("n", &DiscreteMeasure::n)
        .def_property_readonly("total_mass", &DiscreteMeasure::total_mass)
        .def_property_readonly("weights", &DiscreteMeasure::weights)
        .def("points", &DiscreteMeasure::points)
        .def("__len__", &DiscreteMeasure::size)
        .def("to_dict", [](const DiscreteMeasure& mu) { return to_py(measure_to_json(mu)); })
        .def_static("from_dict", [](const py::object& o) { return measure_from_json(from_py(o)); })
        .def_static("load", &load_measure)
        .def("save", [](const DiscreteMeasure& mu, const std::string& p) { save_measure(mu, p); });

    m.def(
        "generate",
        [](const std::string& kind, std::uint64_t seed, int dim, int depth, int points_per_axis, double ratio,
           int clusters, int per_cluster) {
            GenParams p;
            p.dim = dim;
            p.depth = depth;
            p.points_per_axis = points_per_axis;
            p.ratio = ratio;
            p.clusters = clusters;
            p.per_cluster = per_cluster;
            return generate_measure(parse_gen_kind(kind), p, seed);
        },
        py::arg("kind"), py::arg("seed") = 0, py::arg("dim") = 1, py::arg("depth") = 5,
        py::arg("points_per_axis") = 4, py::arg("ratio") = 1.0 / 3.0, py::arg("clusters") = 3,
        py::arg("per_cluster") = 16);

    m.def("growth_constant", [](const DiscreteMeasure& mu) {
        auto g = growth_constant(mu);
        return py::dict(py::arg("ball_constant") = g.ball_constant, py::arg("cube_constant") = g.cube_constant,
                        py::arg("degenerate") = g.degenerate);
    });

    m.def(
        "maximal",
        [](const DiscreteMeasure& mu, const std::vector<double>& f, const std::string& kind,
           const std::vector<Point>& queries, double rho) {
            return maximal_field(mu, f, kind_of(kind), queries.empty() ? mu.points() : queries, rho);
        },
        py::arg("mu"), py::arg("f"), py::arg("kind"), py::arg("queries") = std::vector<Point>{},
        py::arg("rho") = 2.0);

    m.def("rbmo_norm", [](const DiscreteMeasure& mu, const std::vector<double>& f) { return rbmo_norm(mu, f).value; });
    m.def("h1_upper_bound",
          [](const DiscreteMeasure& mu, const std::vector<double>& f) { return h1_upper_bound(mu, f).bound; });

    m.def("cz_decompose", [](const DiscreteMeasure& mu, const std::vector<double>& f, double lambda) {
        return to_py(cz_to_json(cz_decompose(mu, f, lambda)));
    });

    m.def(
        "main_lemma",
        [](const DiscreteMeasure& mu, const std::vector<double>& f, const py::object& params) {
            Cube R0 = auto_R0(mu);
            MainParams p = default_params(mu, instance_constants(mu, R0));
            if (!params.is_none()) p = params_from_json(from_py(params), p);
            std::vector<Check> claims;
            auto dec = run_main_lemma(mu, f, R0, p, 3, &claims);
            return to_py(main_to_json(dec, claims, verify_kernels(mu, dec, nullptr)));
        },
        py::arg("mu"), py::arg("f"), py::arg("params") = py::none());
}
