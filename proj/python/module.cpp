#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "starscat/experiment.hpp"
#include "starscat/specfun.hpp"

namespace py = pybind11;
using namespace starscat;

namespace {

ExperimentConfig config_from_text(const std::string& text) {
    ExperimentConfig cfg = parse_config(text);
    validate_config(cfg);
    return cfg;
}

std::vector<std::vector<Complex>> table_rows(const GpcTable& t) {
    std::vector<std::vector<Complex>> out;
    for (int m = -t.mu; m <= t.mu; ++m) {
        std::vector<Complex> row;
        for (int n = 0; n <= t.order; ++n) row.push_back(t.at(m, n));
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_starscat, mod) {
    mod.doc() = "Random-surface scattering: coarea cubature and gPC reconstruction";

    mod.def("bessel_j", [](int m, double x) { return eval({m, CylinderKind::BesselJ}, x); });
    mod.def("bessel_y", [](int m, double x) { return eval({m, CylinderKind::BesselY}, x); });
    mod.def("hankel1",
            [](int m, double x) { return eval_complex({m, CylinderKind::Hankel1}, x); });
    mod.def("truncation_order", &truncation_order);

    struct PyShape {
        ShapePtr ptr;
    };
    py::class_<PyShape>(mod, "Shape")
        .def("rho", [](const PyShape& s, double th, double z) { return s.ptr->rho(th, z); })
        .def("r_min", [](const PyShape& s) { return s.ptr->r_min(); })
        .def("r_max", [](const PyShape& s) { return s.ptr->r_max(); })
        .def("fiber_z",
             [](const PyShape& s, double theta, double r) {
                 std::vector<double> z;
                 for (const FiberBranch& b : s.ptr->fiber_solve(theta, r)) z.push_back(b.z);
                 return z;
             })
        .def("id", [](const PyShape& s) { return s.ptr->id(); });
    mod.def("ellipse", [](double a, double b) { return PyShape{ellipse_shape(a, b)}; },
            py::arg("a"), py::arg("b"));
    mod.def("octagon", [](double a, double b) { return PyShape{random_octagon(a, b)}; },
            py::arg("a"), py::arg("b"));

    mod.def("ellipse_grid_points", [](double a, double b, int M, int N) {
        std::vector<std::tuple<double, double, double, double>> out;
        for (const QuadPoint& p : ellipse_grid(a, b, M, N).points())
            out.emplace_back(p.r, p.theta, p.z, p.weight);
        return out;
    });

    mod.def("parse_roundtrip",
            [](const std::string& text) { return emit_config(parse_config(text)); });
    mod.def("default_config", [] { return emit_config(ExperimentConfig{}); });
    mod.def("config_hash",
            [](const std::string& text) { return config_hash(config_from_text(text)); });

    mod.def("gpc_table", [](const std::string& text, double kappa) {
        const ExperimentConfig cfg = config_from_text(text);
        const ShapePtr shape = shape_from(cfg);
        return table_rows(gpc_table_for(cfg, shape, kappa));
    });

    mod.def("run", [](const std::string& command, const std::string& text) {
        const ExperimentConfig cfg = config_from_text(text);
        if (command == "grid") run_grid(cfg);
        else if (command == "reconstruct") run_reconstruct(cfg);
        else if (command == "gpc") run_gpc(cfg);
        else if (command == "validate") run_validate(cfg);
        else throw ConfigError("unknown command: " + command);
    });

    py::register_exception<ConfigError>(mod, "ConfigError");
    py::register_exception<NumericalFailure>(mod, "NumericalFailureError");
}
