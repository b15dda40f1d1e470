#include "ofd/eval.hpp"
#include "ofd/flex_design.hpp"
#include "ofd/io.hpp"
#include "ofd/pipeline.hpp"
#include "ofd/poly_geom.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace ofd;

namespace
{

// nlohmann <-> Python through the json text form
py::object to_python(const json& j)
{
    return py::module_::import("json").attr("loads")(j.dump());
}

json from_python(const py::object& o)
{
    return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

HorizonConfig horizon(int T, double delta_hours)
{
    HorizonConfig h{T, delta_hours, 0};
    h.validate();
    return h;
}

} // namespace

PYBIND11_MODULE(_ofd, m)
{
    m.doc() = "Market bid polytopes for aggregated flexible loads";

    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
    py::register_exception<NoFeasiblePoints>(m, "NoFeasiblePoints", PyExc_ValueError);
    py::register_exception<NonpositiveBeta>(m, "NonpositiveBeta", PyExc_ValueError);
    py::register_exception<InvalidDelta>(m, "InvalidDelta", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<HPolytope>(m, "HPolytope")
        .def(py::init([](Eigen::MatrixXd A, Eigen::VectorXd b) {
            HPolytope P{std::move(A), std::move(b), {}};
            P.validate();
            return P;
        }), py::arg("A"), py::arg("b"))
        .def_readwrite("A", &HPolytope::A)
        .def_readwrite("b", &HPolytope::b)
        .def_property_readonly("dim", &HPolytope::dim)
        .def_property_readonly("rows", &HPolytope::rows)
        .def("contains", [](const HPolytope& P, const Eigen::VectorXd& p, double tol) {
            return membership(P, p, tol);
        }, py::arg("p"), py::arg("tol") = 1e-9)
        .def("__repr__", [](const HPolytope& P) {
            return "<HPolytope dim=" + std::to_string(P.dim()) + " rows=" + std::to_string(P.rows()) + ">";
        });

    py::class_<LiftedPolytope>(m, "LiftedPolytope")
        .def_readonly("E1", &LiftedPolytope::E1)
        .def_readonly("E2", &LiftedPolytope::E2)
        .def_readonly("d", &LiftedPolytope::d)
        .def_property_readonly("dim", &LiftedPolytope::dim)
        .def_property_readonly("aux", &LiftedPolytope::aux)
        .def_property_readonly("rows", &LiftedPolytope::rows);

    m.def("build_G", [](int T, double delta_hours) { return build_G(horizon(T, delta_hours)); },
        py::arg("T"), py::arg("delta_hours") = 1.0);
    m.def("build_reduced_G", [](int T, double delta_hours) { return build_reduced_G(horizon(T, delta_hours)); },
        py::arg("T"), py::arg("delta_hours") = 1.0);
    m.def("build_x",
        [](Eigen::VectorXd p_max, Eigen::VectorXd p_min, double s0, Eigen::VectorXd s_max, Eigen::VectorXd s_min,
            Eigen::VectorXd ramp_up, Eigen::VectorXd ramp_dn, double delta_hours) {
            AggregatorModelVars v;
            const int T = static_cast<int>(p_max.size());
            v.p_max = std::move(p_max);
            v.p_min = std::move(p_min);
            v.s0 = s0;
            v.s_max = std::move(s_max);
            v.s_min = std::move(s_min);
            v.ramp_up = std::move(ramp_up);
            v.ramp_dn = std::move(ramp_dn);
            return build_x(v, horizon(T, delta_hours));
        },
        py::arg("p_max"), py::arg("p_min"), py::arg("s0"), py::arg("s_max"), py::arg("s_min"), py::arg("ramp_up"),
        py::arg("ramp_dn"), py::arg("delta_hours") = 1.0);
    m.def("market_polytope", [](const Eigen::MatrixXd& G, const Eigen::VectorXd& x) {
        return market_polytope(G, x);
    }, py::arg("G"), py::arg("x"));
    m.def("membership", &membership, py::arg("P"), py::arg("p"), py::arg("tol") = 1e-9);

    m.def("ball_approximation", &ball_approximation, py::arg("T"), py::arg("r"), py::arg("delta"));
    m.def("fourier_motzkin", [](const LiftedPolytope& L) { return fourier_motzkin(L); }, py::arg("L"));
    m.def("support", &support, py::arg("P"), py::arg("u"));
    m.def("certify_containment", [](const HPolytope& inner, const HPolytope& outer, double tol) {
        const ContainmentCertificate c = certify_containment(inner, outer, tol);
        py::dict d;
        d["contained"] = c.contained;
        d["worst_slack"] = c.worst_slack;
        d["worst_row"] = c.worst_row;
        return d;
    }, py::arg("inner"), py::arg("outer"), py::arg("tol") = 1e-6);

    m.def("compute_prototype", &compute_prototype, py::arg("feasible"), py::arg("G"));
    m.def("farkas_design", [](const Eigen::VectorXd& x_bar, const Eigen::MatrixXd& G, const HPolytope& PD) {
        return to_python(to_json(farkas_design(x_bar, G, PD)));
    }, py::arg("x_bar"), py::arg("G"), py::arg("PD"));
    m.def("volume_scale", &volume_scale, py::arg("v_prototype"), py::arg("beta"), py::arg("T"));

    m.def("mc_volume", [](const HPolytope& P, long samples, std::uint64_t seed) {
        const VolumeEstimate v = mc_volume(P, samples, seed);
        return py::make_tuple(v.estimate, v.std_error);
    }, py::arg("P"), py::arg("samples") = 100000, py::arg("seed") = 1);

    m.def("run_pipeline", [](const py::object& config, const std::filesystem::path& out_dir) {
        const PipelineConfig cfg = parse_config(from_python(config));
        StagePaths p;
        p.out_dir = out_dir;
        std::filesystem::create_directories(out_dir);
        json report;
        {
            py::gil_scoped_release release;
            write_json_file(out_dir / artifact::kConfig, to_json(cfg));
            report = run_pipeline(cfg, p);
        }
        return to_python(report);
    }, py::arg("config"), py::arg("out_dir"),
        "Run every stage and return the evaluation report as a dict.");
}
