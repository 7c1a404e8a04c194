#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pdtn/besov.hpp"
#include "pdtn/cli.hpp"
#include "pdtn/dtn.hpp"
#include "pdtn/generators.hpp"
#include "pdtn/graph.hpp"
#include "pdtn/io.hpp"
#include "pdtn/search.hpp"
#include "pdtn/sobolev.hpp"
#include "pdtn/solvers.hpp"

namespace py = pybind11;
using namespace pdtn;

namespace {

SolverConfig solver_config(double p, double tol, int max_iter) {
    SolverConfig cfg;
    cfg.p = p;
    if (tol > 0.0) cfg.grad_tol = tol;
    if (max_iter > 0) cfg.max_iter = max_iter;
    return cfg;
}

BesovParams make_params(double p, py::object theta, py::object Theta) {
    bool has_theta = !theta.is_none();
    bool has_Theta = !Theta.is_none();
    if (has_theta == has_Theta)
        throw std::invalid_argument("pass exactly one of theta / Theta");
    return has_theta ? BesovParams::from_theta(p, theta.cast<double>())
                     : BesovParams::from_Theta(p, Theta.cast<double>());
}

py::dict report_to_dict(const NormReport& r) {
    py::dict d;
    d["p"] = r.p;
    d["theta"] = r.theta;
    d["tr_norm"] = r.tr_norm;
    d["tr_exact"] = r.tr_exact;
    d["ext_norm"] = r.ext_norm;
    d["ext_exact"] = r.ext_exact;
    d["dtn_norm"] = r.dtn_norm;
    d["dtn_exact"] = r.dtn_exact;
    d["ntd_norm"] = r.ntd_norm;
    d["ntd_exact"] = r.ntd_exact;
    d["c_p"] = r.c_p;
    d["upper_ok"] = r.upper_ok;
    d["ntd_upper_ok"] = r.ntd_upper_ok;
    d["lower_gap"] = r.lower_gap;
    d["roundtrip_err"] = r.roundtrip_err;
    d["lf_bound_ok"] = r.lf_bound_ok;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Boundary-value solvers and boundary-operator norms on weighted graphs";

    py::class_<MetricMeasureGraph>(m, "Graph")
        .def("vertex_count", &MetricMeasureGraph::vertex_count)
        .def("edge_count", &MetricMeasureGraph::edge_count)
        .def("boundary_count", &MetricMeasureGraph::boundary_count)
        .def("interior_count", &MetricMeasureGraph::interior_count)
        .def("ids",
             [](const MetricMeasureGraph& g) {
                 std::vector<std::string> out;
                 for (const Vertex& v : g.vertices()) out.push_back(v.id);
                 return out;
             })
        .def("boundary_ids",
             [](const MetricMeasureGraph& g) {
                 std::vector<std::string> out;
                 for (int v : g.boundary_vertices()) out.push_back(g.id_of(v));
                 return out;
             })
        .def("index_of", &MetricMeasureGraph::index_of)
        .def("validate", [](const MetricMeasureGraph& g) {
            ValidationReport r = validate(g);
            return py::make_tuple(r.pass, r.violations);
        });

    py::class_<GraphBundle>(m, "GraphBundle")
        .def_readonly("graph", &GraphBundle::graph)
        .def_readonly("p", &GraphBundle::p)
        .def_readonly("theta", &GraphBundle::theta)
        .def_readonly("Theta", &GraphBundle::Theta);

    py::class_<SolveResult>(m, "SolveResult")
        .def_readonly("u", &SolveResult::u)
        .def_readonly("energy", &SolveResult::energy)
        .def_readonly("objective", &SolveResult::objective)
        .def_readonly("el_residual", &SolveResult::el_residual)
        .def_readonly("iterations", &SolveResult::iterations)
        .def_readonly("converged", &SolveResult::converged);

    m.def("load_graph_json", &load_graph_json, py::arg("text"));
    m.def("load_graph_file", &load_graph_file, py::arg("path"));
    m.def("graph_to_json", &graph_to_json, py::arg("bundle"));
    m.def("make_named", &make_named, py::arg("family"), py::arg("size"));
    m.def("make_random_graph", &make_random_graph, py::arg("n"), py::arg("seed"),
          py::arg("boundary_fraction") = 0.3, py::arg("extra_edge_fraction") = 0.15);

    m.def(
        "solve_dirichlet",
        [](const Eigen::VectorXd& f, const MetricMeasureGraph& g, double p, double tol,
           int max_iter) { return solve_dirichlet(f, g, solver_config(p, tol, max_iter)); },
        py::arg("f"), py::arg("graph"), py::arg("p") = 2.0, py::arg("tol") = 0.0,
        py::arg("max_iter") = 0);
    m.def(
        "solve_neumann",
        [](const Eigen::VectorXd& ell, const MetricMeasureGraph& g, double p, double tol,
           int max_iter) { return solve_neumann(ell, g, solver_config(p, tol, max_iter)); },
        py::arg("ell"), py::arg("graph"), py::arg("p") = 2.0, py::arg("tol") = 0.0,
        py::arg("max_iter") = 0);
    m.def(
        "dtn_apply",
        [](const Eigen::VectorXd& f, const MetricMeasureGraph& g, double p, double tol,
           int max_iter) { return dtn_apply(f, g, solver_config(p, tol, max_iter)); },
        py::arg("f"), py::arg("graph"), py::arg("p") = 2.0, py::arg("tol") = 0.0,
        py::arg("max_iter") = 0);
    m.def(
        "ntd_apply",
        [](const Eigen::VectorXd& ell, const MetricMeasureGraph& g, double p, double tol,
           int max_iter) { return ntd_apply(ell, g, solver_config(p, tol, max_iter)); },
        py::arg("ell"), py::arg("graph"), py::arg("p") = 2.0, py::arg("tol") = 0.0,
        py::arg("max_iter") = 0);

    m.def(
        "p_energy",
        [](const Eigen::VectorXd& u, const MetricMeasureGraph& g, double p) {
            return p_energy(u, g, p);
        },
        py::arg("u"), py::arg("graph"), py::arg("p") = 2.0);
    m.def(
        "besov_seminorm",
        [](const Eigen::VectorXd& f, const MetricMeasureGraph& g, double p, py::object theta,
           py::object Theta) {
            return besov_seminorm(f, besov_kernel(g, make_params(p, theta, Theta)));
        },
        py::arg("f"), py::arg("graph"), py::arg("p") = 2.0, py::arg("theta") = py::none(),
        py::arg("Theta") = py::none());
    m.def(
        "dual_norm",
        [](const Eigen::VectorXd& ell, const MetricMeasureGraph& g, double p, py::object theta,
           py::object Theta) {
            return dual_norm(ell, besov_kernel(g, make_params(p, theta, Theta))).value;
        },
        py::arg("ell"), py::arg("graph"), py::arg("p") = 2.0, py::arg("theta") = py::none(),
        py::arg("Theta") = py::none());

    m.def(
        "bounds_report",
        [](const MetricMeasureGraph& g, double p, py::object theta, py::object Theta,
           int restarts, std::uint64_t seed) {
            SearchConfig cfg;
            cfg.restarts = restarts;
            cfg.seed = seed;
            SolverConfig scfg;
            scfg.p = p;
            NormReport report =
                bounds_report(g, besov_kernel(g, make_params(p, theta, Theta)), scfg, cfg);
            return report_to_dict(report);
        },
        py::arg("graph"), py::arg("p") = 2.0, py::arg("theta") = py::none(),
        py::arg("Theta") = py::none(), py::arg("restarts") = 4, py::arg("seed") = 0);

    m.def(
        "roundtrip_check",
        [](const MetricMeasureGraph& g, double p, py::object theta, py::object Theta, int trials,
           std::uint64_t seed) {
            RoundtripReport r = roundtrip_check(
                g, besov_kernel(g, make_params(p, theta, Theta)), solver_config(p, 0.0, 0), trials,
                seed);
            return py::make_tuple(r.ntd_dtn_err, r.dtn_ntd_err);
        },
        py::arg("graph"), py::arg("p") = 2.0, py::arg("theta") = py::none(),
        py::arg("Theta") = py::none(), py::arg("trials") = 3, py::arg("seed") = 0);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
