#include "pdtn/cli.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pdtn/besov.hpp"
#include "pdtn/dtn.hpp"
#include "pdtn/generators.hpp"
#include "pdtn/graph.hpp"
#include "pdtn/io.hpp"
#include "pdtn/search.hpp"
#include "pdtn/sobolev.hpp"
#include "pdtn/solvers.hpp"

namespace pdtn {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct Options {
    std::string graph_path;
    std::string data_path;
    std::string out_path;
    double p = kUnset;
    double theta = kUnset;
    double Theta = kUnset;
    double tol = 0.0;      // 0 = library default
    int max_iter = 0;      // 0 = library default
    std::uint64_t seed = 0;
    int restarts = 8;
    bool renormalize = false;
    bool emit_plot_data = false;
    double max_doubling = 0.0;  // diagnose-only optional thresholds
    double max_c_hat = 0.0;
};

bool given(double v) { return !std::isnan(v); }

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    return s;
}

void json_error(std::ostream& err, const std::string& kind, const std::string& detail) {
    JsonWriter w;
    w.begin_object().field("error", kind).field("detail", one_line(detail)).end_object();
    err << w.str() << "\n";
}

GraphBundle load_bundle(const Options& opts) {
    if (opts.graph_path.empty()) throw std::invalid_argument("--graph PATH is required");
    return load_graph_file(opts.graph_path);
}

double resolve_p(const Options& opts, const GraphBundle& bundle) {
    return given(opts.p) ? opts.p : bundle.p;
}

BesovParams resolve_params(const Options& opts, const GraphBundle& bundle) {
    double p = resolve_p(opts, bundle);
    if (given(opts.theta) && given(opts.Theta))
        throw std::invalid_argument("pass --theta or --Theta, not both");
    if (given(opts.theta)) return BesovParams::from_theta(p, opts.theta);
    if (given(opts.Theta)) return BesovParams::from_Theta(p, opts.Theta);
    if (bundle.theta) return BesovParams::from_theta(p, *bundle.theta);
    if (bundle.Theta) return BesovParams::from_Theta(p, *bundle.Theta);
    throw std::invalid_argument(
        "smoothness exponent missing: set theta/Theta in the graph file or pass --theta/--Theta");
}

SolverConfig solver_config(const Options& opts, double p) {
    SolverConfig cfg;
    cfg.p = p;
    if (opts.tol > 0.0) cfg.grad_tol = opts.tol;
    if (opts.max_iter > 0) cfg.max_iter = opts.max_iter;
    cfg.seed = opts.seed;
    return cfg;
}

SearchConfig search_config(const Options& opts) {
    SearchConfig cfg;
    cfg.restarts = opts.restarts;
    if (opts.tol > 0.0) cfg.tol = opts.tol;
    if (opts.max_iter > 0) cfg.max_iters = opts.max_iter;
    cfg.seed = opts.seed;
    return cfg;
}

void deliver(const Options& opts, std::ostream& out, const std::string& text) {
    if (opts.out_path.empty())
        out << text;
    else
        write_text_file(opts.out_path, text);
}

std::string vertex_csv(const Eigen::VectorXd& u, const MetricMeasureGraph& graph) {
    std::string text = "id,value\n";
    for (int v = 0; v < graph.vertex_count(); ++v)
        text += graph.id_of(v) + "," + format_real(u(v)) + "\n";
    return text;
}

std::string out_stem(const std::string& path) {
    std::size_t slash = path.find_last_of('/');
    std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

BoundaryFunctional load_functional(const Options& opts, const MetricMeasureGraph& graph) {
    if (opts.data_path.empty()) throw std::invalid_argument("--data PATH is required");
    BoundaryFunctional ell = load_boundary_csv_file(opts.data_path, graph, "weight");
    double defect = functional_sum_defect(ell);
    if (defect > 1e-12) {
        if (!opts.renormalize)
            throw std::invalid_argument(
                "functional does not sum to zero (relative defect " + format_real(defect) +
                "); pass --renormalize to recenter it");
        ell = renormalize_functional(ell);
    }
    return ell;
}

BoundaryFunction load_function(const Options& opts, const MetricMeasureGraph& graph) {
    if (opts.data_path.empty()) throw std::invalid_argument("--data PATH is required");
    return load_boundary_csv_file(opts.data_path, graph, "value");
}

int run_validate(const Options& opts, std::ostream& out, std::ostream& err) {
    GraphBundle bundle = load_bundle(opts);
    ValidationReport report = validate(bundle.graph);
    JsonWriter w;
    w.begin_object();
    w.field("pass", report.pass);
    w.field("vertices", bundle.graph.vertex_count());
    w.field("interior", bundle.graph.interior_count());
    w.field("boundary", bundle.graph.boundary_count());
    w.field("edges", bundle.graph.edge_count());
    w.key("violations").begin_array();
    for (const std::string& v : report.violations) w.value(v);
    w.end_array();
    w.end_object();
    deliver(opts, out, w.str() + "\n");
    if (!report.pass) {
        json_error(err, "validation",
                   "graph violates " + std::to_string(report.violations.size()) +
                       " invariant(s); first: " + report.violations.front());
        return 1;
    }
    return 0;
}

int run_diagnose(const Options& opts, std::ostream& out, std::ostream& err) {
    GraphBundle bundle = load_bundle(opts);
    bundle.graph.require_valid();
    const MetricMeasureGraph& graph = bundle.graph;
    double p = resolve_p(opts, bundle);

    Eigen::MatrixXd dist = shortest_path_distances(graph);
    double dmu = doubling_constant(graph, dist, MeasureKind::Mu);
    double dnu = doubling_constant(graph, dist, MeasureKind::Nu);

    bool have_fit = true;
    CodimensionFit fit;
    try {
        fit = codimension_fit(graph, dist);
    } catch (const std::exception&) {
        have_fit = false;
    }
    double poincare = poincare_constant(graph, p, search_config(opts));

    JsonWriter w;
    w.begin_object();
    w.field("p", p);
    w.field("doubling_mu", dmu);
    w.field("doubling_nu", dnu);
    w.key("codimension").begin_object();
    if (have_fit) {
        w.field("theta_hat", fit.theta_hat);
        w.field("c_hat", fit.c_hat);
        w.field("samples", fit.sample_count);
    } else {
        w.key("theta_hat").null_value();
        w.key("c_hat").null_value();
        w.field("samples", 0);
    }
    w.end_object();
    w.field("poincare", poincare);
    w.end_object();
    deliver(opts, out, w.str() + "\n");

    if (opts.emit_plot_data) {
        if (opts.out_path.empty())
            throw std::invalid_argument("--emit-plot-data requires --out PATH");
        // Radius scan of the boundary-vs-interior ball mass ratio,
        // averaged over centers, ascending in r.
        std::map<double, std::pair<double, int>> by_radius;
        for (const CodimensionSample& s : codimension_samples(graph, dist)) {
            if (s.nu_ball <= 0.0) continue;
            auto& slot = by_radius[s.r];
            slot.first += s.nu_ball / s.mu_ball;
            slot.second += 1;
        }
        std::string csv = "r,nu_over_mu\n";
        for (const auto& [r, acc] : by_radius)
            csv += format_real(r) + "," + format_real(acc.first / acc.second) + "\n";
        write_text_file(out_stem(opts.out_path) + "_codim.csv", csv);
    }

    bool breached = false;
    std::string breach;
    if (opts.max_doubling > 0.0 && std::max(dmu, dnu) > opts.max_doubling) {
        breached = true;
        breach = "doubling constant " + format_real(std::max(dmu, dnu)) + " exceeds --max-doubling";
    }
    if (opts.max_c_hat > 0.0 && have_fit && fit.c_hat > opts.max_c_hat) {
        breached = true;
        breach = "codimension deviation " + format_real(fit.c_hat) + " exceeds --max-c-hat";
    }
    if (breached) {
        json_error(err, "validation", breach);
        return 1;
    }
    return 0;
}

int run_dirichlet(const Options& opts, std::ostream& out, std::ostream&) {
    GraphBundle bundle = load_bundle(opts);
    bundle.graph.require_valid();
    double p = resolve_p(opts, bundle);
    BoundaryFunction f = load_function(opts, bundle.graph);
    SolveResult sol = solve_dirichlet(f, bundle.graph, solver_config(opts, p));
    std::string csv = vertex_csv(sol.u, bundle.graph);
    if (opts.out_path.empty()) {
        out << csv;
    } else {
        write_text_file(opts.out_path, csv);
        JsonWriter w;
        w.begin_object();
        w.field("p", p);
        w.field("energy", sol.energy);
        w.field("objective", sol.objective);
        w.field("el_residual", sol.el_residual);
        w.field("iterations", sol.iterations);
        w.field("converged", sol.converged);
        w.end_object();
        out << w.str() << "\n";
    }
    return 0;
}

int run_neumann(const Options& opts, std::ostream& out, std::ostream&) {
    GraphBundle bundle = load_bundle(opts);
    bundle.graph.require_valid();
    double p = resolve_p(opts, bundle);
    BoundaryFunctional ell = load_functional(opts, bundle.graph);
    SolveResult sol = solve_neumann(ell, bundle.graph, solver_config(opts, p));
    std::string csv = vertex_csv(sol.u, bundle.graph);
    if (opts.out_path.empty()) {
        out << csv;
    } else {
        write_text_file(opts.out_path, csv);
        JsonWriter w;
        w.begin_object();
        w.field("p", p);
        w.field("energy", sol.energy);
        w.field("objective", sol.objective);
        w.field("el_residual", sol.el_residual);
        w.field("iterations", sol.iterations);
        w.field("converged", sol.converged);
        w.end_object();
        out << w.str() << "\n";
    }
    return 0;
}

int run_dtn(const Options& opts, std::ostream& out, std::ostream&) {
    GraphBundle bundle = load_bundle(opts);
    bundle.graph.require_valid();
    double p = resolve_p(opts, bundle);
    BoundaryFunction f = load_function(opts, bundle.graph);
    BoundaryFunctional ell = dtn_apply(f, bundle.graph, solver_config(opts, p));
    deliver(opts, out, boundary_to_csv(ell, bundle.graph, "weight"));
    return 0;
}

int run_ntd(const Options& opts, std::ostream& out, std::ostream&) {
    GraphBundle bundle = load_bundle(opts);
    bundle.graph.require_valid();
    double p = resolve_p(opts, bundle);
    BoundaryFunctional ell = load_functional(opts, bundle.graph);
    BoundaryFunction g = ntd_apply(ell, bundle.graph, solver_config(opts, p));
    deliver(opts, out, boundary_to_csv(g, bundle.graph, "value"));
    return 0;
}

int run_norms(const Options& opts, std::ostream& out, std::ostream&) {
    GraphBundle bundle = load_bundle(opts);
    bundle.graph.require_valid();
    BesovParams params = resolve_params(opts, bundle);
    BesovKernel kernel = besov_kernel(bundle.graph, params);
    NormReport report = bounds_report(bundle.graph, kernel, solver_config(opts, params.p),
                                      search_config(opts));
    deliver(opts, out, norm_report_json(report));
    return 0;
}

int run_roundtrip(const Options& opts, std::ostream& out, std::ostream&) {
    GraphBundle bundle = load_bundle(opts);
    bundle.graph.require_valid();
    BesovParams params = resolve_params(opts, bundle);
    BesovKernel kernel = besov_kernel(bundle.graph, params);
    RoundtripReport rt = roundtrip_check(bundle.graph, kernel,
                                         solver_config(opts, params.p), 10, opts.seed);
    JsonWriter w;
    w.begin_object();
    w.field("trials", rt.trials);
    w.field("ntd_dtn_err", rt.ntd_dtn_err);
    w.field("dtn_ntd_err", rt.dtn_ntd_err);
    w.field("max_err", std::max(rt.ntd_dtn_err, rt.dtn_ntd_err));
    w.end_object();
    deliver(opts, out, w.str() + "\n");
    return 0;
}

int run_gen(const Options& opts, const std::string& kind, int size, std::ostream& out,
            std::ostream&) {
    GraphBundle bundle;
    bundle.graph = make_named(kind, size);
    bundle.p = given(opts.p) ? opts.p : 2.0;
    if (given(opts.theta) && given(opts.Theta))
        throw std::invalid_argument("pass --theta or --Theta, not both");
    if (given(opts.theta)) {
        bundle.theta = opts.theta;
    } else if (given(opts.Theta)) {
        bundle.Theta = opts.Theta;
    } else if (kind == "snowflake") {
        bundle.Theta = 2.0 - std::log(4.0) / std::log(3.0);
    } else {
        bundle.Theta = 1.0;
    }
    deliver(opts, out, graph_to_json(bundle));
    return 0;
}

void add_input_flags(CLI::App* sub, Options& opts) {
    sub->add_option("--graph", opts.graph_path, "graph JSON file");
    sub->add_option("--out", opts.out_path, "write the main output here instead of stdout");
}

void add_solver_flags(CLI::App* sub, Options& opts) {
    sub->add_option("--p", opts.p, "exponent p > 1 (overrides the file's params)");
    sub->add_option("--tol", opts.tol, "convergence tolerance");
    sub->add_option("--max-iter", opts.max_iter, "iteration budget");
    sub->add_option("--seed", opts.seed, "random seed");
}

void add_smoothness_flags(CLI::App* sub, Options& opts) {
    sub->add_option("--theta", opts.theta, "smoothness exponent theta in (0,1)");
    sub->add_option("--Theta", opts.Theta, "codimension Theta in (0,p); theta = 1 - Theta/p");
}

}  // namespace

std::string norm_report_json(const NormReport& report) {
    JsonWriter w;
    w.begin_object();
    w.field("p", report.p);
    w.field("theta", report.theta);
    w.field("tr_norm", report.tr_norm);
    w.field("tr_exact", report.tr_exact);
    w.field("ext_norm", report.ext_norm);
    w.field("ext_exact", report.ext_exact);
    w.field("dtn_norm", report.dtn_norm);
    w.field("dtn_exact", report.dtn_exact);
    w.field("ntd_norm", report.ntd_norm);
    w.field("ntd_exact", report.ntd_exact);
    w.field("c_p", report.c_p);
    w.field("upper_ok", report.upper_ok);
    w.field("ntd_upper_ok", report.ntd_upper_ok);
    w.field("lower_gap", report.lower_gap);
    w.field("roundtrip_err", report.roundtrip_err);
    w.field("lf_bound_ok", report.lf_bound_ok);
    w.end_object();
    return w.str() + "\n";
}

std::string norm_report_csv(const NormReport& report) {
    auto flag = [](bool b) { return b ? std::string("true") : std::string("false"); };
    std::string out = "key,value\n";
    out += "p," + format_real(report.p) + "\n";
    out += "theta," + format_real(report.theta) + "\n";
    out += "tr_norm," + format_real(report.tr_norm) + "\n";
    out += "tr_exact," + flag(report.tr_exact) + "\n";
    out += "ext_norm," + format_real(report.ext_norm) + "\n";
    out += "ext_exact," + flag(report.ext_exact) + "\n";
    out += "dtn_norm," + format_real(report.dtn_norm) + "\n";
    out += "dtn_exact," + flag(report.dtn_exact) + "\n";
    out += "ntd_norm," + format_real(report.ntd_norm) + "\n";
    out += "ntd_exact," + flag(report.ntd_exact) + "\n";
    out += "c_p," + format_real(report.c_p) + "\n";
    out += "upper_ok," + flag(report.upper_ok) + "\n";
    out += "ntd_upper_ok," + flag(report.ntd_upper_ok) + "\n";
    out += "lower_gap," + format_real(report.lower_gap) + "\n";
    out += "roundtrip_err," + format_real(report.roundtrip_err) + "\n";
    out += "lf_bound_ok," + flag(report.lf_bound_ok) + "\n";
    return out;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Boundary-value solvers and boundary-operator norms for weighted graphs"};
    app.require_subcommand(1);

    Options opts;
    std::string gen_kind;
    int gen_size = 0;
    int code = 0;

    CLI::App* validate_cmd = app.add_subcommand("validate", "check the graph file invariants");
    add_input_flags(validate_cmd, opts);
    validate_cmd->callback([&] { code = run_validate(opts, out, err); });

    CLI::App* diagnose_cmd =
        app.add_subcommand("diagnose", "doubling, codimension fit, and Poincare constant");
    add_input_flags(diagnose_cmd, opts);
    add_solver_flags(diagnose_cmd, opts);
    diagnose_cmd->add_option("--restarts", opts.restarts, "search restarts");
    diagnose_cmd->add_flag("--emit-plot-data", opts.emit_plot_data,
                           "also write x,y CSV series next to --out");
    diagnose_cmd->add_option("--max-doubling", opts.max_doubling,
                             "fail (exit 1) when a doubling constant exceeds this");
    diagnose_cmd->add_option("--max-c-hat", opts.max_c_hat,
                             "fail (exit 1) when the codimension deviation exceeds this");
    diagnose_cmd->callback([&] { code = run_diagnose(opts, out, err); });

    CLI::App* dirichlet_cmd = app.add_subcommand("dirichlet", "solve the Dirichlet problem");
    add_input_flags(dirichlet_cmd, opts);
    add_solver_flags(dirichlet_cmd, opts);
    dirichlet_cmd->add_option("--data", opts.data_path, "boundary values CSV (id,value)");
    dirichlet_cmd->callback([&] { code = run_dirichlet(opts, out, err); });

    CLI::App* neumann_cmd = app.add_subcommand("neumann", "solve the Neumann problem");
    add_input_flags(neumann_cmd, opts);
    add_solver_flags(neumann_cmd, opts);
    neumann_cmd->add_option("--data", opts.data_path, "boundary functional CSV (id,weight)");
    neumann_cmd->add_flag("--renormalize", opts.renormalize,
                          "recenter a functional that does not sum to zero");
    neumann_cmd->callback([&] { code = run_neumann(opts, out, err); });

    CLI::App* dtn_cmd =
        app.add_subcommand("dtn", "apply the Dirichlet-to-Neumann map to boundary values");
    add_input_flags(dtn_cmd, opts);
    add_solver_flags(dtn_cmd, opts);
    dtn_cmd->add_option("--data", opts.data_path, "boundary values CSV (id,value)");
    dtn_cmd->callback([&] { code = run_dtn(opts, out, err); });

    CLI::App* ntd_cmd =
        app.add_subcommand("ntd", "apply the Neumann-to-Dirichlet map to a functional");
    add_input_flags(ntd_cmd, opts);
    add_solver_flags(ntd_cmd, opts);
    ntd_cmd->add_option("--data", opts.data_path, "boundary functional CSV (id,weight)");
    ntd_cmd->add_flag("--renormalize", opts.renormalize,
                      "recenter a functional that does not sum to zero");
    ntd_cmd->callback([&] { code = run_ntd(opts, out, err); });

    CLI::App* norms_cmd =
        app.add_subcommand("norms", "trace/extension/DtN/NtD norms and the bound report");
    add_input_flags(norms_cmd, opts);
    add_solver_flags(norms_cmd, opts);
    add_smoothness_flags(norms_cmd, opts);
    norms_cmd->add_option("--restarts", opts.restarts, "search restarts");
    norms_cmd->callback([&] { code = run_norms(opts, out, err); });

    CLI::App* roundtrip_cmd =
        app.add_subcommand("roundtrip", "NtD(DtN(f)) and DtN(NtD(l)) composition errors");
    add_input_flags(roundtrip_cmd, opts);
    add_solver_flags(roundtrip_cmd, opts);
    add_smoothness_flags(roundtrip_cmd, opts);
    roundtrip_cmd->callback([&] { code = run_roundtrip(opts, out, err); });

    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a graph file");
    gen_cmd->add_option("kind", gen_kind, "path | grid | lshape | snowflake")->required();
    gen_cmd->add_option("size", gen_size, "vertex count (path), side (grid/lshape), level (snowflake)")
        ->required();
    gen_cmd->add_option("--p", opts.p, "exponent stored in params");
    add_smoothness_flags(gen_cmd, opts);
    gen_cmd->add_option("--out", opts.out_path, "write the graph file here instead of stdout");
    gen_cmd->callback([&] { code = run_gen(opts, gen_kind, gen_size, out, err); });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("pdtn");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        json_error(err, "usage", e.what());
        err << app.help();
        return 1;
    } catch (const SolveFailure& e) {
        json_error(err, "solver", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        json_error(err, "input", e.what());
        return 1;
    } catch (const std::exception& e) {
        json_error(err, "error", e.what());
        return 1;
    }
    return code;
}

}  // namespace pdtn
