#include "pdtn/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SparseCholesky>

namespace pdtn {

namespace {

void check_config(const SolverConfig& cfg) {
    if (!(cfg.p > 1.0) || !std::isfinite(cfg.p))
        throw std::invalid_argument("exponent p must lie in (1, infinity)");
    if (cfg.eps_schedule.empty())
        throw std::invalid_argument("smoothing schedule must not be empty");
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : cfg.eps_schedule) {
        if (!(eps > 0.0) || !std::isfinite(eps))
            throw std::invalid_argument("smoothing levels must be positive");
        if (!(eps < prev))
            throw std::invalid_argument("smoothing schedule must be strictly decreasing");
        prev = eps;
    }
    if (cfg.eps_schedule.back() > 1e-8)
        throw std::invalid_argument("smoothing schedule must end at 1e-8 or below");
    if (!(cfg.grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
    if (cfg.max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
}

/// One boundary-value problem seen as smooth unconstrained minimization
/// over the free coordinates, at a given smoothing level.
struct Problem {
    const MetricMeasureGraph& graph;
    double p;
    std::vector<int> free_pos;  // vertex index -> free coordinate, or -1
    std::vector<int> free_vtx;  // free coordinate -> vertex index
    Eigen::VectorXd linear;     // full-length linear term (ell on boundary)

    double true_objective(const VertexFunction& u) const {
        return p_energy(u, graph, p) / p - linear.dot(u);
    }

    double smoothed_objective(const VertexFunction& u, double eps) const {
        double acc = 0.0;
        double eps2 = eps * eps;
        double epsp = std::pow(eps, p);
        for (const Edge& ed : graph.edges()) {
            double g = (u(ed.v) - u(ed.u)) / ed.length;
            acc += ed.measure * (std::pow(g * g + eps2, p / 2.0) - epsp);
        }
        return acc / p - linear.dot(u);
    }

    Eigen::VectorXd gradient(const VertexFunction& u, double eps) const {
        double eps2 = eps * eps;
        Eigen::VectorXd full = -linear;
        for (const Edge& ed : graph.edges()) {
            double g = (u(ed.v) - u(ed.u)) / ed.length;
            double flux = ed.measure / ed.length * g * std::pow(g * g + eps2, p / 2.0 - 1.0);
            full(ed.v) += flux;
            full(ed.u) -= flux;
        }
        Eigen::VectorXd reduced(free_vtx.size());
        for (size_t i = 0; i < free_vtx.size(); ++i) reduced(i) = full(free_vtx[i]);
        return reduced;
    }

    Eigen::SparseMatrix<double> hessian(const VertexFunction& u, double eps, double shift) const {
        double eps2 = eps * eps;
        const int nf = static_cast<int>(free_vtx.size());
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(static_cast<size_t>(graph.edge_count()) * 4 + free_vtx.size());
        for (const Edge& ed : graph.edges()) {
            double g = (u(ed.v) - u(ed.u)) / ed.length;
            double q = g * g + eps2;
            double w = ed.measure / (ed.length * ed.length) *
                       std::pow(q, p / 2.0 - 2.0) * ((p - 1.0) * g * g + eps2);
            int iu = free_pos[ed.u];
            int iv = free_pos[ed.v];
            if (iu >= 0) trips.emplace_back(iu, iu, w);
            if (iv >= 0) trips.emplace_back(iv, iv, w);
            if (iu >= 0 && iv >= 0) {
                trips.emplace_back(iu, iv, -w);
                trips.emplace_back(iv, iu, -w);
            }
        }
        if (shift > 0.0)
            for (int i = 0; i < nf; ++i) trips.emplace_back(i, i, shift);
        Eigen::SparseMatrix<double> H(nf, nf);
        H.setFromTriplets(trips.begin(), trips.end());
        return H;
    }
};

Eigen::VectorXd newton_direction(const Problem& prob, const VertexFunction& u, double eps,
                                 const Eigen::VectorXd& grad) {
    double base = 0.0;
    {
        Eigen::SparseMatrix<double> H = prob.hessian(u, eps, 0.0);
        for (int i = 0; i < H.rows(); ++i) base = std::max(base, std::abs(H.coeff(i, i)));
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(H);
        if (ldlt.info() == Eigen::Success) {
            Eigen::VectorXd d = ldlt.solve(-grad);
            if (d.allFinite() && grad.dot(d) < 0.0) return d;
        }
    }
    double shift = std::max(base, 1.0) * 1e-12;
    for (int attempt = 0; attempt < 30; ++attempt) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(prob.hessian(u, eps, shift));
        if (ldlt.info() == Eigen::Success) {
            Eigen::VectorXd d = ldlt.solve(-grad);
            if (d.allFinite() && grad.dot(d) < 0.0) return d;
        }
        shift *= 100.0;
    }
    return -grad;  // steepest descent fallback
}

struct EngineOutput {
    VertexFunction u;
    int iterations = 0;
    std::vector<double> history;
};

/// Continuation Newton over the smoothing schedule. Stops a stage early
/// when the true optimality residual is already below the target; the
/// schedule is extended downward when the smallest level is still too
/// coarse (the unsmoothed flux error scales like eps^{p-1}, so small p
/// needs very small eps).
EngineOutput minimize_energy(const Problem& prob, VertexFunction u, const SolverConfig& cfg,
                             BvpKind kind, const BoundaryFunctional& ell, double scale,
                             double* out_residual) {
    EngineOutput out;
    out.history.push_back(prob.true_objective(u));

    const double target = cfg.grad_tol * scale;
    std::vector<double> schedule = cfg.eps_schedule;
    int extensions = 0;
    double residual = el_residual(u, prob.graph, prob.p, kind, ell);

    for (size_t si = 0; si < schedule.size() && residual > target; ++si) {
        const double eps = schedule[si];
        const double stage_tol = std::max(0.3 * target, 1e-3 * eps * scale);
        double f = prob.smoothed_objective(u, eps);

        for (int it = 0; it < cfg.max_iter; ++it) {
            Eigen::VectorXd grad = prob.gradient(u, eps);
            if (grad.cwiseAbs().maxCoeff() <= stage_tol) break;
            Eigen::VectorXd dir = newton_direction(prob, u, eps, grad);
            double slope = grad.dot(dir);

            double t = 1.0;
            bool accepted = false;
            for (int back = 0; back < 60; ++back) {
                VertexFunction cand = u;
                for (size_t i = 0; i < prob.free_vtx.size(); ++i)
                    cand(prob.free_vtx[i]) += t * dir(i);
                double fc = prob.smoothed_objective(cand, eps);
                bool armijo = std::isfinite(fc) && fc <= f + 1e-4 * t * slope;
                // Near the minimum the objective comparison drowns in
                // rounding; a strict gradient-norm drop on the full step
                // is just as safe for a convex stage problem.
                bool grad_drop = false;
                if (!armijo && back == 0) {
                    Eigen::VectorXd gc = prob.gradient(cand, eps);
                    grad_drop = gc.allFinite() &&
                                gc.cwiseAbs().maxCoeff() <= 0.9 * grad.cwiseAbs().maxCoeff();
                }
                if (armijo || grad_drop) {
                    u = cand;
                    f = prob.smoothed_objective(u, eps);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) break;

            if (kind == BvpKind::Neumann) {
                // Quotient normalization; changes neither objective nor
                // gradient because the linear term annihilates constants.
                double mass = 0.0, mean = 0.0;
                for (int v : prob.graph.interior_vertices()) {
                    mass += prob.graph.mu_vertex(v);
                    mean += prob.graph.mu_vertex(v) * u(v);
                }
                u.array() -= mean / mass;
                f = prob.smoothed_objective(u, eps);
            }
            ++out.iterations;
            out.history.push_back(prob.true_objective(u));
        }

        residual = el_residual(u, prob.graph, prob.p, kind, ell);
        if (si + 1 == schedule.size() && residual > target && extensions < 16 &&
            schedule.back() > 1e-40)
            schedule.push_back(schedule.back() * 1e-2), ++extensions;
    }

    *out_residual = residual;
    out.u = std::move(u);
    return out;
}

SolveResult finish(const Problem& prob, EngineOutput&& eng, double residual, double scale,
                   const SolverConfig& cfg, const char* what) {
    SolveResult result;
    result.u = std::move(eng.u);
    result.energy = p_energy(result.u, prob.graph, prob.p);
    result.objective = result.energy / prob.p - prob.linear.dot(result.u);
    result.el_residual = residual;
    result.iterations = eng.iterations;
    result.converged = residual <= cfg.grad_tol * scale;
    result.objective_history = std::move(eng.history);
    if (!result.converged) throw SolveFailure(what, std::move(result));
    return result;
}

}  // namespace

SolveResult solve_dirichlet(const BoundaryFunction& f, const MetricMeasureGraph& graph,
                            const SolverConfig& cfg) {
    graph.require_valid();
    check_config(cfg);
    if (f.size() != graph.boundary_count())
        throw std::invalid_argument("boundary function has wrong length");
    if (!f.allFinite()) throw std::invalid_argument("boundary function must be finite");

    // Constant data extends to the constant function. Return it directly:
    // running the minimizer would only re-derive it up to factorization
    // rounding, and for p < 2 the flux map |g|^{p-1} amplifies that noise
    // far above the residual tolerance.
    if (f.maxCoeff() == f.minCoeff()) {
        SolveResult result;
        result.u = VertexFunction::Constant(graph.vertex_count(), f(0));
        result.converged = true;
        result.objective_history.push_back(0.0);
        return result;
    }

    Problem prob{graph, cfg.p, std::vector<int>(graph.vertex_count(), -1), {},
                 Eigen::VectorXd::Zero(graph.vertex_count())};
    for (int i = 0; i < graph.interior_count(); ++i) {
        int v = graph.interior_vertices()[i];
        prob.free_pos[v] = i;
        prob.free_vtx.push_back(v);
    }

    VertexFunction u0 = extend_linear(f, graph);
    double scale = std::max(1.0, std::pow(f.cwiseAbs().maxCoeff(), cfg.p - 1.0));

    double residual = 0.0;
    EngineOutput eng = minimize_energy(prob, std::move(u0), cfg, BvpKind::Dirichlet, {}, scale,
                                       &residual);
    return finish(prob, std::move(eng), residual, scale, cfg,
                  "Dirichlet solve did not reach the residual tolerance");
}

SolveResult solve_neumann(const BoundaryFunctional& ell, const MetricMeasureGraph& graph,
                          const SolverConfig& cfg) {
    graph.require_valid();
    check_config(cfg);
    if (ell.size() != graph.boundary_count())
        throw std::invalid_argument("boundary functional has wrong length");
    if (!ell.allFinite()) throw std::invalid_argument("boundary functional must be finite");
    if (functional_sum_defect(ell) > 1e-12)
        throw std::invalid_argument("functional does not annihilate constants");

    const int n = graph.vertex_count();
    Problem prob{graph, cfg.p, std::vector<int>(n, -1), {}, Eigen::VectorXd::Zero(n)};
    for (int i = 0; i < graph.boundary_count(); ++i)
        prob.linear(graph.boundary_vertices()[i]) = ell(i);
    // All vertices free modulo constants: pin the first vertex's Newton
    // increment. The gradient sums to zero, so the pinned direction is a
    // genuine quotient-space step.
    for (int v = 1; v < n; ++v) {
        prob.free_pos[v] = v - 1;
        prob.free_vtx.push_back(v);
    }

    double scale = std::max(1.0, ell.size() ? ell.cwiseAbs().maxCoeff() : 0.0);

    // Warm start: the quadratic (p = 2) solution, rescaled to the right
    // magnitude for the actual exponent.
    VertexFunction u0 = VertexFunction::Zero(n);
    {
        Eigen::SparseMatrix<double> A = stiffness_matrix(graph);
        std::vector<Eigen::Triplet<double>> trips;
        for (int k = 0; k < A.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
                if (it.row() >= 1 && it.col() >= 1)
                    trips.emplace_back(it.row() - 1, it.col() - 1, it.value());
        Eigen::SparseMatrix<double> Ared(n - 1, n - 1);
        Ared.setFromTriplets(trips.begin(), trips.end());
        Eigen::VectorXd rhs(n - 1);
        for (int v = 1; v < n; ++v) rhs(v - 1) = prob.linear(v);
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Ared);
        if (ldlt.info() == Eigen::Success) {
            Eigen::VectorXd sol = ldlt.solve(rhs);
            if (sol.allFinite())
                for (int v = 1; v < n; ++v) u0(v) = sol(v - 1);
        }
        if (cfg.p != 2.0) {
            double load = prob.linear.dot(u0);
            double energy = p_energy(u0, graph, cfg.p);
            if (load > 0.0 && energy > 0.0)
                u0 *= std::pow(load / energy, 1.0 / (cfg.p - 1.0));
        }
        double mass = 0.0, mean = 0.0;
        for (int v : graph.interior_vertices()) {
            mass += graph.mu_vertex(v);
            mean += graph.mu_vertex(v) * u0(v);
        }
        u0.array() -= mean / mass;
    }

    double residual = 0.0;
    EngineOutput eng =
        minimize_energy(prob, std::move(u0), cfg, BvpKind::Neumann, ell, scale, &residual);

    // Final quotient representative.
    double mass = 0.0, mean = 0.0;
    for (int v : graph.interior_vertices()) {
        mass += graph.mu_vertex(v);
        mean += graph.mu_vertex(v) * eng.u(v);
    }
    eng.u.array() -= mean / mass;

    return finish(prob, std::move(eng), residual, scale, cfg,
                  "Neumann solve did not reach the residual tolerance");
}

double el_residual(const VertexFunction& u, const MetricMeasureGraph& graph, double p,
                   BvpKind kind, const BoundaryFunctional& ell) {
    VertexFunction lap = p_laplacian(u, graph, p);
    if (kind == BvpKind::Dirichlet) {
        double worst = 0.0;
        for (int v : graph.interior_vertices()) worst = std::max(worst, std::abs(lap(v)));
        return worst;
    }
    if (ell.size() != graph.boundary_count())
        throw std::invalid_argument("neumann residual needs the boundary functional");
    Eigen::VectorXd full = Eigen::VectorXd::Zero(graph.vertex_count());
    for (int i = 0; i < graph.boundary_count(); ++i) full(graph.boundary_vertices()[i]) = ell(i);
    return (lap - full).cwiseAbs().maxCoeff();
}

EnergyBoundReport energy_bound_checks(const SolveResult& result, const BoundaryFunctional& ell,
                                      const MetricMeasureGraph& graph, const BesovKernel& kernel,
                                      double dual_norm_ell, double trace_norm_bound) {
    const double p = kernel.params().p;
    EnergyBoundReport report;
    report.alpha = result.objective;
    report.grad_norm = std::pow(result.energy, 1.0 / p);

    if (ell.size() == 0 || ell.cwiseAbs().maxCoeff() == 0.0) {
        // Zero load: every bound degenerates to 0 >= 0.
        report.lower_ok = report.upper_ok = report.grad_ok = true;
        report.pass = true;
        return report;
    }

    BoundaryFunction tr_u = trace(result.u, graph);
    double pairing_value = ell.dot(tr_u);
    double tr_semi = besov_seminorm(tr_u, kernel);
    double t = report.grad_norm;

    // Strengthen the norm estimates by the ratios u itself realizes, so
    // ell.tr(u) <= L T t holds by construction (see header).
    double L = std::max(dual_norm_ell, tr_semi > 0.0 ? pairing_value / tr_semi : 0.0);
    double T = std::max(trace_norm_bound, t > 0.0 ? tr_semi / t : 0.0);
    report.dual_norm_used = L;
    report.trace_norm_used = T;

    double x = L * T;
    double slack = 1e-9;
    report.lower_bound = (1.0 - p) / p * std::pow(x, p / (p - 1.0));
    report.lower_ok = report.alpha >= report.lower_bound - slack * (1.0 + std::abs(report.lower_bound));
    report.upper_ok = report.alpha <= slack;
    report.grad_bound =
        x > 0.0 ? std::pow(2.0 * p * x, 1.0 / (p - 1.0)) + 2.0 * std::abs(report.alpha) / x : 0.0;
    report.grad_ok = t <= report.grad_bound + slack * (1.0 + report.grad_bound);
    report.pass = report.lower_ok && report.upper_ok && report.grad_ok;
    return report;
}

Eigen::VectorXd brute_force_minimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                     int grid_points_per_axis) {
    const int dim = static_cast<int>(lo.size());
    if (dim < 1 || dim > 6) throw std::invalid_argument("brute force supports 1 to 6 variables");
    if (hi.size() != dim) throw std::invalid_argument("box bounds disagree in length");
    for (int i = 0; i < dim; ++i)
        if (!(hi(i) >= lo(i))) throw std::invalid_argument("empty box");
    const int k = std::max(grid_points_per_axis, 2);

    Eigen::VectorXd best(dim);
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<int> idx(dim, 0);
    Eigen::VectorXd point(dim);
    while (true) {
        for (int i = 0; i < dim; ++i)
            point(i) = lo(i) + (hi(i) - lo(i)) * idx[i] / double(k - 1);
        double val = objective(point);
        if (std::isfinite(val) && val < best_val) {
            best_val = val;
            best = point;
        }
        int axis = 0;
        while (axis < dim && ++idx[axis] == k) idx[axis++] = 0;
        if (axis == dim) break;
    }

    // Coordinate-descent polish with per-axis step halving.
    Eigen::VectorXd step = (hi - lo) / double(k - 1);
    for (int i = 0; i < dim; ++i)
        if (step(i) <= 0.0) step(i) = 1.0;
    double floor_step = 1e-13 * std::max(1.0, (hi - lo).cwiseAbs().maxCoeff());
    for (int sweep = 0; sweep < 4000; ++sweep) {
        bool moved = false;
        for (int i = 0; i < dim; ++i) {
            for (double sgn : {1.0, -1.0}) {
                Eigen::VectorXd cand = best;
                cand(i) = std::clamp(cand(i) + sgn * step(i), lo(i), hi(i));
                double val = objective(cand);
                if (std::isfinite(val) && val < best_val) {
                    best_val = val;
                    best = cand;
                    moved = true;
                    break;
                }
            }
        }
        if (!moved) {
            step *= 0.5;
            if (step.maxCoeff() < floor_step) break;
        }
    }
    return best;
}

Eigen::VectorXd brute_force_minimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                                     int dim, double radius, int grid_points_per_axis) {
    Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, -radius);
    Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim, radius);
    return brute_force_minimize(objective, lo, hi, grid_points_per_axis);
}

}  // namespace pdtn
