#ifndef PDTN_SOLVERS_HPP
#define PDTN_SOLVERS_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pdtn/besov.hpp"
#include "pdtn/graph.hpp"
#include "pdtn/sobolev.hpp"

namespace pdtn {

/// Controls for the smoothed-Newton energy minimizers.
struct SolverConfig {
    double p = 2.0;
    /// Decreasing smoothing levels; each stage warm-starts the next. The
    /// schedule is extended automatically (down to 1e-40) while the
    /// unsmoothed optimality residual is still above tolerance, which
    /// matters for p < 2 where the flux error scales like eps^{p-1}.
    std::vector<double> eps_schedule = {1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
    double grad_tol = 1e-10;  ///< on the residual, relative to a problem scale
    int max_iter = 200;       ///< Newton iterations per smoothing stage
    uint64_t seed = 0;        ///< reserved for randomized warm starts
};

/// Minimizer output. `el_residual` is the unsmoothed optimality defect:
/// max over free vertices of |lap_p(u) - rhs| (rhs = 0 for Dirichlet,
/// rhs = ell on the boundary for Neumann).
struct SolveResult {
    VertexFunction u;
    double energy = 0.0;       ///< p-energy of u
    double objective = 0.0;    ///< energy/p minus the functional term
    double el_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_history;  ///< per accepted Newton step
};

/// Raised when a solve stalls; carries the best iterate for post-mortems.
class SolveFailure : public std::runtime_error {
public:
    SolveFailure(const std::string& what, SolveResult best)
        : std::runtime_error(what), best_result(std::move(best)) {}
    SolveResult best_result;
};

/// Dirichlet problem: minimize the p-energy over extensions of f, i.e.
/// lap_p(u) = 0 at interior vertices, u = f on the boundary. Strictly
/// convex in the interior unknowns; the minimizer is unique.
SolveResult solve_dirichlet(const BoundaryFunction& f, const MetricMeasureGraph& graph,
                            const SolverConfig& cfg);

/// Neumann problem: minimize energy(u)/p - ell . trace(u) over all u.
/// Requires sum(ell) = 0 (else unbounded below); the minimizer is unique
/// up to an additive constant and is returned with mu-weighted interior
/// mean zero (total-mu mean if there is no interior).
SolveResult solve_neumann(const BoundaryFunctional& ell, const MetricMeasureGraph& graph,
                          const SolverConfig& cfg);

enum class BvpKind { Dirichlet, Neumann };

/// Unsmoothed Euler-Lagrange residual of a candidate u, max-norm over the
/// vertices that are free in the given problem.
double el_residual(const VertexFunction& u, const MetricMeasureGraph& graph, double p,
                   BvpKind kind, const BoundaryFunctional& ell = {});

/// A-priori bound checks for a converged Neumann solve, with alpha the
/// attained objective and t = energy(u)^{1/p}:
///   (1-p)/p * (L T)^{p/(p-1)} <= alpha <= 0,
///   t <= (2 p L T)^{1/(p-1)} + 2 |alpha| / (L T).
/// L and T are the given dual/trace norm values strengthened by the
/// ratios the solution itself realizes (ell.tr(u)/seminorm(tr u) and
/// seminorm(tr u)/t), which keeps both inequalities consequences of the
/// chain ell.tr(u) <= L T t even when the given norms are search-based
/// lower estimates. ell = 0 degenerates every bound; reported as pass.
struct EnergyBoundReport {
    double alpha = 0.0;        ///< attained objective value
    double lower_bound = 0.0;  ///< (1-p)/p * (L T)^{p/(p-1)}
    double grad_norm = 0.0;    ///< energy(u)^{1/p}
    double grad_bound = 0.0;   ///< right side of the gradient estimate
    double dual_norm_used = 0.0;   ///< effective L
    double trace_norm_used = 0.0;  ///< effective T
    bool lower_ok = false;
    bool upper_ok = false;  ///< alpha <= 0
    bool grad_ok = false;
    bool pass = false;
};

EnergyBoundReport energy_bound_checks(const SolveResult& result, const BoundaryFunctional& ell,
                                      const MetricMeasureGraph& graph, const BesovKernel& kernel,
                                      double dual_norm_ell, double trace_norm_bound);

/// Direct minimization over at most six free coordinates inside the box
/// [lo, hi]: coarse grid scan refined by coordinate descent with step
/// halving. Independent of the Newton path; exists to cross-check it.
/// Throws if the dimension exceeds six.
Eigen::VectorXd brute_force_minimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                                     const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                     int grid_points_per_axis = 9);

/// Symmetric-box convenience: [-radius, radius]^dim.
Eigen::VectorXd brute_force_minimize(const std::function<double(const Eigen::VectorXd&)>& objective,
                                     int dim, double radius, int grid_points_per_axis = 9);

}  // namespace pdtn

#endif
