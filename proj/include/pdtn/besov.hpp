#ifndef PDTN_BESOV_HPP
#define PDTN_BESOV_HPP

#include <optional>

#include <Eigen/Dense>

#include "pdtn/graph.hpp"
#include "pdtn/search.hpp"

namespace pdtn {

/// Values on boundary vertices, in boundary order. The discrete carrier
/// of a fractional-smoothness boundary datum.
using BoundaryFunction = Eigen::VectorXd;

/// Weights of a boundary functional, in boundary order; must sum to zero
/// (functionals annihilate constants).
using BoundaryFunctional = Eigen::VectorXd;

/// Exponent pair for the boundary smoothness scale: p in (1,inf) and
/// theta in (0,1), coupled to the codimension Theta by theta = 1 - Theta/p.
/// Exactly one of theta/Theta is given; the other is derived.
struct BesovParams {
    double p = 2.0;
    double theta = 0.5;
    double Theta = 1.0;

    static BesovParams from_theta(double p, double theta);
    static BesovParams from_Theta(double p, double Theta);
};

/// Precomputed pair weights w(x,y) = nu_x nu_y / (d^{theta p} nu(B(y,d)))
/// for all ordered boundary pairs x != y, with the closed ball centered at
/// the second (outer-sum) vertex. Depends only on the graph and params.
class BesovKernel {
public:
    BesovKernel(const MetricMeasureGraph& graph, const BesovParams& params);

    int boundary_count() const { return static_cast<int>(weights_.rows()); }
    const BesovParams& params() const { return params_; }

    /// w(x,y) for boundary positions x, y; zero on the diagonal.
    double weight(int x, int y) const { return weights_(x, y); }
    const Eigen::MatrixXd& weights() const { return weights_; }

    /// Boundary-to-boundary distances (graph metric, may route through
    /// the interior).
    const Eigen::MatrixXd& boundary_distances() const { return dist_; }

    const Eigen::VectorXd& nu() const { return nu_; }

    /// Quadratic-form matrix of the p = 2 energy: energy(g) = g^T K g.
    /// Kernel of K is the constants; assembled on demand.
    const Eigen::MatrixXd& quadratic_form() const;

private:
    BesovParams params_;
    Eigen::MatrixXd weights_;
    Eigen::MatrixXd dist_;
    Eigen::VectorXd nu_;
    mutable Eigen::MatrixXd quad_form_;
};

BesovKernel besov_kernel(const MetricMeasureGraph& graph, const BesovParams& params);

/// Besov energy: sum over ordered distinct boundary pairs of
/// |f(y)-f(x)|^p w(x,y). Zero exactly on constants.
double besov_energy(const BoundaryFunction& f, const BesovKernel& kernel);

/// energy^{1/p}; a seminorm on boundary functions, a norm modulo constants.
double besov_seminorm(const BoundaryFunction& f, const BesovKernel& kernel);

/// Canonical homogeneous-class representative: subtracts the nu-weighted
/// mean. Idempotent.
BoundaryFunction nu_mean_zero(const BoundaryFunction& f, const MetricMeasureGraph& graph);

/// Relative deviation of sum(weights) from zero, against the max-abs scale.
double functional_sum_defect(const BoundaryFunctional& ell);

/// Subtracts the plain mean so the weights sum to zero exactly.
BoundaryFunctional renormalize_functional(const BoundaryFunctional& ell);

struct DualNormResult {
    double value = 0.0;
    BoundaryFunction maximizer;  ///< unit-seminorm g with ell . g = value (empty for ell = 0)
};

/// Operator norm of a sum-zero boundary functional against the Besov unit
/// ball: sup { ell . g : seminorm(g) <= 1, g nu-mean-zero }. Closed form
/// through the quadratic form for p = 2 (unless cfg.force_iterative);
/// otherwise the reciprocal convex program min { seminorm(g) : ell.g = 1 }
/// solved by reduced damped Newton with epsilon continuation.
/// Throws if the weights do not sum to zero within 1e-12 of the max-abs
/// scale. ell = 0 returns 0.
DualNormResult dual_norm(const BoundaryFunctional& ell, const BesovKernel& kernel,
                         const SearchConfig& cfg = {});

}  // namespace pdtn

#endif
