#ifndef PDTN_SOBOLEV_HPP
#define PDTN_SOBOLEV_HPP

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pdtn/besov.hpp"
#include "pdtn/graph.hpp"
#include "pdtn/search.hpp"

namespace pdtn {

/// Values on all vertices, in vertex order.
using VertexFunction = Eigen::VectorXd;

/// Per-edge difference quotients g_e = (u(v) - u(u)) / length_e, in edge
/// order and with the edge's stored (u, v) orientation.
Eigen::VectorXd edge_gradients(const VertexFunction& u, const MetricMeasureGraph& graph);

/// Dirichlet p-energy: sum_e mu_e |g_e|^p.
double p_energy(const VertexFunction& u, const MetricMeasureGraph& graph, double p);

/// First variation of the p-energy at u in direction v:
/// sum_e mu_e |g_e(u)|^{p-2} g_e(u) g_e(v). Symmetric ruler for the
/// summation-by-parts identity pairing(u; v) = sum_z lap(u)(z) v(z).
double p_pairing(const VertexFunction& u, const VertexFunction& v,
                 const MetricMeasureGraph& graph, double p);

/// Graph p-Laplacian: lap(u)(z) = sum_{x ~ z} (mu_e / len_e^2)
/// |g_e|^{p-2} (u(z) - u(x)). Linear in u only at p = 2.
VertexFunction p_laplacian(const VertexFunction& u, const MetricMeasureGraph& graph, double p);

/// Restriction to the boundary, in boundary order.
BoundaryFunction trace(const VertexFunction& u, const MetricMeasureGraph& graph);

/// 2-harmonic extension of boundary data: the unique u with trace(u) = f
/// whose 2-energy is minimal. Linear in f for every p, which is what the
/// extension-operator norms require; p-harmonic extensions would not be.
VertexFunction extend_linear(const BoundaryFunction& f, const MetricMeasureGraph& graph);

/// Weighted graph Laplacian (edge weights mu_e / len_e^2), the Hessian of
/// half the 2-energy. Row/column order is vertex order.
Eigen::SparseMatrix<double> stiffness_matrix(const MetricMeasureGraph& graph);

/// p-capacity of a vertex set S: the minimal full Sobolev norm
/// (sum_x mu_x |u_x|^p)^{1/p} + p_energy(u)^{1/p} over potentials with
/// u = 1 on S and 0 <= u <= 1 everywhere (box-constrained convex
/// program, solved by projected gradient descent with smoothing to
/// cfg.tol). S holds vertex indices, boundary or interior. Throws if S
/// is empty or out of range.
double capacity_p(const std::vector<int>& vertex_set, const MetricMeasureGraph& graph, double p,
                  const SearchConfig& cfg = {});

/// Trace inequality constant: sup over nonconstant u of
/// seminorm(trace u) / energy(u)^{1/p}. Exact via a generalized
/// eigenproblem at p = 2; multi-start ascent otherwise (value is then a
/// certified lower bound, exact = false).
NormEstimate trace_norm(const MetricMeasureGraph& graph, const BesovKernel& kernel,
                        const SearchConfig& cfg = {});

/// Extension inequality constant: sup over nonconstant boundary f of
/// energy(extend f)^{1/p} / seminorm(f). Same exactness contract as
/// trace_norm.
NormEstimate extension_norm(const MetricMeasureGraph& graph, const BesovKernel& kernel,
                            const SearchConfig& cfg = {});

}  // namespace pdtn

#endif
