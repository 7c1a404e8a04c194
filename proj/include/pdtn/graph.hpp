#ifndef PDTN_GRAPH_HPP
#define PDTN_GRAPH_HPP

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace pdtn {

enum class VertexKind { Interior, Boundary };
enum class MeasureKind { Mu, Nu };

struct Vertex {
    std::string id;
    VertexKind kind = VertexKind::Interior;
    double measure = 0.0;  ///< mu for interior vertices, nu for boundary vertices
    std::optional<std::array<double, 2>> pos;
};

struct Edge {
    int u = -1;  ///< endpoint vertex index, -1 if the id did not resolve
    int v = -1;
    double length = 0.0;  ///< lambda_e
    double measure = 0.0; ///< mu_e
};

struct ValidationReport {
    bool pass = true;
    std::vector<std::string> violations;
};

/// Finite weighted graph acting as a discrete metric measure space: an
/// interior vertex set carrying mu, a boundary vertex set carrying nu,
/// and edges carrying a length (metric) and a measure (energy weight).
///
/// Construction never throws on invalid data; validate() reports every
/// violated invariant so file-sourced graphs can be diagnosed. Numerical
/// operations call require_valid() and refuse invalid graphs.
class MetricMeasureGraph {
public:
    MetricMeasureGraph() = default;
    MetricMeasureGraph(std::vector<Vertex> vertices, std::vector<Edge> edges);

    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    int boundary_count() const { return static_cast<int>(boundary_.size()); }
    int interior_count() const { return static_cast<int>(interior_.size()); }

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// Vertex indices of boundary/interior vertices, in input order.
    const std::vector<int>& boundary_vertices() const { return boundary_; }
    const std::vector<int>& interior_vertices() const { return interior_; }

    bool is_boundary(int v) const { return vertices_[v].kind == VertexKind::Boundary; }

    /// Index of a vertex id, or -1 if unknown.
    int index_of(const std::string& id) const;
    const std::string& id_of(int v) const { return vertices_[v].id; }

    /// Position of vertex v within boundary_vertices(), or -1 if interior.
    int boundary_position(int v) const { return boundary_pos_[v]; }

    /// Neighbors of v as (vertex index, edge index) pairs.
    const std::vector<std::pair<int, int>>& neighbors(int v) const { return adjacency_[v]; }

    double mu_vertex(int v) const { return is_boundary(v) ? 0.0 : vertices_[v].measure; }
    double nu_vertex(int v) const { return is_boundary(v) ? vertices_[v].measure : 0.0; }

    /// Total interior measure sum(mu_x) / total boundary measure sum(nu_z).
    double total_mu() const;
    double total_nu() const;

    /// Boundary measures as a vector in boundary order.
    Eigen::VectorXd nu_weights() const;

    /// Throws std::invalid_argument listing all violations if invalid.
    void require_valid() const;

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::vector<int> boundary_;
    std::vector<int> interior_;
    std::vector<int> boundary_pos_;
    std::vector<std::vector<std::pair<int, int>>> adjacency_;
    std::unordered_map<std::string, int> index_;
    std::vector<std::string> duplicate_ids_;

    friend ValidationReport validate(const MetricMeasureGraph&);
};

/// Checks every structural invariant and returns the full list of
/// violations; never mutates the graph.
ValidationReport validate(const MetricMeasureGraph& graph);

/// All-pairs shortest-path distances using edge lengths (Dijkstra per
/// source). Symmetric, zero diagonal. Throws on a disconnected graph.
Eigen::MatrixXd shortest_path_distances(const MetricMeasureGraph& graph);

/// Measure of the closed ball {z : d(center,z) <= r} in the chosen
/// measure (mu sums interior vertices, nu sums boundary vertices).
double ball_measure(const MetricMeasureGraph& graph, const Eigen::MatrixXd& dist,
                    int center, double r, MeasureKind which);

/// Best (worst-case) doubling ratio ball(x,2r)/ball(x,r) over all centers
/// and realized radii in (0, diam]; balls with zero measure are skipped.
/// Always >= 1 on a valid graph.
double doubling_constant(const MetricMeasureGraph& graph, const Eigen::MatrixXd& dist,
                         MeasureKind which);

struct CodimensionSample {
    int center;     ///< boundary vertex index
    double r;
    double mu_ball;
    double nu_ball;
};

struct CodimensionFit {
    double theta_hat = 0.0;  ///< fitted codimension exponent
    double c_hat = 1.0;      ///< max multiplicative deviation exp(max |residual|)
    int sample_count = 0;
};

/// Samples (center, r, mu-ball, nu-ball) over boundary centers and the
/// realizable radius grid with 0 < r < 2 diam(boundary); pass an explicit
/// radius grid to restrict. Samples with an empty mu-ball are dropped.
std::vector<CodimensionSample> codimension_samples(const MetricMeasureGraph& graph,
                                                   const Eigen::MatrixXd& dist,
                                                   const std::vector<double>& radii = {});

/// Least-squares fit of log nu(B) = log mu(B) - Theta log r + const over
/// the codimension samples. Throws if fewer than two distinct radii
/// survive the sampling.
CodimensionFit codimension_fit(const MetricMeasureGraph& graph, const Eigen::MatrixXd& dist,
                               const std::vector<double>& radii = {});

struct SearchConfig;

/// Best constant of the discrete (p,p)-Poincare inequality: the supremum
/// over nonconstant u of ||u - mean(u)||_{L^p(mu)} / p-energy(u)^{1/p},
/// with the mean taken over interior vertices. Exact for p = 2 via a
/// generalized eigenproblem; otherwise multi-start ascent (reported value
/// is the best witness found, a certified lower bound).
double poincare_constant(const MetricMeasureGraph& graph, double p, const SearchConfig& cfg);

}  // namespace pdtn

#endif
