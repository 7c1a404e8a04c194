#include "pdtn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pdtn/search.hpp"
#include "pdtn/sobolev.hpp"

namespace pdtn {

MetricMeasureGraph::MetricMeasureGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    const int n = static_cast<int>(vertices_.size());
    boundary_pos_.assign(n, -1);
    adjacency_.resize(n);
    for (int i = 0; i < n; ++i) {
        auto [it, inserted] = index_.emplace(vertices_[i].id, i);
        (void)it;
        if (!inserted) duplicate_ids_.push_back(vertices_[i].id);
        if (vertices_[i].kind == VertexKind::Boundary) {
            boundary_pos_[i] = static_cast<int>(boundary_.size());
            boundary_.push_back(i);
        } else {
            interior_.push_back(i);
        }
    }
    for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
        const Edge& ed = edges_[e];
        if (ed.u >= 0 && ed.u < n && ed.v >= 0 && ed.v < n && ed.u != ed.v) {
            adjacency_[ed.u].emplace_back(ed.v, e);
            adjacency_[ed.v].emplace_back(ed.u, e);
        }
    }
}

int MetricMeasureGraph::index_of(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

double MetricMeasureGraph::total_mu() const {
    double s = 0.0;
    for (int v : interior_) s += vertices_[v].measure;
    return s;
}

double MetricMeasureGraph::total_nu() const {
    double s = 0.0;
    for (int v : boundary_) s += vertices_[v].measure;
    return s;
}

Eigen::VectorXd MetricMeasureGraph::nu_weights() const {
    Eigen::VectorXd nu(boundary_count());
    for (int i = 0; i < boundary_count(); ++i) nu(i) = vertices_[boundary_[i]].measure;
    return nu;
}

void MetricMeasureGraph::require_valid() const {
    ValidationReport report = validate(*this);
    if (report.pass) return;
    std::ostringstream msg;
    msg << "invalid graph:";
    for (const auto& v : report.violations) msg << " [" << v << "]";
    throw std::invalid_argument(msg.str());
}

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

ValidationReport validate(const MetricMeasureGraph& graph) {
    ValidationReport report;
    auto fail = [&report](const std::string& what) {
        report.pass = false;
        report.violations.push_back(what);
    };

    const int n = graph.vertex_count();
    if (n == 0) fail("graph has no vertices");
    if (graph.interior_count() == 0) fail("interior set is empty");
    if (graph.boundary_count() < 2) fail("fewer than two boundary vertices");
    for (const std::string& id : graph.duplicate_ids_) fail("duplicate vertex id '" + id + "'");

    for (int i = 0; i < n; ++i) {
        const Vertex& v = graph.vertices()[i];
        if (v.id.empty()) fail("vertex " + std::to_string(i) + " has an empty id");
        if (!finite_positive(v.measure)) {
            const char* which = v.kind == VertexKind::Boundary ? "nu" : "mu";
            fail("vertex '" + v.id + "' has non-positive " + which);
        }
    }

    std::set<std::pair<int, int>> seen_edges;
    for (int e = 0; e < graph.edge_count(); ++e) {
        const Edge& ed = graph.edges()[e];
        const std::string tag = "edge " + std::to_string(e);
        if (ed.u < 0 || ed.u >= n || ed.v < 0 || ed.v >= n) {
            fail(tag + " has an unresolved endpoint");
            continue;
        }
        if (ed.u == ed.v) fail(tag + " is a self-loop at '" + graph.id_of(ed.u) + "'");
        if (!finite_positive(ed.length)) fail(tag + " has non-positive length");
        if (!finite_positive(ed.measure)) fail(tag + " has non-positive mu");
        auto key = std::minmax(ed.u, ed.v);
        if (ed.u != ed.v && !seen_edges.insert({key.first, key.second}).second)
            fail(tag + " duplicates edge '" + graph.id_of(ed.u) + "'-'" + graph.id_of(ed.v) + "'");
    }

    for (int b : graph.boundary_vertices())
        if (graph.neighbors(b).empty())
            fail("boundary vertex '" + graph.id_of(b) + "' has no incident edge");

    if (n > 0) {
        std::vector<char> seen(n, 0);
        std::queue<int> frontier;
        frontier.push(0);
        seen[0] = 1;
        int reached = 1;
        while (!frontier.empty()) {
            int v = frontier.front();
            frontier.pop();
            for (auto [w, e] : graph.neighbors(v)) {
                (void)e;
                if (!seen[w]) {
                    seen[w] = 1;
                    ++reached;
                    frontier.push(w);
                }
            }
        }
        if (reached != n) fail("graph is not connected");
    }

    return report;
}

Eigen::MatrixXd shortest_path_distances(const MetricMeasureGraph& graph) {
    graph.require_valid();
    const int n = graph.vertex_count();
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(n, n, inf);

    using Item = std::pair<double, int>;
    for (int s = 0; s < n; ++s) {
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist(s, s) = 0.0;
        heap.emplace(0.0, s);
        while (!heap.empty()) {
            auto [d, v] = heap.top();
            heap.pop();
            if (d > dist(s, v)) continue;
            for (auto [w, e] : graph.neighbors(v)) {
                double nd = d + graph.edges()[e].length;
                if (nd < dist(s, w)) {
                    dist(s, w) = nd;
                    heap.emplace(nd, w);
                }
            }
        }
    }
    if (!dist.allFinite()) throw std::invalid_argument("graph is not connected");
    return dist;
}

double ball_measure(const MetricMeasureGraph& graph, const Eigen::MatrixXd& dist,
                    int center, double r, MeasureKind which) {
    double total = 0.0;
    for (int v = 0; v < graph.vertex_count(); ++v) {
        if (dist(center, v) > r) continue;
        total += which == MeasureKind::Mu ? graph.mu_vertex(v) : graph.nu_vertex(v);
    }
    return total;
}

namespace {

/// Per-center view: radii sorted ascending with cumulative measure, so a
/// ball measure is one binary search.
struct BallTable {
    std::vector<double> radius;
    std::vector<double> cumulative;

    double measure(double r) const {
        auto it = std::upper_bound(radius.begin(), radius.end(), r);
        if (it == radius.begin()) return 0.0;
        return cumulative[static_cast<size_t>(it - radius.begin()) - 1];
    }
};

BallTable ball_table(const MetricMeasureGraph& graph, const Eigen::MatrixXd& dist,
                     int center, MeasureKind which) {
    const int n = graph.vertex_count();
    std::vector<std::pair<double, double>> items;
    items.reserve(static_cast<size_t>(n));
    for (int v = 0; v < n; ++v) {
        double m = which == MeasureKind::Mu ? graph.mu_vertex(v) : graph.nu_vertex(v);
        items.emplace_back(dist(center, v), m);
    }
    std::sort(items.begin(), items.end());
    BallTable table;
    double running = 0.0;
    for (auto& [r, m] : items) {
        running += m;
        if (!table.radius.empty() && table.radius.back() == r) {
            table.cumulative.back() = running;
        } else {
            table.radius.push_back(r);
            table.cumulative.push_back(running);
        }
    }
    return table;
}

}  // namespace

double doubling_constant(const MetricMeasureGraph& graph, const Eigen::MatrixXd& dist,
                         MeasureKind which) {
    graph.require_valid();
    const int n = graph.vertex_count();
    double worst = 1.0;
    for (int c = 0; c < n; ++c) {
        BallTable table = ball_table(graph, dist, c, which);
        for (double r : table.radius) {
            if (r <= 0.0) continue;
            double small = table.measure(r);
            if (small <= 0.0) continue;
            worst = std::max(worst, table.measure(2.0 * r) / small);
        }
    }
    return worst;
}

namespace {

double boundary_diameter(const MetricMeasureGraph& graph, const Eigen::MatrixXd& dist) {
    double diam = 0.0;
    for (int a : graph.boundary_vertices())
        for (int b : graph.boundary_vertices()) diam = std::max(diam, dist(a, b));
    return diam;
}

std::vector<double> default_radius_grid(const MetricMeasureGraph& graph,
                                        const Eigen::MatrixXd& dist) {
    // Stay well below the boundary diameter: once balls cover most of the
    // graph both measures saturate and the log-log slope flattens, which
    // biases the fitted exponent toward zero. Tiny graphs may not have
    // two distinct radii below the cap; relax to the full range there.
    const double diam = boundary_diameter(graph, dist);
    for (double cap : {0.25 * diam, 2.0 * diam}) {
        std::set<double> grid;
        for (int c : graph.boundary_vertices())
            for (int v = 0; v < graph.vertex_count(); ++v) {
                double r = dist(c, v);
                if (r > 0.0 && r < cap) grid.insert(r);
            }
        if (grid.size() >= 2) return {grid.begin(), grid.end()};
    }
    return {};
}

}  // namespace

std::vector<CodimensionSample> codimension_samples(const MetricMeasureGraph& graph,
                                                   const Eigen::MatrixXd& dist,
                                                   const std::vector<double>& radii) {
    graph.require_valid();
    std::vector<double> grid = radii.empty() ? default_radius_grid(graph, dist) : radii;
    std::vector<CodimensionSample> samples;
    for (int c : graph.boundary_vertices()) {
        BallTable mu_table = ball_table(graph, dist, c, MeasureKind::Mu);
        BallTable nu_table = ball_table(graph, dist, c, MeasureKind::Nu);
        for (double r : grid) {
            if (!(r > 0.0)) continue;
            double mu_ball = mu_table.measure(r);
            if (mu_ball <= 0.0) continue;  // log-fit cannot use empty volume
            double nu_ball = nu_table.measure(r);
            if (nu_ball <= 0.0) continue;
            samples.push_back({c, r, mu_ball, nu_ball});
        }
    }
    return samples;
}

CodimensionFit codimension_fit(const MetricMeasureGraph& graph, const Eigen::MatrixXd& dist,
                               const std::vector<double>& radii) {
    std::vector<CodimensionSample> samples = codimension_samples(graph, dist, radii);
    std::set<double> distinct;
    for (const auto& s : samples) distinct.insert(s.r);
    if (distinct.size() < 2)
        throw std::invalid_argument("codimension fit needs samples at two or more radii");

    // Least squares for z = a * log r + b with z = log(nu ball / mu ball);
    // the fitted exponent is Theta = -a.
    double sxx = 0.0, sx = 0.0, sxz = 0.0, sz = 0.0;
    const double m = static_cast<double>(samples.size());
    for (const auto& s : samples) {
        double x = std::log(s.r);
        double z = std::log(s.nu_ball) - std::log(s.mu_ball);
        sxx += x * x;
        sx += x;
        sxz += x * z;
        sz += z;
    }
    double denom = m * sxx - sx * sx;
    double a = (m * sxz - sx * sz) / denom;
    double b = (sz * sxx - sx * sxz) / denom;

    double worst = 0.0;
    for (const auto& s : samples) {
        double x = std::log(s.r);
        double z = std::log(s.nu_ball) - std::log(s.mu_ball);
        worst = std::max(worst, std::abs(z - (a * x + b)));
    }

    CodimensionFit fit;
    fit.theta_hat = -a;
    fit.c_hat = std::exp(worst);
    fit.sample_count = static_cast<int>(samples.size());
    return fit;
}

double poincare_constant(const MetricMeasureGraph& graph, double p, const SearchConfig& cfg) {
    graph.require_valid();
    if (!(p > 1.0)) throw std::invalid_argument("poincare_constant requires p > 1");
    const int n = graph.vertex_count();

    Eigen::VectorXd m = Eigen::VectorXd::Zero(n);
    for (int v : graph.interior_vertices()) m(v) = graph.mu_vertex(v);
    const double mass = m.sum();

    if (p == 2.0 && !cfg.force_iterative) {
        // Centered mass form C = M - m m^T / mass against the stiffness
        // form, both restricted to the complement of constants.
        Eigen::MatrixXd A = Eigen::MatrixXd(stiffness_matrix(graph));
        Eigen::MatrixXd C = Eigen::MatrixXd(m.asDiagonal());
        C -= (m * m.transpose()) / mass;

        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(Eigen::VectorXd::Ones(n)));
        Eigen::MatrixXd Q = qr.householderQ();
        Eigen::MatrixXd Z = Q.rightCols(n - 1);  // orthonormal complement of constants

        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
            Z.transpose() * C * Z, Z.transpose() * A * Z);
        double lambda = solver.eigenvalues().maxCoeff();
        return std::sqrt(std::max(lambda, 0.0));
    }

    RatioProblem problem;
    problem.numerator = [&graph, m, mass, p](const Eigen::VectorXd& u) {
        double mean = m.dot(u) / mass;
        double s = 0.0;
        for (int i = 0; i < u.size(); ++i)
            if (m(i) > 0.0) s += m(i) * std::pow(std::abs(u(i) - mean), p);
        return s;
    };
    problem.denominator = [&graph, p](const Eigen::VectorXd& u) {
        return p_energy(u, graph, p);
    };
    problem.numerator_grad = [m, mass, p](const Eigen::VectorXd& u) {
        double mean = m.dot(u) / mass;
        auto phi = [p](double t) { return std::pow(std::abs(t), p - 2.0) * t; };
        double coupling = 0.0;
        for (int i = 0; i < u.size(); ++i)
            if (m(i) > 0.0) coupling += m(i) * phi(u(i) - mean);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(u.size());
        for (int i = 0; i < u.size(); ++i)
            if (m(i) > 0.0) g(i) = p * (m(i) * phi(u(i) - mean) - coupling * m(i) / mass);
        return g;
    };
    problem.denominator_grad = [&graph, p](const Eigen::VectorXd& u) {
        return Eigen::VectorXd(p * p_laplacian(u, graph, p));
    };

    std::vector<Eigen::VectorXd> warm;
    if (p != 2.0) {
        SearchConfig exact_cfg = cfg;
        exact_cfg.force_iterative = false;
        // Seed with the p = 2 extremizer; nearby exponents stay close.
        Eigen::MatrixXd A = Eigen::MatrixXd(stiffness_matrix(graph));
        Eigen::MatrixXd C = Eigen::MatrixXd(m.asDiagonal());
        C -= (m * m.transpose()) / mass;
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(Eigen::VectorXd::Ones(n)));
        Eigen::MatrixXd Q = qr.householderQ();
        Eigen::MatrixXd Z = Q.rightCols(n - 1);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
            Z.transpose() * C * Z, Z.transpose() * A * Z);
        int best = 0;
        solver.eigenvalues().maxCoeff(&best);
        warm.push_back(Z * solver.eigenvectors().col(best));
    }

    NormEstimate est = maximize_ratio_gradient(problem, n, warm, cfg);
    return std::pow(std::max(est.value, 0.0), 1.0 / p);
}

}  // namespace pdtn
