#include "pdtn/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace pdtn {

namespace {

/// |t|^{p-2} t with the continuous-limit value 0 at t = 0 (p < 2 would
/// otherwise divide by zero).
double phi(double t, double p) {
    if (t == 0.0) return 0.0;
    return std::pow(std::abs(t), p - 2.0) * t;
}

}  // namespace

Eigen::VectorXd edge_gradients(const VertexFunction& u, const MetricMeasureGraph& graph) {
    if (u.size() != graph.vertex_count())
        throw std::invalid_argument("vertex function has wrong length");
    Eigen::VectorXd g(graph.edge_count());
    for (int e = 0; e < graph.edge_count(); ++e) {
        const Edge& ed = graph.edges()[e];
        g(e) = (u(ed.v) - u(ed.u)) / ed.length;
    }
    return g;
}

double p_energy(const VertexFunction& u, const MetricMeasureGraph& graph, double p) {
    Eigen::VectorXd g = edge_gradients(u, graph);
    double energy = 0.0;
    for (int e = 0; e < graph.edge_count(); ++e)
        energy += graph.edges()[e].measure * std::pow(std::abs(g(e)), p);
    return energy;
}

double p_pairing(const VertexFunction& u, const VertexFunction& v,
                 const MetricMeasureGraph& graph, double p) {
    Eigen::VectorXd gu = edge_gradients(u, graph);
    Eigen::VectorXd gv = edge_gradients(v, graph);
    double s = 0.0;
    for (int e = 0; e < graph.edge_count(); ++e)
        s += graph.edges()[e].measure * phi(gu(e), p) * gv(e);
    return s;
}

VertexFunction p_laplacian(const VertexFunction& u, const MetricMeasureGraph& graph, double p) {
    Eigen::VectorXd g = edge_gradients(u, graph);
    VertexFunction lap = VertexFunction::Zero(graph.vertex_count());
    for (int e = 0; e < graph.edge_count(); ++e) {
        const Edge& ed = graph.edges()[e];
        // flux mu_e/lambda_e |g|^{p-2} g flows from u to v; each endpoint
        // sees it with opposite sign, so the total always sums to zero.
        double flux = ed.measure / ed.length * phi(g(e), p);
        lap(ed.v) += flux;
        lap(ed.u) -= flux;
    }
    return lap;
}

BoundaryFunction trace(const VertexFunction& u, const MetricMeasureGraph& graph) {
    if (u.size() != graph.vertex_count())
        throw std::invalid_argument("vertex function has wrong length");
    BoundaryFunction f(graph.boundary_count());
    for (int i = 0; i < graph.boundary_count(); ++i) f(i) = u(graph.boundary_vertices()[i]);
    return f;
}

Eigen::SparseMatrix<double> stiffness_matrix(const MetricMeasureGraph& graph) {
    const int n = graph.vertex_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(graph.edge_count()) * 4);
    for (const Edge& ed : graph.edges()) {
        double w = ed.measure / (ed.length * ed.length);
        trips.emplace_back(ed.u, ed.u, w);
        trips.emplace_back(ed.v, ed.v, w);
        trips.emplace_back(ed.u, ed.v, -w);
        trips.emplace_back(ed.v, ed.u, -w);
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

VertexFunction extend_linear(const BoundaryFunction& f, const MetricMeasureGraph& graph) {
    graph.require_valid();
    const int n = graph.vertex_count();
    const int ni = graph.interior_count();
    if (f.size() != graph.boundary_count())
        throw std::invalid_argument("boundary function has wrong length");

    VertexFunction u = VertexFunction::Zero(n);
    for (int i = 0; i < graph.boundary_count(); ++i) u(graph.boundary_vertices()[i]) = f(i);
    if (ni == 0) return u;

    std::vector<int> interior_pos(n, -1);
    for (int i = 0; i < ni; ++i) interior_pos[graph.interior_vertices()[i]] = i;

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ni);
    for (const Edge& ed : graph.edges()) {
        double w = ed.measure / (ed.length * ed.length);
        int iu = interior_pos[ed.u];
        int iv = interior_pos[ed.v];
        if (iu >= 0) trips.emplace_back(iu, iu, w);
        if (iv >= 0) trips.emplace_back(iv, iv, w);
        if (iu >= 0 && iv >= 0) {
            trips.emplace_back(iu, iv, -w);
            trips.emplace_back(iv, iu, -w);
        } else if (iu >= 0) {
            rhs(iu) += w * u(ed.v);
        } else if (iv >= 0) {
            rhs(iv) += w * u(ed.u);
        }
    }
    Eigen::SparseMatrix<double> aii(ni, ni);
    aii.setFromTriplets(trips.begin(), trips.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(aii);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("interior stiffness factorization failed");
    Eigen::VectorXd ui = solver.solve(rhs);
    for (int i = 0; i < ni; ++i) u(graph.interior_vertices()[i]) = ui(i);
    return u;
}

double capacity_p(const std::vector<int>& vertex_set, const MetricMeasureGraph& graph, double p,
                  const SearchConfig& cfg) {
    graph.require_valid();
    if (vertex_set.empty()) throw std::invalid_argument("capacity set is empty");
    const int n = graph.vertex_count();
    std::set<int> pinned;
    for (int v : vertex_set) {
        if (v < 0 || v >= n) throw std::invalid_argument("capacity set index out of range");
        pinned.insert(v);
    }

    Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    for (int v : graph.interior_vertices()) mu(v) = graph.mu_vertex(v);

    VertexFunction u = VertexFunction::Zero(n);
    for (int v : pinned) u(v) = 1.0;

    auto project = [&](VertexFunction w) {
        for (int v = 0; v < n; ++v) w(v) = std::clamp(w(v), 0.0, 1.0);
        for (int v : pinned) w(v) = 1.0;
        return w;
    };

    // Smoothed Sobolev norm: both summands become smooth in u while
    // staying convex (each is a norm of (., delta) composed with a
    // linear map), so projected gradient descent reaches the minimum.
    auto smoothed = [&](const VertexFunction& w, double delta, double* mass_out,
                        double* energy_out) {
        double d2 = delta * delta;
        double mass = 0.0;
        for (int v = 0; v < n; ++v)
            if (mu(v) > 0.0) mass += mu(v) * std::pow(w(v) * w(v) + d2, p / 2.0);
        double energy = 0.0;
        for (const Edge& ed : graph.edges()) {
            double g = (w(ed.v) - w(ed.u)) / ed.length;
            energy += ed.measure * std::pow(g * g + d2, p / 2.0);
        }
        if (mass_out) *mass_out = mass;
        if (energy_out) *energy_out = energy;
        return std::pow(mass, 1.0 / p) + std::pow(energy, 1.0 / p);
    };

    for (double delta : {1e-2, 1e-4, 1e-6, 1e-8, 1e-10}) {
        double d2 = delta * delta;
        double mass, energy;
        double f = smoothed(u, delta, &mass, &energy);
        double step = 1.0;
        for (int it = 0; it < std::max(cfg.max_iters, 50); ++it) {
            Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
            double mass_factor = std::pow(mass, 1.0 / p - 1.0);
            for (int v = 0; v < n; ++v)
                if (mu(v) > 0.0)
                    grad(v) += mass_factor * mu(v) * u(v) *
                               std::pow(u(v) * u(v) + d2, p / 2.0 - 1.0);
            double energy_factor = std::pow(energy, 1.0 / p - 1.0);
            for (const Edge& ed : graph.edges()) {
                double g = (u(ed.v) - u(ed.u)) / ed.length;
                double flux = energy_factor * ed.measure / ed.length *
                              g * std::pow(g * g + d2, p / 2.0 - 1.0);
                grad(ed.v) += flux;
                grad(ed.u) -= flux;
            }
            for (int v : pinned) grad(v) = 0.0;

            bool accepted = false;
            for (int back = 0; back < 60; ++back) {
                VertexFunction cand = project(u - step * grad);
                double fc = smoothed(cand, delta, nullptr, nullptr);
                if (fc < f - 1e-12 * std::abs(f)) {
                    double gain = f - fc;
                    u = cand;
                    f = fc;
                    smoothed(u, delta, &mass, &energy);
                    step *= 2.0;
                    accepted = true;
                    if (gain < cfg.tol * (1.0 + std::abs(f))) accepted = false;  // converged
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
        }
    }

    double mass = 0.0;
    for (int v = 0; v < n; ++v)
        if (mu(v) > 0.0) mass += mu(v) * std::pow(std::abs(u(v)), p);
    return std::pow(mass, 1.0 / p) + std::pow(p_energy(u, graph, p), 1.0 / p);
}

namespace {

/// Orthonormal basis of the complement of constants in R^n.
Eigen::MatrixXd constant_complement(int n) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd(Eigen::VectorXd::Ones(n)));
    Eigen::MatrixXd Q = qr.householderQ();
    return Q.rightCols(n - 1);
}

/// Dense 2-harmonic extension matrix, boundary order to vertex order.
Eigen::MatrixXd extension_matrix(const MetricMeasureGraph& graph) {
    const int m = graph.boundary_count();
    Eigen::MatrixXd E(graph.vertex_count(), m);
    for (int j = 0; j < m; ++j) {
        BoundaryFunction f = BoundaryFunction::Zero(m);
        f(j) = 1.0;
        E.col(j) = extend_linear(f, graph);
    }
    return E;
}

Eigen::MatrixXd trace_matrix(const MetricMeasureGraph& graph) {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(graph.boundary_count(), graph.vertex_count());
    for (int i = 0; i < graph.boundary_count(); ++i) T(i, graph.boundary_vertices()[i]) = 1.0;
    return T;
}

/// Boundary-energy gradient of f |-> besov_energy(f, kernel).
Eigen::VectorXd besov_energy_gradient(const BoundaryFunction& f, const BesovKernel& kernel) {
    const int m = kernel.boundary_count();
    const double p = kernel.params().p;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(m);
    for (int y = 0; y < m; ++y)
        for (int x = 0; x < m; ++x) {
            if (x == y) continue;
            double d = f(y) - f(x);
            double t = p * phi(d, p) * kernel.weight(x, y);
            grad(y) += t;
            grad(x) -= t;
        }
    return grad;
}

}  // namespace

NormEstimate trace_norm(const MetricMeasureGraph& graph, const BesovKernel& kernel,
                        const SearchConfig& cfg) {
    graph.require_valid();
    const int n = graph.vertex_count();
    const double p = kernel.params().p;
    Eigen::MatrixXd T = trace_matrix(graph);
    const Eigen::MatrixXd& K = kernel.quadratic_form();

    if (p == 2.0 && !cfg.force_iterative) {
        Eigen::MatrixXd A = Eigen::MatrixXd(stiffness_matrix(graph));
        Eigen::MatrixXd Z = constant_complement(n);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
            Z.transpose() * T.transpose() * K * T * Z, Z.transpose() * A * Z);
        int best = 0;
        double lambda = solver.eigenvalues().maxCoeff(&best);
        NormEstimate est;
        est.value = std::sqrt(std::max(lambda, 0.0));
        est.witness = Z * solver.eigenvectors().col(best);
        est.exact = true;
        return est;
    }

    RatioProblem problem;
    problem.numerator = [&graph, &kernel](const Eigen::VectorXd& u) {
        return besov_energy(trace(u, graph), kernel);
    };
    problem.denominator = [&graph, p](const Eigen::VectorXd& u) { return p_energy(u, graph, p); };
    problem.numerator_grad = [&graph, &kernel, &T](const Eigen::VectorXd& u) {
        return Eigen::VectorXd(T.transpose() * besov_energy_gradient(trace(u, graph), kernel));
    };
    problem.denominator_grad = [&graph, p](const Eigen::VectorXd& u) {
        return Eigen::VectorXd(p * p_laplacian(u, graph, p));
    };

    // Quadratic surrogate of the same ratio as a warm start.
    std::vector<Eigen::VectorXd> warm;
    {
        Eigen::MatrixXd A = Eigen::MatrixXd(stiffness_matrix(graph));
        Eigen::MatrixXd Z = constant_complement(n);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
            Z.transpose() * T.transpose() * K * T * Z, Z.transpose() * A * Z);
        int best = 0;
        solver.eigenvalues().maxCoeff(&best);
        warm.push_back(Z * solver.eigenvectors().col(best));
    }

    NormEstimate est = maximize_ratio_gradient(problem, n, warm, cfg);
    est.value = std::pow(std::max(est.value, 0.0), 1.0 / p);
    return est;
}

NormEstimate extension_norm(const MetricMeasureGraph& graph, const BesovKernel& kernel,
                            const SearchConfig& cfg) {
    graph.require_valid();
    const int m = graph.boundary_count();
    const double p = kernel.params().p;
    Eigen::MatrixXd E = extension_matrix(graph);
    const Eigen::MatrixXd& K = kernel.quadratic_form();

    if (p == 2.0 && !cfg.force_iterative) {
        Eigen::MatrixXd A = Eigen::MatrixXd(stiffness_matrix(graph));
        Eigen::MatrixXd Z = constant_complement(m);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
            Z.transpose() * E.transpose() * A * E * Z, Z.transpose() * K * Z);
        int best = 0;
        double lambda = solver.eigenvalues().maxCoeff(&best);
        NormEstimate est;
        est.value = std::sqrt(std::max(lambda, 0.0));
        est.witness = Z * solver.eigenvectors().col(best);
        est.exact = true;
        return est;
    }

    RatioProblem problem;
    problem.numerator = [&graph, &E, p](const Eigen::VectorXd& f) {
        return p_energy(E * f, graph, p);
    };
    problem.denominator = [&kernel](const Eigen::VectorXd& f) { return besov_energy(f, kernel); };
    problem.numerator_grad = [&graph, &E, p](const Eigen::VectorXd& f) {
        return Eigen::VectorXd(p * E.transpose() * p_laplacian(E * f, graph, p));
    };
    problem.denominator_grad = [&kernel](const Eigen::VectorXd& f) {
        return besov_energy_gradient(f, kernel);
    };

    std::vector<Eigen::VectorXd> warm;
    {
        Eigen::MatrixXd A = Eigen::MatrixXd(stiffness_matrix(graph));
        Eigen::MatrixXd Z = constant_complement(m);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
            Z.transpose() * E.transpose() * A * E * Z, Z.transpose() * K * Z);
        int best = 0;
        solver.eigenvalues().maxCoeff(&best);
        warm.push_back(Z * solver.eigenvectors().col(best));
    }

    NormEstimate est = maximize_ratio_gradient(problem, m, warm, cfg);
    est.value = std::pow(std::max(est.value, 0.0), 1.0 / p);
    return est;
}

}  // namespace pdtn
