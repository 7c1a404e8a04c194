#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pdtn/generators.hpp"
#include "pdtn/search.hpp"
#include "pdtn/sobolev.hpp"
#include "pdtn/solvers.hpp"
#include "test_util.hpp"

using namespace pdtn;
using pdtn_test::kernel_for;
using pdtn_test::p3;
using pdtn_test::vec;

TEST_CASE("gradients, energy, pairing, laplacian on the path") {
    auto g = p3();
    auto u = vec({0.0, 0.5, 1.0});
    auto grads = edge_gradients(u, g);
    CHECK(grads(0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(grads(1) == doctest::Approx(0.5).epsilon(1e-15));

    CHECK(p_energy(u, g, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p_energy(u, g, 3.0) == doctest::Approx(0.25).epsilon(1e-14));

    auto hat = vec({0.0, 1.0, 0.0});
    auto lap = p_laplacian(hat, g, 2.0);
    CHECK(lap(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(lap(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(lap(2) == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("summation by parts is exact") {
    for (int trial = 0; trial < 12; ++trial) {
        auto g = make_random_graph(6 + 3 * trial, 40 + trial);
        for (double p : {1.5, 2.0, 3.0}) {
            auto u = gaussian_vector(g.vertex_count(), 1000 + trial);
            auto v = gaussian_vector(g.vertex_count(), 2000 + trial);
            double lhs = p_pairing(u, v, g, p);
            double rhs = p_laplacian(u, g, p).dot(v);
            double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
            CHECK(std::abs(lhs - rhs) <= 1e-11 * scale);
        }
    }
}

TEST_CASE("laplacian fluxes balance globally") {
    auto g = make_random_graph(17, 3);
    for (double p : {1.5, 2.0, 3.0}) {
        auto u = gaussian_vector(g.vertex_count(), 5);
        double total = p_laplacian(u, g, p).sum();
        CHECK(std::abs(total) <= 1e-12 * p_laplacian(u, g, p).cwiseAbs().maxCoeff());
    }
}

TEST_CASE("pairing obeys the Holder bound") {
    auto g = make_grid(4);
    for (double p : {1.5, 2.0, 3.0}) {
        for (int t = 0; t < 6; ++t) {
            auto u = gaussian_vector(g.vertex_count(), 300 + t);
            auto v = gaussian_vector(g.vertex_count(), 400 + t);
            double lhs = std::abs(p_pairing(u, v, g, p));
            double rhs = std::pow(p_energy(u, g, p), (p - 1.0) / p) *
                         std::pow(p_energy(v, g, p), 1.0 / p);
            CHECK(lhs <= rhs * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("trace and linear extension") {
    auto g = p3();
    SUBCASE("extension interpolates linearly on the path") {
        auto u = extend_linear(vec({0.0, 1.0}), g);
        CHECK(u(g.index_of("a")) == doctest::Approx(0.0));
        CHECK(u(g.index_of("b")) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(u(g.index_of("c")) == doctest::Approx(1.0));
    }
    SUBCASE("trace inverts extension exactly") {
        auto gg = make_grid(4);
        auto f = gaussian_vector(gg.boundary_count(), 8);
        auto back = trace(extend_linear(f, gg), gg);
        CHECK((back - f).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("extension is linear") {
        auto gg = make_grid(4);
        auto f1 = gaussian_vector(gg.boundary_count(), 21);
        auto f2 = gaussian_vector(gg.boundary_count(), 22);
        Eigen::VectorXd sum = extend_linear(f1 + f2, gg);
        Eigen::VectorXd parts = extend_linear(f1, gg) + extend_linear(f2, gg);
        CHECK((sum - parts).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("extension minimizes the quadratic energy") {
        auto gg = make_grid(4);
        auto f = gaussian_vector(gg.boundary_count(), 23);
        Eigen::VectorXd star = extend_linear(f, gg);
        double best = p_energy(star, gg, 2.0);
        for (int t = 0; t < 6; ++t) {
            Eigen::VectorXd comp = star;
            for (int i : gg.interior_vertices())
                comp(i) += 0.3 * gaussian_vector(1, 600 + 7 * t + i)(0);
            CHECK(p_energy(comp, gg, 2.0) >= best - 1e-12);
        }
    }
}

TEST_CASE("stiffness matrix represents the quadratic energy") {
    auto g = make_random_graph(12, 19);
    auto A = stiffness_matrix(g);
    auto u = gaussian_vector(g.vertex_count(), 31);
    double quad = u.dot(Eigen::VectorXd(A * u));
    CHECK(quad == doctest::Approx(p_energy(u, g, 2.0)).epsilon(1e-11));
    Eigen::VectorXd lap2 = A * u;
    CHECK((lap2 - p_laplacian(u, g, 2.0)).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("capacity of vertex sets") {
    auto g = p3();
    SUBCASE("flat valley on the path evaluates to one for every p") {
        for (double p : {1.5, 2.0, 3.0}) {
            double cap = capacity_p({g.index_of("a")}, g, p);
            CHECK(cap == doctest::Approx(1.0).epsilon(2e-4));
        }
    }
    SUBCASE("pinning everything leaves only the mass term") {
        std::vector<int> all = {0, 1, 2};
        CHECK(capacity_p(all, g, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
        // total interior mass is one; with mu(b) = 4 the mass term is 2
        std::vector<Vertex> vs = g.vertices();
        vs[1].measure = 4.0;
        std::vector<Edge> es = g.edges();
        MetricMeasureGraph g4(std::move(vs), std::move(es));
        CHECK(capacity_p({0, 1, 2}, g4, 2.0) == doctest::Approx(2.0).epsilon(1e-9));
    }
    SUBCASE("monotone in the pinned set") {
        auto gg = make_grid(4);
        double small = capacity_p({gg.index_of("r0c0")}, gg, 2.0);
        double big = capacity_p({gg.index_of("r0c0"), gg.index_of("r1c1")}, gg, 2.0);
        CHECK(small <= big * (1.0 + 1e-6) + 1e-9);
    }
    SUBCASE("brute-force cross-check on a four-vertex path") {
        auto g4 = make_path(4);
        for (double p : {2.0, 3.0}) {
            double cap = capacity_p({0}, g4, p);
            auto objective = [&](const Eigen::VectorXd& x) {
                Eigen::VectorXd u(4);
                u << 1.0, x(0), x(1), x(2);
                for (int i = 0; i < 3; ++i)
                    if (x(i) < 0.0 || x(i) > 1.0) return 1e9;
                double mass = g4.mu_vertex(1) * std::pow(std::abs(x(0)), p) +
                              g4.mu_vertex(2) * std::pow(std::abs(x(1)), p);
                return std::pow(mass, 1.0 / p) + std::pow(p_energy(u, g4, p), 1.0 / p);
            };
            Eigen::VectorXd lo = Eigen::VectorXd::Zero(3);
            Eigen::VectorXd hi = Eigen::VectorXd::Ones(3);
            Eigen::VectorXd xstar = brute_force_minimize(objective, lo, hi, 11);
            CHECK(cap == doctest::Approx(objective(xstar)).epsilon(2e-3));
        }
    }
    SUBCASE("bad sets are refused") {
        CHECK_THROWS_AS(capacity_p({}, g, 2.0), std::invalid_argument);
        CHECK_THROWS_AS(capacity_p({99}, g, 2.0), std::invalid_argument);
    }
}

TEST_CASE("trace and extension constants") {
    SUBCASE("path closed forms, exact route") {
        auto g = p3();
        auto K = kernel_for(g, 2.0);
        auto tr = trace_norm(g, K);
        auto ext = extension_norm(g, K);
        CHECK(tr.exact);
        CHECK(ext.exact);
        CHECK(tr.value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(ext.value == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(tr.witness.size() == g.vertex_count());
        CHECK(ext.witness.size() == g.boundary_count());
    }
    SUBCASE("path closed forms away from p = 2") {
        // With theta = 1/2 the one-dimensional quotient gives
        // tr = 2^{1/2 - 1/p} and ext = 2^{1/p - 1/2}; the product is one.
        auto g = p3();
        for (double p : {1.5, 3.0}) {
            auto K = kernel_for(g, p);
            SearchConfig cfg;
            cfg.restarts = 6;
            auto tr = trace_norm(g, K, cfg);
            auto ext = extension_norm(g, K, cfg);
            CHECK_FALSE(tr.exact);
            CHECK(tr.value == doctest::Approx(std::pow(2.0, 0.5 - 1.0 / p)).epsilon(1e-4));
            CHECK(ext.value == doctest::Approx(std::pow(2.0, 1.0 / p - 0.5)).epsilon(1e-4));
        }
    }
    SUBCASE("exact and iterative routes agree at p = 2") {
        auto g = make_grid(4);
        auto K = kernel_for(g, 2.0);
        SearchConfig iterative;
        iterative.force_iterative = true;
        iterative.restarts = 10;
        auto tr_exact = trace_norm(g, K);
        auto tr_iter = trace_norm(g, K, iterative);
        CHECK(tr_iter.value == doctest::Approx(tr_exact.value).epsilon(1e-6));
        CHECK(tr_iter.value <= tr_exact.value * (1.0 + 1e-9));
        auto ext_exact = extension_norm(g, K);
        auto ext_iter = extension_norm(g, K, iterative);
        CHECK(ext_iter.value == doctest::Approx(ext_exact.value).epsilon(1e-6));
    }
    SUBCASE("norm product bounds one since the trace inverts the extension") {
        for (double p : {1.5, 2.0, 3.0}) {
            auto g = make_grid(4);
            auto K = kernel_for(g, p);
            SearchConfig cfg;
            cfg.restarts = 6;
            double tr = trace_norm(g, K, cfg).value;
            double ext = extension_norm(g, K, cfg).value;
            CHECK(tr * ext >= 1.0 - 1e-6);
        }
    }
    SUBCASE("the witness realizes the reported value, up to reparametrization") {
        auto g = make_grid(4);
        auto K = kernel_for(g, 3.0);
        SearchConfig cfg;
        cfg.restarts = 4;
        auto tr = trace_norm(g, K, cfg);
        REQUIRE(tr.witness.size() == g.vertex_count());
        auto ratio_of = [&](const Eigen::VectorXd& u) {
            return besov_seminorm(trace(u, g), K) /
                   std::pow(p_energy(u, g, 3.0), 1.0 / 3.0);
        };
        CHECK(ratio_of(tr.witness) == doctest::Approx(tr.value).epsilon(1e-9));
        Eigen::VectorXd affine = 2.0 * tr.witness;
        affine.array() += 3.0;
        CHECK(ratio_of(affine) == doctest::Approx(tr.value).epsilon(1e-9));
        CHECK(tr.evaluations > 0);
    }
}
