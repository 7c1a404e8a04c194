#include <cmath>
#include <utility>
#include <vector>

#include "doctest.h"
#include "pdtn/generators.hpp"
#include "pdtn/graph.hpp"
#include "pdtn/search.hpp"
#include "test_util.hpp"

using namespace pdtn;
using pdtn_test::p3;

namespace {

Vertex vx(const std::string& id, VertexKind kind, double measure) {
    Vertex v;
    v.id = id;
    v.kind = kind;
    v.measure = measure;
    return v;
}

Edge eg(int u, int v, double length = 1.0, double mu = 1.0) {
    Edge e;
    e.u = u;
    e.v = v;
    e.length = length;
    e.measure = mu;
    return e;
}

bool has_violation(const ValidationReport& report, const std::string& needle) {
    for (const std::string& v : report.violations)
        if (v.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("validation accepts the generated families") {
    CHECK(validate(p3()).pass);
    CHECK(validate(make_grid(4)).pass);
    CHECK(validate(make_lshape(5)).pass);
    CHECK(validate(make_codimension_star(0.75)).pass);
}

TEST_CASE("validation reports every structural violation") {
    SUBCASE("empty graph") {
        MetricMeasureGraph g;
        auto rep = validate(g);
        CHECK_FALSE(rep.pass);
        CHECK(has_violation(rep, "no vertices"));
    }
    SUBCASE("no interior vertex") {
        std::vector<Vertex> vs = {vx("a", VertexKind::Boundary, 1.0),
                                  vx("b", VertexKind::Boundary, 1.0)};
        std::vector<Edge> es = {eg(0, 1)};
        auto rep = validate(MetricMeasureGraph(std::move(vs), std::move(es)));
        CHECK(has_violation(rep, "interior set is empty"));
    }
    SUBCASE("fewer than two boundary vertices") {
        std::vector<Vertex> vs = {vx("a", VertexKind::Boundary, 1.0),
                                  vx("b", VertexKind::Interior, 1.0)};
        std::vector<Edge> es = {eg(0, 1)};
        auto rep = validate(MetricMeasureGraph(std::move(vs), std::move(es)));
        CHECK(has_violation(rep, "fewer than two boundary"));
    }
    SUBCASE("duplicate vertex ids") {
        std::vector<Vertex> vs = {vx("a", VertexKind::Boundary, 1.0),
                                  vx("a", VertexKind::Boundary, 1.0),
                                  vx("b", VertexKind::Interior, 1.0)};
        std::vector<Edge> es = {eg(0, 2), eg(1, 2)};
        auto rep = validate(MetricMeasureGraph(std::move(vs), std::move(es)));
        CHECK(has_violation(rep, "duplicate vertex id 'a'"));
    }
    SUBCASE("non-positive measures") {
        std::vector<Vertex> vs = {vx("a", VertexKind::Boundary, 0.0),
                                  vx("b", VertexKind::Interior, -1.0),
                                  vx("c", VertexKind::Boundary, 1.0)};
        std::vector<Edge> es = {eg(0, 1), eg(1, 2)};
        auto rep = validate(MetricMeasureGraph(std::move(vs), std::move(es)));
        CHECK(has_violation(rep, "'a' has non-positive nu"));
        CHECK(has_violation(rep, "'b' has non-positive mu"));
    }
    SUBCASE("self-loop") {
        std::vector<Vertex> vs = {vx("a", VertexKind::Boundary, 1.0),
                                  vx("b", VertexKind::Interior, 1.0),
                                  vx("c", VertexKind::Boundary, 1.0)};
        std::vector<Edge> es = {eg(0, 1), eg(1, 2), eg(1, 1)};
        auto rep = validate(MetricMeasureGraph(std::move(vs), std::move(es)));
        CHECK(has_violation(rep, "self-loop"));
    }
    SUBCASE("duplicate edge either orientation") {
        std::vector<Vertex> vs = {vx("a", VertexKind::Boundary, 1.0),
                                  vx("b", VertexKind::Interior, 1.0),
                                  vx("c", VertexKind::Boundary, 1.0)};
        std::vector<Edge> es = {eg(0, 1), eg(1, 2), eg(2, 1)};
        auto rep = validate(MetricMeasureGraph(std::move(vs), std::move(es)));
        CHECK(has_violation(rep, "duplicates edge"));
    }
    SUBCASE("non-positive length and edge weight") {
        std::vector<Vertex> vs = {vx("a", VertexKind::Boundary, 1.0),
                                  vx("b", VertexKind::Interior, 1.0),
                                  vx("c", VertexKind::Boundary, 1.0)};
        std::vector<Edge> es = {eg(0, 1, -2.0, 1.0), eg(1, 2, 1.0, 0.0)};
        auto rep = validate(MetricMeasureGraph(std::move(vs), std::move(es)));
        CHECK(has_violation(rep, "non-positive length"));
        CHECK(has_violation(rep, "non-positive mu"));
    }
    SUBCASE("isolated boundary vertex") {
        std::vector<Vertex> vs = {vx("a", VertexKind::Boundary, 1.0),
                                  vx("b", VertexKind::Interior, 1.0),
                                  vx("c", VertexKind::Boundary, 1.0),
                                  vx("d", VertexKind::Boundary, 1.0)};
        std::vector<Edge> es = {eg(0, 1), eg(1, 2)};
        auto rep = validate(MetricMeasureGraph(std::move(vs), std::move(es)));
        CHECK(has_violation(rep, "'d' has no incident edge"));
        CHECK(has_violation(rep, "not connected"));
    }
    SUBCASE("require_valid throws with the violation list") {
        std::vector<Vertex> vs = {vx("a", VertexKind::Boundary, 1.0),
                                  vx("b", VertexKind::Interior, 1.0)};
        std::vector<Edge> es = {eg(0, 1)};
        MetricMeasureGraph g(std::move(vs), std::move(es));
        CHECK_THROWS_WITH_AS(g.require_valid(),
                             doctest::Contains("fewer than two boundary"),
                             std::invalid_argument);
        CHECK_NOTHROW(p3().require_valid());
    }
}

TEST_CASE("shortest path distances") {
    SUBCASE("path metric") {
        auto g = p3();
        auto d = shortest_path_distances(g);
        CHECK(d(0, 2) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(d(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(d(1, 1) == 0.0);
    }
    SUBCASE("grid corner-to-corner is the lattice distance") {
        auto g = make_grid(5);
        auto d = shortest_path_distances(g);
        int c0 = g.index_of("r0c0");
        int c1 = g.index_of("r4c4");
        CHECK(d(c0, c1) == doctest::Approx(8.0).epsilon(1e-14));
    }
    SUBCASE("symmetry and the triangle inequality on a random graph") {
        auto g = make_random_graph(24, 7);
        auto d = shortest_path_distances(g);
        const int n = g.vertex_count();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                CHECK(d(i, j) == doctest::Approx(d(j, i)).epsilon(1e-13));
                for (int k = 0; k < n; ++k)
                    CHECK(d(i, j) <= d(i, k) + d(k, j) + 1e-12);
            }
    }
    SUBCASE("disconnected graphs are refused") {
        std::vector<Vertex> vs = {vx("a", VertexKind::Boundary, 1.0),
                                  vx("b", VertexKind::Interior, 1.0),
                                  vx("c", VertexKind::Boundary, 1.0),
                                  vx("d", VertexKind::Interior, 1.0)};
        std::vector<Edge> es = {eg(0, 1), eg(1, 2)};
        MetricMeasureGraph g(std::move(vs), std::move(es));
        CHECK_THROWS_AS(shortest_path_distances(g), std::invalid_argument);
    }
}

TEST_CASE("ball measures") {
    auto g = p3();
    auto d = shortest_path_distances(g);
    int a = g.index_of("a");
    SUBCASE("closed balls include the sphere") {
        CHECK(ball_measure(g, d, a, 0.0, MeasureKind::Nu) == 1.0);
        CHECK(ball_measure(g, d, a, 1.0, MeasureKind::Mu) == 1.0);
        CHECK(ball_measure(g, d, a, 2.0, MeasureKind::Nu) == 2.0);
        CHECK(ball_measure(g, d, a, 1.999, MeasureKind::Nu) == 1.0);
    }
    SUBCASE("monotone in the radius") {
        auto gg = make_grid(4);
        auto dd = shortest_path_distances(gg);
        for (int c : gg.boundary_vertices()) {
            double prev = 0.0;
            for (double r = 0.0; r <= 7.0; r += 0.5) {
                double m = ball_measure(gg, dd, c, r, MeasureKind::Mu);
                CHECK(m >= prev);
                prev = m;
            }
        }
    }
}

TEST_CASE("doubling constants on the path") {
    auto g = p3();
    auto d = shortest_path_distances(g);
    CHECK(doubling_constant(g, d, MeasureKind::Mu) == 1.0);
    CHECK(doubling_constant(g, d, MeasureKind::Nu) == 2.0);
}

TEST_CASE("codimension fit recovers a planted exponent") {
    SUBCASE("star construction is exact over radii one and two") {
        for (double Theta : {0.75, 0.3, 1.4}) {
            auto g = make_codimension_star(Theta);
            auto d = shortest_path_distances(g);
            auto fit = codimension_fit(g, d, {1.0, 2.0});
            CHECK(fit.theta_hat == doctest::Approx(Theta).epsilon(1e-10));
            CHECK(fit.c_hat == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(fit.sample_count > 0);
        }
    }
    SUBCASE("a single radius is not enough to fit a slope") {
        auto g = make_codimension_star(0.75);
        auto d = shortest_path_distances(g);
        CHECK_THROWS_AS(codimension_fit(g, d, {1.0}), std::invalid_argument);
    }
    SUBCASE("sampling drops radii with empty interior balls") {
        auto g = p3();
        auto d = shortest_path_distances(g);
        auto samples = codimension_samples(g, d);
        for (const auto& s : samples) {
            CHECK(s.mu_ball > 0.0);
            CHECK(s.r > 0.0);
        }
    }
}

TEST_CASE("Poincare constant") {
    SUBCASE("five-vertex path at p = 2 is exactly one") {
        // Boundary values relax to their neighbors, so the ratio reduces
        // to the free spectral gap of the three interior vertices, which
        // is 1 for a unit path of length three.
        auto g = make_path(5);
        SearchConfig cfg;
        CHECK(poincare_constant(g, 2.0, cfg) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("single interior vertex has zero variance") {
        SearchConfig cfg;
        CHECK(poincare_constant(p3(), 2.0, cfg) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("exact and iterative routes agree at p = 2") {
        auto g = make_grid(4);
        SearchConfig exact;
        SearchConfig iterative;
        iterative.force_iterative = true;
        iterative.restarts = 12;
        double a = poincare_constant(g, 2.0, exact);
        double b = poincare_constant(g, 2.0, iterative);
        CHECK(b == doctest::Approx(a).epsilon(1e-6));
        CHECK(b <= a * (1.0 + 1e-9));  // search from below
    }
    SUBCASE("p away from two still produces a positive certified bound") {
        auto g = make_path(5);
        SearchConfig cfg;
        cfg.restarts = 6;
        double c = poincare_constant(g, 3.0, cfg);
        CHECK(c > 0.5);
        CHECK(std::isfinite(c));
    }
}
