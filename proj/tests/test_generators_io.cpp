#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "pdtn/generators.hpp"
#include "pdtn/graph.hpp"
#include "pdtn/io.hpp"
#include "test_util.hpp"

using namespace pdtn;

TEST_CASE("generated families have the expected shapes") {
    SUBCASE("path") {
        auto g = make_path(3);
        CHECK(g.vertex_count() == 3);
        CHECK(g.boundary_count() == 2);
        CHECK(g.vertices()[0].id == "a");
        CHECK(g.vertices()[1].id == "b");
        CHECK(g.vertices()[2].id == "c");
        CHECK(validate(g).pass);

        auto long_path = make_path(30);
        CHECK(long_path.vertices()[25].id == "z");
        CHECK(long_path.vertices()[26].id == "aa");
        CHECK(validate(long_path).pass);
        CHECK_THROWS_AS(make_path(2), std::invalid_argument);
    }
    SUBCASE("grid") {
        auto g = make_grid(5);
        CHECK(g.vertex_count() == 25);
        CHECK(g.boundary_count() == 16);
        CHECK(g.interior_count() == 9);
        CHECK(g.edge_count() == 40);
        CHECK(validate(g).pass);
        auto d = shortest_path_distances(g);
        CHECK(d(g.index_of("r0c0"), g.index_of("r4c4")) == doctest::Approx(8.0));
        CHECK(g.vertices()[g.index_of("r2c2")].pos.has_value());
        CHECK_THROWS_AS(make_grid(2), std::invalid_argument);
    }
    SUBCASE("lshape") {
        auto g = make_lshape(5);
        CHECK(g.vertex_count() == 21);
        CHECK(g.boundary_count() == 15);
        CHECK(g.interior_count() == 6);
        CHECK(g.edge_count() == 32);
        CHECK(validate(g).pass);
        CHECK_THROWS_AS(make_lshape(4), std::invalid_argument);
    }
    SUBCASE("snowflake") {
        for (int level = 0; level <= 3; ++level) {
            auto g = make_snowflake(level);
            CHECK(g.boundary_count() == 3 * (1 << (2 * level)));
            CHECK(validate(g).pass);
        }
        CHECK(make_snowflake(1).boundary_count() == 12);
        CHECK(make_snowflake(2).boundary_count() == 48);
        CHECK_THROWS_AS(make_snowflake(6), std::invalid_argument);
        CHECK_THROWS_AS(make_snowflake(-1), std::invalid_argument);
    }
    SUBCASE("random") {
        for (int n = 3; n <= 12; ++n) {
            auto g = make_random_graph(n, 7 * n + 1);
            CHECK(validate(g).pass);
            CHECK(g.vertex_count() == n);
        }
    }
    SUBCASE("random graphs are deterministic in the seed") {
        GraphBundle a{make_random_graph(9, 5), 2.0, {}, {}};
        GraphBundle b{make_random_graph(9, 5), 2.0, {}, {}};
        CHECK(graph_to_json(a) == graph_to_json(b));
        GraphBundle c{make_random_graph(9, 6), 2.0, {}, {}};
        CHECK(graph_to_json(a) != graph_to_json(c));
    }
    SUBCASE("star with planted codimension") {
        auto g = make_codimension_star(0.75);
        CHECK(validate(g).pass);
        int hub = g.index_of("c");
        CHECK(g.mu_vertex(hub) == doctest::Approx(std::pow(2.0, 0.75) - 1.0).epsilon(1e-12));
        auto dist = shortest_path_distances(g);
        auto fit = codimension_fit(g, dist, {1.0, 2.0});
        CHECK(fit.theta_hat == doctest::Approx(0.75).epsilon(1e-10));
    }
    SUBCASE("dispatch by name") {
        CHECK(make_named("path", 4).vertex_count() == 4);
        CHECK(make_named("grid", 3).vertex_count() == 9);
        CHECK(make_named("lshape", 5).vertex_count() == 21);
        CHECK(make_named("snowflake", 0).boundary_count() == 3);
        CHECK_THROWS_AS(make_named("moebius", 4), std::invalid_argument);
    }
}

TEST_CASE("graph JSON round-trips byte for byte") {
    SUBCASE("generated grid with positions and Theta") {
        GraphBundle bundle{make_grid(4), 2.5, {}, 1.0};
        std::string text = graph_to_json(bundle);
        GraphBundle back = load_graph_json(text);
        CHECK(graph_to_json(back) == text);
        CHECK(back.p == 2.5);
        CHECK_FALSE(back.theta.has_value());
        CHECK(back.Theta.has_value());
        CHECK(*back.Theta == 1.0);
        CHECK(back.graph.vertex_count() == 16);
    }
    SUBCASE("theta spelling is preserved") {
        GraphBundle bundle{make_path(3), 3.0, 0.5, {}};
        std::string text = graph_to_json(bundle);
        CHECK(text.find("\"theta\"") != std::string::npos);
        CHECK(text.find("\"Theta\"") == std::string::npos);
        GraphBundle back = load_graph_json(text);
        CHECK(back.theta.has_value());
        CHECK_FALSE(back.Theta.has_value());
        CHECK(graph_to_json(back) == text);
    }
    SUBCASE("awkward reals survive the 17-digit format") {
        auto g = make_path(3);
        std::vector<Vertex> vs = g.vertices();
        vs[0].measure = 1.0 / 3.0;
        vs[1].measure = 0.1;
        vs[2].measure = M_PI;
        std::vector<Edge> es = g.edges();
        es[0].length = std::sqrt(2.0);
        GraphBundle bundle{MetricMeasureGraph(std::move(vs), std::move(es)), 2.0, 0.5, {}};
        GraphBundle back = load_graph_json(graph_to_json(bundle));
        CHECK(back.graph.nu_vertex(0) == 1.0 / 3.0);
        CHECK(back.graph.mu_vertex(1) == 0.1);
        CHECK(back.graph.nu_vertex(2) == M_PI);
        CHECK(back.graph.edges()[0].length == std::sqrt(2.0));
        CHECK(graph_to_json(back) == graph_to_json(bundle));
    }
    SUBCASE("random graph round-trip") {
        GraphBundle bundle{make_random_graph(15, 99), 1.5, 0.25, {}};
        std::string text = graph_to_json(bundle);
        CHECK(graph_to_json(load_graph_json(text)) == text);
    }
}

TEST_CASE("graph JSON rejects malformed input") {
    auto msg_of = [](const std::string& text) {
        try {
            load_graph_json(text);
        } catch (const std::invalid_argument& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };

    CHECK(msg_of("{nope") .find("invalid JSON") != std::string::npos);
    CHECK(msg_of(R"({"vertices": [], "edges": []})").find("missing required key 'params'") !=
          std::string::npos);
    CHECK(msg_of(R"({"params": {"p": 2}, "edges": []})").find("vertices") != std::string::npos);
    CHECK(msg_of(R"({"params": {"p": 2, "theta": 0.5, "Theta": 1.0},
                     "vertices": [], "edges": []})")
              .find("theta") != std::string::npos);

    // boundary vertices carry nu, interior vertices carry mu
    std::string wrong_measure = R"({"params": {"p": 2},
        "vertices": [{"id": "a", "boundary": true, "mu": 1.0},
                     {"id": "b", "boundary": false, "mu": 1.0},
                     {"id": "c", "boundary": true, "nu": 1.0}],
        "edges": [{"u": "a", "v": "b", "length": 1.0, "mu": 1.0},
                  {"u": "b", "v": "c", "length": 1.0, "mu": 1.0}]})";
    CHECK(msg_of(wrong_measure).find("must carry 'nu'") != std::string::npos);

    std::string bad_pos = R"({"params": {"p": 2},
        "vertices": [{"id": "a", "boundary": true, "nu": 1.0, "pos": [1.0]},
                     {"id": "b", "boundary": false, "mu": 1.0},
                     {"id": "c", "boundary": true, "nu": 1.0}],
        "edges": [{"u": "a", "v": "b", "length": 1.0, "mu": 1.0},
                  {"u": "b", "v": "c", "length": 1.0, "mu": 1.0}]})";
    CHECK(msg_of(bad_pos).find("pos") != std::string::npos);

    std::string dangling = R"({"params": {"p": 2},
        "vertices": [{"id": "a", "boundary": true, "nu": 1.0},
                     {"id": "b", "boundary": false, "mu": 1.0},
                     {"id": "c", "boundary": true, "nu": 1.0}],
        "edges": [{"u": "a", "v": "zz", "length": 1.0, "mu": 1.0},
                  {"u": "b", "v": "c", "length": 1.0, "mu": 1.0}]})";
    CHECK(msg_of(dangling).find("is not a vertex id") != std::string::npos);

    for (const std::string& msg :
         {msg_of("{nope"), msg_of(wrong_measure), msg_of(dangling)}) {
        CHECK(msg.find('\n') == std::string::npos);  // errors stay single-line
    }
}

TEST_CASE("boundary CSV files") {
    auto g = make_grid(4);
    const int m = g.boundary_count();

    SUBCASE("round-trip in boundary order") {
        Eigen::VectorXd values(m);
        for (int i = 0; i < m; ++i) values(i) = std::sin(1.0 + i) / 3.0;
        std::string text = boundary_to_csv(values, g, "value");
        Eigen::VectorXd back = load_boundary_csv(text, g, "value");
        CHECK((back - values).cwiseAbs().maxCoeff() == 0.0);
        CHECK(text.substr(0, 9) == "id,value\n");
    }
    SUBCASE("rows may come in any order") {
        std::string text = "id,weight\n";
        std::vector<std::string> ids;
        for (int b = m - 1; b >= 0; --b)
            text += g.id_of(g.boundary_vertices()[b]) + "," + std::to_string(b) + "\n";
        Eigen::VectorXd got = load_boundary_csv(text, g, "weight");
        for (int b = 0; b < m; ++b) CHECK(got(b) == doctest::Approx(double(b)));
    }
    SUBCASE("whitespace is tolerated") {
        auto p3 = make_path(3);
        Eigen::VectorXd got = load_boundary_csv("id,value\n a , 1.5 \nc,-2\n", p3, "value");
        CHECK(got(0) == 1.5);
        CHECK(got(1) == -2.0);
    }
    SUBCASE("malformed files are refused with a reason") {
        auto p3 = make_path(3);
        auto msg_of = [&](const std::string& text, const char* column = "value") {
            try {
                load_boundary_csv(text, p3, column);
            } catch (const std::invalid_argument& e) {
                return std::string(e.what());
            }
            return std::string("no error");
        };
        CHECK(msg_of("id,weight\na,1\nc,2\n").find("header") != std::string::npos);
        CHECK(msg_of("id,value\na,1\nc,2\nq,3\n").find("unknown id") != std::string::npos);
        CHECK(msg_of("id,value\na,1\nb,2\nc,3\n").find("not a boundary vertex") !=
              std::string::npos);
        CHECK(msg_of("id,value\na,1\na,2\nc,3\n").find("duplicate") != std::string::npos);
        CHECK(msg_of("id,value\na,1\n").find("misses") != std::string::npos);
        CHECK(msg_of("id,value\na,1x\nc,2\n").find("number") != std::string::npos);
        CHECK(msg_of("id,value\na,,\nc,2\n").find("number") != std::string::npos);
    }
}

TEST_CASE("report reals format deterministically") {
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(1.0 / 3.0) == format_real(1.0 / 3.0));
    // round-trip through the printed form is exact
    CHECK(std::stod(format_real(M_PI)) == M_PI);
    CHECK(std::stod(format_real(1e-300)) == 1e-300);
}
