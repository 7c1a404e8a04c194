#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "pdtn/besov.hpp"
#include "pdtn/generators.hpp"
#include "pdtn/search.hpp"
#include "test_util.hpp"

using namespace pdtn;
using pdtn_test::kernel_for;
using pdtn_test::p3;
using pdtn_test::two_point;
using pdtn_test::vec;

TEST_CASE("exponent parameter coupling") {
    auto prm = BesovParams::from_theta(2.0, 0.5);
    CHECK(prm.Theta == doctest::Approx(1.0));
    auto prm2 = BesovParams::from_Theta(2.0, 1.0);
    CHECK(prm2.theta == doctest::Approx(0.5));
    auto prm3 = BesovParams::from_Theta(3.0, 1.5);
    CHECK(prm3.theta == doctest::Approx(0.5));

    CHECK_THROWS_AS(BesovParams::from_theta(1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(BesovParams::from_theta(2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BesovParams::from_theta(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(BesovParams::from_Theta(2.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BesovParams::from_Theta(2.0, 2.0), std::invalid_argument);
}

TEST_CASE("pair weights on the path") {
    // Boundary a, c at distance 2, each with nu = 1, ball nu(B(., 2)) = 2:
    // w = 1 / (2^{theta p} * 2).
    SUBCASE("p = 2, theta = 1/2") {
        auto g = p3();
        auto K = kernel_for(g, 2.0);
        CHECK(K.boundary_count() == 2);
        CHECK(K.weight(0, 1) == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(K.weight(1, 0) == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(K.weight(0, 0) == 0.0);
    }
    SUBCASE("p = 3 moves the distance exponent") {
        auto g = p3();
        auto K = kernel_for(g, 3.0);
        CHECK(K.weight(0, 1) == doctest::Approx(std::pow(2.0, -1.5) / 2.0).epsilon(1e-14));
    }
    SUBCASE("unit-distance boundary drops the distance factor") {
        auto g = two_point();
        for (double p : {1.5, 2.0, 3.0}) {
            auto K = kernel_for(g, p);
            CHECK(K.weight(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
            CHECK(K.weight(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
        }
    }
}

TEST_CASE("boundary energy closed forms") {
    auto g = p3();
    SUBCASE("p = 2") {
        auto K = kernel_for(g, 2.0);
        CHECK(besov_energy(vec({0.0, 1.0}), K) == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(besov_seminorm(vec({0.0, 1.0}), K) ==
              doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    }
    SUBCASE("p = 3") {
        auto K = kernel_for(g, 3.0);
        CHECK(besov_energy(vec({0.0, 1.0}), K) ==
              doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-13));
    }
    SUBCASE("constants have zero energy and shifts are invisible") {
        auto K = kernel_for(g, 2.0);
        CHECK(besov_energy(vec({3.7, 3.7}), K) == 0.0);
        auto f = vec({0.2, -1.1});
        double e = besov_energy(f, K);
        Eigen::VectorXd shifted = f.array() + 17.0;
        CHECK(besov_energy(shifted, K) == doctest::Approx(e).epsilon(1e-12));
    }
    SUBCASE("p-homogeneity") {
        for (double p : {1.5, 2.0, 3.0}) {
            auto K = kernel_for(g, p);
            auto f = vec({0.3, -0.9});
            double e = besov_energy(f, K);
            CHECK(besov_energy(2.5 * f, K) ==
                  doctest::Approx(std::pow(2.5, p) * e).epsilon(1e-12));
            CHECK(besov_seminorm(-f, K) == doctest::Approx(besov_seminorm(f, K)));
        }
    }
}

TEST_CASE("mean-zero representatives and functional defects") {
    auto g = make_grid(4);
    auto f = gaussian_vector(g.boundary_count(), 11);
    auto f0 = nu_mean_zero(f, g);
    Eigen::VectorXd nu = g.nu_weights();
    CHECK(std::abs(nu.dot(f0)) <= 1e-12 * nu.sum() * f.cwiseAbs().maxCoeff());
    // idempotent
    CHECK((nu_mean_zero(f0, g) - f0).cwiseAbs().maxCoeff() <= 1e-14);

    CHECK(functional_sum_defect(vec({1.0, -1.0})) == 0.0);
    CHECK(functional_sum_defect(vec({1.0, -0.5})) == doctest::Approx(0.5));
    auto r = renormalize_functional(vec({1.0, -0.5, 0.1}));
    CHECK(std::abs(r.sum()) <= 1e-15);
}

TEST_CASE("dual norm") {
    SUBCASE("unit-distance two-point closed form holds for every p") {
        auto g = two_point();
        for (double p : {1.5, 2.0, 3.0}) {
            auto K = kernel_for(g, p, 0.4);
            auto res = dual_norm(vec({-0.7, 0.7}), K);
            CHECK(res.value == doctest::Approx(0.7).epsilon(1e-7));
        }
    }
    SUBCASE("path closed form at p = 2") {
        auto g = p3();
        auto K = kernel_for(g, 2.0);
        auto res = dual_norm(vec({-0.5, 0.5}), K);
        CHECK(res.value == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
    }
    SUBCASE("closed form and convex program agree at p = 2") {
        auto g = make_grid(4);
        auto K = kernel_for(g, 2.0);
        auto ell = renormalize_functional(gaussian_vector(g.boundary_count(), 3));
        auto exact = dual_norm(ell, K);
        SearchConfig cfg;
        cfg.force_iterative = true;
        auto iter = dual_norm(ell, K, cfg);
        CHECK(iter.value == doctest::Approx(exact.value).epsilon(1e-8));
    }
    SUBCASE("duality inequality against random competitors") {
        auto g = make_grid(4);
        for (double p : {1.5, 2.0, 3.0}) {
            auto K = kernel_for(g, p);
            auto ell = renormalize_functional(gaussian_vector(g.boundary_count(), 5));
            double dn = dual_norm(ell, K).value;
            for (int t = 0; t < 8; ++t) {
                auto gfun = nu_mean_zero(gaussian_vector(g.boundary_count(), 100 + t), g);
                double s = besov_seminorm(gfun, K);
                CHECK(ell.dot(gfun) <= dn * s * (1.0 + 1e-9) + 1e-12);
            }
        }
    }
    SUBCASE("maximizer is a certificate") {
        auto g = make_grid(4);
        for (double p : {1.5, 2.0, 3.0}) {
            auto K = kernel_for(g, p);
            auto ell = renormalize_functional(gaussian_vector(g.boundary_count(), 9));
            auto res = dual_norm(ell, K);
            REQUIRE(res.maximizer.size() == g.boundary_count());
            CHECK(besov_seminorm(res.maximizer, K) == doctest::Approx(1.0).epsilon(1e-7));
            CHECK(ell.dot(res.maximizer) == doctest::Approx(res.value).epsilon(1e-7));
        }
    }
    SUBCASE("absolute homogeneity") {
        auto g = p3();
        for (double p : {1.5, 3.0}) {
            auto K = kernel_for(g, p);
            auto ell = vec({-0.3, 0.3});
            double base = dual_norm(ell, K).value;
            CHECK(dual_norm(4.0 * ell, K).value == doctest::Approx(4.0 * base).epsilon(1e-7));
            CHECK(dual_norm(-ell, K).value == doctest::Approx(base).epsilon(1e-9));
        }
    }
    SUBCASE("zero functional and bad functionals") {
        auto g = p3();
        auto K = kernel_for(g, 2.0);
        CHECK(dual_norm(vec({0.0, 0.0}), K).value == 0.0);
        CHECK_THROWS_WITH_AS(dual_norm(vec({1.0, 0.0}), K),
                             doctest::Contains("sum to zero"), std::invalid_argument);
    }
    SUBCASE("one-dimensional brute force cross-check away from p = 2") {
        // On the path the quotient is one-dimensional: the unit-seminorm
        // mean-zero g are (-s, s) with 2 s * 2^{-1/2 + (2 - theta p)/p}...
        // avoid re-deriving: scan candidates directly.
        auto g = p3();
        for (double p : {1.5, 3.0}) {
            auto K = kernel_for(g, p);
            auto ell = vec({-1.0, 1.0});
            double best = 0.0;
            for (double s = 1e-4; s < 10.0; s += 1e-4) {
                Eigen::VectorXd cand = vec({-s, s});
                double sn = besov_seminorm(cand, K);
                if (sn > 0.0) best = std::max(best, ell.dot(cand) / sn);
            }
            CHECK(dual_norm(ell, K).value == doctest::Approx(best).epsilon(1e-6));
        }
    }
}
