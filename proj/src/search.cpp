#include "pdtn/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace pdtn {

namespace {

double u64_to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

Eigen::VectorXd gaussian_vector(int dim, std::uint64_t seed) {
    // Box-Muller over raw engine output; std::normal_distribution is
    // implementation-defined, this is reproducible everywhere.
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    Eigen::VectorXd v(dim);
    int i = 0;
    while (i < dim) {
        double u1 = u64_to_unit(rng());
        double u2 = u64_to_unit(rng());
        if (u1 <= 0.0) continue;
        double r = std::sqrt(-2.0 * std::log(u1));
        v(i++) = r * std::cos(2.0 * M_PI * u2);
        if (i < dim) v(i++) = r * std::sin(2.0 * M_PI * u2);
    }
    return v;
}

namespace {

struct Tracker {
    double best = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd witness;
    long evaluations = 0;

    void offer(double value, const Eigen::VectorXd& point) {
        if (std::isfinite(value) && value > best) {
            best = value;
            witness = point;
        }
    }
};

Eigen::VectorXd normalized(const Eigen::VectorXd& u) {
    double scale = u.cwiseAbs().maxCoeff();
    return scale > 0.0 ? Eigen::VectorXd(u / scale) : u;
}

}  // namespace

NormEstimate maximize_ratio_gradient(const RatioProblem& problem, int dim,
                                     const std::vector<Eigen::VectorXd>& warm_starts,
                                     const SearchConfig& cfg) {
    Tracker tracker;

    std::vector<Eigen::VectorXd> starts = warm_starts;
    for (int r = 0; r < std::max(cfg.restarts, 1); ++r)
        starts.push_back(gaussian_vector(dim, cfg.seed + 1000003ULL * static_cast<std::uint64_t>(r)));

    for (size_t s = 0; s < starts.size(); ++s) {
        Eigen::VectorXd u = normalized(starts[s]);
        if (u.size() != dim) continue;
        double num = problem.numerator(u);
        double den = problem.denominator(u);
        ++tracker.evaluations;
        // Degenerate start (zero energy or zero deviation): nudge it.
        if (!(num > 0.0) || !(den > 0.0) || !std::isfinite(num) || !std::isfinite(den)) {
            u = normalized(u + 0.5 * gaussian_vector(dim, cfg.seed + 777ULL + s));
            num = problem.numerator(u);
            den = problem.denominator(u);
            ++tracker.evaluations;
            if (!(num > 0.0) || !(den > 0.0)) continue;
        }
        double f = std::log(num) - std::log(den);
        tracker.offer(num / den, u);

        double step = 1.0;
        int stagnant = 0;
        for (int it = 0; it < cfg.max_iters; ++it) {
            Eigen::VectorXd g =
                problem.numerator_grad(u) / num - problem.denominator_grad(u) / den;
            double gnorm = g.norm();
            if (!(gnorm > 1e-14) || !g.allFinite()) break;

            double t = step;
            bool accepted = false;
            for (int back = 0; back < 60; ++back) {
                Eigen::VectorXd cand = normalized(u + t * g);
                double cn = problem.numerator(cand);
                double cd = problem.denominator(cand);
                ++tracker.evaluations;
                if (cn > 0.0 && cd > 0.0 && std::isfinite(cn) && std::isfinite(cd)) {
                    double cf = std::log(cn) - std::log(cd);
                    if (cf > f + 1e-4 * t * gnorm * gnorm) {
                        u = cand;
                        num = cn;
                        den = cd;
                        double gain = cf - f;
                        f = cf;
                        tracker.offer(num / den, u);
                        step = std::min(t * 2.0, 1e6);
                        accepted = true;
                        stagnant = gain < cfg.tol * (1.0 + std::abs(f)) ? stagnant + 1 : 0;
                        break;
                    }
                }
                t *= 0.5;
            }
            if (!accepted || stagnant > 3) break;
        }
    }

    NormEstimate est;
    est.value = tracker.best;
    est.witness = tracker.witness;
    est.exact = false;
    est.evaluations = tracker.evaluations;
    if (!std::isfinite(est.value)) est.value = 0.0;
    return est;
}

NormEstimate maximize_ratio_pattern(const std::function<double(const Eigen::VectorXd&)>& evaluate,
                                    int dim, const std::vector<Eigen::VectorXd>& warm_starts,
                                    const SearchConfig& cfg) {
    Tracker tracker;
    auto eval = [&](const Eigen::VectorXd& x) {
        double v = evaluate(x);
        ++tracker.evaluations;
        if (!std::isfinite(v)) v = -std::numeric_limits<double>::infinity();
        return v;
    };

    std::vector<Eigen::VectorXd> starts = warm_starts;
    for (int r = 0; r < std::max(cfg.restarts, 1); ++r)
        starts.push_back(gaussian_vector(dim, cfg.seed + 7000003ULL * static_cast<std::uint64_t>(r)));

    for (size_t s = 0; s < starts.size(); ++s) {
        if (starts[s].size() != dim) continue;
        Eigen::VectorXd u = normalized(starts[s]);
        double f = eval(u);
        if (!std::isfinite(f)) continue;
        tracker.offer(f, u);

        std::mt19937_64 rng(cfg.seed + 31ULL * s + 5);
        std::vector<int> order(dim);
        std::iota(order.begin(), order.end(), 0);

        double step = 0.25;
        long budget = cfg.pattern_evals;
        long used = 0;
        while (used < budget && step > 1e-7) {
            std::shuffle(order.begin(), order.end(), rng);
            bool improved = false;
            for (int j : order) {
                if (used >= budget) break;
                for (double sgn : {1.0, -1.0}) {
                    if (used >= budget) break;
                    Eigen::VectorXd cand = u;
                    cand(j) += sgn * step;
                    double fc = eval(cand);
                    ++used;
                    if (fc > f) {
                        u = normalized(cand);
                        f = fc;
                        tracker.offer(f, u);
                        improved = true;
                        break;
                    }
                }
            }
            step = improved ? std::min(step * 1.6, 1.0) : step * 0.5;
        }
    }

    NormEstimate est;
    est.value = tracker.best;
    est.witness = tracker.witness;
    est.exact = false;
    est.evaluations = tracker.evaluations;
    if (!std::isfinite(est.value)) est.value = 0.0;
    return est;
}

}  // namespace pdtn
