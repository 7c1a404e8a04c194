#ifndef PDTN_SEARCH_HPP
#define PDTN_SEARCH_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace pdtn {

struct SearchConfig {
    int restarts = 8;
    int max_iters = 400;          ///< ascent iterations per restart
    double tol = 1e-9;            ///< relative improvement stop
    std::uint64_t seed = 0;
    bool force_iterative = false; ///< skip the exact p = 2 path (cross-checks)
    int pattern_evals = 260;      ///< eval budget per restart for black-box searches
};

/// Result of a norm computation. When exact is false the value is the
/// best witness found by multi-start search: a certified lower bound on
/// the supremum, not a certified supremum.
struct NormEstimate {
    double value = 0.0;
    Eigen::VectorXd witness;
    bool exact = false;
    long evaluations = 0;
};

/// Ratio objective split into numerator/denominator with gradients, both
/// positively homogeneous of the same degree so the ratio is scale-free.
struct RatioProblem {
    std::function<double(const Eigen::VectorXd&)> numerator;
    std::function<double(const Eigen::VectorXd&)> denominator;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> numerator_grad;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> denominator_grad;
};

/// Multi-start projected gradient ascent on log(num/den). Starts are the
/// given warm starts plus seeded Gaussian vectors; the best witness wins.
NormEstimate maximize_ratio_gradient(const RatioProblem& problem, int dim,
                                     const std::vector<Eigen::VectorXd>& warm_starts,
                                     const SearchConfig& cfg);

/// Multi-start adaptive coordinate search for black-box ratio objectives
/// (no gradients). evaluate() must return the ratio at the given point and
/// may assume the point is nonzero; non-finite returns are treated as -inf.
NormEstimate maximize_ratio_pattern(const std::function<double(const Eigen::VectorXd&)>& evaluate,
                                    int dim, const std::vector<Eigen::VectorXd>& warm_starts,
                                    const SearchConfig& cfg);

/// Deterministic standard-normal vector for seeded restarts.
Eigen::VectorXd gaussian_vector(int dim, std::uint64_t seed);

}  // namespace pdtn

#endif
