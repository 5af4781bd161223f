// oracle.hpp
//
// Ground-truth computations: the optimal assortment by fractional programming
// and by exhaustive enumeration, per-item suboptimality gaps, the positive
// top-M selector and the lower-bound instance family.
#pragma once

#include <span>
#include <vector>

#include "mnl/model.hpp"

namespace mnl {

struct OptimumSolution {
    Assortment s_star;
    double theta_star{0.0};
};

struct GapVector {
    std::vector<double> gaps;  // per item
    double global_gap{0.0};    // theta* minus the best revenue of any S != S*
};

// Largest N accepted by the enumerating oracles.
inline constexpr int kBruteForceMaxItems = 24;

// Exhaustive maximum of R(S, nu, zeta) over S subset of pool with |S| <= capacity.
// Ties within 1e-12 go to the lexicographically smallest item sequence.
OptimumSolution brute_force_optimum(std::span<const double> rewards, const ReducedParams& p,
                                    const Assortment& pool, int capacity);
OptimumSolution brute_force_optimum(const Instance& inst);

// Binary search for the fixed point theta = zeta + sum of the positive top-M values
// of nu_i (r_i - theta) over the pool. Terminates once the bracket is narrower
// than 1e-12 (at most 80 halvings).
OptimumSolution fractional_optimum(std::span<const double> rewards, const ReducedParams& p,
                                   const Assortment& pool, int capacity);
OptimumSolution fractional_optimum(const Instance& inst);

GapVector suboptimality_gaps(const Instance& inst);

// {i in pool : score_i > 0} intersected with the top-`capacity` scores of the
// pool; equal scores are ordered by smaller index.
Assortment select_f(std::span<const double> scores, const Assortment& pool, int capacity);
Assortment select_f(std::span<const double> scores, int capacity);

// Instance realizing the gaps of items K+1..N (gaps.size() == n - k):
// r_i = 1; v_i = 1/K + 1/(2K(K-1)) for i < K, v_K = 1/(2K),
// v_i = 1/(2K) - 4 gap_i / (1 + 2 gap_i) for i > K.
// Requires n >= 2, k <= n/2 and 0 < gap <= 1/(16K).
Instance lower_bound_instance(int n, int k, std::span<const double> gaps);

}  // namespace mnl
