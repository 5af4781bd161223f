#include "mnl/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mnl {
namespace {

constexpr double kTieTolerance = 1e-12;

void check_brute_force_size(std::size_t n) {
    if (n > static_cast<std::size_t>(kBruteForceMaxItems))
        throw std::length_error("brute force: " + std::to_string(n) +
                                " items exceeds the enumeration guard of " +
                                std::to_string(kBruteForceMaxItems));
}

// Calls visit(current, num, denom) for every subset of pool with size <= capacity,
// in lexicographic order of the sorted item sequence (the empty set first).
template <class Visit>
void enumerate_subsets(std::span<const double> rewards, const ReducedParams& p,
                       const std::vector<int>& pool, int capacity, Visit&& visit) {
    std::vector<int> current;
    current.reserve(static_cast<std::size_t>(std::max(capacity, 0)));
    std::function<void(std::size_t, double, double)> dfs = [&](std::size_t start, double num,
                                                               double denom) {
        visit(current, num, denom);
        if (static_cast<int>(current.size()) >= capacity) return;
        for (std::size_t j = start; j < pool.size(); ++j) {
            const int item = pool[j];
            current.push_back(item);
            dfs(j + 1, num + p.nu[item] * rewards[item], denom + p.nu[item]);
            current.pop_back();
        }
    };
    dfs(0, p.zeta, 1.0);
}

ReducedParams identity_params(const Instance& inst) { return ReducedParams{0.0, inst.v}; }

}  // namespace

OptimumSolution brute_force_optimum(std::span<const double> rewards, const ReducedParams& p,
                                    const Assortment& pool, int capacity) {
    check_brute_force_size(pool.size());
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> best_set;
    enumerate_subsets(rewards, p, pool.items(), capacity,
                      [&](const std::vector<int>& s, double num, double denom) {
                          const double rev = num / denom;
                          if (rev > best + kTieTolerance) {
                              best = rev;
                              best_set = s;
                          }
                      });
    return {Assortment(best_set), best};
}

OptimumSolution brute_force_optimum(const Instance& inst) {
    return brute_force_optimum(inst.r, identity_params(inst), Assortment::range(0, inst.n),
                               inst.k);
}

Assortment select_f(std::span<const double> scores, const Assortment& pool, int capacity) {
    std::vector<int> order(pool.begin(), pool.end());
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });
    std::vector<int> chosen;
    for (std::size_t j = 0; j < order.size() && static_cast<int>(j) < capacity; ++j)
        if (scores[order[j]] > 0.0) chosen.push_back(order[j]);
    return Assortment(std::move(chosen));
}

Assortment select_f(std::span<const double> scores, int capacity) {
    return select_f(scores, Assortment::range(0, static_cast<int>(scores.size())), capacity);
}

OptimumSolution fractional_optimum(std::span<const double> rewards, const ReducedParams& p,
                                   const Assortment& pool, int capacity) {
    std::vector<double> scores(p.nu.size(), 0.0);
    auto select_at = [&](double theta) {
        for (int i : pool) scores[i] = p.nu[i] * (rewards[i] - theta);
        return select_f(scores, pool, capacity);
    };
    // h(theta) = zeta + sum_top(theta) - theta is strictly decreasing with h(0) >= 0 >= h(1).
    auto h = [&](double theta) {
        double g = p.zeta;
        for (int i : select_at(theta)) g += scores[i];
        return g - theta;
    };

    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 80 && hi - lo >= 1e-12; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) >= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    // The selection at the lower end of the bracket attains revenue >= lo; one
    // Dinkelbach refinement absorbs the remaining bracket slack.
    OptimumSolution sol;
    sol.s_star = select_at(lo);
    sol.theta_star = reduced_revenue(p, sol.s_star, rewards);
    const Assortment refined = select_at(sol.theta_star);
    const double refined_value = reduced_revenue(p, refined, rewards);
    if (refined_value > sol.theta_star) {
        sol.s_star = refined;
        sol.theta_star = refined_value;
    }
    return sol;
}

OptimumSolution fractional_optimum(const Instance& inst) {
    return fractional_optimum(inst.r, identity_params(inst), Assortment::range(0, inst.n),
                              inst.k);
}

GapVector suboptimality_gaps(const Instance& inst) {
    check_brute_force_size(static_cast<std::size_t>(inst.n));
    const auto opt = brute_force_optimum(inst);
    const auto n = static_cast<std::size_t>(inst.n);
    std::vector<double> best_with(n, -std::numeric_limits<double>::infinity());
    std::vector<double> best_without(n, -std::numeric_limits<double>::infinity());
    double second_best = -std::numeric_limits<double>::infinity();
    std::vector<char> member(n, 0);
    const auto params = identity_params(inst);
    const auto& star = opt.s_star.items();

    enumerate_subsets(inst.r, params, Assortment::range(0, inst.n).items(), inst.k,
                      [&](const std::vector<int>& s, double num, double denom) {
                          const double rev = num / denom;
                          std::fill(member.begin(), member.end(), 0);
                          for (int i : s) member[i] = 1;
                          for (std::size_t i = 0; i < n; ++i) {
                              double& slot = member[i] ? best_with[i] : best_without[i];
                              slot = std::max(slot, rev);
                          }
                          if (s != star) second_best = std::max(second_best, rev);
                      });

    GapVector out;
    out.gaps.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool in_star = opt.s_star.contains(static_cast<int>(i));
        out.gaps[i] = opt.theta_star - (in_star ? best_without[i] : best_with[i]);
    }
    out.global_gap = opt.theta_star - second_best;
    return out;
}

Instance lower_bound_instance(int n, int k, std::span<const double> gaps) {
    if (n < 2) throw std::invalid_argument("lower-bound instance: requires N >= 2");
    if (k < 1 || 2 * k > n) throw std::invalid_argument("lower-bound instance: requires 1 <= K <= N/2");
    if (static_cast<int>(gaps.size()) != n - k)
        throw std::invalid_argument("lower-bound instance: expected N - K gaps");
    const double cap = 1.0 / (16.0 * k);
    for (double g : gaps)
        if (!(g > 0.0) || g > cap)
            throw std::invalid_argument("lower-bound instance: every gap must lie in (0, 1/(16K)]");

    Instance inst;
    inst.n = n;
    inst.k = k;
    inst.r.assign(static_cast<std::size_t>(n), 1.0);
    inst.v.resize(static_cast<std::size_t>(n));
    const double kd = k;
    for (int i = 0; i < k - 1; ++i) inst.v[i] = 1.0 / kd + 1.0 / (2.0 * kd * (kd - 1.0));
    // Item K takes whatever keeps the first K at unit mass: 1/(2K) for K >= 2, 1 for K = 1.
    inst.v[k - 1] = k == 1 ? 1.0 : 1.0 / (2.0 * kd);
    for (int i = k; i < n; ++i) {
        const double g = gaps[static_cast<std::size_t>(i - k)];
        inst.v[i] = inst.v[k - 1] - 4.0 * g / (1.0 + 2.0 * g);
    }
    inst.validate();
    return inst;
}

}  // namespace mnl
