// sar.hpp
//
// Successive accept-reject over phases k = 1, 2, ...: estimate score intervals
// for the pending items at accuracy eps_k / 2 = 2^-(k+1), permanently accept the
// items that clear the positive top-M bar and reject the ones that cannot.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mnl/environment.hpp"
#include "mnl/estimators.hpp"

namespace mnl {

struct PhaseState {
    int k{0};
    Assortment a_set;  // accepted
    Assortment b_set;  // pending
    double eps_k{1.0};
    double delta_k{0.0};
    int m{0};
    double alpha{0.0};
    double beta{0.0};
    Assortment b_acc;
    Assortment b_rej;
};

// M = min(K - |A|, |B|).
int phase_capacity(const PhaseState& state, int k_capacity);

// Sign rule, then the top-M rule when |B| > M; moves B_acc to A and drops
// B_acc | B_rej from B. `xi` is indexed by item and must cover every pending
// item. Throws std::logic_error on an interval with lo > hi.
void accept_reject(PhaseState& state, const std::vector<Interval>& xi, int k_capacity);

struct PhaseRecord {
    int k{0};
    Assortment accepted;  // A^(k)
    Assortment pending;   // B^(k)
    std::int64_t steps{0};
    double max_width{0.0};
};

struct RunResult {
    Assortment returned;
    std::int64_t steps{0};        // time steps used by the run, rough estimation included
    std::int64_t rough_steps{0};
    std::vector<PhaseRecord> trace;
    int phases{0};                // phases that called the estimator
    bool aborted{false};
    bool horizon_reached{false};
    std::string diagnostic;
};

struct SarOptions {
    int phase_cap{60};
    // When set, stop at the first phase with eps_{k-1} <= eps_stop and return
    // A^(k-1) united with the maximizer behind the last theta upper bound.
    std::optional<double> eps_stop;
};

RunResult sar_mnl(Environment& env, double delta, const Estimator& estimator,
                  const SarOptions& options = {});

// Rough estimation at delta/2 once, then sar_mnl(delta/2) with est_adaptive.
RunResult pac_exact(Environment& env, double delta);

// pac_exact stopped at the first phase with eps_{k-1} <= eps / 3.
RunResult pac_eps(Environment& env, double delta, double eps);

// sar_mnl(1/T) with est_reg on an environment whose horizon is T, then the
// returned assortment until step T. Requires T >= N.
RunResult regret_min(Environment& env, std::int64_t horizon);

// Uniformly random K-subset at every step, for `horizon` steps.
void uniform_random_policy(Environment& env, std::int64_t horizon, Rng& rng);

}  // namespace mnl
