#include "mnl/sar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include <boost/random/uniform_int_distribution.hpp>

namespace mnl {

int phase_capacity(const PhaseState& state, int k_capacity) {
    return std::min(k_capacity - static_cast<int>(state.a_set.size()),
                    static_cast<int>(state.b_set.size()));
}

void accept_reject(PhaseState& state, const std::vector<Interval>& xi, int k_capacity) {
    const int m = phase_capacity(state, k_capacity);
    state.m = m;
    std::vector<int> acc, rej;
    std::vector<double> lows, highs;
    for (int b : state.b_set) {
        const Interval& iv = xi.at(static_cast<std::size_t>(b));
        if (iv.lo > iv.hi)
            throw std::logic_error("accept_reject: inverted interval for item " +
                                   std::to_string(b + 1));
        if (iv.lo > 0.0) acc.push_back(b);
        if (iv.hi < 0.0) rej.push_back(b);
        lows.push_back(iv.lo);
        highs.push_back(iv.hi);
    }
    if (static_cast<int>(state.b_set.size()) > m) {
        std::sort(lows.begin(), lows.end(), std::greater<>());
        std::sort(highs.begin(), highs.end(), std::greater<>());
        state.alpha = lows[static_cast<std::size_t>(m - 1)];
        state.beta = highs[static_cast<std::size_t>(m)];
        std::erase_if(acc, [&](int b) { return !(xi[b].lo > state.beta); });
        for (int b : state.b_set)
            if (xi[b].hi < state.alpha) rej.push_back(b);
    }
    state.b_acc = Assortment(acc);
    std::sort(rej.begin(), rej.end());
    rej.erase(std::unique(rej.begin(), rej.end()), rej.end());
    state.b_rej = Assortment(rej);
    state.a_set = state.a_set | state.b_acc;
    state.b_set = state.b_set - (state.b_acc | state.b_rej);
}

RunResult sar_mnl(Environment& env, double delta, const Estimator& estimator,
                  const SarOptions& options) {
    RunResult result;
    const std::int64_t start = env.steps();
    PhaseState state;
    state.b_set = Assortment::range(0, env.n());
    std::optional<EstimateSet> last;

    try {
        for (int k = 1;; ++k) {
            const double eps_prev = std::ldexp(1.0, -(k - 1));
            state.k = k;
            state.eps_k = std::ldexp(1.0, -k);
            state.delta_k = delta / (3.0 * k * k);
            state.m = phase_capacity(state, env.k());
            if (state.m == 0) {
                result.returned = state.a_set;
                break;
            }
            if (options.eps_stop && eps_prev <= *options.eps_stop) {
                // The upper-bound maximizer is built on the accepted set the last
                // estimator reduced by, so it is returned whole.
                result.returned = last ? last->theta_hi_assortment : state.a_set;
                break;
            }
            if (k > options.phase_cap) {
                result.aborted = true;
                result.diagnostic = "phase cap of " + std::to_string(options.phase_cap) +
                                    " reached with " + std::to_string(state.b_set.size()) +
                                    " pending items";
                result.returned = state.a_set;
                break;
            }
            const std::int64_t before = env.steps();
            EstimateSet est =
                estimator(env, state.a_set, state.b_set, state.delta_k, state.eps_k / 2.0);
            double width = 0.0;
            for (int b : state.b_set) width = std::max(width, est.xi[b].width());
            accept_reject(state, est.xi, env.k());
            ++result.phases;
            result.trace.push_back({k, state.a_set, state.b_set, env.steps() - before, width});
            last = std::move(est);
        }
    } catch (const HorizonReached&) {
        result.horizon_reached = true;
        result.returned = state.a_set;
    } catch (const BudgetOverflow& e) {
        result.aborted = true;
        result.diagnostic = e.what();
        result.returned = state.a_set;
    }
    result.steps = env.steps() - start;
    return result;
}

namespace {

RunResult run_pac(Environment& env, double delta, std::optional<double> eps_stop) {
    const std::int64_t start = env.steps();
    RoughEstimates rough;
    try {
        rough = est_rough(env, delta / 2.0);
    } catch (const HorizonReached&) {
        RunResult r;
        r.horizon_reached = true;
        r.steps = env.steps() - start;
        r.rough_steps = r.steps;
        return r;
    }
    SarOptions options;
    options.eps_stop = eps_stop;
    RunResult r = sar_mnl(env, delta / 2.0, make_adaptive_estimator(rough.tilde_v), options);
    r.rough_steps = rough.steps;
    r.steps = env.steps() - start;
    return r;
}

}  // namespace

RunResult pac_exact(Environment& env, double delta) { return run_pac(env, delta, std::nullopt); }

RunResult pac_eps(Environment& env, double delta, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("pac_eps: eps must be positive");
    return run_pac(env, delta, eps / 3.0);
}

RunResult regret_min(Environment& env, std::int64_t horizon) {
    if (horizon < env.n()) throw std::invalid_argument("regret_min: requires T >= N");
    if (env.horizon() != horizon)
        throw std::invalid_argument("regret_min: environment horizon must equal T");
    const std::int64_t start = env.steps();
    RunResult r = sar_mnl(env, 1.0 / static_cast<double>(horizon), est_reg);
    if (env.remaining() > 0) {
        // Identification finished (or aborted) before T: keep offering the answer.
        Assortment keep = r.returned;
        env.offer_fixed(keep, env.remaining());
    }
    r.steps = env.steps() - start;
    return r;
}

void uniform_random_policy(Environment& env, std::int64_t horizon, Rng& rng) {
    std::vector<int> items(static_cast<std::size_t>(env.n()));
    std::iota(items.begin(), items.end(), 0);
    for (std::int64_t t = 0; t < horizon; ++t) {
        // Partial Fisher-Yates for a uniform K-subset.
        for (int j = 0; j < env.k(); ++j) {
            const int pick = boost::random::uniform_int_distribution<int>(j, env.n() - 1)(rng);
            std::swap(items[j], items[pick]);
        }
        env.offer_fixed(Assortment(std::vector<int>(items.begin(), items.begin() + env.k())), 1);
    }
}

}  // namespace mnl
