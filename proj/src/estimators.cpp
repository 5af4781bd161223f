#include "mnl/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mnl {

ExploreState::ExploreState(int n, Assortment stop)
    : z_stop(std::move(stop)),
      n_i(static_cast<std::size_t>(n), 0),
      t_i(static_cast<std::size_t>(n), 0) {}

double ExploreState::bar_nu(int item) const {
    const auto t = t_i.at(static_cast<std::size_t>(item));
    return t > 0 ? static_cast<double>(n_i[item]) / static_cast<double>(t) : 0.0;
}

namespace {

void check_explore(const Environment& env, const Assortment& s, const ExploreState& state) {
    if (!s.disjoint(state.z_stop))
        throw std::invalid_argument("explore: S " + s.to_string() +
                                    " overlaps the stopping set " + state.z_stop.to_string());
    if (static_cast<int>((s | state.z_stop).size()) > env.k())
        throw std::invalid_argument("explore: |Z | S| exceeds capacity K");
}

std::int64_t checked_epochs(double count) {
    if (!(count <= ScheduleConstants::max_epochs))
        throw BudgetOverflow("epoch schedule of " + std::to_string(count) +
                             " epochs exceeds 2^53");
    return static_cast<std::int64_t>(std::ceil(count));
}

void require_disjoint(const Assortment& a, const Assortment& b, const char* who) {
    if (!a.disjoint(b)) throw std::invalid_argument(std::string(who) + ": A and B overlap");
}

}  // namespace

EpochRecord explore(Environment& env, const Assortment& s, ExploreState& state) {
    check_explore(env, s, state);
    const Assortment offered = state.z_stop | s;
    EpochRecord rec;
    rec.x.assign(s.size(), 0);
    while (true) {
        ++rec.length;
        const int c = env.offer(offered);
        if (c == kNoPurchase || state.z_stop.contains(c)) {
            rec.z = c == kNoPurchase ? 0.0 : env.rewards()[c];
            break;
        }
        const auto pos = std::lower_bound(s.begin(), s.end(), c) - s.begin();
        ++rec.x[static_cast<std::size_t>(pos)];
    }
    state.n_z += rec.z;
    ++state.t_z;
    for (std::size_t j = 0; j < s.size(); ++j) {
        state.n_i[s[j]] += rec.x[j];
        ++state.t_i[s[j]];
    }
    ++state.epochs;
    state.steps += rec.length;
    state.epoch_lengths.push_back(rec.length);
    return rec;
}

void explore_epochs(Environment& env, const Assortment& s, std::int64_t count,
                    ExploreState& state) {
    check_explore(env, s, state);
    if (count <= 0) return;
    const EpochBatch batch = env.offer_epochs(state.z_stop, s, count);
    state.n_z += batch.stop_reward_sum;
    state.t_z += count;
    for (std::size_t j = 0; j < s.size(); ++j) {
        state.n_i[s[j]] += batch.purchases[j];
        state.t_i[s[j]] += count;
    }
    state.epochs += count;
    state.steps += batch.steps;
}

Interval ci_zeta(const ExploreState& state, double delta) {
    if (state.t_z == 0) return {0.0, 1.0};
    const double half = std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(state.t_z)));
    const double mean = state.bar_zeta();
    return {std::max(0.0, mean - half), std::min(1.0, mean + half)};
}

double nu_sigma(double bar_nu, std::int64_t t, double delta) {
    const double l = std::log(2.0 / delta);
    const double td = static_cast<double>(t);
    return std::sqrt(48.0 * bar_nu * l / td) + 48.0 * l / td;
}

Interval ci_nu(const ExploreState& state, int item, double delta) {
    const auto t = state.t_i.at(static_cast<std::size_t>(item));
    if (t == 0) return {0.0, 1.0};
    const double mean = state.bar_nu(item);
    const double sigma = nu_sigma(mean, t, delta);
    return {std::max(0.0, mean - sigma), std::min(1.0, mean + sigma)};
}

ThetaInterval ci_theta(std::span<const double> rewards, Interval zeta,
                       std::span<const double> nu_lo, std::span<const double> nu_hi,
                       const Assortment& pool, int capacity) {
    const ReducedParams lower{zeta.lo, {nu_lo.begin(), nu_lo.end()}};
    const ReducedParams upper{zeta.hi, {nu_hi.begin(), nu_hi.end()}};
    const auto lo = fractional_optimum(rewards, lower, pool, capacity);
    const auto hi = fractional_optimum(rewards, upper, pool, capacity);
    ThetaInterval out{lo.theta_star, hi.theta_star, lo.s_star, hi.s_star};
    // Both maxima are monotone in the parameters; guard the round-off direction.
    out.hi = std::max(out.hi, out.lo);
    return out;
}

Interval ci_xi(Interval nu, Interval theta, double reward) {
    const double lo = std::min(nu.lo * (reward - theta.hi), nu.hi * (reward - theta.hi));
    const double hi = std::max(nu.lo * (reward - theta.lo), nu.hi * (reward - theta.lo));
    return {lo, hi};
}

double per_event_delta(double delta0, int divisor, int n) {
    return delta0 / (static_cast<double>(divisor) * static_cast<double>(n));
}

std::int64_t tau_estimate(double delta, double eps) {
    return checked_epochs(ScheduleConstants::c2 * ScheduleConstants::c0 * std::log(2.0 / delta) /
                          (eps * eps));
}

std::int64_t tau_rough(double delta, int k) {
    return checked_epochs(4.0 * k * ScheduleConstants::c0 * std::log(2.0 / delta));
}

namespace {

// Intervals for procedures that estimate v directly (Z empty, no reduction):
// theta over A | B with capacity K, scores u_i for i in B.
EstimateSet finish_unreduced(const Environment& env, const ExploreState& state,
                             const Assortment& a, const Assortment& b, double delta) {
    const auto n = static_cast<std::size_t>(env.n());
    EstimateSet est;
    est.accepted = a;
    est.pending = b;
    est.nu.assign(n, Interval{0.0, 1.0});
    est.xi.assign(n, Interval{0.0, 0.0});
    const Assortment pool = a | b;
    std::vector<double> lo(n, 0.0), hi(n, 0.0);
    for (int i : pool) {
        est.nu[i] = ci_nu(state, i, delta);
        lo[i] = est.nu[i].lo;
        hi[i] = est.nu[i].hi;
    }
    est.theta = ci_theta(env.rewards(), est.zeta, lo, hi, pool, env.k());
    for (int i : b) est.xi[i] = ci_xi(est.nu[i], {est.theta.lo, est.theta.hi}, env.rewards()[i]);
    est.theta_hi_assortment = est.theta.hi_set;
    est.steps = state.steps;
    return est;
}

// Intervals for procedures run with Z = A: theta over B with capacity
// M = min(K - |A|, |B|), scores xi_i for i in B.
EstimateSet finish_reduced(const Environment& env, const ExploreState& state,
                           const Assortment& a, const Assortment& b, double delta) {
    const auto n = static_cast<std::size_t>(env.n());
    const int m = std::min(env.k() - static_cast<int>(a.size()), static_cast<int>(b.size()));
    EstimateSet est;
    est.accepted = a;
    est.pending = b;
    est.zeta = ci_zeta(state, delta);
    est.nu.assign(n, Interval{0.0, 1.0});
    est.xi.assign(n, Interval{0.0, 0.0});
    std::vector<double> lo(n, 0.0), hi(n, 0.0);
    for (int i : b) {
        est.nu[i] = ci_nu(state, i, delta);
        lo[i] = est.nu[i].lo;
        hi[i] = est.nu[i].hi;
    }
    est.theta = ci_theta(env.rewards(), est.zeta, lo, hi, b, m);
    for (int i : b) est.xi[i] = ci_xi(est.nu[i], {est.theta.lo, est.theta.hi}, env.rewards()[i]);
    est.theta_hi_assortment = a | est.theta.hi_set;
    est.steps = state.steps;
    return est;
}

}  // namespace

EstimateSet est_naive(Environment& env, const Assortment& a, const Assortment& b,
                      double delta0, double eps) {
    require_disjoint(a, b, "est_naive");
    const double delta = per_event_delta(delta0, 15, env.n());
    const Assortment pool = a | b;
    ExploreState state(env.n());
    if (!pool.empty()) {
        const std::int64_t epochs =
            checked_epochs(static_cast<double>(env.k()) * static_cast<double>(tau_estimate(delta, eps)));
        for (int i : pool) explore_epochs(env, Assortment{i}, epochs, state);
    }
    if (b.empty()) {
        EstimateSet est;
        est.accepted = a;
        est.nu.assign(static_cast<std::size_t>(env.n()), Interval{0.0, 1.0});
        est.xi.assign(static_cast<std::size_t>(env.n()), Interval{0.0, 0.0});
        est.steps = state.steps;
        return est;
    }
    return finish_unreduced(env, state, a, b, delta);
}

RoughEstimates est_rough(Environment& env, double delta0) {
    const double delta = per_event_delta(delta0, 17, env.n());
    const std::int64_t tau = tau_rough(delta, env.k());
    ExploreState state(env.n());
    RoughEstimates out;
    out.tilde_v.resize(static_cast<std::size_t>(env.n()));
    for (int i = 0; i < env.n(); ++i) explore_epochs(env, Assortment{i}, tau, state);
    for (int i = 0; i < env.n(); ++i) out.tilde_v[i] = ci_nu(state, i, delta).hi;
    out.steps = state.steps;
    return out;
}

LayerPlan plan_layers(const Assortment& a, const Assortment& b, int capacity,
                      std::span<const double> tilde_v) {
    if (capacity < 1) throw std::invalid_argument("plan_layers: capacity must be >= 1");
    LayerPlan plan;
    double weight = 1.0;
    for (int j : a) weight += tilde_v[j];
    plan.tilde_nu.assign(tilde_v.size(), 0.0);
    for (std::size_t i = 0; i < tilde_v.size(); ++i) plan.tilde_nu[i] = tilde_v[i] / weight;

    int m = 0;
    while ((1 << m) < capacity) ++m;  // ceil(log2 M)
    plan.layers.assign(static_cast<std::size_t>(m + 1), {});
    for (int item : b) {
        const double x = plan.tilde_nu[item];
        int layer = m;
        for (int i = 0; i < m; ++i) {
            if (x > std::ldexp(1.0, -(i + 1)) && x <= std::ldexp(1.0, -i)) {
                layer = i;
                break;
            }
        }
        // Values above 1 cannot arise from clamped rough estimates; they join layer 0.
        if (x > 1.0) layer = 0;
        plan.layers[static_cast<std::size_t>(layer)].push_back(item);
    }
    plan.widths.resize(plan.layers.size());
    plan.groups.resize(plan.layers.size());
    for (std::size_t i = 0; i < plan.layers.size(); ++i) {
        const int d = std::min(1 << i, capacity);
        plan.widths[i] = d;
        const auto& layer = plan.layers[i];
        for (std::size_t start = 0; start < layer.size(); start += static_cast<std::size_t>(d)) {
            const auto stop = std::min(layer.size(), start + static_cast<std::size_t>(d));
            plan.groups[i].emplace_back(std::vector<int>(layer.begin() + static_cast<long>(start),
                                                         layer.begin() + static_cast<long>(stop)));
        }
    }
    return plan;
}

EstimateSet est_adaptive(Environment& env, const Assortment& a, const Assortment& b,
                         double delta0, double eps, std::span<const double> tilde_v) {
    require_disjoint(a, b, "est_adaptive");
    if (static_cast<int>(a.size()) >= env.k())
        throw std::invalid_argument("est_adaptive: requires |A| < K");
    if (static_cast<int>(tilde_v.size()) != env.n())
        throw std::invalid_argument("est_adaptive: rough estimates must cover every item");
    const double delta = per_event_delta(delta0, 15, env.n());
    ExploreState state(env.n(), a);
    if (!b.empty()) {
        const int m = std::min(env.k() - static_cast<int>(a.size()), static_cast<int>(b.size()));
        const std::int64_t tau = tau_estimate(delta, eps);
        const LayerPlan plan = plan_layers(a, b, m, tilde_v);
        for (std::size_t i = 0; i < plan.groups.size(); ++i) {
            const std::int64_t epochs =
                checked_epochs(static_cast<double>(plan.widths[i]) * static_cast<double>(tau));
            for (const auto& group : plan.groups[i]) explore_epochs(env, group, epochs, state);
        }
    }
    return finish_reduced(env, state, a, b, delta);
}

Estimator make_adaptive_estimator(std::vector<double> tilde_v) {
    return [tilde_v = std::move(tilde_v)](Environment& env, const Assortment& a,
                                          const Assortment& b, double delta0, double eps) {
        return est_adaptive(env, a, b, delta0, eps, tilde_v);
    };
}

EstimateSet est_reduced(Environment& env, const Assortment& a, const Assortment& b,
                        double delta0, double eps) {
    require_disjoint(a, b, "est_reduced");
    if (static_cast<int>(a.size()) >= env.k() && !b.empty())
        throw std::invalid_argument("est_reduced: requires |A| < K");
    const double delta = per_event_delta(delta0, 15, env.n());
    ExploreState state(env.n(), a);
    if (!b.empty()) {
        const std::int64_t epochs =
            checked_epochs(static_cast<double>(env.k()) * static_cast<double>(tau_estimate(delta, eps)));
        for (int i : b) explore_epochs(env, Assortment{i}, epochs, state);
    }
    return finish_reduced(env, state, a, b, delta);
}

std::vector<Assortment> plan_groups(const Assortment& b, int capacity) {
    if (capacity < 1) throw std::invalid_argument("plan_groups: capacity M must be >= 1");
    if (static_cast<int>(b.size()) < capacity)
        throw std::invalid_argument("plan_groups: |B| must be at least M");
    std::vector<Assortment> groups;
    const auto& items = b.items();
    const auto m = static_cast<std::size_t>(capacity);
    for (std::size_t start = 0; start < items.size(); start += m) {
        const auto stop = std::min(items.size(), start + m);
        std::vector<int> g(items.begin() + static_cast<long>(start),
                           items.begin() + static_cast<long>(stop));
        for (std::size_t j = 0; g.size() < m; ++j)
            if (std::find(g.begin(), g.end(), items[j]) == g.end()) g.push_back(items[j]);
        groups.emplace_back(std::move(g));
    }
    return groups;
}

EstimateSet est_reg(Environment& env, const Assortment& a, const Assortment& b,
                    double delta0, double eps) {
    require_disjoint(a, b, "est_reg");
    const int m = std::min(env.k() - static_cast<int>(a.size()), static_cast<int>(b.size()));
    if (m <= 0) throw std::invalid_argument("est_reg: M = 0, nothing left to estimate");
    const double delta = per_event_delta(delta0, 13, env.n());
    const std::int64_t epochs =
        checked_epochs(static_cast<double>(env.k()) * static_cast<double>(tau_estimate(delta, eps)));
    ExploreState state(env.n());
    for (const auto& group : plan_groups(b, m)) explore_epochs(env, a | group, epochs, state);
    return finish_unreduced(env, state, a, b, delta);
}

}  // namespace mnl
