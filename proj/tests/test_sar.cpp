#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mnl/bench.hpp"
#include "mnl/oracle.hpp"
#include "mnl/sar.hpp"

using namespace mnl;

namespace {

std::vector<Interval> point_intervals(const std::vector<double>& xi) {
    std::vector<Interval> out;
    for (double x : xi) out.push_back({x, x});
    return out;
}

Instance reference_six(std::uint64_t seed) {
    bench::GenParams g;
    g.family = "uniform";
    g.n = 6;
    g.k = 3;
    g.seed = seed;
    g.min_gap = 0.05;
    return bench::generate(g).inst;
}

}  // namespace

TEST_CASE("accept_reject sign rule") {
    PhaseState st;
    st.b_set = Assortment({0, 1});
    accept_reject(st, point_intervals({0.2, 0.1}), 3);
    CHECK(st.a_set == Assortment({0, 1}));
    CHECK(st.b_set.empty());

    PhaseState neg;
    neg.b_set = Assortment({0, 1, 2});
    accept_reject(neg, point_intervals({-0.2, -0.1, -0.3}), 2);
    CHECK(neg.a_set.empty());
    CHECK(neg.b_set.empty());
    CHECK(neg.b_rej == Assortment({0, 1, 2}));
}

TEST_CASE("accept_reject top-M rule") {
    PhaseState st;
    st.b_set = Assortment({0, 1, 2, 3});
    // M = 2: alpha = 2nd largest lo = 0.3, beta = 3rd largest hi = 0.35.
    std::vector<Interval> xi{{0.5, 0.6}, {0.3, 0.4}, {0.1, 0.35}, {0.05, 0.2}};
    accept_reject(st, xi, 2);
    CHECK(st.alpha == 0.3);
    CHECK(st.beta == 0.35);
    CHECK(st.b_acc == Assortment({0}));
    CHECK(st.b_rej == Assortment({3}));
    CHECK(st.a_set == Assortment({0}));
    CHECK(st.b_set == Assortment({1, 2}));

    PhaseState bad;
    bad.b_set = Assortment({0});
    CHECK_THROWS_AS(accept_reject(bad, std::vector<Interval>{{0.2, 0.1}}, 1), std::logic_error);
}

TEST_CASE("exact intervals reach S* in one step") {
    Rng rng = fork_stream(30, 0);
    for (int trial = 0; trial < 200; ++trial) {
        bench::GenParams g;
        g.family = "uniform";
        g.n = 7;
        g.k = 1 + trial % 4;
        g.seed = static_cast<std::uint64_t>(trial);
        const auto inst = bench::generate(g).inst;
        const auto opt = brute_force_optimum(inst);
        PhaseState st;
        st.b_set = Assortment::range(0, inst.n);
        accept_reject(st, point_intervals(advantage_scores(inst, opt.theta_star)), inst.k);
        CHECK(st.a_set == opt.s_star);
    }
}

TEST_CASE("single item") {
    for (double v : {0.6, 0.2}) {
        // Gap of the only item is theta* = 0.8 v / (1 + v) >= 0.13.
        auto inst = make_instance(1, {0.8}, {v});
        const auto opt = brute_force_optimum(inst);
        int ok = 0;
        for (int rep = 0; rep < 100; ++rep) {
            Environment env(inst, fork_stream(31, rep));
            ok += pac_exact(env, 0.1).returned == opt.s_star;
        }
        CHECK(ok >= 95);
    }
}

TEST_CASE("pac_exact invariants") {
    const auto inst = reference_six(3);
    const auto opt = brute_force_optimum(inst);
    const auto gaps = suboptimality_gaps(inst);
    double min_gap = 1.0;
    for (double g : gaps.gaps) min_gap = std::min(min_gap, g);
    const int phase_bound = static_cast<int>(std::ceil(std::log2(1.0 / min_gap))) + 2;
    int success = 0;
    for (int rep = 0; rep < 100; ++rep) {
        Environment env(inst, fork_stream(33, rep));
        const auto r = pac_exact(env, 0.1);
        std::int64_t traced = r.rough_steps;
        Assortment prev_a, prev_b = Assortment::range(0, inst.n);
        const bool ok = r.returned == opt.s_star;
        success += ok;
        for (const auto& p : r.trace) {
            traced += p.steps;
            CHECK(prev_a.subset_of(p.accepted));
            CHECK(p.pending.subset_of(prev_b));
            CHECK(p.accepted.disjoint(p.pending));
            CHECK(static_cast<int>(p.accepted.size()) <= inst.k);
            if (ok) {
                CHECK(p.accepted.subset_of(opt.s_star));
                CHECK(opt.s_star.subset_of(p.accepted | p.pending));
                for (int b : p.pending) CHECK(gaps.gaps[b] <= std::ldexp(1.0, -p.k));
            }
            prev_a = p.accepted;
            prev_b = p.pending;
        }
        CHECK(traced == r.steps);
        CHECK(r.steps == env.steps());
        CHECK(r.phases <= phase_bound);
    }
    CHECK(success >= 90);
}

TEST_CASE("pac_eps") {
    const auto inst = reference_six(4);
    const auto opt = brute_force_optimum(inst);
    const auto gaps = suboptimality_gaps(inst);
    const double min_gap = *std::min_element(gaps.gaps.begin(), gaps.gaps.end());
    for (int rep = 0; rep < 20; ++rep) {
        Environment a(inst, fork_stream(34, rep));
        const auto loose = pac_eps(a, 0.1, 1.5);
        CHECK(loose.phases <= 1);
        CHECK(opt.theta_star - revenue(inst, loose.returned) <= 1.5);
        CHECK(static_cast<int>(loose.returned.size()) <= inst.k);
        Environment b(inst, fork_stream(35, rep));
        CHECK(pac_eps(b, 0.1, min_gap / 4.0).returned == opt.s_star);
    }
    Environment c(inst, fork_stream(36, 0));
    CHECK_THROWS_AS(pac_eps(c, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("rough estimation runs once") {
    const auto inst = lower_bound_instance(4, 2, std::vector<double>{2e-4, 2e-4});
    Environment env(inst, fork_stream(37, 0));
    const auto r = pac_exact(env, 0.1);
    CHECK(r.phases >= 3);
    const double tau = double(tau_rough(per_event_delta(0.05, 17, inst.n), inst.k));
    // One singleton pass over every item, each epoch at least one step.
    CHECK(r.rough_steps >= inst.n * tau);
    CHECK(r.rough_steps <= 2.0 * inst.n * tau);
}

TEST_CASE("phase cap aborts") {
    const auto inst = reference_six(5);
    Environment env(inst, fork_stream(38, 0));
    SarOptions opts;
    opts.phase_cap = 0;
    const auto r = sar_mnl(env, 0.1, est_naive, opts);
    CHECK(r.aborted);
    CHECK(!r.diagnostic.empty());
    CHECK(r.phases == 0);
}

TEST_CASE("regret_min stops exactly at T") {
    const auto inst = reference_six(6);
    const auto opt = brute_force_optimum(inst);
    for (std::int64_t horizon : {std::int64_t{6}, std::int64_t{1000}, std::int64_t{123457}}) {
        Environment env(inst, fork_stream(39, 0), horizon);
        const auto r = regret_min(env, horizon);
        CHECK(env.steps() == horizon);
        CHECK(r.steps == horizon);
        CHECK(env.ledger().steps == horizon);
    }
    Environment small(inst, fork_stream(39, 1), 5);
    CHECK_THROWS_AS(regret_min(small, 5), std::invalid_argument);
    Environment mismatch(inst, fork_stream(39, 2), 100);
    CHECK_THROWS_AS(regret_min(mismatch, 50), std::invalid_argument);

    // Long horizon: identification completes, then S* accrues nothing.
    const std::int64_t long_t = std::int64_t{1} << 40;
    Environment env(inst, fork_stream(39, 3), long_t);
    const auto r = regret_min(env, long_t);
    REQUIRE(!r.horizon_reached);
    CHECK(r.returned == opt.s_star);
    CHECK(env.ledger().segments.back().per_step == 0.0);
    CHECK(env.steps() == long_t);
}

TEST_CASE("uniform policy") {
    const auto inst = reference_six(7);
    Environment env(inst, fork_stream(40, 0), 1000);
    Rng rng = fork_stream(40, 1);
    uniform_random_policy(env, 1000, rng);
    CHECK(env.steps() == 1000);
    std::int64_t total = 0;
    for (auto c : env.ledger().offer_counts) total += c;
    CHECK(total == 1000 * inst.k);
}
