// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "mnl/bench.hpp"
#include "mnl/estimators.hpp"
#include "mnl/oracle.hpp"
#include "mnl/sar.hpp"

using namespace mnl;
using namespace mnl::bench;

namespace {

constexpr std::uint64_t kMasterSeed = 20240601;

// Stream index blocks per criterion.
Rng stream(int criterion, std::uint64_t index) {
    return fork_stream(kMasterSeed, static_cast<std::uint64_t>(criterion) * 1000000ULL + index);
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s [%d] %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Instance random_instance(Rng& rng, int n, int k) {
    boost::random::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> r, v;
    for (int i = 0; i < n; ++i) {
        r.push_back(u(rng));
        v.push_back(u(rng));
    }
    return make_instance(k, r, v);
}

double min_of(const std::vector<double>& x) { return *std::min_element(x.begin(), x.end()); }

// 1 ---------------------------------------------------------------------------
void oracle_equivalence() {
    const auto t0 = Clock::now();
    Rng rng = stream(1, 0);
    boost::random::uniform_int_distribution<int> n_dist(1, 8);
    int set_mismatch = 0;
    double theta_err = 0.0, sum_err = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = n_dist(rng);
        const int k = boost::random::uniform_int_distribution<int>(1, std::min(4, n))(rng);
        const auto inst = random_instance(rng, n, k);
        const auto bf = brute_force_optimum(inst);
        const auto fr = fractional_optimum(inst);
        set_mismatch += bf.s_star != fr.s_star;
        theta_err = std::max(theta_err, std::abs(bf.theta_star - fr.theta_star));
        const auto u = advantage_scores(inst, bf.theta_star);
        double s = 0.0;
        for (int i : bf.s_star) s += u[i];
        sum_err = std::max(sum_err, std::abs(s - bf.theta_star));
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << "set mismatches " << set_mismatch << "/1000, max |theta diff| " << theta_err
      << ", max |sum u - theta*| " << sum_err << ", " << fmt("%.2f s", secs);
    report(1, "oracle equivalence", set_mismatch == 0 && theta_err <= 1e-9 && sum_err <= 1e-9 && secs < 10.0,
           d.str());
}

// 2 ---------------------------------------------------------------------------
void revenue_comparison() {
    Rng rng = stream(2, 0);
    boost::random::uniform_int_distribution<int> n_dist(1, 8);
    boost::random::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int n = n_dist(rng);
        const int k = boost::random::uniform_int_distribution<int>(1, n)(rng);
        const auto inst = random_instance(rng, n, k);
        // Uniform random subset of size <= K.
        std::vector<int> items(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) items[i] = i;
        const int size = boost::random::uniform_int_distribution<int>(0, k)(rng);
        for (int j = 0; j < size; ++j)
            std::swap(items[j], items[boost::random::uniform_int_distribution<int>(j, n - 1)(rng)]);
        const Assortment s(std::vector<int>(items.begin(), items.begin() + size));

        const auto opt = brute_force_optimum(inst);
        const auto sc = advantage_scores(inst, opt.theta_star);
        double lhs_factor = 1.0;
        for (int i : s) lhs_factor += inst.v[i];
        const double lhs = lhs_factor * (opt.theta_star - revenue(inst, s));
        double rhs = 0.0;
        for (int i : opt.s_star - s) rhs += sc[i];
        for (int i : s - opt.s_star) rhs -= sc[i];
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    report(2, "revenue comparison identity", worst <= 1e-9,
           "max |lhs - rhs| over 10000 pairs " + fmt("%.3g", worst));
}

// 3 ---------------------------------------------------------------------------
void lower_bound_family() {
    const auto t0 = Clock::now();
    Rng rng = stream(3, 0);
    const int ks[] = {1, 2, 4, 8};
    double gap_err = 0.0, rev_err = 0.0;
    int s_star_mismatch = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const int k = ks[trial % 4];
        const int n = boost::random::uniform_int_distribution<int>(std::max(2, 2 * k), 2 * k + 4)(rng);
        boost::random::uniform_real_distribution<double> g(0.0, 1.0 / (16.0 * k));
        std::vector<double> gaps;
        for (int i = k; i < n; ++i) {
            double x = 0.0;
            while (!(x > 0.0)) x = g(rng);
            gaps.push_back(x);
        }
        const auto inst = lower_bound_instance(n, k, gaps);
        rev_err = std::max(rev_err, std::abs(revenue(inst, Assortment::range(0, k)) - 0.5));
        const auto found = suboptimality_gaps(inst);
        for (int i = k; i < n; ++i) gap_err = std::max(gap_err, std::abs(found.gaps[i] - gaps[i - k]));
        s_star_mismatch += brute_force_optimum(inst).s_star != Assortment::range(0, k);
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << "max gap error " << gap_err << ", max |R([K]) - 1/2| " << rev_err << ", S* != [K] in "
      << s_star_mismatch << ", " << fmt("%.2f s", secs);
    report(3, "lower-bound family", gap_err <= 1e-9 && rev_err <= 1e-12 && s_star_mismatch == 0 && secs < 30.0,
           d.str());
}

// 4 ---------------------------------------------------------------------------
struct Moments {
    double sum = 0.0, sum2 = 0.0;
    void add(double x) {
        sum += x;
        sum2 += x * x;
    }
    double mean(int n) const { return sum / n; }
    double se(int n) const {
        const double m = mean(n);
        return std::sqrt(std::max(0.0, sum2 / n - m * m) / n);
    }
};

void exploration_distributions() {
    struct Config {
        Instance inst;
        Assortment z, s;
    };
    const std::vector<Config> configs{
        {make_instance(1, {0.5}, {0.5}), Assortment(), Assortment({0})},
        {make_instance(3, {0.9, 0.4, 0.7}, {0.2, 1.0, 0.6}), Assortment(), Assortment({0, 1, 2})},
        {make_instance(3, {0.9, 0.4, 0.7, 0.3}, {0.8, 0.5, 0.3, 0.9}), Assortment({0}), Assortment({1, 2})},
        {make_instance(4, {0.6, 0.8, 0.2, 0.5, 0.95}, {0.4, 0.7, 0.9, 0.1, 0.3}), Assortment({1, 4}),
         Assortment({0, 2})},
        {make_instance(4, {1.0, 0.1, 0.5, 0.3, 0.7, 0.2}, {0.05, 0.6, 1.0, 0.25, 0.45, 0.8}),
         Assortment({0, 2, 4}), Assortment({5})},
    };
    const int epochs = 100000;
    int checks = 0, outside = 0;
    double worst_z = 0.0;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        const auto& cfg = configs[c];
        const auto p = reduce(cfg.inst, cfg.z);
        Environment env(cfg.inst, stream(4, c));
        ExploreState st(cfg.inst.n, cfg.z);
        Moments z, len;
        std::vector<Moments> x(cfg.s.size());
        for (int e = 0; e < epochs; ++e) {
            const auto rec = explore(env, cfg.s, st);
            z.add(rec.z);
            len.add(static_cast<double>(rec.length - 1));
            for (std::size_t j = 0; j < cfg.s.size(); ++j) x[j].add(static_cast<double>(rec.x[j]));
        }
        auto check = [&](double mean, double se, double truth) {
            ++checks;
            const double dev = se > 0.0 ? std::abs(mean - truth) / se : (mean == truth ? 0.0 : 1e9);
            worst_z = std::max(worst_z, dev);
            outside += dev > 3.0;
        };
        check(z.mean(epochs), z.se(epochs), p.zeta);
        double sum_nu = 0.0;
        for (std::size_t j = 0; j < cfg.s.size(); ++j) {
            check(x[j].mean(epochs), x[j].se(epochs), p.nu[cfg.s[j]]);
            sum_nu += p.nu[cfg.s[j]];
        }
        check(len.mean(epochs), len.se(epochs), sum_nu);
    }
    std::ostringstream d;
    d << outside << "/" << checks << " means outside 3 SE (largest deviation " << fmt("%.2f", worst_z)
      << " SE) over 5 configurations, 1e5 epochs each";
    report(4, "exploration distributions", outside == 0, d.str());
}

// 5 ---------------------------------------------------------------------------
void ci_coverage() {
    const double delta = 0.01;
    const int trials = 10000;
    const int epochs = 500;

    const auto one = make_instance(1, {1.0}, {0.3});
    Environment env_nu(one, stream(5, 0));
    int nu_cov = 0;
    for (int t = 0; t < trials; ++t) {
        ExploreState st(1);
        explore_epochs(env_nu, Assortment({0}), epochs, st);
        nu_cov += ci_nu(st, 0, delta).contains(0.3);
    }

    const auto inst = make_instance(3, {0.9, 0.4, 0.7}, {0.5, 0.8, 0.3});
    const Assortment z({0, 1});
    const double zeta = revenue(inst, z);
    Environment env_z(inst, stream(5, 1));
    int z_cov = 0;
    for (int t = 0; t < trials; ++t) {
        ExploreState st(inst.n, z);
        explore_epochs(env_z, Assortment({2}), epochs, st);
        z_cov += ci_zeta(st, delta).contains(zeta);
    }
    const double nu_rate = nu_cov / double(trials), z_rate = z_cov / double(trials);
    std::ostringstream d;
    d << "nu coverage " << nu_rate << " (need >= " << 1 - 13 * delta << "), zeta coverage " << z_rate
      << " (need >= " << 1 - delta << ")";
    report(5, "confidence interval coverage", nu_rate >= 1 - 13 * delta && z_rate >= 1 - delta, d.str());
}

// 6 ---------------------------------------------------------------------------
InstanceFile reference_instance(int n, int k, std::uint64_t seed, double min_gap) {
    GenParams g;
    g.family = "uniform";
    g.n = n;
    g.k = k;
    g.seed = seed;
    g.min_gap = min_gap;
    return generate(g);
}

void delta_pac() {
    const auto t0 = Clock::now();
    double worst_rate = 1.0;
    int invariant_violations = 0;
    for (int idx = 0; idx < 10; ++idx) {
        const auto inst = reference_instance(6, 3, static_cast<std::uint64_t>(idx + 1), 0.05).inst;
        const auto opt = brute_force_optimum(inst);
        const auto gaps = suboptimality_gaps(inst);
        int success = 0;
        for (int rep = 0; rep < 200; ++rep) {
            Environment env(inst, stream(6, static_cast<std::uint64_t>(idx) * 1000 + rep));
            const auto r = pac_exact(env, 0.1);
            if (r.returned != opt.s_star) continue;
            ++success;
            for (const auto& p : r.trace) {
                const bool sandwich =
                    p.accepted.subset_of(opt.s_star) && opt.s_star.subset_of(p.accepted | p.pending);
                bool eliminated = true;
                for (int b : p.pending) eliminated = eliminated && gaps.gaps[b] <= std::ldexp(1.0, -p.k);
                invariant_violations += !(sandwich && eliminated);
            }
        }
        worst_rate = std::min(worst_rate, success / 200.0);
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << "lowest success rate " << worst_rate << " over 10 instances x 200 reps, invariant violations "
      << invariant_violations << ", " << fmt("%.2f s", secs);
    report(6, "delta-PAC success", worst_rate >= 0.9 && invariant_violations == 0 && secs < 600.0, d.str());
}

// 7 ---------------------------------------------------------------------------
void estimator_ordering() {
    GenParams g;
    g.family = "dense";
    g.n = 16;
    g.k = 8;
    g.seed = 1;
    const auto inst = generate(g).inst;
    const auto opt = brute_force_optimum(inst);
    // An accepted set inside S* as a later phase would hold it; the rest pending.
    const Assortment a = select_f(advantage_scores(inst, opt.theta_star), 2);
    const Assortment b = Assortment::range(0, inst.n) - a;
    const double delta0 = 0.1 / 3.0, eps = 0.125;
    std::vector<double> naive, reduced, adaptive;
    for (int rep = 0; rep < 50; ++rep) {
        Environment e1(inst, stream(7, rep));
        naive.push_back(double(est_naive(e1, a, b, delta0, eps).steps));
        Environment e2(inst, stream(7, 1000 + rep));
        reduced.push_back(double(est_reduced(e2, a, b, delta0, eps).steps));
        Environment e3(inst, stream(7, 2000 + rep));
        const auto rough = est_rough(e3, 0.05);
        est_adaptive(e3, a, b, delta0, eps, rough.tilde_v);
        adaptive.push_back(double(e3.steps()));
    }
    const double mn = median(naive), mr = median(reduced), ma = median(adaptive);
    std::ostringstream d;
    d << "median steps naive " << mn << ", reduced " << mr << ", adaptive (rough included) " << ma
      << ", naive/adaptive " << fmt("%.2f", mn / ma);
    report(7, "estimator ordering", mn > mr && mr > ma && mn / ma >= 4.0, d.str());
}

// 8 ---------------------------------------------------------------------------
double median_pac_steps(const Instance& inst, int criterion, std::uint64_t offset, int reps) {
    std::vector<double> steps;
    for (int rep = 0; rep < reps; ++rep) {
        Environment env(inst, stream(criterion, offset + rep));
        steps.push_back(double(pac_exact(env, 0.1).steps));
    }
    return median(steps);
}

void gap_scaling() {
    const int n = 4, k = 2;
    const double gap = 2e-4;
    const auto wide = lower_bound_instance(n, k, std::vector<double>(n - k, gap));
    const auto narrow = lower_bound_instance(n, k, std::vector<double>(n - k, gap / 2));
    const double s1 = median_pac_steps(wide, 8, 0, 50);
    const double s2 = median_pac_steps(narrow, 8, 1000, 50);
    const double ratio = s2 / s1;
    std::ostringstream d;
    d << "lower-bound N=4 K=2, gap " << gap << " -> " << gap / 2 << ": median steps " << s1 << " -> " << s2
      << ", ratio " << fmt("%.3f", ratio);
    report(8, "gap scaling", ratio >= 2.5 && ratio <= 6.0, d.str());
}

// 9 ---------------------------------------------------------------------------
double regret_of(const Instance& inst, std::int64_t horizon, Rng rng) {
    Environment env(inst, std::move(rng), horizon);
    regret_min(env, horizon);
    return env.ledger().cum_regret;
}

void regret_behavior() {
    const auto file = reference_instance(10, 4, 1, 0.05);
    const auto& inst = file.inst;
    const std::int64_t big_t = 100000, small_t = 20000;
    std::vector<double> alg, uniform, growth;
    for (int rep = 0; rep < 50; ++rep) {
        alg.push_back(regret_of(inst, big_t, stream(9, rep)));
        Environment env(inst, stream(9, 1000 + rep), big_t);
        Rng policy = stream(9, 2000 + rep);
        uniform_random_policy(env, big_t, policy);
        uniform.push_back(env.ledger().cum_regret);
        const double r1 = regret_of(inst, small_t, stream(9, 3000 + rep));
        const double r4 = regret_of(inst, 4 * small_t, stream(9, 4000 + rep));
        growth.push_back(r1 > 0.0 ? r4 / r1 : (r4 > 0.0 ? INFINITY : 1.0));
    }
    const double ma = median(alg), mu = median(uniform), mg = median(growth);
    std::ostringstream d;
    d << "median regret at T=1e5 " << ma << " vs uniform " << mu << " (factor " << fmt("%.2f", mu / ma)
      << ", need >= 5); median Reg(4T)/Reg(T) at T=2e4 " << fmt("%.3f", mg) << " (need <= 1.6)";
    report(9, "regret behavior", mu >= 5.0 * ma && mg <= 1.6, d.str());
}

// 10 --------------------------------------------------------------------------
void eps_pac() {
    // Each instance has gaps below 0.02 on several items and one below 1e-4.
    const std::vector<std::pair<int, std::vector<double>>> suite{
        {2, {5e-5, 0.005, 0.01, 0.015}},
        {1, {3e-5, 0.012, 0.019}},
        {3, {8e-5, 0.004, 0.018}},
    };
    bool pass = true;
    std::ostringstream d;
    for (std::size_t idx = 0; idx < suite.size(); ++idx) {
        const int k = suite[idx].first;
        const auto& gaps = suite[idx].second;
        const int n = k + static_cast<int>(gaps.size());
        const auto inst = lower_bound_instance(n, k, gaps);
        const auto opt = brute_force_optimum(inst);
        int good = 0;
        std::vector<double> eps_steps, exact_steps;
        for (int rep = 0; rep < 200; ++rep) {
            Environment env(inst, stream(10, idx * 10000 + rep));
            const auto r = pac_eps(env, 0.1, 0.1);
            good += opt.theta_star - revenue(inst, r.returned) <= 0.1;
            eps_steps.push_back(double(r.steps));
            Environment env2(inst, stream(10, idx * 10000 + 5000 + rep));
            exact_steps.push_back(double(pac_exact(env2, 0.1).steps));
        }
        const double rate = good / 200.0;
        const double frac = median(eps_steps) / median(exact_steps);
        pass = pass && rate >= 0.9 && frac < 0.5;
        d << (idx ? "; " : "") << "N=" << n << " K=" << k << " min gap " << min_of(gaps) << ": eps-optimal "
          << rate << ", median steps ratio " << fmt("%.3f", frac);
    }
    report(10, "(delta,eps)-PAC", pass, d.str());
}

// 11 --------------------------------------------------------------------------
std::string experiment_csv(ExperimentConfig config) {
    std::ostringstream os;
    write_results_csv(os, run_experiment(config).rows);
    return os.str();
}

void reproducibility() {
    std::vector<ExperimentConfig> configs;
    ExperimentConfig pac;
    pac.instance = reference_instance(6, 3, 1, 0.05);
    pac.reps = 50;
    pac.seed = kMasterSeed;
    configs.push_back(pac);
    ExperimentConfig eps = pac;
    eps.mode = Mode::pac_eps;
    configs.push_back(eps);
    ExperimentConfig naive = pac;
    naive.estimator = EstimatorKind::naive;
    configs.push_back(naive);
    ExperimentConfig reg;
    reg.instance = reference_instance(10, 4, 1, 0.05);
    reg.mode = Mode::regret;
    reg.horizon = 20000;
    reg.reps = 10;
    reg.seed = kMasterSeed;
    configs.push_back(reg);

    int identical = 0;
    for (auto& c : configs) {
        c.threads = 1;
        const std::string first = experiment_csv(c);
        c.threads = 4;
        const std::string second = experiment_csv(c);
        identical += first == second && !first.empty();
    }
    report(11, "reproducibility", identical == static_cast<int>(configs.size()),
           std::to_string(identical) + "/" + std::to_string(configs.size()) +
               " configurations byte-identical across repeated runs (1 and 4 workers)");
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{
        oracle_equivalence, revenue_comparison, lower_bound_family, exploration_distributions,
        ci_coverage,        delta_pac,          estimator_ordering, gap_scaling,
        regret_behavior,    eps_pac,            reproducibility,
    };
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        try {
            criteria[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), "criterion", false, std::string("exception: ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
