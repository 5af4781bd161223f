#include "mnl/environment.hpp"

#include <algorithm>
#include <boost/random/binomial_distribution.hpp>
#include <boost/random/negative_binomial_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "mnl/oracle.hpp"

namespace mnl {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

Rng fork_stream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(stream_seed(master_seed, index));
}

std::vector<double> RegretLedger::curve(std::int64_t limit) const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::clamp<std::int64_t>(std::min(limit, steps), 0, 1 << 26)));
    double cum = 0.0;
    for (const auto& seg : segments) {
        for (std::int64_t j = 0; j < seg.steps; ++j) {
            if (static_cast<std::int64_t>(out.size()) >= limit) return out;
            cum += seg.per_step;
            out.push_back(cum);
        }
    }
    return out;
}

Environment::Environment(Instance inst, Rng rng, std::int64_t horizon)
    : inst_(std::move(inst)), rng_(std::move(rng)), horizon_(horizon) {
    inst_.validate();
    const auto opt = inst_.n <= kBruteForceMaxItems ? brute_force_optimum(inst_)
                                                    : fractional_optimum(inst_);
    theta_star_ = opt.theta_star;
    s_star_ = opt.s_star;
    ledger_.offer_counts.assign(static_cast<std::size_t>(inst_.n), 0);
}

void Environment::check_offer(const Assortment& s) const {
    check_items(s, inst_.n);
    if (static_cast<int>(s.size()) > inst_.k)
        throw CapacityViolation("offer of " + std::to_string(s.size()) +
                                " items exceeds capacity K = " + std::to_string(inst_.k));
}

bool Environment::charge(const Assortment& s, std::int64_t count) {
    const std::int64_t allowed = std::min(count, std::max<std::int64_t>(remaining(), 0));
    if (allowed > 0) {
        const double per_step =
            s == s_star_ ? 0.0 : std::max(0.0, theta_star_ - revenue(inst_, s));
        ledger_.cum_regret += per_step * static_cast<double>(allowed);
        ledger_.steps += allowed;
        for (int i : s) ledger_.offer_counts[i] += allowed;
        auto& segs = ledger_.segments;
        if (!segs.empty() && segs.back().per_step == per_step)
            segs.back().steps += allowed;
        else
            segs.push_back({allowed, per_step});
    }
    return allowed == count;
}

int Environment::offer(const Assortment& s) {
    check_offer(s);
    if (!charge(s, 1)) throw HorizonReached();
    double total = 1.0;
    for (int i : s) total += inst_.v[i];
    boost::random::uniform_real_distribution<double> unif(0.0, total);
    double u = unif(rng_);
    if (u < 1.0) return kNoPurchase;
    u -= 1.0;
    for (int i : s) {
        if (u < inst_.v[i]) return i;
        u -= inst_.v[i];
    }
    // Round-off at the upper end lands on the last positive-weight item.
    for (auto it = s.items().rbegin(); it != s.items().rend(); ++it)
        if (inst_.v[*it] > 0.0) return *it;
    return kNoPurchase;
}

namespace {

// Splits `total` draws multinomially over `weights`.
std::vector<std::int64_t> split_counts(Rng& rng, std::int64_t total,
                                       const std::vector<double>& weights) {
    std::vector<std::int64_t> out(weights.size(), 0);
    double remaining_weight = 0.0;
    for (double w : weights) remaining_weight += w;
    std::int64_t left = total;
    for (std::size_t j = 0; j < weights.size() && left > 0; ++j) {
        if (j + 1 == weights.size()) {
            out[j] = left;
            break;
        }
        const double p = remaining_weight > 0.0 ? weights[j] / remaining_weight : 0.0;
        std::int64_t draw = 0;
        if (p >= 1.0)
            draw = left;
        else if (p > 0.0)
            draw = boost::random::binomial_distribution<std::int64_t, double>(left, p)(rng);
        out[j] = draw;
        left -= draw;
        remaining_weight -= weights[j];
    }
    return out;
}

}  // namespace

EpochBatch Environment::offer_epochs(const Assortment& stop, const Assortment& s,
                                     std::int64_t count) {
    if (!stop.disjoint(s)) throw std::invalid_argument("offer_epochs: stopping set overlaps S");
    const Assortment offered = stop | s;
    check_offer(offered);

    EpochBatch batch;
    batch.purchases.assign(s.size(), 0);
    if (count <= 0) return batch;

    std::vector<double> s_weights;
    double v_s = 0.0;
    for (int i : s) {
        s_weights.push_back(inst_.v[i]);
        v_s += inst_.v[i];
    }
    std::vector<double> stop_weights{1.0};
    double v_stop = 1.0;
    for (int j : stop) {
        stop_weights.push_back(inst_.v[j]);
        v_stop += inst_.v[j];
    }

    std::int64_t in_s = 0;
    if (v_s > 0.0) {
        const double p_stop = v_stop / (v_stop + v_s);
        in_s = boost::random::negative_binomial_distribution<std::int64_t, double>(count,
                                                                                   p_stop)(rng_);
    }
    batch.epochs = count;
    batch.steps = count + in_s;
    batch.purchases = split_counts(rng_, in_s, s_weights);
    const auto stops = split_counts(rng_, count, stop_weights);
    for (std::size_t j = 1; j < stops.size(); ++j)
        batch.stop_reward_sum += static_cast<double>(stops[j]) * inst_.r[stop[j - 1]];

    if (!charge(offered, batch.steps)) throw HorizonReached();
    return batch;
}

void Environment::offer_fixed(const Assortment& s, std::int64_t count) {
    check_offer(s);
    if (!charge(s, count)) throw HorizonReached();
}

}  // namespace mnl
