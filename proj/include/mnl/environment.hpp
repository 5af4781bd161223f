// environment.hpp
//
// Stochastic MNL-bandit environment. Algorithms see N, K and the rewards; the
// parameters v stay private. Every offered time step is charged pseudo-regret
// theta* - R(S_t, v) in the ledger, independent of the realized purchase.
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "mnl/model.hpp"

namespace mnl {

using Rng = std::mt19937_64;

/// Identifier written into experiment metadata.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64+splitmix64-fork";

// Stream for replication `index` of a run seeded with `master_seed`: the engine is
// seeded with splitmix64(splitmix64(master_seed) ^ splitmix64(index + golden)).
Rng fork_stream(std::uint64_t master_seed, std::uint64_t index);
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index);
std::uint64_t splitmix64(std::uint64_t x);

class CapacityViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Thrown when an offer would run past the configured horizon. The steps up to
// the horizon are charged before the throw.
class HorizonReached : public std::runtime_error {
public:
    HorizonReached() : std::runtime_error("time horizon reached") {}
};

struct RegretSegment {
    std::int64_t steps;
    double per_step;
};

struct RegretLedger {
    double cum_regret{0.0};
    std::int64_t steps{0};
    std::vector<std::int64_t> offer_counts;  // per item
    std::vector<RegretSegment> segments;     // run-length encoded per-step regret

    // Cumulative regret after each of the first `limit` steps.
    std::vector<double> curve(std::int64_t limit) const;
};

// Sufficient statistics of a run of epochs (see Environment::offer_epochs).
struct EpochBatch {
    std::int64_t epochs{0};
    std::int64_t steps{0};
    double stop_reward_sum{0.0};          // sum over epochs of r of the stopping outcome
    std::vector<std::int64_t> purchases;  // aligned with the explored set S
};

class Environment {
public:
    Environment(Instance inst, Rng rng,
                std::int64_t horizon = std::numeric_limits<std::int64_t>::max());

    int n() const { return inst_.n; }
    int k() const { return inst_.k; }
    std::span<const double> rewards() const { return inst_.r; }

    std::int64_t steps() const { return ledger_.steps; }
    std::int64_t horizon() const { return horizon_; }
    std::int64_t remaining() const { return horizon_ - ledger_.steps; }
    const RegretLedger& ledger() const { return ledger_; }

    // One time step. Returns the purchased item or kNoPurchase.
    int offer(const Assortment& s);

    // `count` consecutive epochs of offering stop | s, each ending at the first
    // outcome in stop | {no purchase}. Samples the aggregate counts exactly:
    // in-s purchases ~ NegBinomial(count, P(stop | {0})), split multinomially by
    // v over s; stopping outcomes split multinomially by v over stop | {0}.
    EpochBatch offer_epochs(const Assortment& stop, const Assortment& s, std::int64_t count);

    // Offer s for `count` steps without observing outcomes.
    void offer_fixed(const Assortment& s, std::int64_t count);

private:
    void check_offer(const Assortment& s) const;
    // Charges up to `count` steps of s; returns false if the horizon cut it short.
    bool charge(const Assortment& s, std::int64_t count);

    Instance inst_;
    Rng rng_;
    std::int64_t horizon_;
    double theta_star_{0.0};
    Assortment s_star_;
    RegretLedger ledger_;
};

}  // namespace mnl
