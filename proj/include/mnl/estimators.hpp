// estimators.hpp
//
// Generalized epoch-based offering with a stopping set, the confidence
// intervals built on its counters, and the estimation procedures that feed the
// successive accept-reject driver.
//
// An epoch offers Z | S repeatedly until the outcome lands in Z | {no purchase}.
// Purchases of items in S during the epoch are counted per item (x_i); the reward
// of the stopping outcome is z. Across epochs, n_i / T_i estimates
// nu_i = v_i / (1 + sum_{j in Z} v_j) and n_Z / T_Z estimates R(Z, v).
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mnl/environment.hpp"
#include "mnl/model.hpp"
#include "mnl/oracle.hpp"

namespace mnl {

struct ScheduleConstants {
    static constexpr double c0 = 196.0;
    static constexpr double c2 = 1024.0;
    // Upper bound on the epochs a single schedule may request.
    static constexpr double max_epochs = 9007199254740992.0;  // 2^53
};

// Thrown when a schedule asks for more epochs than ScheduleConstants::max_epochs.
class BudgetOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Interval {
    double lo{0.0};
    double hi{0.0};
    double width() const { return hi - lo; }
    bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
};

struct ExploreState {
    explicit ExploreState(int n, Assortment stop = {});

    Assortment z_stop;
    double n_z{0.0};
    std::int64_t t_z{0};
    std::vector<std::int64_t> n_i;
    std::vector<std::int64_t> t_i;
    std::int64_t epochs{0};
    std::int64_t steps{0};
    // Lengths recorded by single-epoch explore(); batched epochs only add to `steps`.
    std::vector<std::int64_t> epoch_lengths;

    double bar_zeta() const { return t_z > 0 ? n_z / static_cast<double>(t_z) : 0.0; }
    double bar_nu(int item) const;
};

struct EpochRecord {
    std::int64_t length{0};
    double z{0.0};
    std::vector<std::int64_t> x;  // aligned with the explored set
};

// One epoch of offering state.z_stop | s. Requires s disjoint from the stopping
// set and |Z | s| <= K (std::invalid_argument otherwise).
EpochRecord explore(Environment& env, const Assortment& s, ExploreState& state);

// `count` epochs of explore(s) with counters sampled in aggregate.
void explore_epochs(Environment& env, const Assortment& s, std::int64_t count,
                    ExploreState& state);

// Hoeffding interval for zeta, clamped to [0,1]; [0,1] when T_Z = 0.
Interval ci_zeta(const ExploreState& state, double delta);

// sigma = sqrt(48 bar_nu log(2/delta) / T_i) + 48 log(2/delta) / T_i,
// interval [0 v (bar_nu - sigma), 1 ^ (bar_nu + sigma)]; [0,1] when T_i = 0.
double nu_sigma(double bar_nu, std::int64_t t, double delta);
Interval ci_nu(const ExploreState& state, int item, double delta);

struct ThetaInterval {
    double lo{0.0};
    double hi{0.0};
    Assortment lo_set;  // maximizer under the lower parameters
    Assortment hi_set;  // maximizer under the upper parameters
};

// theta_lo = max_{S in pool, |S| <= capacity} R(S, nu_lo, zeta_lo); same for hi.
// nu_lo / nu_hi are indexed by item.
ThetaInterval ci_theta(std::span<const double> rewards, Interval zeta,
                       std::span<const double> nu_lo, std::span<const double> nu_hi,
                       const Assortment& pool, int capacity);

// lo = min(nu_lo (r - theta_hi), nu_hi (r - theta_hi)),
// hi = max(nu_lo (r - theta_lo), nu_hi (r - theta_lo)).
Interval ci_xi(Interval nu, Interval theta, double reward);

// Intervals returned by an estimation procedure for one accept-reject phase.
struct EstimateSet {
    Assortment accepted;  // A
    Assortment pending;   // B
    Interval zeta{0.0, 0.0};
    std::vector<Interval> nu;  // per item; meaningful for the estimated items
    ThetaInterval theta;
    std::vector<Interval> xi;  // per item; meaningful for items of B
    // Full assortment (A included where the procedure reduces by A) attaining theta.hi.
    Assortment theta_hi_assortment;
    std::int64_t steps{0};
};

// Signature shared by the procedures: (env, A, B, delta0, eps).
using Estimator = std::function<EstimateSet(Environment&, const Assortment&,
                                            const Assortment&, double, double)>;

// Epoch budgets. Each rounds up; delta is the per-event probability after the
// procedure's union-bound divisor.
double per_event_delta(double delta0, int divisor, int n);
std::int64_t tau_estimate(double delta, double eps);  // C2 C0 log(2/delta) / eps^2
std::int64_t tau_rough(double delta, int k);          // 4 K C0 log(2/delta)

// Singleton exploration of every item of A | B for K tau epochs with Z empty.
EstimateSet est_naive(Environment& env, const Assortment& a, const Assortment& b,
                      double delta0, double eps);

struct RoughEstimates {
    std::vector<double> tilde_v;
    std::int64_t steps{0};
};

// Singleton exploration of every item for tau epochs; tilde_v_i = upper end of ci_nu.
RoughEstimates est_rough(Environment& env, double delta0);

struct LayerPlan {
    std::vector<double> tilde_nu;            // per item
    std::vector<std::vector<int>> layers;    // layers[i] = B_i
    std::vector<int> widths;                 // d_i = min(2^i, M)
    std::vector<std::vector<Assortment>> groups;  // groups[i][j] = B_{i,j}
};

// Layers of B by tilde_nu: B_i = (2^-(i+1), 2^-i] for i < m, B_m = [0, 2^-m],
// m = ceil(log2 M); each layer is cut into consecutive groups of size <= d_i.
LayerPlan plan_layers(const Assortment& a, const Assortment& b, int capacity,
                      std::span<const double> tilde_v);

EstimateSet est_adaptive(Environment& env, const Assortment& a, const Assortment& b,
                         double delta0, double eps, std::span<const double> tilde_v);
Estimator make_adaptive_estimator(std::vector<double> tilde_v);

// Singleton exploration of B with Z = A for K tau epochs each.
EstimateSet est_reduced(Environment& env, const Assortment& a, const Assortment& b,
                        double delta0, double eps);

// ceil(|B| / M) groups of size exactly M covering B; the last group is topped up
// with the smallest items of B not already in it.
std::vector<Assortment> plan_groups(const Assortment& b, int capacity);

// Full assortments A | B'_j explored with Z empty for K tau epochs each.
EstimateSet est_reg(Environment& env, const Assortment& a, const Assortment& b,
                    double delta0, double eps);

}  // namespace mnl
