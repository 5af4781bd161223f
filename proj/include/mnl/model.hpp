// model.hpp
//
// MNL choice model primitives: problem instances, assortments, choice
// probabilities, revenue and the reduced revenue relative to an accepted set.
//
// Items are 0-based in the library. The no-purchase option has weight 1 and
// reward 0 and is never stored in an Instance.
#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mnl {

/// Sentinel used for the no-purchase outcome of an offer.
inline constexpr int kNoPurchase = -1;

struct Instance {
    int n{0};
    int k{0};
    std::vector<double> r;  // rewards in [0,1]
    std::vector<double> v;  // MNL parameters in [0,1]

    // Throws std::invalid_argument when sizes or ranges are violated.
    void validate() const;
};

Instance make_instance(int k, std::vector<double> r, std::vector<double> v);

// Sorted, duplicate-free set of item indices.
class Assortment {
public:
    Assortment() = default;
    Assortment(std::initializer_list<int> items);
    explicit Assortment(std::vector<int> items);

    static Assortment range(int first, int last);  // [first, last)

    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    bool contains(int item) const;
    int operator[](std::size_t i) const { return items_[i]; }

    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    const std::vector<int>& items() const { return items_; }

    Assortment operator|(const Assortment& other) const;
    Assortment operator-(const Assortment& other) const;
    Assortment operator&(const Assortment& other) const;
    bool disjoint(const Assortment& other) const;
    bool subset_of(const Assortment& other) const;

    friend bool operator==(const Assortment&, const Assortment&) = default;
    friend auto operator<=>(const Assortment& a, const Assortment& b) {
        return a.items_ <=> b.items_;
    }

    // 1-based, brace-delimited, e.g. "{1,3}".
    std::string to_string() const;

private:
    std::vector<int> items_;
};

// Revenue parameters relative to an accepted set A:
// zeta = R(A, v), nu_i = v_i / (1 + sum_{j in A} v_j).
struct ReducedParams {
    double zeta{0.0};
    std::vector<double> nu;  // indexed by item; entries for items in A are unused
};

ReducedParams reduce(const Instance& inst, const Assortment& accepted);

// Throws std::domain_error on an out-of-range item.
void check_items(const Assortment& s, int n);

// Probabilities indexed as [0] = no purchase, [1 + j] = s[j].
std::vector<double> choice_probabilities(const Instance& inst, const Assortment& s);

double revenue(const Instance& inst, const Assortment& s);

// (zeta + sum nu_i r_i) / (1 + sum nu_i) over s0.
double reduced_revenue(const ReducedParams& p, const Assortment& s0,
                       std::span<const double> rewards);

// u_i = v_i (r_i - theta*)
std::vector<double> advantage_scores(const Instance& inst, double theta_star);

}  // namespace mnl
