#include "mnl/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mnl {

void Instance::validate() const {
    if (n < 1) throw std::invalid_argument("instance: n must be >= 1");
    if (k < 1 || k > n) throw std::invalid_argument("instance: k must be in [1, n]");
    if (static_cast<int>(r.size()) != n || static_cast<int>(v.size()) != n)
        throw std::invalid_argument("instance: r and v must have n entries");
    for (int i = 0; i < n; ++i) {
        if (!(r[i] >= 0.0 && r[i] <= 1.0))
            throw std::invalid_argument("instance: reward out of [0,1] at item " +
                                        std::to_string(i + 1));
        if (!(v[i] >= 0.0 && v[i] <= 1.0))
            throw std::invalid_argument("instance: parameter out of [0,1] at item " +
                                        std::to_string(i + 1));
    }
}

Instance make_instance(int k, std::vector<double> r, std::vector<double> v) {
    Instance inst{static_cast<int>(r.size()), k, std::move(r), std::move(v)};
    inst.validate();
    return inst;
}

Assortment::Assortment(std::initializer_list<int> items)
    : Assortment(std::vector<int>(items)) {}

Assortment::Assortment(std::vector<int> items) : items_(std::move(items)) {
    std::sort(items_.begin(), items_.end());
    if (std::adjacent_find(items_.begin(), items_.end()) != items_.end())
        throw std::invalid_argument("assortment: duplicate item");
    if (!items_.empty() && items_.front() < 0)
        throw std::invalid_argument("assortment: negative item index");
}

Assortment Assortment::range(int first, int last) {
    Assortment a;
    for (int i = first; i < last; ++i) a.items_.push_back(i);
    return a;
}

bool Assortment::contains(int item) const {
    return std::binary_search(items_.begin(), items_.end(), item);
}

Assortment Assortment::operator|(const Assortment& other) const {
    Assortment out;
    std::set_union(items_.begin(), items_.end(), other.items_.begin(), other.items_.end(),
                   std::back_inserter(out.items_));
    return out;
}

Assortment Assortment::operator-(const Assortment& other) const {
    Assortment out;
    std::set_difference(items_.begin(), items_.end(), other.items_.begin(),
                        other.items_.end(), std::back_inserter(out.items_));
    return out;
}

Assortment Assortment::operator&(const Assortment& other) const {
    Assortment out;
    std::set_intersection(items_.begin(), items_.end(), other.items_.begin(),
                          other.items_.end(), std::back_inserter(out.items_));
    return out;
}

bool Assortment::disjoint(const Assortment& other) const { return (*this & other).empty(); }

bool Assortment::subset_of(const Assortment& other) const {
    return std::includes(other.items_.begin(), other.items_.end(), items_.begin(),
                         items_.end());
}

std::string Assortment::to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) os << ',';
        os << items_[i] + 1;
    }
    os << '}';
    return os.str();
}

void check_items(const Assortment& s, int n) {
    if (!s.empty() && s.items().back() >= n)
        throw std::domain_error("assortment: item index " +
                                std::to_string(s.items().back() + 1) + " exceeds N = " +
                                std::to_string(n));
}

ReducedParams reduce(const Instance& inst, const Assortment& accepted) {
    check_items(accepted, inst.n);
    double weight = 1.0;
    for (int j : accepted) weight += inst.v[j];
    ReducedParams p;
    p.zeta = revenue(inst, accepted);
    p.nu.resize(inst.n);
    for (int i = 0; i < inst.n; ++i) p.nu[i] = inst.v[i] / weight;
    return p;
}

std::vector<double> choice_probabilities(const Instance& inst, const Assortment& s) {
    check_items(s, inst.n);
    double denom = 1.0;
    for (int i : s) denom += inst.v[i];
    std::vector<double> p;
    p.reserve(s.size() + 1);
    p.push_back(1.0 / denom);
    for (int i : s) p.push_back(inst.v[i] / denom);
    return p;
}

double revenue(const Instance& inst, const Assortment& s) {
    check_items(s, inst.n);
    double num = 0.0, denom = 1.0;
    for (int i : s) {
        num += inst.v[i] * inst.r[i];
        denom += inst.v[i];
    }
    return num / denom;
}

double reduced_revenue(const ReducedParams& p, const Assortment& s0,
                       std::span<const double> rewards) {
    double num = p.zeta, denom = 1.0;
    for (int i : s0) {
        num += p.nu.at(i) * rewards[i];
        denom += p.nu[i];
    }
    return num / denom;
}

std::vector<double> advantage_scores(const Instance& inst, double theta_star) {
    std::vector<double> u(inst.n);
    for (int i = 0; i < inst.n; ++i) u[i] = inst.v[i] * (inst.r[i] - theta_star);
    return u;
}

}  // namespace mnl
