#pragma once

#include "posauc/rational.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace posauc {

// Bidder and slot indices are 0-based throughout the library.
inline constexpr std::size_t kNone = static_cast<std::size_t>(-1);

using Matrix = std::vector<std::vector<Rational>>;

struct Instance {
    std::vector<Rational> values;  // v_i
    Matrix ctr;                    // alpha[i][j], n rows by m columns
    bool strict_positive_ctr = false;

    std::size_t n() const { return values.size(); }
    std::size_t m() const { return ctr.empty() ? 0 : ctr.front().size(); }

    const Rational& alpha(std::size_t i, std::size_t j) const { return ctr[i][j]; }
    // Per-impression value of bidder i for slot j.
    Rational value(std::size_t i, std::size_t j) const { return ctr[i][j] * values[i]; }

    bool has_zero_ctr() const {
        for (const auto& row : ctr)
            for (const auto& a : row)
                if (a.is_zero()) return true;
        return false;
    }

    void validate() const {
        if (ctr.size() != values.size())
            throw std::invalid_argument("instance: ctr has " + std::to_string(ctr.size()) +
                                        " rows but there are " + std::to_string(values.size()) +
                                        " values");
        std::size_t cols = m();
        if (cols > n()) throw std::invalid_argument("instance: more slots than bidders");
        for (std::size_t i = 0; i < n(); ++i) {
            if (values[i].sign() < 0)
                throw std::invalid_argument("instance: values[" + std::to_string(i) + "] is negative");
            if (ctr[i].size() != cols)
                throw std::invalid_argument("instance: ctr[" + std::to_string(i) + "] has wrong length");
            for (std::size_t j = 0; j < cols; ++j) {
                const auto& a = ctr[i][j];
                std::string at = "ctr[" + std::to_string(i) + "][" + std::to_string(j) + "]";
                if (a.sign() < 0) throw std::invalid_argument("instance: " + at + " is negative");
                if (strict_positive_ctr && a.is_zero())
                    throw std::invalid_argument("instance: " + at + " is zero but strict_positive_ctr is set");
                if (j > 0 && ctr[i][j - 1] < a)
                    throw std::invalid_argument("instance: row " + std::to_string(i) +
                                                " increases at column " + std::to_string(j));
            }
        }
    }
};

inline Instance make_instance(std::vector<Rational> values, Matrix ctr, bool strict_positive = false) {
    Instance inst{std::move(values), std::move(ctr), strict_positive};
    inst.validate();
    return inst;
}

// winner[j] is the bidder holding slot j, or kNone if the slot is unsold.
using Allocation = std::vector<std::size_t>;

inline void check_allocation(const Instance& inst, const Allocation& alloc) {
    if (alloc.size() != inst.m())
        throw std::invalid_argument("allocation: expected " + std::to_string(inst.m()) + " slots, got " +
                                    std::to_string(alloc.size()));
    std::vector<bool> used(inst.n(), false);
    for (std::size_t w : alloc) {
        if (w == kNone) continue;
        if (w >= inst.n()) throw std::invalid_argument("allocation: bidder index out of range");
        if (used[w]) throw std::invalid_argument("allocation: bidder " + std::to_string(w) + " wins twice");
        used[w] = true;
    }
}

// slot_of[i] for every bidder, kNone if unallocated.
inline std::vector<std::size_t> slot_of(const Allocation& alloc, std::size_t n) {
    std::vector<std::size_t> s(n, kNone);
    for (std::size_t j = 0; j < alloc.size(); ++j)
        if (alloc[j] != kNone) s[alloc[j]] = j;
    return s;
}

inline Rational welfare(const Instance& inst, const Allocation& alloc) {
    check_allocation(inst, alloc);
    Rational w;
    for (std::size_t j = 0; j < alloc.size(); ++j)
        if (alloc[j] != kNone) w += inst.value(alloc[j], j);
    return w;
}

struct Outcome {
    Allocation allocation;
    std::vector<Rational> prices;     // per impression, one per slot
    std::vector<Rational> utilities;  // one per bidder

    Rational revenue() const {
        Rational r;
        for (const auto& p : prices) r += p;
        return r;
    }
    friend bool operator==(const Outcome&, const Outcome&) = default;
};

inline std::vector<Rational> utilities_for(const Instance& inst, const Allocation& alloc,
                                          const std::vector<Rational>& prices) {
    std::vector<Rational> u(inst.n());
    for (std::size_t j = 0; j < alloc.size(); ++j)
        if (alloc[j] != kNone) u[alloc[j]] = inst.value(alloc[j], j) - prices[j];
    return u;
}

}  // namespace posauc
