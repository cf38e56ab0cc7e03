#pragma once

#include "posauc/assignment.hpp"
#include "posauc/instance.hpp"

#include <optional>
#include <vector>

namespace posauc {

// Rows are slots, columns bidders: w[j][i] = alpha_{i,j} * b_i.
inline Matrix slot_value_matrix(const Instance& inst, const std::vector<Rational>& bids) {
    Matrix w(inst.m(), std::vector<Rational>(inst.n()));
    for (std::size_t j = 0; j < inst.m(); ++j)
        for (std::size_t i = 0; i < inst.n(); ++i) w[j][i] = inst.alpha(i, j) * bids[i];
    return w;
}

struct EfficientSet {
    std::vector<Allocation> allocations;  // lexicographic order
    Rational welfare;
    bool unique() const { return allocations.size() == 1; }
};

inline EfficientSet efficient_allocations(const Instance& inst) {
    Matrix w = slot_value_matrix(inst, inst.values);
    auto sol = max_weight_assignment(w);
    return {all_optimal_assignments(w, sol), sol.value};
}

inline EfficientSet efficient_allocations_exhaustive(const Instance& inst) {
    EfficientSet e;
    e.allocations = all_optimal_assignments_exhaustive(slot_value_matrix(inst, inst.values), &e.welfare);
    return e;
}

struct SeparabilityDecomposition {
    std::vector<Rational> slot_effects;  // mu_j, mu_1 = 1
    std::vector<Rational> ad_effects;    // beta_i
};

// alpha_{i,j} = mu_j * beta_i with mu_1 = 1, if the rows are proportional.
inline std::optional<SeparabilityDecomposition> separable_decomposition(const Instance& inst) {
    if (inst.has_zero_ctr())
        throw std::invalid_argument("separable_decomposition: zero CTR entry; decomposition needs positive CTRs");
    if (inst.n() == 0 || inst.m() == 0) return SeparabilityDecomposition{};
    SeparabilityDecomposition d;
    const auto& top = inst.ctr[0];
    for (std::size_t j = 0; j < inst.m(); ++j) d.slot_effects.push_back(top[j] / top[0]);
    for (std::size_t i = 0; i < inst.n(); ++i) {
        d.ad_effects.push_back(inst.alpha(i, 0));
        for (std::size_t j = 1; j < inst.m(); ++j)
            if (inst.alpha(i, j) != d.slot_effects[j] * d.ad_effects[i]) return std::nullopt;
    }
    return d;
}

}  // namespace posauc
