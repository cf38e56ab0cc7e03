#pragma once

#include "posauc/core.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace posauc::rnd {

using Rng = std::mt19937_64;

inline long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

// k / den with k uniform in [lo*den, hi*den].
inline Rational grid_rational(Rng& rng, long den, long lo, long hi) {
    return Rational(uniform(rng, lo * den, hi * den), den);
}

// Denominators drawn from a small set so ties and equalities still occur.
inline Rational random_rational(Rng& rng, long lo, long hi) {
    static const long dens[] = {1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 16, 30};
    return grid_rational(rng, dens[uniform(rng, 0, std::size(dens) - 1)], lo, hi);
}

// Weakly decreasing row in (0, 1].
inline std::vector<Rational> random_ctr_row(Rng& rng, std::size_t m, bool allow_zero = false) {
    std::vector<Rational> row(m);
    for (auto& a : row) {
        a = grid_rational(rng, uniform(rng, 2, 20), allow_zero ? 0 : 0, 1);
        if (!allow_zero && a.is_zero()) a = Rational(1, 20);
    }
    std::sort(row.begin(), row.end(), std::greater<>());
    return row;
}

inline Instance random_instance(Rng& rng, std::size_t n, std::size_t m, bool allow_zero_ctr = false) {
    Instance inst;
    for (std::size_t i = 0; i < n; ++i) {
        inst.values.push_back(random_rational(rng, 0, 10));
        inst.ctr.push_back(random_ctr_row(rng, m, allow_zero_ctr));
    }
    inst.strict_positive_ctr = !allow_zero_ctr;
    inst.validate();
    return inst;
}

// alpha_{i,j} = mu_j * beta_i with mu_1 = 1.
inline Instance random_separable(Rng& rng, std::size_t n, std::size_t m) {
    std::vector<Rational> mu = random_ctr_row(rng, m);
    for (std::size_t j = 1; j < m; ++j) mu[j] /= mu[0];
    if (m) mu[0] = 1;
    Instance inst;
    inst.strict_positive_ctr = true;
    for (std::size_t i = 0; i < n; ++i) {
        Rational beta = grid_rational(rng, 20, 0, 1);
        if (beta.is_zero()) beta = Rational(1, 20);
        inst.values.push_back(random_rational(rng, 0, 10));
        std::vector<Rational> row;
        for (std::size_t j = 0; j < m; ++j) row.push_back(mu[j] * beta);
        inst.ctr.push_back(std::move(row));
    }
    inst.validate();
    return inst;
}

inline Instance random_unique_efficient(Rng& rng, std::size_t n, std::size_t m) {
    for (;;) {
        Instance inst = random_instance(rng, n, m);
        if (efficient_allocations(inst).unique()) return inst;
    }
}

// Three strictly decreasing positive rows ordered so that r1 <= r2 < r3 for
// the click ratios r_i = alpha_{i,1} / alpha_{i,2}.
inline Matrix random_ratio_ordered_ctr(Rng& rng) {
    for (;;) {
        Matrix a;
        for (int i = 0; i < 3; ++i) {
            Rational hi = grid_rational(rng, 20, 0, 1), lo = grid_rational(rng, 20, 0, 1);
            if (hi < lo) std::swap(hi, lo);
            if (lo.is_zero() || hi == lo) break;
            a.push_back({hi, lo});
        }
        if (a.size() != 3) continue;
        std::sort(a.begin(), a.end(), [](const auto& x, const auto& y) { return x[0] * y[1] < y[0] * x[1]; });
        if (a[1][0] * a[2][1] < a[2][0] * a[1][1]) return a;
    }
}

// Small integer values and CTRs in {1, 1/2}, so bid lattices hit every breakpoint.
inline Instance random_coarse(Rng& rng, std::size_t n) {
    Instance inst;
    for (std::size_t i = 0; i < n; ++i) {
        inst.values.push_back(Rational(uniform(rng, 0, 4)));
        Rational a1 = uniform(rng, 0, 1) ? Rational(1) : Rational(1, 2);
        Rational a2 = (a1 == Rational(1) && uniform(rng, 0, 1)) ? Rational(1) : Rational(1, 2);
        inst.ctr.push_back({a1, a2});
    }
    inst.validate();
    return inst;
}

}  // namespace posauc::rnd
