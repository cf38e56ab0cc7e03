#pragma once

#include "posauc/core.hpp"
#include "posauc/instance.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace posauc {

using BidProfile = std::vector<Rational>;
using OrderOfSale = std::vector<std::size_t>;  // slot indices in sale order
using ExpressiveBids = Matrix;                 // n x m, per impression

struct TieBreakRule {
    enum class Kind { Priority, HighestClickRatio, RevenueMax };
    Kind kind = Kind::Priority;
    std::vector<std::size_t> priority;  // earlier wins; empty means index order

    static TieBreakRule by_priority(std::vector<std::size_t> p) { return {Kind::Priority, std::move(p)}; }
    static TieBreakRule click_ratio(std::vector<std::size_t> fallback = {}) {
        return {Kind::HighestClickRatio, std::move(fallback)};
    }
    static TieBreakRule revenue_max() { return {Kind::RevenueMax, {}}; }

    friend bool operator==(const TieBreakRule&, const TieBreakRule&) = default;
};

inline OrderOfSale best_to_worst(std::size_t m) {
    OrderOfSale o(m);
    std::iota(o.begin(), o.end(), std::size_t{0});
    return o;
}

inline void check_permutation(const std::vector<std::size_t>& p, std::size_t size, const char* what) {
    if (p.size() != size)
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(size) + " entries");
    std::vector<bool> seen(size, false);
    for (auto x : p) {
        if (x >= size || seen[x]) throw std::invalid_argument(std::string(what) + ": not a permutation");
        seen[x] = true;
    }
}

// Strict rank per bidder (smaller wins a tie) realising the rule. The
// click-ratio rule is a fixed order: larger alpha_1/alpha_2 first, then the
// fallback priority.
inline std::vector<std::size_t> tie_ranks(const Instance& inst, const TieBreakRule& tie) {
    const std::size_t n = inst.n();
    std::vector<std::size_t> prio = tie.priority;
    if (prio.empty()) prio = best_to_worst(n);
    check_permutation(prio, n, "tie rule priority");
    std::vector<std::size_t> pos(n);
    for (std::size_t k = 0; k < n; ++k) pos[prio[k]] = k;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    switch (tie.kind) {
    case TieBreakRule::Kind::Priority:
        order = prio;
        break;
    case TieBreakRule::Kind::HighestClickRatio: {
        if (inst.m() != 2) throw std::invalid_argument("click-ratio tie rule needs exactly 2 slots");
        auto degenerate = [&](std::size_t i) { return inst.alpha(i, 0).is_zero(); };
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            bool da = degenerate(a), db = degenerate(b);
            if (da != db) return db;
            if (!da) {
                Rational l = inst.alpha(a, 0) * inst.alpha(b, 1), r = inst.alpha(b, 0) * inst.alpha(a, 1);
                if (l != r) return r < l;
            }
            return pos[a] < pos[b];
        });
        break;
    }
    case TieBreakRule::Kind::RevenueMax:
        throw std::invalid_argument("revenue-max tie rule applies to the expressive auction only");
    }
    std::vector<std::size_t> rank(n);
    for (std::size_t k = 0; k < n; ++k) rank[order[k]] = k;
    return rank;
}

namespace detail {

// Iterated second-price core over an abstract score(i, j). Writes the winner
// and the per-impression price of each slot.
template <class T, class Score>
void spa_core(std::size_t n, const OrderOfSale& order, const std::vector<std::size_t>& rank, Score&& score,
              std::size_t* winner, T* price) {
    std::uint64_t removed = 0;
    for (std::size_t j : order) {
        std::size_t best = kNone;
        T best_s{}, second{};
        bool have_second = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (removed >> i & 1) continue;
            T s = score(i, j);
            if (best == kNone) {
                best = i;
                best_s = s;
            } else if (best_s < s || (s == best_s && rank[i] < rank[best])) {
                second = best_s;
                have_second = true;
                best = i;
                best_s = s;
            } else if (!have_second || second < s) {
                second = s;
                have_second = true;
            }
        }
        winner[j] = best;
        price[j] = have_second ? second : T{};
        if (best != kNone) removed |= std::uint64_t{1} << best;
    }
}

}  // namespace detail

inline void check_bids(const Instance& inst, const BidProfile& bids) {
    if (bids.size() != inst.n())
        throw std::invalid_argument("bids: expected " + std::to_string(inst.n()) + " entries, got " +
                                    std::to_string(bids.size()));
    for (const auto& b : bids)
        if (b.sign() < 0) throw std::invalid_argument("bids: negative bid");
}

inline Outcome run_iterated_spa(const Instance& inst, const BidProfile& bids, const OrderOfSale& order,
                                const TieBreakRule& tie) {
    check_bids(inst, bids);
    check_permutation(order, inst.m(), "order of sale");
    if (inst.n() > 64) throw std::invalid_argument("run_iterated_spa: at most 64 bidders");
    auto rank = tie_ranks(inst, tie);
    Outcome o;
    o.allocation.assign(inst.m(), kNone);
    o.prices.assign(inst.m(), Rational(0));
    detail::spa_core<Rational>(
        inst.n(), order, rank, [&](std::size_t i, std::size_t j) { return inst.alpha(i, j) * bids[i]; },
        o.allocation.data(), o.prices.data());
    o.utilities = utilities_for(inst, o.allocation, o.prices);
    return o;
}

// Lexicographically smallest welfare-maximising allocation with Clarke payments.
inline Outcome run_vcg(const Instance& inst, const BidProfile& bids) {
    check_bids(inst, bids);
    Matrix w = slot_value_matrix(inst, bids);
    auto sol = max_weight_assignment(w);
    auto all = all_optimal_assignments(w, sol);
    Outcome o;
    o.allocation = all.front();
    o.prices.assign(inst.m(), Rational(0));
    for (std::size_t j = 0; j < inst.m(); ++j) {
        std::size_t i = o.allocation[j];
        BidProfile without = bids;
        without[i] = 0;
        Rational others_best = max_weight_assignment(slot_value_matrix(inst, without)).value;
        o.prices[j] = others_best - (sol.value - w[j][i]);
    }
    o.utilities = utilities_for(inst, o.allocation, o.prices);
    return o;
}

inline Outcome vcg_result(const Instance& inst) { return run_vcg(inst, inst.values); }

struct ExpressiveOutcome {
    Outcome outcome;
    OrderOfSale order;
};

struct ExpressiveOptions {
    bool unsold_rule = true;  // a slot needs two nonzero bids to sell; otherwise one
    std::size_t max_bidders = 8;
};

namespace detail {

template <class T>
struct ExpressiveSearch {
    std::size_t n, m;
    const std::vector<std::vector<T>>& b;
    bool unsold_rule;
    struct Memo {
        bool done = false;
        T revenue{};
        std::size_t slot = kNone, winner = kNone;
    };
    std::vector<Memo> memo;

    ExpressiveSearch(std::size_t n_, std::size_t m_, const std::vector<std::vector<T>>& b_, bool rule)
        : n(n_), m(m_), b(b_), unsold_rule(rule), memo(std::size_t{1} << (n_ + m_)) {}

    // Bidders and slots still available are encoded as bitmasks.
    const Memo& solve(std::uint32_t bidders, std::uint32_t slots) {
        Memo& e = memo[(std::size_t{bidders} << m) | slots];
        if (e.done) return e;
        Memo best;
        bool have = false;
        for (std::size_t j = 0; j < m; ++j) {
            if (!(slots >> j & 1)) continue;
            std::uint32_t rest = slots & ~(std::uint32_t{1} << j);
            std::size_t nonzero = 0;
            T top{}, second{};
            bool have_top = false, have_second = false;
            for (std::size_t i = 0; i < n; ++i) {
                if (!(bidders >> i & 1)) continue;
                const T& x = b[i][j];
                if (x != T{}) ++nonzero;
                if (!have_top || top < x) {
                    if (have_top) second = top, have_second = true;
                    top = x;
                    have_top = true;
                } else if (!have_second || second < x) {
                    second = x;
                    have_second = true;
                }
            }
            bool sold = nonzero >= (unsold_rule ? 2u : 1u);
            if (!sold) {
                T r = solve(bidders, rest).revenue;
                if (!have || best.revenue < r) best = {true, r, j, kNone}, have = true;
                continue;
            }
            T price = have_second ? second : T{};
            for (std::size_t i = 0; i < n; ++i) {
                if (!(bidders >> i & 1) || b[i][j] != top) continue;
                T r = price + solve(bidders & ~(std::uint32_t{1} << i), rest).revenue;
                if (!have || best.revenue < r) best = {true, r, j, i}, have = true;
            }
        }
        best.done = true;
        e = best;
        return e;
    }
};

}  // namespace detail

// Exhaustive revenue-maximising choice of order and tie resolution. Among
// revenue ties the lexicographically smallest sequence of (slot, winner)
// decisions is kept.
inline ExpressiveOutcome run_expressive_auction(const Instance& inst, const ExpressiveBids& bids,
                                                const ExpressiveOptions& opt = {}) {
    const std::size_t n = inst.n(), m = inst.m();
    if (n > opt.max_bidders)
        throw std::length_error("run_expressive_auction: " + std::to_string(n) +
                                " bidders exceeds exhaustive-search capacity " + std::to_string(opt.max_bidders));
    if (bids.size() != n) throw std::invalid_argument("expressive bids: wrong row count");
    for (const auto& row : bids) {
        if (row.size() != m) throw std::invalid_argument("expressive bids: wrong column count");
        for (const auto& x : row)
            if (x.sign() < 0) throw std::invalid_argument("expressive bids: negative bid");
    }

    // Scale to integers when they fit; otherwise search over rationals.
    mpz_class lcm = 1, total = 0;
    for (const auto& row : bids)
        for (const auto& x : row) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.den().get_mpz_t());
    for (const auto& row : bids)
        for (const auto& x : row) total += x.num() * (lcm / x.den());
    const bool use_int = lcm.fits_slong_p() && total < (mpz_class(1) << 60);

    ExpressiveOutcome res;
    res.outcome.allocation.assign(m, kNone);
    res.outcome.prices.assign(m, Rational(0));
    auto replay = [&](auto& search, auto to_rational) {
        std::uint32_t bm = (std::uint32_t{1} << n) - 1, sm = (std::uint32_t{1} << m) - 1;
        while (sm) {
            const auto& e = search.solve(bm, sm);
            res.order.push_back(e.slot);
            if (e.winner != kNone) {
                auto next = search.solve(bm & ~(std::uint32_t{1} << e.winner), sm & ~(std::uint32_t{1} << e.slot));
                res.outcome.allocation[e.slot] = e.winner;
                res.outcome.prices[e.slot] = to_rational(e.revenue - next.revenue);
                bm &= ~(std::uint32_t{1} << e.winner);
            }
            sm &= ~(std::uint32_t{1} << e.slot);
        }
    };
    if (use_int) {
        std::vector<std::vector<std::int64_t>> s(n, std::vector<std::int64_t>(m));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j) s[i][j] = mpz_class(bids[i][j].num() * (lcm / bids[i][j].den())).get_si();
        detail::ExpressiveSearch<std::int64_t> search(n, m, s, opt.unsold_rule);
        Rational scale{mpq_class(lcm)};
        replay(search, [&](std::int64_t v) { return Rational(static_cast<long>(v)) / scale; });
    } else {
        detail::ExpressiveSearch<Rational> search(n, m, bids, opt.unsold_rule);
        replay(search, [](const Rational& v) { return v; });
    }
    res.outcome.utilities = utilities_for(inst, res.outcome.allocation, res.outcome.prices);
    return res;
}

}  // namespace posauc
