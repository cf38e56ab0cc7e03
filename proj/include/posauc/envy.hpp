#pragma once

#include "posauc/equilibrium.hpp"

#include <optional>
#include <string>
#include <vector>

namespace posauc {

struct GefReport {
    bool envy_free = true;
    // (bidder, slot) where the bidder prefers that slot's bundle; slot kNone is
    // the null bundle at price 0.
    std::optional<std::pair<std::size_t, std::size_t>> violating_pair;
    std::optional<bool> necessary_condition_holds;  // two slots, three bidders, unique efficiency
};

// (a31 - a32) v3 <= (a11 - a12) v1 under the efficient labelling.
inline bool gef_necessary_condition(const Instance& inst) {
    require_two_slots(inst, "gef_necessary_condition");
    if (inst.n() != 3) throw std::invalid_argument("gef_necessary_condition: needs exactly 3 bidders");
    auto lab = efficient_labels(inst);
    if (!lab) throw std::invalid_argument("gef_necessary_condition: efficient allocation is not unique");
    std::size_t l3 = 3 - lab->first - lab->second;
    auto drop = [&](std::size_t i) { return inst.value(i, 0) - inst.value(i, 1); };
    return drop(l3) <= drop(lab->first);
}

inline GefReport is_globally_envy_free(const Instance& inst, const Allocation& alloc,
                                       const std::vector<Rational>& prices) {
    check_allocation(inst, alloc);
    if (prices.size() != inst.m()) throw std::invalid_argument("prices: wrong length");
    for (const auto& p : prices)
        if (p.sign() < 0) throw std::invalid_argument("prices: negative price");
    GefReport rep;
    auto own = slot_of(alloc, inst.n());
    for (std::size_t i = 0; i < inst.n() && rep.envy_free; ++i) {
        Rational u = own[i] == kNone ? Rational(0) : inst.value(i, own[i]) - prices[own[i]];
        if (u.sign() < 0) {
            rep.envy_free = false;
            rep.violating_pair = {i, kNone};
            break;
        }
        for (std::size_t j = 0; j < inst.m(); ++j) {
            if (alloc[j] == kNone || j == own[i]) continue;
            if (u < inst.value(i, j) - prices[j]) {
                rep.envy_free = false;
                rep.violating_pair = {i, j};
                break;
            }
        }
    }
    if (inst.m() == 2 && inst.n() == 3 && efficient_labels(inst)) rep.necessary_condition_holds = gef_necessary_condition(inst);
    return rep;
}

struct GefEqResult {
    bool ok = false;
    std::string reason;
    Labels labels;
    int case_id = 0;  // 1, 2 or 3
    BidProfile bids;
    TieBreakRule tie;
};

inline GefEqResult construct_gef_eq(const Instance& inst) {
    require_two_slots(inst, "construct_gef_eq");
    if (inst.n() != 3) throw std::invalid_argument("construct_gef_eq: needs exactly 3 bidders");
    GefEqResult r;
    auto lab = efficient_labels(inst);
    if (!lab) {
        r.reason = "efficient allocation is not unique";
        return r;
    }
    r.labels = *lab;
    if (!gef_necessary_condition(inst)) {
        r.reason = "no efficient envy-free equilibrium: third bidder's slot-1 premium exceeds the top bidder's";
        return r;
    }
    const std::size_t l1 = lab->first, l2 = lab->second, l3 = 3 - l1 - l2;
    const Rational &a21 = inst.alpha(l2, 0), &a22 = inst.alpha(l2, 1);
    const Rational &a31 = inst.alpha(l3, 0), &a32 = inst.alpha(l3, 1);
    const Rational &v2 = inst.values[l2], &v3 = inst.values[l3];
    r.bids = inst.values;
    r.tie = TieBreakRule::click_ratio({l1, l2, l3});
    if ((a31 - a32) * v3 <= (a21 - a22) * v2) {
        if (a21.is_zero()) throw std::domain_error("construct_gef_eq: slot-2 winner has zero slot-1 CTR");
        r.case_id = 1;
        r.bids[l2] = (a32 * v3 + (a21 - a22) * v2) / a21;
    } else if (a31 * v3 <= a21 * v2) {
        r.case_id = 2;
        r.bids[l2] = a31 * v3 / a21;
    } else {
        r.case_id = 3;
    }
    // Zero slot-2 scores tie and the click-ratio order may favour bidder 3.
    if ((a32 * v3).is_zero()) r.tie = TieBreakRule::by_priority({l1, l2, l3});
    r.ok = true;
    return r;
}

enum class DeVerdict { Sufficient, Violated, Indeterminate, NotApplicable };

inline const char* to_string(DeVerdict v) {
    switch (v) {
    case DeVerdict::Sufficient: return "sufficient";
    case DeVerdict::Violated: return "violated";
    case DeVerdict::Indeterminate: return "indeterminate";
    case DeVerdict::NotApplicable: return "not-applicable";
    }
    return "";
}

struct GefConstraintReport {
    // Labels taken from the simulated outcome: 1, 2 the winners, 3 and 4 the
    // best remaining slot-2 and slot-1 scores.
    std::size_t one = kNone, two = kNone, three = kNone, four = kNone;
    std::vector<NamedCondition> a, b, c;
    bool a_system = false, b_system = false, c_system = false;
    bool gef_by_systems = false;
    bool gef_by_outcome = false;

    // Three-bidder systems, efficient labels.
    std::optional<Labels> efficient;
    bool de_precondition = false;
    std::vector<NamedCondition> d, e;
    DeVerdict de_verdict = DeVerdict::NotApplicable;
};

namespace detail {

inline bool all_hold(const std::vector<NamedCondition>& v, bool weak = false) {
    return std::all_of(v.begin(), v.end(), [&](const NamedCondition& c) { return c.holds || (weak && c.tight); });
}

inline NamedCondition ge(std::string n, const Rational& l, const Rational& r) { return {std::move(n), r <= l, l == r}; }
inline NamedCondition gt(std::string n, const Rational& l, const Rational& r) { return {std::move(n), r < l, l == r}; }
inline NamedCondition eq(std::string n, const Rational& l, const Rational& r) { return {std::move(n), l == r, l == r}; }
inline NamedCondition both(std::string n, const NamedCondition& x, const NamedCondition& y) {
    return {std::move(n), x.holds && y.holds, x.tight || y.tight};
}

}  // namespace detail

// Envy conditions in multiplied form, so zero CTRs need no division.
inline GefConstraintReport check_gef_characterization(const Instance& inst, const BidProfile& bids,
                                                      const TieBreakRule& tie = {}) {
    using detail::ge, detail::gt, detail::eq, detail::both;
    require_two_slots(inst, "check_gef_characterization");
    if (inst.n() < 3) throw std::invalid_argument("check_gef_characterization: needs at least 3 bidders");
    auto out = run_iterated_spa(inst, bids, best_to_worst(2), tie);
    GefConstraintReport rep;
    const std::size_t l1 = rep.one = out.allocation[0], l2 = rep.two = out.allocation[1];
    const std::size_t l3 = rep.three = argmax_excluding(inst, 1, {l1, l2}, &bids);
    const std::size_t l4 = rep.four = argmax_excluding(inst, 0, {l1, l2}, &bids);
    auto s = [&](std::size_t i, std::size_t k) { return inst.alpha(i, k) * bids[i]; };
    auto drop = [&](std::size_t i) { return inst.value(i, 0) - inst.value(i, 1); };
    Rational un1 = inst.value(argmax_excluding(inst, 0, {l1, l2}), 0);
    Rational un2 = inst.value(argmax_excluding(inst, 1, {l1, l2}), 1);
    const Rational &v11 = inst.value(l1, 0), &v22 = inst.value(l2, 1);

    rep.a = {
        ge("A-GEF0", s(l2, 0), s(l4, 0)),
        ge("A-GEF1", s(l3, 1) + drop(l1), s(l2, 0)),
        ge("A-GEF2", v11, s(l2, 0)),
        ge("A-GEF3", s(l2, 0), s(l3, 1) + drop(l2)),
        ge("A-GEF4", v22, s(l3, 1)),
        ge("A-GEF5", s(l2, 0), un1),
        ge("A-GEF6", s(l3, 1), un2),
    };
    const Rational d3 = inst.alpha(l3, 0) - inst.alpha(l3, 1);
    rep.b = {
        both("B-GEF0", ge("", s(l3, 0), s(l2, 0)), eq("", s(l3, 0), s(l4, 0))),
        ge("B-GEF1", inst.alpha(l1, 0) * inst.values[l1] - inst.alpha(l1, 1) * inst.values[l1], d3 * bids[l3]),
        ge("B-GEF2", v11, s(l3, 0)),
        ge("B-GEF3", d3 * bids[l3], drop(l2)),
        ge("B-GEF4", v22, s(l3, 1)),
        ge("B-GEF5", s(l3, 0), un1),
        ge("B-GEF6", s(l3, 1), un2),
    };
    rep.c = {
        both("C-GEF0", ge("", s(l4, 0), s(l2, 0)), gt("", s(l4, 0), s(l3, 0))),
        ge("C-GEF1", s(l3, 1) + drop(l1), s(l4, 0)),
        ge("C-GEF2", v11, s(l4, 0)),
        ge("C-GEF3", s(l4, 0), s(l3, 1) + drop(l2)),
        ge("C-GEF4", v22, s(l3, 1)),
        ge("C-GEF5", s(l4, 0), un1),
        ge("C-GEF6", s(l3, 1), un2),
    };
    rep.a_system = detail::all_hold(rep.a);
    rep.b_system = detail::all_hold(rep.b);
    rep.c_system = detail::all_hold(rep.c);
    rep.gef_by_systems = rep.a_system || rep.b_system || rep.c_system;
    rep.gef_by_outcome = is_globally_envy_free(inst, out.allocation, out.prices).envy_free;

    if (inst.n() != 3) return rep;
    rep.efficient = efficient_labels(inst);
    if (!rep.efficient) return rep;
    const std::size_t e1 = rep.efficient->first, e2 = rep.efficient->second, e3 = 3 - e1 - e2;
    const Rational &a11 = inst.alpha(e1, 0), &a12 = inst.alpha(e1, 1);
    const Rational &a21 = inst.alpha(e2, 0), &a22 = inst.alpha(e2, 1);
    const Rational &a31 = inst.alpha(e3, 0), &a32 = inst.alpha(e3, 1);
    const Rational &v1 = inst.values[e1], &v2 = inst.values[e2], &v3 = inst.values[e3];
    const Rational &b1 = bids[e1], &b2 = bids[e2], &b3 = bids[e3];
    rep.de_precondition = a21 * b2 <= a11 * b1 && a31 * b3 <= a11 * b1;
    rep.d = {
        ge("D0", a21 * b2, a31 * b3),
        ge("D1", a32 * b3 + (a11 - a12) * v1, a21 * b2),
        gt("D2", a11 * v1, a21 * b2),
        ge("D3", a21 * b2, a32 * b3 + (a21 - a22) * v2),
        ge("D4", a22 * v2, a32 * b3),
        ge("D5", b3, v3),
        gt("D6", a22 * b2, a32 * b3),
        ge("D7", a11 * v1 - (a21 - a22) * v2, a32 * b3),
    };
    rep.e = {
        ge("E0", a31 * b3, a21 * b2),
        ge("E1", (a11 - a12) * v1, (a31 - a32) * b3),
        ge("E2", (a31 - a32) * b3, (a21 - a22) * v2),
        ge("E3", a22 * v2, a32 * b3),
        ge("E4", b3, v3),
        gt("E5", a11 * v1, a31 * b3),
        gt("E6", a22 * b2, a32 * b3),
        ge("E7", a22 * b2 + (a11 - a12) * v1, a31 * b3),
        ge("E8", a11 * v1 - (a21 - a22) * v2, a32 * b3),
    };
    if (!rep.de_precondition) rep.de_verdict = DeVerdict::NotApplicable;
    else if (detail::all_hold(rep.d) || detail::all_hold(rep.e)) rep.de_verdict = DeVerdict::Sufficient;
    else if (!detail::all_hold(rep.d, true) && !detail::all_hold(rep.e, true)) rep.de_verdict = DeVerdict::Violated;
    else rep.de_verdict = DeVerdict::Indeterminate;
    return rep;
}

struct DeFeasibility {
    Labels labels;
    bool d_feasible = false, e_feasible = false;
    std::vector<Rational> d_witness, e_witness;  // bids in label order (1, 2, 3)
};

// Fourier-Motzkin over the weak forms of both three-bidder systems, with
// nonnegative bids and the slot-1 dominance precondition.
inline DeFeasibility de_systems_feasible(const Instance& inst) {
    require_two_slots(inst, "de_systems_feasible");
    if (inst.n() != 3) throw std::invalid_argument("de_systems_feasible: needs exactly 3 bidders");
    auto lab = efficient_labels(inst);
    if (!lab) throw std::invalid_argument("de_systems_feasible: efficient allocation is not unique");
    const std::size_t e1 = lab->first, e2 = lab->second, e3 = 3 - e1 - e2;
    const Rational &a11 = inst.alpha(e1, 0), &a12 = inst.alpha(e1, 1);
    const Rational &a21 = inst.alpha(e2, 0), &a22 = inst.alpha(e2, 1);
    const Rational &a31 = inst.alpha(e3, 0), &a32 = inst.alpha(e3, 1);
    const Rational &v1 = inst.values[e1], &v2 = inst.values[e2], &v3 = inst.values[e3];
    using T = std::vector<std::pair<std::size_t, Rational>>;
    ConstraintSystem common(3);
    for (std::size_t k = 0; k < 3; ++k) common.add_terms({{k, 1}}, Rel::Ge, 0);
    common.add_terms(T{{0, a11}, {1, -a21}}, Rel::Ge, 0);
    common.add_terms(T{{0, a11}, {2, -a31}}, Rel::Ge, 0);

    ConstraintSystem d = common;
    d.add_terms(T{{1, a21}, {2, -a31}}, Rel::Ge, 0, "D0");
    d.add_terms(T{{1, a21}, {2, -a32}}, Rel::Le, (a11 - a12) * v1, "D1");
    d.add_terms(T{{1, a21}}, Rel::Le, a11 * v1, "D2");
    d.add_terms(T{{1, a21}, {2, -a32}}, Rel::Ge, (a21 - a22) * v2, "D3");
    d.add_terms(T{{2, a32}}, Rel::Le, a22 * v2, "D4");
    d.add_terms(T{{2, 1}}, Rel::Ge, v3, "D5");
    d.add_terms(T{{1, a22}, {2, -a32}}, Rel::Ge, 0, "D6");
    d.add_terms(T{{2, a32}}, Rel::Le, a11 * v1 - (a21 - a22) * v2, "D7");

    ConstraintSystem e = common;
    e.add_terms(T{{1, a21}, {2, -a31}}, Rel::Le, 0, "E0");
    e.add_terms(T{{2, a31 - a32}}, Rel::Le, (a11 - a12) * v1, "E1");
    e.add_terms(T{{2, a31 - a32}}, Rel::Ge, (a21 - a22) * v2, "E2");
    e.add_terms(T{{2, a32}}, Rel::Le, a22 * v2, "E3");
    e.add_terms(T{{2, 1}}, Rel::Ge, v3, "E4");
    e.add_terms(T{{2, a31}}, Rel::Le, a11 * v1, "E5");
    e.add_terms(T{{1, a22}, {2, -a32}}, Rel::Ge, 0, "E6");
    e.add_terms(T{{1, -a22}, {2, a31}}, Rel::Le, (a11 - a12) * v1, "E7");
    e.add_terms(T{{2, a32}}, Rel::Le, a11 * v1 - (a21 - a22) * v2, "E8");

    DeFeasibility r;
    r.labels = *lab;
    auto fd = fm_decide(d), fe = fm_decide(e);
    r.d_feasible = fd.feasible;
    r.e_feasible = fe.feasible;
    r.d_witness = fd.witness;
    r.e_witness = fe.witness;
    return r;
}

struct Gef2Result {
    bool condition = false;
    Labels labels;
    BidProfile bids;  // empty unless condition holds
    TieBreakRule tie;
};

// a21 / a22 >= ai1 / ai2 for every other bidder, compared by cross-multiplication.
inline Gef2Result gef2_sufficient(const Instance& inst) {
    require_two_slots(inst, "gef2_sufficient");
    auto lab = efficient_labels(inst);
    if (!lab) throw std::invalid_argument("gef2_sufficient: efficient allocation is not unique");
    Gef2Result r;
    r.labels = *lab;
    const std::size_t l2 = lab->second;
    r.condition = true;
    for (std::size_t i = 0; i < inst.n(); ++i) {
        if (i == lab->first || i == l2) continue;
        if (inst.alpha(l2, 0) * inst.alpha(i, 1) < inst.alpha(i, 0) * inst.alpha(l2, 1)) r.condition = false;
    }
    if (!r.condition) return r;
    if (inst.n() == 2) {
        // Bidder 2 must price slot 1 at its own indifference point; the
        // two-bidder equilibrium bid of 0 leaves it envious.
        const Rational &a21 = inst.alpha(l2, 0), &a22 = inst.alpha(l2, 1);
        if (a21.is_zero()) throw std::domain_error("gef2_sufficient: slot-2 winner has zero slot-1 CTR");
        r.bids = inst.values;
        r.bids[l2] = (a21 - a22) * inst.values[l2] / a21;
        r.tie = TieBreakRule::by_priority({lab->first, l2});
        return r;
    }
    auto eq = construct_efficient_eq(inst, *lab);
    if (eq.case_label == 'B') throw std::logic_error("gef2_sufficient: constructor chose case B under the ratio condition");
    r.bids = eq.bids;
    r.tie = eq.tie;
    return r;
}

struct SupportResult {
    bool supported = false;
    std::string reason;  // set when the VCG allocation is not unique
    Outcome vcg;
    BidProfile witness;
    TieBreakRule tie;
    std::size_t systems_checked = 0;
};

// Decides whether scalar bids make the iterated auction under `order`
// reproduce the VCG allocation and prices. Ranking winners in sale order
// ahead of losers makes every winner constraint weak, which no other priority
// order can improve on; price setters are enumerated per slot.
inline SupportResult vcg_supported(const Instance& inst, const OrderOfSale& order, bool allow_overbid) {
    check_permutation(order, inst.m(), "order of sale");
    const std::size_t n = inst.n(), m = inst.m();
    SupportResult r;
    auto eff = efficient_allocations(inst);
    if (!eff.unique()) {
        r.reason = "VCG allocation is not unique";
        return r;
    }
    r.vcg = vcg_result(inst);
    const auto& alloc = r.vcg.allocation;
    const auto& p = r.vcg.prices;

    std::vector<std::size_t> prio;
    for (std::size_t j : order) prio.push_back(alloc[j]);
    for (std::size_t i = 0; i < n; ++i)
        if (std::find(prio.begin(), prio.end(), i) == prio.end()) prio.push_back(i);
    r.tie = TieBreakRule::by_priority(prio);

    ConstraintSystem base(n);
    for (std::size_t i = 0; i < n; ++i) {
        base.add_terms({{i, 1}}, Rel::Ge, 0);
        if (!allow_overbid) base.add_terms({{i, 1}}, Rel::Le, inst.values[i]);
    }
    // Per slot in sale order: remaining competitors and the winner.
    std::vector<std::vector<std::size_t>> rivals(m);
    {
        std::vector<bool> gone(n, false);
        for (std::size_t j : order) {
            std::size_t w = alloc[j];
            for (std::size_t i = 0; i < n; ++i) {
                if (gone[i] || i == w) continue;
                rivals[j].push_back(i);
                base.add_terms({{w, inst.alpha(w, j)}, {i, -inst.alpha(i, j)}}, Rel::Ge, 0);
                base.add_terms({{i, inst.alpha(i, j)}}, Rel::Le, p[j]);
            }
            gone[w] = true;
        }
    }
    std::vector<std::vector<Rational>> pref(n);
    for (std::size_t i = 0; i < n; ++i) pref[i] = {inst.values[i], Rational(0)};

    auto rec = [&](auto&& self, std::size_t t, const ConstraintSystem& sys) -> bool {
        ++r.systems_checked;
        auto res = fm_decide(sys, pref);
        if (!res.feasible) return false;
        if (t == m) {
            auto out = run_iterated_spa(inst, res.witness, order, r.tie);
            if (out.allocation != alloc || out.prices != p)
                throw std::logic_error("vcg_supported: witness failed re-simulation");
            r.witness = res.witness;
            return true;
        }
        std::size_t j = order[t];
        if (p[j].is_zero()) return self(self, t + 1, sys);  // rivals already pinned at or below 0
        for (std::size_t s : rivals[j]) {
            if (inst.alpha(s, j).is_zero()) continue;
            ConstraintSystem next = sys;
            next.add_terms({{s, inst.alpha(s, j)}}, Rel::Eq, p[j]);
            if (self(self, t + 1, next)) return true;
        }
        return false;
    };
    r.supported = rec(rec, 0, base);
    return r;
}

struct BadValueParams {
    Rational v3, epsilon, delta, lambda1, lambda2, gamma1, gamma2;
};

struct BadValues {
    std::vector<Rational> values;
    BadValueParams params;
};

// Values for which the VCG result cannot be reproduced by the two-slot
// auction. Rows must be strictly decreasing and ordered by click ratio
// r1 <= r2 < r3.
inline BadValues generate_bad_values(const Matrix& ctr, const Rational& v3) {
    if (ctr.size() != 3) throw std::invalid_argument("generate_bad_values: needs 3 CTR rows");
    for (const auto& row : ctr) {
        if (row.size() != 2) throw std::invalid_argument("generate_bad_values: needs 2 CTR columns");
        if (!(Rational(0) < row[1] && row[1] < row[0]))
            throw std::invalid_argument("generate_bad_values: CTR rows must be positive and strictly decreasing");
    }
    if (!(Rational(0) < v3)) throw std::invalid_argument("generate_bad_values: v3 must be positive");
    auto a = [&](std::size_t i, std::size_t j) -> const Rational& { return ctr[i - 1][j - 1]; };
    Rational r1 = a(1, 1) / a(1, 2), r2 = a(2, 1) / a(2, 2), r3 = a(3, 1) / a(3, 2);
    if (!(r1 <= r2 && r2 < r3))
        throw std::invalid_argument("generate_bad_values: click ratios must satisfy r1 <= r2 < r3");

    BadValueParams P;
    P.v3 = v3;
    P.epsilon = r2 - r1;
    P.delta = r3 - r2;
    const Rational d1 = a(1, 1) - a(1, 2), d2 = a(2, 1) - a(2, 2), d3 = a(3, 1) - a(3, 2);
    P.lambda1 = (d3 / d1 - a(3, 1) / a(1, 1)) * v3;
    P.lambda2 = (d3 / d2 - a(3, 2) / a(2, 2)) * v3;
    Rational g1 = P.lambda1 / Rational(2), g2 = P.lambda2 / Rational(2);
    auto first = [&] { return (d1 * g1 + d2 * g2) / (a(3, 2) * v3) < P.delta; };
    auto second = [&] { return d1 / a(2, 2) * g1 < g2; };
    auto third = [&] {
        return d1 / (a(1, 1) * v3) * (a(1, 1) / a(3, 2) * g1 + d2 / a(3, 2) * g2) <
               P.delta + a(1, 2) / a(1, 1) * P.epsilon;
    };
    for (int iter = 0;; ++iter) {
        if (iter > 4096) throw std::logic_error("generate_bad_values: gamma search did not converge");
        if (!second()) g1 /= Rational(2);
        else if (!first() || !third()) g1 /= Rational(2), g2 /= Rational(2);
        else break;
    }
    P.gamma1 = g1;
    P.gamma2 = g2;
    BadValues out;
    out.values = {d3 / d1 * v3 - g1, a(3, 2) / a(2, 2) * v3 + g2, v3};
    out.params = P;
    return out;
}

}  // namespace posauc
