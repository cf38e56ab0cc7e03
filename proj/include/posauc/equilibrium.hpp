#pragma once

#include "posauc/core.hpp"
#include "posauc/fourier_motzkin.hpp"
#include "posauc/mechanisms.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace posauc {

// Winners of slot 1 and slot 2 in a two-slot instance.
struct Labels {
    std::size_t first = kNone, second = kNone;
    friend bool operator==(const Labels&, const Labels&) = default;
};

struct DeviationOption {
    std::size_t slot;  // kNone for no slot
    Rational bid;      // smallest candidate bid reaching this outcome
    Rational price;
    Rational utility;
};

struct BestResponseReport {
    std::size_t bidder;
    Rational current_utility;
    std::vector<DeviationOption> attainable;
    Rational best_utility;
    Rational witness_bid;
};

namespace detail {

inline std::vector<Rational> deviation_candidates(const Instance& inst, const BidProfile& bids, std::size_t bidder,
                                                  bool allow_overbid) {
    std::set<Rational> pts{Rational(0), inst.values[bidder]};
    for (std::size_t k = 0; k < inst.m(); ++k) {
        const Rational& own = inst.alpha(bidder, k);
        if (own.is_zero()) continue;
        for (std::size_t j = 0; j < inst.n(); ++j)
            if (j != bidder) pts.insert(inst.alpha(j, k) * bids[j] / own);
    }
    std::vector<Rational> bp(pts.begin(), pts.end());
    std::vector<Rational> out = bp;
    for (std::size_t t = 0; t + 1 < bp.size(); ++t) out.push_back((bp[t] + bp[t + 1]) / Rational(2));
    out.push_back(bp.back() + Rational(1));
    if (!allow_overbid)
        std::erase_if(out, [&](const Rational& x) { return inst.values[bidder] < x; });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

// Exact best response: the outcome is constant strictly between consecutive
// breakpoints, so breakpoints, midpoints and one point beyond suffice.
inline BestResponseReport best_response(const Instance& inst, const BidProfile& bids, std::size_t bidder,
                                        const OrderOfSale& order, const TieBreakRule& tie, bool allow_overbid) {
    check_bids(inst, bids);
    check_permutation(order, inst.m(), "order of sale");
    auto rank = tie_ranks(inst, tie);
    const std::size_t n = inst.n(), m = inst.m();
    std::vector<std::size_t> winner(m);
    std::vector<Rational> price(m);
    auto run = [&](const Rational& own) {
        detail::spa_core<Rational>(
            n, order, rank,
            [&](std::size_t i, std::size_t j) { return inst.alpha(i, j) * (i == bidder ? own : bids[i]); },
            winner.data(), price.data());
        for (std::size_t j = 0; j < m; ++j)
            if (winner[j] == bidder) return DeviationOption{j, own, price[j], inst.value(bidder, j) - price[j]};
        return DeviationOption{kNone, own, Rational(0), Rational(0)};
    };

    BestResponseReport rep;
    rep.bidder = bidder;
    rep.current_utility = run(bids[bidder]).utility;
    bool have = false;
    for (const auto& x : detail::deviation_candidates(inst, bids, bidder, allow_overbid)) {
        auto opt = run(x);
        auto same = std::find_if(rep.attainable.begin(), rep.attainable.end(), [&](const DeviationOption& o) {
            return o.slot == opt.slot && o.price == opt.price;
        });
        if (same == rep.attainable.end()) rep.attainable.push_back(opt);
        if (!have || rep.best_utility < opt.utility) {
            rep.best_utility = opt.utility;
            rep.witness_bid = x;
            have = true;
        }
    }
    return rep;
}

struct Deviation {
    std::size_t bidder;
    Rational bid;
    Rational gain;
};

struct EquilibriumCheck {
    bool equilibrium = true;
    std::optional<Deviation> deviation;
};

inline EquilibriumCheck is_equilibrium(const Instance& inst, const BidProfile& bids, const OrderOfSale& order,
                                       const TieBreakRule& tie, bool allow_overbid) {
    for (std::size_t i = 0; i < inst.n(); ++i) {
        auto br = best_response(inst, bids, i, order, tie, allow_overbid);
        if (br.current_utility < br.best_utility)
            return {false, Deviation{i, br.witness_bid, br.best_utility - br.current_utility}};
    }
    return {};
}

inline void require_two_slots(const Instance& inst, const char* what) {
    if (inst.m() != 2) throw std::invalid_argument(std::string(what) + ": needs exactly 2 slots");
}

// Efficient winners of a two-slot instance, or nullopt if not unique.
inline std::optional<Labels> efficient_labels(const Instance& inst) {
    auto e = efficient_allocations(inst);
    if (!e.unique()) return std::nullopt;
    return Labels{e.allocations[0][0], e.allocations[0][1]};
}

inline std::size_t argmax_excluding(const Instance& inst, std::size_t slot, std::vector<std::size_t> skip,
                                    const BidProfile* bids = nullptr) {
    std::size_t best = kNone;
    Rational bv;
    for (std::size_t i = 0; i < inst.n(); ++i) {
        if (std::find(skip.begin(), skip.end(), i) != skip.end()) continue;
        Rational s = inst.alpha(i, slot) * (bids ? (*bids)[i] : inst.values[i]);
        if (best == kNone || bv < s) best = i, bv = s;
    }
    return best;
}

struct EfficientEqResult {
    bool ok = false;
    std::string reason;                      // set when !ok
    std::vector<Allocation> efficient;       // all maximisers
    Labels labels;
    std::size_t third = kNone;
    char case_label = 0;                     // 'A', 'B', or '2' for two bidders
    BidProfile bids;
    TieBreakRule tie;
};

inline EfficientEqResult construct_efficient_eq(const Instance& inst, std::optional<Labels> override_labels = {}) {
    require_two_slots(inst, "construct_efficient_eq");
    EfficientEqResult r;
    r.efficient = efficient_allocations(inst).allocations;
    if (override_labels) {
        r.labels = *override_labels;
        if (std::find(r.efficient.begin(), r.efficient.end(), Allocation{r.labels.first, r.labels.second}) ==
            r.efficient.end()) {
            r.reason = "label override is not an efficient allocation";
            return r;
        }
    } else if (r.efficient.size() != 1) {
        r.reason = "efficient allocation is not unique";
        return r;
    } else {
        r.labels = {r.efficient[0][0], r.efficient[0][1]};
    }
    const std::size_t l1 = r.labels.first, l2 = r.labels.second;
    r.bids.assign(inst.n(), Rational(0));
    r.bids[l1] = inst.values[l1];
    std::vector<std::size_t> fallback{l1, l2};
    if (inst.n() == 2) {
        r.case_label = '2';
        r.tie = TieBreakRule::click_ratio(fallback);
        r.ok = true;
        return r;
    }
    const std::size_t l3 = r.third = argmax_excluding(inst, 1, {l1, l2});
    fallback.push_back(l3);
    for (std::size_t i = 0; i < inst.n(); ++i)
        if (i != l1 && i != l2 && i != l3) fallback.push_back(i);
    r.tie = TieBreakRule::click_ratio(fallback);

    const Rational &a21 = inst.alpha(l2, 0), &a22 = inst.alpha(l2, 1);
    const Rational &a31 = inst.alpha(l3, 0), &a32 = inst.alpha(l3, 1);
    const Rational &v2 = inst.values[l2], &v3 = inst.values[l3];
    if (a31 * a22 <= a21 * a32) {
        if (a21.is_zero()) throw std::domain_error("construct_efficient_eq: case A needs a positive slot-1 CTR for the slot-2 winner");
        r.case_label = 'A';
        r.bids[l2] = (a32 * v3 + (a21 - a22) * v2) / a21;
        r.bids[l3] = v3;
    } else {
        r.case_label = 'B';
        r.bids[l2] = a32 * v3 / a22;
        r.bids[l3] = a21 * a32 * v3 / (a22 * a31);
    }
    // With no positive slot-2 value among the others, slot 2 is contested at
    // score 0 and the click-ratio order could hand it to a worthless bidder.
    if ((a32 * v3).is_zero()) r.tie = TieBreakRule::by_priority(fallback);
    r.ok = true;
    return r;
}

struct NamedCondition {
    std::string name;
    bool holds;
    bool tight;  // both sides equal
};

struct ConditionReport {
    Labels labels;
    std::vector<NamedCondition> a, b;  // A0..A6, B0..B6
    bool a_system = false, b_system = false;
    std::string required_tiebreak;      // B system only
};

inline ConditionReport check_lemma_eff_conditions(const Instance& inst, const BidProfile& bids,
                                                  std::optional<Labels> override_labels = {}) {
    require_two_slots(inst, "check_lemma_eff_conditions");
    check_bids(inst, bids);
    if (inst.n() < 3) throw std::invalid_argument("check_lemma_eff_conditions: needs at least 3 bidders");
    auto lab = override_labels ? override_labels : efficient_labels(inst);
    if (!lab) throw std::invalid_argument("check_lemma_eff_conditions: efficient allocation is not unique");
    const std::size_t l1 = lab->first, l2 = lab->second;
    const Rational &a11 = inst.alpha(l1, 0), &a12 = inst.alpha(l1, 1);
    const Rational &a21 = inst.alpha(l2, 0), &a22 = inst.alpha(l2, 1);
    const Rational &v1 = inst.values[l1], &v2 = inst.values[l2], &b2 = bids[l2];

    std::size_t arg1 = argmax_excluding(inst, 0, {l1, l2}, &bids);
    Rational m1b = inst.alpha(arg1, 0) * bids[arg1];
    std::size_t arg2 = argmax_excluding(inst, 1, {l1, l2}, &bids);
    Rational m2b = inst.alpha(arg2, 1) * bids[arg2];
    std::size_t arg2v = argmax_excluding(inst, 1, {l1, l2});
    Rational m2v = inst.value(arg2v, 1);

    auto ge = [](std::string n, const Rational& l, const Rational& r) { return NamedCondition{n, r <= l, l == r}; };
    auto gt = [](std::string n, const Rational& l, const Rational& r) { return NamedCondition{n, r < l, l == r}; };

    ConditionReport rep;
    rep.labels = *lab;
    rep.a = {
        ge("A0", a21 * b2, m1b),
        gt("A1", a11 * v1, a21 * b2),
        gt("A2", a22 * b2, m2b),
        ge("A3", m2b, a21 * b2 - (a11 - a12) * v1),
        ge("A4", a22 * b2, m2v),
        ge("A5", a11 * v1 - (a21 - a22) * v2, m2b),
        ge("A6", a22 * v2, m2b),
    };
    rep.b = {
        ge("B0", m1b, a21 * b2),
        gt("B1", a11 * v1, m1b),
        gt("B2", a22 * b2, m2b),
        ge("B3", a22 * b2 + (a11 - a12) * v1, m1b),
        ge("B4", a22 * b2, m2v),
        ge("B5", a11 * v1 - (a21 - a22) * v2, m2b),
        ge("B6", a22 * v2, m2b),
    };
    auto all = [](const std::vector<NamedCondition>& v) {
        return std::all_of(v.begin(), v.end(), [](const NamedCondition& c) { return c.holds; });
    };
    rep.a_system = all(rep.a);
    rep.b_system = all(rep.b);
    rep.required_tiebreak = "if bidder " + std::to_string(l2 + 1) +
                            " ties the best slot-1 score among the others, slot 1 goes to bidder " +
                            std::to_string(arg1 + 1) + " when bidder " + std::to_string(l1 + 1) + " underbids";
    return rep;
}

struct FeasibilityReport {
    bool feasible = false;
    BidProfile witness;
    TieBreakRule tie;
    std::size_t systems_checked = 0;
};

namespace detail {

// Linear expression over the bids of the relevant bidders.
struct Lin {
    std::vector<std::pair<std::size_t, Rational>> terms;
    Rational c;
};

inline Lin operator-(Lin x, const Lin& y) {
    for (const auto& [v, k] : y.terms) x.terms.push_back({v, -k});
    x.c -= y.c;
    return x;
}

inline Lin scaled(Lin x, const Rational& s) {
    for (auto& t : x.terms) t.second *= s;
    x.c *= s;
    return x;
}

}  // namespace detail

// Decides whether some bid profile, under some priority tie rule, makes
// `alloc` an equilibrium outcome of the in-order two-slot auction.
//
// Bidders other than the winners and the two price setters can bid 0 and be
// ranked last without loss of generality, which leaves at most four bid
// variables. Each case fixes the setters and a priority order of the relevant
// bidders; each non-holder of slot 2 contributes a disjunction "deviation to
// slot 2 is unprofitable, or no bid reaches it".
inline FeasibilityReport equilibrium_feasible(const Instance& inst, const Allocation& alloc, bool allow_overbid) {
    using detail::Lin;
    require_two_slots(inst, "equilibrium_feasible");
    check_allocation(inst, alloc);
    if (alloc[0] == kNone || alloc[1] == kNone) throw std::invalid_argument("equilibrium_feasible: both slots must be allocated");
    const std::size_t n = inst.n(), a = alloc[0], b = alloc[1];
    FeasibilityReport rep;

    auto value1 = [&](std::size_t i) { return inst.value(i, 0); };
    auto value2 = [&](std::size_t i) { return inst.value(i, 1); };

    for (std::size_t s1 = 0; s1 < n; ++s1) {
        if (s1 == a) continue;
        std::vector<std::size_t> s2_choices;
        for (std::size_t i = 0; i < n; ++i)
            if (i != a && i != b) s2_choices.push_back(i);
        if (s2_choices.empty()) s2_choices.push_back(kNone);
        for (std::size_t s2 : s2_choices) {
            std::vector<std::size_t> rel{a, b, s1};
            if (s2 != kNone) rel.push_back(s2);
            std::sort(rel.begin(), rel.end());
            rel.erase(std::unique(rel.begin(), rel.end()), rel.end());
            std::vector<std::size_t> var(n, kNone);
            for (std::size_t k = 0; k < rel.size(); ++k) var[rel[k]] = k;
            const std::size_t V = rel.size();

            auto score = [&](std::size_t i, std::size_t slot) {
                Lin l;
                if (i != kNone && var[i] != kNone) l.terms.push_back({var[i], inst.alpha(i, slot)});
                return l;
            };
            auto konst = [](Rational c) { return Lin{{}, std::move(c)}; };
            auto add = [&](ConstraintSystem& sys, const Lin& l, bool strict) {  // l >= 0 or l > 0
                sys.add_terms(l.terms, strict ? Rel::Gt : Rel::Ge, -l.c);
            };

            Lin ua = konst(value1(a)) - score(s1, 0);
            Lin ub = konst(value2(b)) - (s2 != kNone ? score(s2, 1) : Lin{});
            auto util = [&](std::size_t i) { return i == a ? ua : (i == b ? ub : Lin{}); };

            // prec(x, y): x wins ties against y.
            auto build = [&](auto prec, bool relaxed) {
                auto strict = [&](bool s) { return s && !relaxed; };
                ConstraintSystem base(V);
                for (std::size_t i : rel) {
                    base.add_terms({{var[i], 1}}, Rel::Ge, 0);
                    if (!allow_overbid) base.add_terms({{var[i], 1}}, Rel::Le, inst.values[i]);
                }
                for (std::size_t i = 0; i < n; ++i) {
                    if (i != a) add(base, score(a, 0) - score(i, 0), strict(prec(i, a)));
                    if (i != a && i != s1) add(base, score(s1, 0) - score(i, 0), strict(prec(i, s1)));
                    if (i != a && i != b) add(base, score(b, 1) - score(i, 1), strict(prec(i, b)));
                    if (s2 != kNone && i != a && i != b && i != s2)
                        add(base, score(s2, 1) - score(i, 1), strict(prec(i, s2)));
                    add(base, util(i), false);
                    if (i != a) add(base, util(i) - (konst(value1(i)) - score(a, 0)), false);
                }
                struct Choice {
                    Lin unprofitable, blocked;
                    bool blocked_strict;
                };
                std::vector<Choice> choices;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == b || inst.alpha(i, 1).is_zero()) continue;
                    std::size_t w = i == a ? s1 : a;
                    std::size_t r = i == a ? (s1 == b ? s2 : b) : b;
                    Lin W = score(w, 0);
                    Lin M2 = r != kNone ? score(r, 1) : Lin{};
                    Choice c;
                    c.unprofitable = util(i) - (konst(value2(i)) - M2);
                    c.blocked = scaled(M2, inst.alpha(i, 0)) - scaled(W, inst.alpha(i, 1));
                    c.blocked_strict = strict(prec(w, i) && (r == kNone || prec(i, r)));
                    choices.push_back(std::move(c));
                }
                return std::pair{base, choices};
            };

            auto search = [&](const ConstraintSystem& base, const auto& choices) -> std::optional<FmResult> {
                std::vector<std::vector<Rational>> pref(V);
                for (std::size_t i : rel) pref[var[i]] = {inst.values[i], Rational(0)};
                std::optional<FmResult> found;
                auto rec = [&](auto&& self, const ConstraintSystem& sys, std::size_t k) -> bool {
                    ++rep.systems_checked;
                    auto res = fm_decide(sys, pref);
                    if (!res.feasible) return false;
                    if (k == choices.size()) {
                        found = std::move(res);
                        return true;
                    }
                    for (int branch = 0; branch < 2; ++branch) {
                        ConstraintSystem next = sys;
                        if (branch == 0) add(next, choices[k].unprofitable, false);
                        else add(next, choices[k].blocked, choices[k].blocked_strict);
                        if (self(self, next, k + 1)) return true;
                    }
                    return false;
                };
                rec(rec, base, 0);
                return found;
            };

            {
                auto [base, choices] = build([](std::size_t, std::size_t) { return false; }, true);
                if (!search(base, choices)) continue;
            }

            std::vector<std::size_t> perm = rel;
            do {
                std::vector<std::size_t> prio = perm;
                for (std::size_t i = 0; i < n; ++i)
                    if (var[i] == kNone) prio.push_back(i);
                std::vector<std::size_t> rank(n);
                for (std::size_t k = 0; k < n; ++k) rank[prio[k]] = k;
                auto [base, choices] =
                    build([&](std::size_t x, std::size_t y) { return rank[x] < rank[y]; }, false);
                auto found = search(base, choices);
                if (!found) continue;
                BidProfile bids(n, Rational(0));
                for (std::size_t i : rel) bids[i] = found->witness[var[i]];
                auto tie = TieBreakRule::by_priority(prio);
                auto out = run_iterated_spa(inst, bids, best_to_worst(2), tie);
                if (out.allocation != alloc || !is_equilibrium(inst, bids, best_to_worst(2), tie, allow_overbid).equilibrium)
                    throw std::logic_error("equilibrium_feasible: witness failed re-simulation");
                rep.feasible = true;
                rep.witness = std::move(bids);
                rep.tie = std::move(tie);
                return rep;
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
    }
    return rep;
}

struct PoACandidate {
    Allocation allocation;
    Rational welfare;
    FeasibilityReport feasibility;
    std::optional<Rational> ratio;  // efficient welfare over candidate welfare, if attainable
};

struct PoAReport {
    Allocation efficient;
    Rational efficient_welfare;
    std::vector<PoACandidate> candidates;  // (j, l1) and (l2, k) for every maximiser j, k
    std::optional<Rational> poa;           // nullopt when an attainable candidate has zero welfare
};

inline PoAReport price_of_anarchy(const Instance& inst) {
    require_two_slots(inst, "price_of_anarchy");
    auto e = efficient_allocations(inst);
    PoAReport rep;
    rep.efficient = e.allocations.front();
    rep.efficient_welfare = e.welfare;
    // Every maximiser is a candidate partner; ties in the argmax and in the
    // efficient allocation itself each yield their own candidate.
    auto argmaxes = [&](std::size_t slot, std::size_t skip) {
        std::vector<std::size_t> out;
        Rational best = -1;
        for (std::size_t i = 0; i < inst.n(); ++i) {
            if (i == skip) continue;
            if (best < inst.value(i, slot)) best = inst.value(i, slot), out.clear();
            if (inst.value(i, slot) == best) out.push_back(i);
        }
        return out;
    };
    std::set<Allocation> cands;
    for (const auto& eff : e.allocations) {
        const std::size_t l1 = eff[0], l2 = eff[1];
        for (std::size_t j : argmaxes(0, l1)) cands.insert({j, l1});
        for (std::size_t k : argmaxes(1, l2)) cands.insert({l2, k});
    }
    rep.poa = Rational(1);
    for (const auto& cand : cands) {
        PoACandidate c;
        c.allocation = cand;
        c.welfare = welfare(inst, cand);
        c.feasibility = equilibrium_feasible(inst, cand, false);
        if (c.feasibility.feasible) {
            if (c.welfare.is_zero()) {
                if (!e.welfare.is_zero()) rep.poa.reset();
                else c.ratio = Rational(1);
            } else {
                c.ratio = e.welfare / c.welfare;
                if (rep.poa && *rep.poa < *c.ratio) rep.poa = c.ratio;
            }
        }
        rep.candidates.push_back(std::move(c));
    }
    return rep;
}

struct OracleOptions {
    std::size_t grid = 20;
    std::size_t deviation_refinement = 1;  // deviations on a lattice this many times finer
    bool allow_overbid = false;
    std::uint64_t capacity = 20'000'000;
};

// Exhaustive scan of the bid lattice {t * v_max / G}. A profile is kept when
// no bidder gains by moving to another point of the deviation lattice.
// Arithmetic is done on integers after scaling by a common denominator.
inline std::vector<BidProfile> brute_force_equilibria(const Instance& inst, const OrderOfSale& order,
                                                      const TieBreakRule& tie, const OracleOptions& opt = {}) {
    check_permutation(order, inst.m(), "order of sale");
    if (opt.grid == 0 || opt.deviation_refinement == 0) throw std::invalid_argument("oracle: grid must be positive");
    const std::size_t n = inst.n(), m = inst.m();
    auto rank = tie_ranks(inst, tie);
    Rational vmax;
    for (const auto& v : inst.values) vmax = max(vmax, v);
    const std::size_t G = opt.grid, R = opt.deviation_refinement;
    Rational h = vmax / Rational(static_cast<long>(G));  // profile step
    Rational hd = h / Rational(static_cast<long>(R));    // deviation step

    std::vector<std::size_t> top(n), dtop(n);  // largest profile / deviation index per bidder
    for (std::size_t i = 0; i < n; ++i) {
        if (h.is_zero() || opt.allow_overbid) {
            top[i] = h.is_zero() ? 0 : G;
        } else {
            mpz_class q = (inst.values[i] / h).num() / (inst.values[i] / h).den();
            top[i] = q.get_ui();
        }
        if (h.is_zero()) dtop[i] = 0;
        else if (opt.allow_overbid) dtop[i] = G * R;
        else {
            Rational t = inst.values[i] / hd;
            dtop[i] = mpz_class(t.num() / t.den()).get_ui();
        }
    }
    std::uint64_t total = 1;
    for (std::size_t i = 0; i < n; ++i) {
        total *= top[i] + 1;
        if (total > opt.capacity) throw std::length_error("oracle: lattice exceeds capacity");
    }

    // Scores alpha_{i,k} * t * hd and values alpha_{i,k} * v_i as integers.
    mpz_class L = 1;
    auto fold = [&](const Rational& x) { mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), x.den().get_mpz_t()); };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < m; ++k) fold(inst.alpha(i, k) * hd), fold(inst.value(i, k));
    Rational scale{mpq_class(L)};
    std::vector<std::vector<std::int64_t>> coef(n, std::vector<std::int64_t>(m)), val(n, std::vector<std::int64_t>(m));
    const mpz_class limit = mpz_class(1) << 55;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < m; ++k) {
            Rational c = inst.alpha(i, k) * hd * scale, v = inst.value(i, k) * scale;
            if (c.num() * mpz_class(static_cast<unsigned long>(dtop[i] + 1)) > limit || v.num() > limit)
                throw std::length_error("oracle: scaled scores overflow 64-bit range");
            coef[i][k] = c.num().get_si();
            val[i][k] = v.num().get_si();
        }

    std::vector<std::size_t> winner(m);
    std::vector<std::int64_t> price(m);
    std::vector<std::size_t> pos(n);  // current deviation-lattice index per bidder
    auto utility = [&](std::size_t who) {
        detail::spa_core<std::int64_t>(
            n, order, rank, [&](std::size_t i, std::size_t j) { return coef[i][j] * static_cast<std::int64_t>(pos[i]); },
            winner.data(), price.data());
        for (std::size_t j = 0; j < m; ++j)
            if (winner[j] == who) return val[who][j] - price[j];
        return std::int64_t{0};
    };

    // best[i][index of others' profile] caches bidder i's best lattice deviation.
    std::vector<std::vector<std::int64_t>> best(n);
    std::vector<std::vector<bool>> known(n);
    std::vector<std::uint64_t> stride(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t sz = total / (top[i] + 1);
        best[i].assign(sz, 0);
        known[i].assign(sz, false);
    }
    std::vector<std::size_t> t(n, 0);
    auto others_index = [&](std::size_t i) {
        std::uint64_t idx = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) idx = idx * (top[j] + 1) + t[j];
        return idx;
    };

    std::vector<BidProfile> out;
    for (std::uint64_t c = 0; c < total; ++c) {
        for (std::size_t i = 0; i < n; ++i) pos[i] = t[i] * R;
        bool eq = true;
        for (std::size_t i = 0; i < n && eq; ++i) {
            std::int64_t cur = utility(i);
            std::uint64_t idx = others_index(i);
            if (!known[i][idx]) {
                std::int64_t b = cur;
                for (std::size_t d = 0; d <= dtop[i]; ++d) {
                    pos[i] = d;
                    b = std::max(b, utility(i));
                }
                pos[i] = t[i] * R;
                best[i][idx] = b;
                known[i][idx] = true;
            }
            eq = cur >= best[i][idx];
        }
        if (eq) {
            BidProfile p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = h * Rational(static_cast<long>(t[i]));
            out.push_back(std::move(p));
        }
        for (std::size_t i = n; i-- > 0;) {
            if (++t[i] <= top[i]) break;
            t[i] = 0;
        }
    }
    return out;
}

}  // namespace posauc
