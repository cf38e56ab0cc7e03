#pragma once

#include "posauc/builtin.hpp"
#include "posauc/envy.hpp"
#include "posauc/equilibrium.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

namespace posauc::reproduce {

struct RuleScan {
    std::vector<std::size_t> priority;
    bool third_ranked_last = false;  // bidder 3 loses ties to both unit-CTR bidders
    bool second_above_third = false;  // input label 2 outranks label 3
    std::size_t lattice_equilibria = 0;
    // Equilibria whose slot-2 winner outranks bidder 3; the claim is that none exist.
    std::size_t slot2_winner_above_third = 0;
    std::size_t exact_equilibria = 0;  // lattice equilibria that survive exact verification
};

struct IndifferentPairReport {
    std::vector<RuleScan> rules;
    BidProfile bids;             // (1, 2/5, 1)
    bool bids_equilibrium = false;          // priority 3,1,2
    bool bids_equilibrium_click_ratio = false;
    bool bids_efficient = false;
    std::optional<Deviation> deviation_when_2_favoured;  // priority 2,1,3
    EfficientEqResult constructed;  // labels fixed to (1, 2)
    bool pass = false;
};

inline std::vector<std::vector<std::size_t>> all_priorities(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

inline IndifferentPairReport indifferent_pair(std::size_t grid = 20, std::size_t refine = 10) {
    const Instance inst = builtin::indifferent_pair();
    const auto order = best_to_worst(2);
    IndifferentPairReport rep;
    rep.pass = true;
    for (const auto& p : all_priorities(3)) {
        RuleScan s;
        s.priority = p;
        s.third_ranked_last = p[2] == 2;
        std::vector<std::size_t> rank(3);
        for (std::size_t k = 0; k < 3; ++k) rank[p[k]] = k;
        s.second_above_third = rank[1] < rank[2];
        auto tie = TieBreakRule::by_priority(p);
        OracleOptions opt;
        opt.grid = grid;
        opt.deviation_refinement = refine;
        auto eqs = brute_force_equilibria(inst, order, tie, opt);
        s.lattice_equilibria = eqs.size();
        for (const auto& b : eqs) {
            s.exact_equilibria += is_equilibrium(inst, b, order, tie, false).equilibrium;
            std::size_t w = run_iterated_spa(inst, b, order, tie).allocation[1];
            s.slot2_winner_above_third += w != 2 && rank[w] < rank[2];
        }
        if (s.slot2_winner_above_third != 0 || (s.third_ranked_last && s.lattice_equilibria != 0)) rep.pass = false;
        rep.rules.push_back(std::move(s));
    }
    rep.bids = {Rational(1), Rational(2, 5), Rational(1)};
    auto favour3 = TieBreakRule::by_priority({2, 0, 1});
    rep.bids_equilibrium = is_equilibrium(inst, rep.bids, order, favour3, false).equilibrium;
    rep.bids_equilibrium_click_ratio =
        is_equilibrium(inst, rep.bids, order, TieBreakRule::click_ratio({0, 1, 2}), false).equilibrium;
    auto out = run_iterated_spa(inst, rep.bids, order, favour3);
    auto eff = efficient_allocations(inst);
    rep.bids_efficient = welfare(inst, out.allocation) == eff.welfare;
    rep.deviation_when_2_favoured = is_equilibrium(inst, rep.bids, order, TieBreakRule::by_priority({1, 0, 2}), false).deviation;
    rep.constructed = construct_efficient_eq(inst, Labels{0, 1});
    rep.pass = rep.pass && rep.bids_equilibrium && rep.bids_efficient;
    return rep;
}

struct TieRuleWitness {
    std::vector<std::size_t> priority;
    std::optional<std::vector<Rational>> values;  // no lattice equilibrium at these values
    std::size_t candidates_tried = 0;
};

struct TieRuleFamilyReport {
    std::size_t grid = 0, refine = 0;
    std::vector<TieRuleWitness> rules;
    std::size_t refuted = 0;
    bool pass = false;
};

// Candidate value vectors (a, a, c, c) with a, c running down from 1 to 2/5.
inline std::vector<std::vector<Rational>> tie_rule_value_grid() {
    std::vector<std::vector<Rational>> out;
    for (long a = 10; a >= 4; --a)
        for (long c = 10; c >= 4; --c) {
            Rational x(a, 10), y(c, 10);
            out.push_back({x, x, y, y});
        }
    return out;
}

inline TieRuleFamilyReport tie_rule_family(std::size_t grid = 20, std::size_t refine = 10) {
    TieRuleFamilyReport rep;
    rep.grid = grid;
    rep.refine = refine;
    const auto values = tie_rule_value_grid();
    for (const auto& p : all_priorities(4)) {
        TieRuleWitness w;
        w.priority = p;
        for (const auto& v : values) {
            ++w.candidates_tried;
            OracleOptions opt;
            opt.grid = grid;
            opt.deviation_refinement = refine;
            if (brute_force_equilibria(builtin::tie_rule_family(v), best_to_worst(3), TieBreakRule::by_priority(p), opt)
                    .empty()) {
                w.values = v;
                break;
            }
        }
        rep.refuted += w.values.has_value();
        rep.rules.push_back(std::move(w));
    }
    rep.pass = rep.refuted == rep.rules.size();
    return rep;
}

struct OutOfOrderReport {
    SupportResult in_order, one_three_two;
    BidProfile listed_bids;  // (10, 7, 7, 5)
    Outcome listed_outcome;
    bool listed_reproduces = false;
    bool pass = false;
};

inline OutOfOrderReport out_of_order() {
    const Instance inst = builtin::out_of_order();
    OutOfOrderReport rep;
    rep.in_order = vcg_supported(inst, best_to_worst(3), true);
    rep.one_three_two = vcg_supported(inst, {0, 2, 1}, false);
    rep.listed_bids = {10, 7, 7, 5};
    rep.listed_outcome = run_iterated_spa(inst, rep.listed_bids, {0, 2, 1}, TieBreakRule::by_priority({0, 1, 2, 3}));
    const std::vector<Rational> want{7, 5, 1};
    rep.listed_reproduces = rep.listed_outcome.allocation == Allocation{0, 1, 2} && rep.listed_outcome.prices == want;
    bool witness_ok = false;
    if (rep.one_three_two.supported) {
        auto o = run_iterated_spa(inst, rep.one_three_two.witness, {0, 2, 1}, rep.one_three_two.tie);
        witness_ok = o.allocation == Allocation{0, 1, 2} && o.prices == want;
    }
    rep.pass = !rep.in_order.supported && witness_ok && rep.listed_reproduces;
    return rep;
}

struct EnvyExampleReport {
    Labels labels;
    Rational third_premium, top_premium;  // (a31 - a32) v3 and (a11 - a12) v1
    bool condition = false;
    GefEqResult constructed;
    DeFeasibility de;
    bool pass = false;
};

inline EnvyExampleReport envy_example() {
    const Instance inst = builtin::envy_counterexample();
    EnvyExampleReport rep;
    rep.labels = *efficient_labels(inst);
    std::size_t l1 = rep.labels.first, l3 = 3 - rep.labels.first - rep.labels.second;
    rep.third_premium = inst.value(l3, 0) - inst.value(l3, 1);
    rep.top_premium = inst.value(l1, 0) - inst.value(l1, 1);
    rep.condition = gef_necessary_condition(inst);
    rep.constructed = construct_gef_eq(inst);
    rep.de = de_systems_feasible(inst);
    rep.pass = !rep.condition && !rep.constructed.ok && !rep.de.d_feasible && !rep.de.e_feasible &&
               rep.third_premium == Rational(1, 2) && rep.top_premium == Rational(2, 5);
    return rep;
}

struct AnarchyExampleReport {
    Rational delta;
    PoAReport poa;
    Rational formula;  // (2 - 2d) / (1 + d)
    bool pass = false;
};

inline AnarchyExampleReport anarchy_example(const Rational& delta) {
    AnarchyExampleReport rep;
    rep.delta = delta;
    rep.poa = price_of_anarchy(builtin::anarchy_family(delta));
    rep.formula = (Rational(2) - Rational(2) * delta) / (Rational(1) + delta);
    rep.pass = rep.poa.poa && *rep.poa.poa == rep.formula;
    return rep;
}

}  // namespace posauc::reproduce
