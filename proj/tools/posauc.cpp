#include "posauc/envy.hpp"
#include "posauc/equilibrium.hpp"
#include "posauc/io.hpp"
#include "posauc/random.hpp"
#include "posauc/reproduce.hpp"
#include "posauc/support.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

using namespace posauc;
using io::json;

namespace {

struct Options {
    std::string instance;
    std::string bids, order, tiebreak, labels, alloc, ctr_file, target;
    std::string v3 = "1", delta = "1/10";
    std::size_t grid = 20, refine = 10, count = 50;
    std::uint64_t seed = 1;
    bool allow_overbid = false, no_unsold_rule = false, csv = false;
};

// Result of one command: payload plus a verdict; negative verdicts exit 2.
struct Result {
    json results;
    std::string verdict;
    bool negative = false;
    std::optional<Instance> instance;
};

json labels_json(const Labels& l) { return json::array({io::index_json(l.first), io::index_json(l.second)}); }

json conditions_json(const std::vector<NamedCondition>& v) {
    json j = json::object();
    for (const auto& c : v) j[c.name] = {{"holds", c.holds}, {"tight", c.tight}};
    return j;
}

json deviation_json(const std::optional<Deviation>& d) {
    if (!d) return nullptr;
    return {{"bidder", io::index_json(d->bidder)}, {"bid", d->bid.str()}, {"gain", d->gain.str()}};
}

json allocations_json(const std::vector<Allocation>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(io::index_json(x));
    return a;
}

json feasibility_json(const FeasibilityReport& f) {
    json j{{"feasible", f.feasible}, {"systems_checked", f.systems_checked}};
    if (f.feasible) {
        j["witness"] = io::to_json(f.witness);
        j["tiebreak"] = io::tiebreak_to_json(f.tie);
    }
    return j;
}

json support_json(const SupportResult& s) {
    json j{{"supported", s.supported}, {"vcg", io::outcome_to_json(s.vcg)}, {"systems_checked", s.systems_checked}};
    if (!s.reason.empty()) j["reason"] = s.reason;
    if (s.supported) {
        j["witness"] = io::to_json(s.witness);
        j["tiebreak"] = io::tiebreak_to_json(s.tie);
    }
    return j;
}

json poa_json(const PoAReport& r) {
    json c = json::array();
    for (const auto& x : r.candidates)
        c.push_back({{"allocation", io::index_json(x.allocation)},
                     {"welfare", x.welfare.str()},
                     {"equilibrium", feasibility_json(x.feasibility)},
                     {"ratio", x.ratio ? json(x.ratio->str()) : json(nullptr)}});
    return {{"efficient", io::index_json(r.efficient)},
            {"efficient_welfare", r.efficient_welfare.str()},
            {"candidates", c},
            {"poa", r.poa ? json(r.poa->str()) : json(nullptr)}};
}

Instance need_instance(const Options& o) {
    if (o.instance.empty()) throw io::InputError("an instance file is required");
    return io::load_instance(o.instance);
}

OrderOfSale order_or_default(const Options& o, std::size_t m) {
    if (o.order.empty()) return best_to_worst(m);
    auto p = io::parse_index_list(o.order, m, "--order");
    io::require_permutation(p, m, "--order");
    return p;
}

TieBreakRule tie_or_default(const Options& o, std::size_t n) {
    return o.tiebreak.empty() ? TieBreakRule::by_priority({}) : io::parse_tiebreak(o.tiebreak, n);
}

BidProfile need_bids(const Options& o, const Instance& inst) {
    if (o.bids.empty()) throw io::InputError("--bids is required");
    auto b = io::parse_rational_list(o.bids, "--bids");
    if (b.size() != inst.n())
        throw io::InputError("--bids: expected " + std::to_string(inst.n()) + " entries, got " + std::to_string(b.size()));
    for (const auto& x : b)
        if (x.sign() < 0) throw io::InputError("--bids: bids must be nonnegative");
    return b;
}

std::optional<Labels> labels_opt(const Options& o, std::size_t n) {
    if (o.labels.empty()) return std::nullopt;
    auto v = io::parse_index_list(o.labels, n, "--labels");
    if (v.size() != 2 || v[0] == v[1]) throw io::InputError("--labels: expected two distinct bidders");
    return Labels{v[0], v[1]};
}

ExpressiveOptions expressive_options(const Options& o) {
    ExpressiveOptions e;
    e.unsold_rule = !o.no_unsold_rule;
    return e;
}

Result run_spa(const Options& o) {
    Instance inst = need_instance(o);
    auto out = run_iterated_spa(inst, need_bids(o, inst), order_or_default(o, inst.m()), tie_or_default(o, inst.n()));
    return {io::outcome_to_json(out), "ok", false, inst};
}

Result run_vcg_cmd(const Options& o) {
    Instance inst = need_instance(o);
    auto out = o.bids.empty() ? vcg_result(inst) : run_vcg(inst, need_bids(o, inst));
    return {io::outcome_to_json(out), "ok", false, inst};
}

Result run_expressive(const Options& o) {
    Instance inst = need_instance(o);
    if (o.bids.empty()) throw io::InputError("--bids is required (rows separated by ';')");
    auto b = io::parse_matrix(o.bids, "--bids");
    if (b.size() != inst.n()) throw io::InputError("--bids: expected one row per bidder");
    for (const auto& row : b)
        if (row.size() != inst.m()) throw io::InputError("--bids: expected one entry per slot in every row");
    auto r = run_expressive_auction(inst, b, expressive_options(o));
    json j = io::outcome_to_json(r.outcome);
    j["order"] = io::index_json(r.order);
    return {j, "ok", false, inst};
}

Result eq_check(const Options& o) {
    Instance inst = need_instance(o);
    auto bids = need_bids(o, inst);
    auto order = order_or_default(o, inst.m());
    auto tie = tie_or_default(o, inst.n());
    auto chk = is_equilibrium(inst, bids, order, tie, o.allow_overbid);
    auto out = run_iterated_spa(inst, bids, order, tie);
    json j{{"equilibrium", chk.equilibrium},
           {"deviation", deviation_json(chk.deviation)},
           {"outcome", io::outcome_to_json(out)},
           {"tiebreak", io::tiebreak_to_json(tie)}};
    json br = json::array();
    for (std::size_t i = 0; i < inst.n(); ++i) {
        auto r = best_response(inst, bids, i, order, tie, o.allow_overbid);
        br.push_back({{"bidder", i + 1},
                      {"current_utility", r.current_utility.str()},
                      {"best_utility", r.best_utility.str()},
                      {"witness_bid", r.witness_bid.str()}});
    }
    j["best_responses"] = br;
    if (inst.m() == 2 && inst.n() >= 3 && efficient_labels(inst)) {
        auto c = check_lemma_eff_conditions(inst, bids, labels_opt(o, inst.n()));
        j["conditions"] = {{"labels", labels_json(c.labels)},
                           {"A", conditions_json(c.a)},
                           {"B", conditions_json(c.b)},
                           {"A_system", c.a_system},
                           {"B_system", c.b_system},
                           {"required_tiebreak", c.required_tiebreak}};
    }
    return {j, chk.equilibrium ? "equilibrium" : "not an equilibrium", !chk.equilibrium, inst};
}

Result eq_construct(const Options& o) {
    Instance inst = need_instance(o);
    auto r = construct_efficient_eq(inst, labels_opt(o, inst.n()));
    json j{{"constructed", r.ok}, {"efficient", allocations_json(r.efficient)}};
    if (!r.ok) {
        j["reason"] = r.reason;
        return {j, "not constructed", true, inst};
    }
    j["labels"] = labels_json(r.labels);
    j["case"] = std::string(1, r.case_label);
    j["bids"] = io::to_json(r.bids);
    j["tiebreak"] = io::tiebreak_to_json(r.tie);
    auto chk = is_equilibrium(inst, r.bids, best_to_worst(inst.m()), r.tie, false);
    auto out = run_iterated_spa(inst, r.bids, best_to_worst(inst.m()), r.tie);
    j["outcome"] = io::outcome_to_json(out);
    j["verified_equilibrium"] = chk.equilibrium;
    j["deviation"] = deviation_json(chk.deviation);
    if (inst.n() >= 3) {
        auto c = check_lemma_eff_conditions(inst, r.bids, r.labels);
        j["conditions"] = {{"A", conditions_json(c.a)}, {"B", conditions_json(c.b)},
                           {"A_system", c.a_system}, {"B_system", c.b_system}};
    }
    return {j, chk.equilibrium ? "efficient equilibrium" : "verification failed", !chk.equilibrium, inst};
}

Result eq_feasible(const Options& o) {
    Instance inst = need_instance(o);
    if (o.alloc.empty()) throw io::InputError("--alloc is required");
    auto a = io::parse_index_list(o.alloc, inst.n(), "--alloc");
    try {
        check_allocation(inst, a);
    } catch (const std::invalid_argument& e) {
        throw io::InputError(e.what());
    }
    auto f = equilibrium_feasible(inst, a, o.allow_overbid);
    json j = feasibility_json(f);
    j["allocation"] = io::index_json(a);
    return {j, f.feasible ? "feasible" : "infeasible", !f.feasible, inst};
}

Result eq_poa(const Options& o) {
    Instance inst = need_instance(o);
    auto r = price_of_anarchy(inst);
    return {poa_json(r), r.poa ? "poa " + r.poa->str() : "unbounded", !r.poa, inst};
}

Result eq_oracle(const Options& o) {
    Instance inst = need_instance(o);
    OracleOptions opt;
    opt.grid = o.grid;
    opt.deviation_refinement = o.refine;
    opt.allow_overbid = o.allow_overbid;
    auto order = order_or_default(o, inst.m());
    auto tie = tie_or_default(o, inst.n());
    auto eqs = brute_force_equilibria(inst, order, tie, opt);
    json list = json::array();
    std::size_t exact = 0;
    for (const auto& b : eqs) {
        bool ok = is_equilibrium(inst, b, order, tie, o.allow_overbid).equilibrium;
        exact += ok;
        list.push_back({{"bids", io::to_json(b)}, {"exact", ok}});
    }
    json j{{"grid", o.grid}, {"refine", o.refine}, {"tiebreak", io::tiebreak_to_json(tie)},
           {"lattice_equilibria", list}, {"count", eqs.size()}, {"exact_count", exact}};
    return {j, eqs.empty() ? "no lattice equilibrium" : "lattice equilibria found", eqs.empty(), inst};
}

Result gef_check(const Options& o) {
    Instance inst = need_instance(o);
    auto bids = need_bids(o, inst);
    auto tie = tie_or_default(o, inst.n());
    auto out = run_iterated_spa(inst, bids, best_to_worst(inst.m()), tie);
    auto g = is_globally_envy_free(inst, out.allocation, out.prices);
    json j{{"outcome", io::outcome_to_json(out)}, {"envy_free", g.envy_free}};
    if (g.violating_pair)
        j["violating_pair"] = {{"bidder", io::index_json(g.violating_pair->first)},
                               {"slot", io::index_json(g.violating_pair->second)}};
    if (g.necessary_condition_holds) j["necessary_condition"] = *g.necessary_condition_holds;
    if (inst.m() == 2 && inst.n() >= 2) {
        auto c = check_gef_characterization(inst, bids, tie);
        json sys{{"A", conditions_json(c.a)}, {"B", conditions_json(c.b)}, {"C", conditions_json(c.c)},
                 {"A_system", c.a_system}, {"B_system", c.b_system}, {"C_system", c.c_system},
                 {"gef_by_systems", c.gef_by_systems}, {"gef_by_outcome", c.gef_by_outcome},
                 {"roles", io::index_json(std::vector<std::size_t>{c.one, c.two, c.three, c.four})}};
        if (c.efficient) {
            sys["efficient_labels"] = labels_json(*c.efficient);
            sys["de_precondition"] = c.de_precondition;
            sys["D"] = conditions_json(c.d);
            sys["E"] = conditions_json(c.e);
        }
        sys["de_verdict"] = to_string(c.de_verdict);
        j["characterization"] = sys;
    }
    return {j, g.envy_free ? "globally envy-free" : "not envy-free", !g.envy_free, inst};
}

Result gef_construct(const Options& o) {
    Instance inst = need_instance(o);
    auto r = construct_gef_eq(inst);
    json j{{"constructed", r.ok}};
    if (!r.ok) {
        j["reason"] = r.reason;
        return {j, "no GEF efficient equilibrium", true, inst};
    }
    auto out = run_iterated_spa(inst, r.bids, best_to_worst(2), r.tie);
    bool eq = is_equilibrium(inst, r.bids, best_to_worst(2), r.tie, false).equilibrium;
    bool gef = is_globally_envy_free(inst, out.allocation, out.prices).envy_free;
    bool vcg = out == vcg_result(inst);
    j.update({{"labels", labels_json(r.labels)}, {"case", r.case_id}, {"bids", io::to_json(r.bids)},
              {"tiebreak", io::tiebreak_to_json(r.tie)}, {"outcome", io::outcome_to_json(out)},
              {"verified_equilibrium", eq}, {"verified_envy_free", gef}, {"matches_vcg", vcg}});
    bool good = eq && gef && vcg;
    return {j, good ? "GEF efficient equilibrium" : "verification failed", !good, inst};
}

Result gef_condition(const Options& o) {
    Instance inst = need_instance(o);
    require_two_slots(inst, "gef condition");
    auto lab = efficient_labels(inst);
    if (!lab) throw io::InputError("gef condition: efficient allocation is not unique");
    json j{{"labels", labels_json(*lab)}};
    if (inst.n() == 3) {
        std::size_t l1 = lab->first, l3 = 3 - lab->first - lab->second;
        Rational lhs = inst.value(l3, 0) - inst.value(l3, 1), rhs = inst.value(l1, 0) - inst.value(l1, 1);
        bool holds = gef_necessary_condition(inst);
        j["necessary_condition"] = {{"lhs", lhs.str()}, {"rhs", rhs.str()}, {"holds", holds}};
        auto de = de_systems_feasible(inst);
        j["D_feasible"] = de.d_feasible;
        j["E_feasible"] = de.e_feasible;
        if (de.d_feasible) j["D_witness"] = io::to_json(de.d_witness);
        if (de.e_feasible) j["E_witness"] = io::to_json(de.e_witness);
    }
    auto s = gef2_sufficient(inst);
    j["ratio_condition"] = s.condition;
    if (s.condition) {
        j["ratio_bids"] = io::to_json(s.bids);
        j["ratio_tiebreak"] = io::tiebreak_to_json(s.tie);
    }
    bool ok = inst.n() != 3 || j["necessary_condition"]["holds"].get<bool>();
    return {j, ok ? "condition holds" : "no GEF efficient equilibrium", !ok, inst};
}

Result vcg_support(const Options& o) {
    Instance inst = need_instance(o);
    auto order = order_or_default(o, inst.m());
    auto s = vcg_supported(inst, order, o.allow_overbid);
    json j = support_json(s);
    j["order"] = io::index_json(order);
    if (s.supported) j["resimulation"] = io::outcome_to_json(run_iterated_spa(inst, s.witness, order, s.tie));
    return {j, s.supported ? "supported" : "not supported", !s.supported, inst};
}

Result badgen(const Options& o) {
    if (o.ctr_file.empty()) throw io::InputError("--ctr is required");
    json c = io::parse_json_text(io::read_file(o.ctr_file), o.ctr_file);
    if (c.is_object() && c.contains("ctr")) c = c["ctr"];
    if (!c.is_array()) throw io::InputError(o.ctr_file + ": expected a CTR matrix or an object with 'ctr'");
    Matrix ctr;
    for (std::size_t i = 0; i < c.size(); ++i) ctr.push_back(io::rationals_from_json(c[i], "ctr[" + std::to_string(i) + "]"));
    auto v3 = Rational::try_parse(o.v3);
    if (!v3) throw io::InputError("--v3: not a rational");
    BadValues bv;
    try {
        bv = generate_bad_values(ctr, *v3);
    } catch (const std::invalid_argument& e) {
        throw io::InputError(e.what());
    }
    Instance inst = make_instance(bv.values, ctr, true);
    auto in = vcg_supported(inst, {0, 1}, false), rev = vcg_supported(inst, {1, 0}, false);
    const auto& p = bv.params;
    json j{{"values", io::to_json(bv.values)},
           {"params", {{"v3", p.v3.str()}, {"epsilon", p.epsilon.str()}, {"delta", p.delta.str()},
                       {"lambda1", p.lambda1.str()}, {"lambda2", p.lambda2.str()},
                       {"gamma1", p.gamma1.str()}, {"gamma2", p.gamma2.str()}}},
           {"efficient", allocations_json(efficient_allocations(inst).allocations)},
           {"supported_in_order", in.supported},
           {"supported_reverse_order", rev.supported}};
    bool bad = !in.supported && !rev.supported;
    return {j, bad ? "VCG result not supported in either order" : "supported", !bad, inst};
}

json forest_json(const PriceSupportForest& f) {
    return {{"parent", io::index_json(f.parent)}, {"depth", f.depth}, {"roots", io::index_json(f.roots)}};
}

Result psf_cmd(const Options& o, const std::string& which) {
    Instance inst = need_instance(o);
    auto p = run_psf_pipeline(inst, which == "verify", expressive_options(o));
    json j{{"vcg", io::outcome_to_json(p.vcg)}};
    if (which == "build") {
        json edges = json::array();
        for (auto [a, b] : p.graph.edges) edges.push_back({a + 1, b + 1});
        j["edges"] = edges;
        j["forest"] = forest_json(p.forest);
    } else if (which == "order") {
        j["forest"] = forest_json(p.forest);
        j["order"] = io::index_json(p.order);
    } else if (which == "bids") {
        j["order"] = io::index_json(p.order);
        j["bids"] = io::to_json(p.bids);
    } else {
        j["order"] = io::index_json(p.order);
        j["bids"] = io::to_json(p.bids);
        j["auction"] = io::outcome_to_json(p.auction.outcome);
        j["auction_order"] = io::index_json(p.auction.order);
        j["reproduces_vcg"] = p.reproduces_vcg;
        json d = json::array();
        for (std::size_t k = 0; k < p.deviations.size(); ++k) {
            const auto& x = p.deviations[k];
            json e{{"bidder", k + 1}, {"ok", x.ok}, {"rows_tried", x.rows_tried}};
            if (!x.ok)
                e.update({{"row", io::to_json(x.row)}, {"slot", io::index_json(x.slot)},
                          {"price", x.price.str()}, {"utility", x.utility.str()}});
            e["utility_gain"] = x.utility_gain;
            if (x.utility_gain) e.update({{"gain_row", io::to_json(x.gain_row)}, {"gain_utility", x.gain_utility.str()}});
            d.push_back(e);
        }
        j["deviations"] = d;
        bool ok = p.reproduces_vcg && p.all_deviations_ok;
        return {j, ok ? "pipeline reproduces VCG" : "pipeline failed", !ok, inst};
    }
    return {j, "ok", false, inst};
}

Result reproduce_cmd(const Options& o) {
    namespace rp = reproduce;
    if (o.target == "table1") {
        auto r = rp::indifferent_pair(o.grid, o.refine);
        json rules = json::array();
        for (const auto& s : r.rules)
            rules.push_back({{"priority", io::index_json(s.priority)}, {"third_ranked_last", s.third_ranked_last},
                             {"second_above_third", s.second_above_third},
                             {"lattice_equilibria", s.lattice_equilibria}, {"exact_equilibria", s.exact_equilibria},
                             {"slot2_winner_above_third", s.slot2_winner_above_third}});
        json j{{"instance", io::instance_to_json(builtin::indifferent_pair())},
               {"grid", o.grid}, {"refine", o.refine}, {"rules", rules},
               {"bids", io::to_json(r.bids)},
               {"bids_equilibrium_priority_3_1_2", r.bids_equilibrium},
               {"bids_equilibrium_click_ratio", r.bids_equilibrium_click_ratio},
               {"bids_efficient", r.bids_efficient},
               {"deviation_priority_2_1_3", deviation_json(r.deviation_when_2_favoured)},
               {"constructed_case", std::string(1, r.constructed.case_label)},
               {"constructed_bids", io::to_json(r.constructed.bids)}};
        return {j, r.pass ? "equilibria only when ties favour bidder 3" : "mismatch", !r.pass, builtin::indifferent_pair()};
    }
    if (o.target == "table2") {
        auto r = rp::tie_rule_family(o.grid, o.refine);
        json rules = json::array();
        for (const auto& w : r.rules)
            rules.push_back({{"priority", io::index_json(w.priority)}, {"candidates_tried", w.candidates_tried},
                             {"values", w.values ? io::to_json(*w.values) : json(nullptr)}});
        json j{{"ctr", io::to_json(builtin::tie_rule_family({1, 1, 1, 1}).ctr)},
               {"grid", r.grid}, {"refine", r.refine}, {"rules", rules}, {"refuted", r.refuted},
               {"scope", "search over values (a,a,c,c) with a,c in {1,9/10,...,2/5}; absence of equilibria is "
                         "checked on the bid lattice only, not over all real bids"}};
        return {j, r.pass ? "every priority rule refuted" : "some rules not refuted", !r.pass, std::nullopt};
    }
    if (o.target == "table3") {
        auto r = rp::out_of_order();
        json j{{"instance", io::instance_to_json(builtin::out_of_order())},
               {"in_order", support_json(r.in_order)},
               {"order_1_3_2", support_json(r.one_three_two)},
               {"listed_bids", io::to_json(r.listed_bids)},
               {"listed_outcome", io::outcome_to_json(r.listed_outcome)},
               {"listed_reproduces", r.listed_reproduces}};
        return {j, r.pass ? "supported only out of order" : "mismatch", !r.pass, builtin::out_of_order()};
    }
    if (o.target == "gef-example") {
        auto r = rp::envy_example();
        json j{{"instance", io::instance_to_json(builtin::envy_counterexample())},
               {"labels", labels_json(r.labels)},
               {"lhs", r.third_premium.str()}, {"rhs", r.top_premium.str()},
               {"condition_holds", r.condition},
               {"constructed", r.constructed.ok},
               {"D_feasible", r.de.d_feasible}, {"E_feasible", r.de.e_feasible}};
        return {j, r.pass ? "no GEF efficient equilibrium" : "mismatch", !r.pass, builtin::envy_counterexample()};
    }
    if (o.target == "poa-example") {
        auto d = Rational::try_parse(o.delta);
        if (!d || d->sign() <= 0 || !(*d < Rational(1, 3))) throw io::InputError("--delta: expected a rational in (0, 1/3)");
        auto r = rp::anarchy_example(*d);
        json j = poa_json(r.poa);
        j["delta"] = d->str();
        j["formula"] = r.formula.str();
        return {j, r.pass ? "poa " + r.formula.str() : "mismatch", !r.pass, builtin::anarchy_family(*d)};
    }
    throw io::InputError("unknown reproduce target '" + o.target + "' (table1, table2, table3, gef-example, poa-example)");
}

// Small seeded versions of the property suites.
Result random_check(const Options& o) {
    rnd::Rng rng(o.seed);
    std::size_t eq_fail = 0, gef_fail = 0, poa_fail = 0, psf_fail = 0;
    for (std::size_t t = 0; t < o.count; ++t) {
        Instance a = rnd::random_unique_efficient(rng, 3 + t % 3, 2);
        auto c = construct_efficient_eq(a);
        if (!c.ok || !is_equilibrium(a, c.bids, best_to_worst(2), c.tie, false).equilibrium) ++eq_fail;
        Instance b = rnd::random_unique_efficient(rng, 3, 2);
        auto g = construct_gef_eq(b);
        if (g.ok != gef_necessary_condition(b)) ++gef_fail;
        Instance p = rnd::random_instance(rng, 2 + t % 3, 2);
        auto poa = price_of_anarchy(p);
        if (poa.poa && Rational(2) < *poa.poa) ++poa_fail;
        std::size_t n = 1 + t % 5;
        Instance s = rnd::random_instance(rng, n, 1 + t % n, true);
        if (!run_psf_pipeline(s, false).reproduces_vcg) ++psf_fail;
    }
    json j{{"seed", o.seed}, {"count", o.count},
           {"failures", {{"efficient_equilibrium", eq_fail}, {"gef", gef_fail}, {"poa", poa_fail}, {"psf", psf_fail}}}};
    bool ok = eq_fail + gef_fail + poa_fail + psf_fail == 0;
    return {j, ok ? "all checks passed" : "failures found", !ok, std::nullopt};
}

// "analyze vcg x.json" and friends map onto the run-* commands.
std::vector<std::string> rewrite_analyze(std::vector<std::string> args) {
    if (args.size() >= 2 && args[1] == "analyze") {
        args.erase(args.begin() + 1);
        if (args.size() >= 2) {
            if (args[1] == "vcg") args[1] = "run-vcg";
            else if (args[1] == "spa") args[1] = "run-spa";
            else if (args[1] == "expressive") args[1] = "run-expressive";
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    args = rewrite_analyze(args);
    std::string command;
    for (std::size_t k = 1; k < args.size(); ++k) command += (k > 1 ? " " : "") + args[k];

    CLI::App app{"Exact analysis of position auctions with slot- and bidder-dependent click-through rates"};
    app.require_subcommand(1);
    app.fallthrough();  // --json/--csv may follow the subcommand
    Options o;
    bool json_flag = false;
    app.add_flag("--json", json_flag, "JSON output (default)");
    app.add_flag("--csv", o.csv, "path,value lines instead of JSON");

    auto add_instance = [&](CLI::App* c) { c->add_option("instance", o.instance, "instance JSON file")->required(); };
    auto add_order = [&](CLI::App* c) { c->add_option("--order", o.order, "sale order of slots, e.g. 1,3,2"); };
    auto add_tie = [&](CLI::App* c) {
        c->add_option("--tiebreak", o.tiebreak, "priority:i,j,...|click-ratio[:i,j,...]|revenue-max");
    };
    auto add_overbid = [&](CLI::App* c) { c->add_flag("--allow-overbid", o.allow_overbid, "permit bids above value"); };
    auto add_unsold = [&](CLI::App* c) {
        c->add_flag("--no-unsold-rule", o.no_unsold_rule, "sell slots that have a single nonzero bid");
    };

    std::function<Result()> action;
    auto bind = [&](CLI::App* c, std::function<Result()> f) { c->callback([&action, f] { action = f; }); };

    auto* spa = app.add_subcommand("run-spa", "iterated second-price auction");
    add_instance(spa);
    spa->add_option("--bids", o.bids, "scalar bids, e.g. 1,2/5,1")->required();
    add_order(spa);
    add_tie(spa);
    bind(spa, [&] { return run_spa(o); });

    auto* vcg = app.add_subcommand("run-vcg", "VCG outcome (truthful unless --bids is given)");
    add_instance(vcg);
    vcg->add_option("--bids", o.bids, "scalar bids");
    bind(vcg, [&] { return run_vcg_cmd(o); });

    auto* ex = app.add_subcommand("run-expressive", "expressive-bid sequential auction");
    add_instance(ex);
    ex->add_option("--bids", o.bids, "per-slot bids, rows separated by ';'")->required();
    add_unsold(ex);
    bind(ex, [&] { return run_expressive(o); });

    auto* eq = app.add_subcommand("equilibrium", "equilibrium analysis");
    eq->require_subcommand(1);
    auto* eqc = eq->add_subcommand("check", "exact equilibrium check of a bid profile");
    add_instance(eqc);
    eqc->add_option("--bids", o.bids, "scalar bids")->required();
    add_order(eqc);
    add_tie(eqc);
    add_overbid(eqc);
    eqc->add_option("--labels", o.labels, "efficient labels l1,l2 for the condition report");
    bind(eqc, [&] { return eq_check(o); });
    auto* eqk = eq->add_subcommand("construct", "build an efficient equilibrium (two slots)");
    add_instance(eqk);
    eqk->add_option("--labels", o.labels, "override the efficient labels l1,l2");
    bind(eqk, [&] { return eq_construct(o); });
    auto* eqf = eq->add_subcommand("feasible", "decide whether an allocation is an equilibrium outcome");
    add_instance(eqf);
    eqf->add_option("--alloc", o.alloc, "winner of each slot, e.g. 2,1")->required();
    add_overbid(eqf);
    bind(eqf, [&] { return eq_feasible(o); });
    auto* eqp = eq->add_subcommand("poa", "price of anarchy (two slots)");
    add_instance(eqp);
    bind(eqp, [&] { return eq_poa(o); });
    auto* eqo = eq->add_subcommand("oracle", "lattice brute-force equilibrium scan");
    add_instance(eqo);
    eqo->add_option("--grid", o.grid, "lattice steps per bidder")->capture_default_str();
    eqo->add_option("--refine", o.refine, "deviation lattice refinement factor")->capture_default_str();
    add_order(eqo);
    add_tie(eqo);
    add_overbid(eqo);
    bind(eqo, [&] { return eq_oracle(o); });

    auto* gef = app.add_subcommand("gef", "global envy-freeness");
    gef->require_subcommand(1);
    auto* gc = gef->add_subcommand("check", "envy-freeness of the outcome for given bids");
    add_instance(gc);
    gc->add_option("--bids", o.bids, "scalar bids")->required();
    add_tie(gc);
    bind(gc, [&] { return gef_check(o); });
    auto* gk = gef->add_subcommand("construct", "build a GEF efficient equilibrium (three bidders)");
    add_instance(gk);
    bind(gk, [&] { return gef_construct(o); });
    auto* gn = gef->add_subcommand("condition", "necessary and sufficient conditions");
    add_instance(gn);
    bind(gn, [&] { return gef_condition(o); });

    auto* vs = app.add_subcommand("vcg-support", "can scalar bids reproduce the VCG result");
    add_instance(vs);
    add_order(vs);
    add_overbid(vs);
    bind(vs, [&] { return vcg_support(o); });

    auto* bg = app.add_subcommand("badgen", "values whose VCG result no sale order supports");
    bg->add_option("--ctr", o.ctr_file, "CTR matrix JSON (3 x 2)")->required();
    bg->add_option("--v3", o.v3, "value of the third bidder")->capture_default_str();
    bind(bg, [&] { return badgen(o); });

    auto* psf = app.add_subcommand("psf", "price support forest");
    psf->require_subcommand(1);
    for (const char* w : {"build", "order", "bids", "verify"}) {
        auto* c = psf->add_subcommand(w, std::string("forest ") + w);
        add_instance(c);
        add_unsold(c);
        std::string which = w;
        bind(c, [&o, which] { return psf_cmd(o, which); });
    }

    auto* rep = app.add_subcommand("reproduce", "built-in examples");
    rep->add_option("target", o.target, "table1|table2|table3|gef-example|poa-example")->required();
    rep->add_option("--grid", o.grid, "lattice steps per bidder")->capture_default_str();
    rep->add_option("--refine", o.refine, "deviation lattice refinement factor")->capture_default_str();
    rep->add_option("--delta", o.delta, "delta for poa-example")->capture_default_str();
    bind(rep, [&] { return reproduce_cmd(o); });

    auto* rc = app.add_subcommand("random-check", "seeded randomized self-checks");
    rc->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    rc->add_option("--count", o.count, "instances per suite")->capture_default_str();
    bind(rc, [&] { return random_check(o); });

    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    if (json_flag && o.csv) {
        std::cerr << "error: --json and --csv are exclusive\n";
        return 1;
    }

    try {
        Result r = action();
        json report{{"command", command},
                    {"instance_digest", r.instance ? json(io::digest(*r.instance)) : json(nullptr)},
                    {"results", r.results},
                    {"verdict", r.verdict}};
        if (o.csv) io::flatten_csv(report, "", std::cout);
        else std::cout << report.dump(2) << "\n";
        return r.negative ? 2 : 0;
    } catch (const io::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
    }
    return 1;
}
