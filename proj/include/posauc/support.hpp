#pragma once

#include "posauc/mechanisms.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <vector>

namespace posauc {

// Adds zero-CTR virtual slots until there are as many slots as bidders.
inline Instance pad_to_square(const Instance& inst) {
    Instance out = inst;
    for (auto& row : out.ctr) row.resize(inst.n(), Rational(0));
    out.strict_positive_ctr = false;
    return out;
}

// Nodes are slots; the node's bidder is the VCG winner of that slot. Edge
// (i, j) when the holder of i is indifferent between its slot and slot j.
struct IndifferenceGraph {
    std::size_t size = 0;
    Allocation holder;             // holder[slot]
    std::vector<Rational> prices;  // per slot
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // sorted

    bool has_edge(std::size_t i, std::size_t j) const {
        return std::binary_search(edges.begin(), edges.end(), std::pair{i, j});
    }
};

inline IndifferenceGraph build_indifference_graph(const Instance& inst, const Outcome& vcg) {
    const std::size_t n = inst.n();
    if (inst.m() != n) throw std::invalid_argument("indifference graph: instance must be square (pad first)");
    check_allocation(inst, vcg.allocation);
    if (vcg.prices.size() != n) throw std::invalid_argument("indifference graph: wrong price count");
    IndifferenceGraph g;
    g.size = n;
    g.holder = vcg.allocation;
    g.prices = vcg.prices;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t w = g.holder[i];
        if (w == kNone) throw std::invalid_argument("indifference graph: every slot needs a holder");
        Rational own = inst.value(w, i) - g.prices[i];
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && inst.value(w, j) - g.prices[j] == own) g.edges.push_back({i, j});
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

struct PriceSupportForest {
    std::vector<std::size_t> parent;  // kNone for roots
    std::vector<std::size_t> depth;
    std::vector<std::size_t> roots;
};

// Breadth-first search from every zero-price node; each other node takes the
// lowest-index supporter one level up. Unreachable nodes mean the prices are
// not minimum envy-free prices, so that is treated as a bug.
inline PriceSupportForest build_psf(const IndifferenceGraph& g) {
    const std::size_t n = g.size;
    PriceSupportForest f;
    f.parent.assign(n, kNone);
    f.depth.assign(n, kNone);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (g.prices[i].is_zero()) {
            f.depth[i] = 0;
            f.roots.push_back(i);
            queue.push_back(i);
        }
    std::vector<std::vector<std::size_t>> out(n);
    for (auto [i, j] : g.edges) out[i].push_back(j);
    while (!queue.empty()) {
        std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t v : out[u])
            if (f.depth[v] == kNone) {
                f.depth[v] = f.depth[u] + 1;
                queue.push_back(v);
            }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (f.depth[v] == kNone)
            throw std::logic_error("price support forest: slot " + std::to_string(v + 1) +
                                   " is not reachable from a zero-price slot");
        if (f.depth[v] == 0) continue;
        for (std::size_t u = 0; u < n && f.parent[v] == kNone; ++u)
            if (f.depth[u] + 1 == f.depth[v] && g.has_edge(u, v)) f.parent[v] = u;
    }
    return f;
}

// Children before parents: deepest layer first, increasing index within a layer.
inline OrderOfSale pso_from_psf(const PriceSupportForest& f) {
    OrderOfSale order(f.parent.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f.depth[a] > f.depth[b]; });
    return order;
}

// Holders bid their value on their own slot and each supporter bids the
// supported slot's price.
inline ExpressiveBids expressive_equilibrium_bids(const Instance& inst, const PriceSupportForest& f, const Outcome& vcg) {
    const std::size_t n = inst.n();
    if (inst.m() != n) throw std::invalid_argument("expressive bids: instance must be square (pad first)");
    ExpressiveBids b(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) b[vcg.allocation[i]][i] = inst.value(vcg.allocation[i], i);
    for (std::size_t j = 0; j < n; ++j)
        if (f.parent[j] != kNone) b[vcg.allocation[f.parent[j]]][j] = vcg.prices[j];
    return b;
}

// Slots with positive VCG price must go to the VCG winner at that price;
// zero-price slots may instead stay unsold.
inline bool matches_vcg_up_to_unsold(const Outcome& got, const Outcome& vcg) {
    if (got.allocation.size() != vcg.allocation.size()) return false;
    for (std::size_t j = 0; j < got.allocation.size(); ++j) {
        if (got.prices[j] != vcg.prices[j]) return false;
        if (got.allocation[j] == vcg.allocation[j]) continue;
        if (!(vcg.prices[j].is_zero() && got.allocation[j] == kNone)) return false;
    }
    return true;
}

struct DeviationCheck {
    bool ok = true;
    std::size_t rows_tried = 0;
    std::vector<Rational> row;  // offending bid row
    std::size_t slot = kNone;
    Rational price;
    Rational utility;
    // Rows that raise the bidder's utility above the current outcome without
    // beating any VCG price. This happens when the bidder's own zero-price
    // slot went unsold, so its baseline is below its VCG utility.
    bool utility_gain = false;
    std::vector<Rational> gain_row;
    Rational gain_utility;
};

// Tries a finite set of bid rows for `bidder` and reports any that wins a
// slot below its VCG price; utility gains are recorded separately. Per slot the
// candidates are 0, the others' bids, midpoints, one above the maximum, and the
// bidder's own value. Small products are tried in full; otherwise rows with at
// most two nonzero entries and single-entry changes of the current row.
inline DeviationCheck verify_no_profitable_deviation(const Instance& inst, const ExpressiveBids& bids, std::size_t bidder,
                                                     const ExpressiveOptions& opt = {}, std::size_t full_limit = 2048) {
    const std::size_t n = inst.n(), m = inst.m();
    if (bidder >= n) throw std::invalid_argument("deviation check: bidder out of range");
    Outcome vcg = vcg_result(inst);
    auto base = run_expressive_auction(inst, bids, opt).outcome;
    const Rational current = base.utilities[bidder];

    std::vector<std::vector<Rational>> cand(m);
    for (std::size_t j = 0; j < m; ++j) {
        std::set<Rational> pts{Rational(0), inst.value(bidder, j)};
        for (std::size_t i = 0; i < n; ++i)
            if (i != bidder) pts.insert(bids[i][j]);
        std::vector<Rational> v(pts.begin(), pts.end());
        for (std::size_t t = 0; t + 1 < v.size(); ++t) pts.insert((v[t] + v[t + 1]) / Rational(2));
        pts.insert(v.back() + Rational(1));
        cand[j].assign(pts.begin(), pts.end());  // cand[j][0] == 0
    }

    DeviationCheck res;
    ExpressiveBids trial = bids;
    auto test = [&](const std::vector<Rational>& row) {
        ++res.rows_tried;
        trial[bidder] = row;
        auto out = run_expressive_auction(inst, trial, opt).outcome;
        if (!res.utility_gain && current < out.utilities[bidder]) {
            res.utility_gain = true;
            res.gain_row = row;
            res.gain_utility = out.utilities[bidder];
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (out.allocation[j] != bidder) continue;
            if (out.prices[j] < vcg.prices[j]) {
                res.ok = false;
                res.row = row;
                res.slot = j;
                res.price = out.prices[j];
                res.utility = out.utilities[bidder];
                return false;
            }
        }
        return true;
    };

    std::uint64_t product = 1;
    for (const auto& c : cand) {
        product *= c.size();
        if (product > full_limit) break;
    }
    std::vector<Rational> row(m);
    if (product <= full_limit) {
        std::vector<std::size_t> idx(m, 0);
        for (std::uint64_t t = 0; t < product; ++t) {
            for (std::size_t j = 0; j < m; ++j) row[j] = cand[j][idx[j]];
            if (!test(row)) return res;
            for (std::size_t j = m; j-- > 0;) {
                if (++idx[j] < cand[j].size()) break;
                idx[j] = 0;
            }
        }
        return res;
    }
    std::fill(row.begin(), row.end(), Rational(0));
    if (!test(row)) return res;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t x = 1; x < cand[a].size(); ++x) {
            row[a] = cand[a][x];
            if (!test(row)) return res;
            for (std::size_t b = a + 1; b < m; ++b)
                for (std::size_t y = 1; y < cand[b].size(); ++y) {
                    row[b] = cand[b][y];
                    if (!test(row)) return res;
                    row[b] = 0;
                }
            row[a] = 0;
        }
    row = bids[bidder];
    for (std::size_t a = 0; a < m; ++a) {
        Rational keep = row[a];
        for (const auto& x : cand[a]) {
            if (x == keep) continue;
            row[a] = x;
            if (!test(row)) return res;
        }
        row[a] = keep;
    }
    return res;
}

struct PsfPipeline {
    Instance padded;
    Outcome vcg;
    IndifferenceGraph graph;
    PriceSupportForest forest;
    OrderOfSale order;
    ExpressiveBids bids;
    ExpressiveOutcome auction;
    bool reproduces_vcg = false;
    bool order_is_revenue_choice = false;  // the auction's chosen order equals the forest order
    std::vector<DeviationCheck> deviations;
    bool all_deviations_ok = true;
    bool any_utility_gain = false;
};

inline PsfPipeline run_psf_pipeline(const Instance& inst, bool check_deviations = true,
                                    const ExpressiveOptions& opt = {}) {
    PsfPipeline p;
    p.padded = pad_to_square(inst);
    p.vcg = vcg_result(p.padded);
    p.graph = build_indifference_graph(p.padded, p.vcg);
    p.forest = build_psf(p.graph);
    p.order = pso_from_psf(p.forest);
    p.bids = expressive_equilibrium_bids(p.padded, p.forest, p.vcg);
    p.auction = run_expressive_auction(p.padded, p.bids, opt);
    p.reproduces_vcg = matches_vcg_up_to_unsold(p.auction.outcome, p.vcg);
    p.order_is_revenue_choice = p.auction.order == p.order;
    if (check_deviations)
        for (std::size_t k = 0; k < p.padded.n(); ++k) {
            p.deviations.push_back(verify_no_profitable_deviation(p.padded, p.bids, k, opt));
            p.all_deviations_ok = p.all_deviations_ok && p.deviations.back().ok;
            p.any_utility_gain = p.any_utility_gain || p.deviations.back().utility_gain;
        }
    return p;
}

}  // namespace posauc
