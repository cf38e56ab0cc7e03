#include "posauc/core.hpp"
#include "posauc/envy.hpp"
#include "posauc/mechanisms.hpp"
#include "posauc/support.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace posauc;
using builtin::q;

namespace {

std::vector<std::size_t> shuffled(rnd::Rng& rng, std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    std::shuffle(p.begin(), p.end(), rng);
    return p;
}

BidProfile random_bids(rnd::Rng& rng, const Instance& inst, bool coarse) {
    BidProfile b(inst.n());
    for (auto& x : b) x = coarse ? Rational(rnd::uniform(rng, 0, 3)) : rnd::random_rational(rng, 0, 10);
    return b;
}

// Maximum revenue over every sale order and every resolution of top-bid ties.
Rational expressive_revenue(const ExpressiveBids& b, std::vector<bool> bidders, std::vector<bool> slots, bool rule) {
    Rational best = 0;
    for (std::size_t j = 0; j < slots.size(); ++j) {
        if (!slots[j]) continue;
        auto rest = slots;
        rest[j] = false;
        std::vector<Rational> xs;
        for (std::size_t i = 0; i < b.size(); ++i)
            if (bidders[i]) xs.push_back(b[i][j]);
        std::sort(xs.rbegin(), xs.rend());
        std::size_t nonzero = std::count_if(xs.begin(), xs.end(), [](const Rational& x) { return !x.is_zero(); });
        if (nonzero < (rule ? 2u : 1u)) {
            best = max(best, expressive_revenue(b, bidders, rest, rule));
            continue;
        }
        Rational price = xs.size() > 1 ? xs[1] : Rational(0);
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (!bidders[i] || b[i][j] != xs[0]) continue;
            auto left = bidders;
            left[i] = false;
            best = max(best, price + expressive_revenue(b, left, rest, rule));
        }
    }
    return best;
}

}  // namespace

TEST(IteratedSpa, IndifferentPairFavouringThird) {
    auto o = run_iterated_spa(builtin::indifferent_pair(), {1, q("2/5"), 1}, best_to_worst(2), TieBreakRule::by_priority({2, 0, 1}));
    EXPECT_EQ(o.allocation, (Allocation{0, 1}));
    EXPECT_EQ(o.prices, (std::vector<Rational>{q("2/5"), q("1/5")}));
    EXPECT_EQ(o.utilities, (std::vector<Rational>{q("3/5"), q("4/5"), 0}));
}

TEST(IteratedSpa, LoneBidderPaysNothing) {
    auto o = run_iterated_spa(make_instance({5}, {{q("1/2")}}), {3}, {0}, {});
    EXPECT_EQ(o.allocation, (Allocation{0}));
    EXPECT_EQ(o.prices[0], Rational(0));
}

TEST(IteratedSpa, OutOfOrderListedBids) {
    auto o = run_iterated_spa(builtin::out_of_order(), {10, 7, 7, 5}, {0, 2, 1}, TieBreakRule::by_priority({0, 1, 2, 3}));
    EXPECT_EQ(o.allocation, (Allocation{0, 1, 2}));
    EXPECT_EQ(o.prices, (std::vector<Rational>{7, 5, 1}));
}

TEST(IteratedSpa, RejectsBadInput) {
    auto inst = builtin::indifferent_pair();
    EXPECT_THROW(run_iterated_spa(inst, {1, 1}, best_to_worst(2), {}), std::invalid_argument);
    EXPECT_THROW(run_iterated_spa(inst, {1, -1, 1}, best_to_worst(2), {}), std::invalid_argument);
    EXPECT_THROW(run_iterated_spa(inst, {1, 1, 1}, {0, 0}, {}), std::invalid_argument);
    EXPECT_THROW(run_iterated_spa(inst, {1, 1, 1}, best_to_worst(2), TieBreakRule::by_priority({0, 1})), std::invalid_argument);
    EXPECT_THROW(run_iterated_spa(inst, {1, 1, 1}, best_to_worst(2), TieBreakRule::revenue_max()), std::invalid_argument);
    EXPECT_THROW(run_iterated_spa(builtin::out_of_order(), {1, 1, 1, 1}, best_to_worst(3), TieBreakRule::click_ratio()),
                 std::invalid_argument);
}

TEST(IteratedSpa, ClickRatioRule) {
    // Bidders 1 and 2 tie on slot 1; bidder 2 has ratio 2 > 1.
    Instance inst = make_instance({1, 1}, {{1, 1}, {1, q("1/2")}});
    auto o = run_iterated_spa(inst, {1, 1}, best_to_worst(2), TieBreakRule::click_ratio());
    EXPECT_EQ(o.allocation, (Allocation{1, 0}));
    // Equal ratios fall back to the priority order.
    Instance flat = make_instance({1, 1}, {{1, 1}, {1, 1}});
    EXPECT_EQ(run_iterated_spa(flat, {1, 1}, best_to_worst(2), TieBreakRule::click_ratio({1, 0})).allocation, (Allocation{1, 0}));
}

TEST(IteratedSpa, MatchesNaiveSimulation) {
    rnd::Rng rng(21);
    for (int t = 0; t < 3000; ++t) {
        std::size_t n = 1 + t % 6, m = 1 + (t / 6) % n;
        Instance inst = rnd::random_instance(rng, n, m, true);
        auto bids = random_bids(rng, inst, t % 3 == 0);
        auto order = shuffled(rng, m), prio = shuffled(rng, n);
        auto got = run_iterated_spa(inst, bids, order, TieBreakRule::by_priority(prio));
        EXPECT_EQ(got, oracle::spa(inst, bids, order, oracle::rank_of(prio)));
    }
}

TEST(IteratedSpa, RemovalInvariant) {
    rnd::Rng rng(22);
    for (int t = 0; t < 1000; ++t) {
        std::size_t n = 2 + t % 5, m = 1 + t % n;
        Instance inst = rnd::random_instance(rng, n, m);
        auto bids = random_bids(rng, inst, t % 2 == 0);
        auto order = shuffled(rng, m);
        auto o = run_iterated_spa(inst, bids, order, {});
        std::vector<bool> taken(n, false);
        for (std::size_t j : order) {
            std::size_t w = o.allocation[j];
            ASSERT_NE(w, kNone);
            ASSERT_FALSE(taken[w]);
            Rational second = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (!taken[i] && i != w) {
                    EXPECT_LE(inst.alpha(i, j) * bids[i], inst.alpha(w, j) * bids[w]);
                    second = max(second, inst.alpha(i, j) * bids[i]);
                }
            EXPECT_EQ(o.prices[j], second);
            taken[w] = true;
        }
    }
}

// On separable instances the sequential auction is GSP: rank by beta*b and
// pay mu_j times the next score.
TEST(IteratedSpa, SeparableReducesToGsp) {
    rnd::Rng rng(23);
    for (int t = 0; t < 500; ++t) {
        std::size_t n = 2 + t % 5, m = 1 + t % n;
        Instance inst = rnd::random_separable(rng, n, m);
        auto d = separable_decomposition(inst);
        ASSERT_TRUE(d);
        auto bids = random_bids(rng, inst, t % 2 == 0);
        std::vector<std::size_t> rank(n);
        std::iota(rank.begin(), rank.end(), std::size_t{0});
        std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
            return d->ad_effects[b] * bids[b] < d->ad_effects[a] * bids[a];
        });
        auto o = run_iterated_spa(inst, bids, best_to_worst(m), {});
        for (std::size_t j = 0; j < m; ++j) {
            EXPECT_EQ(o.allocation[j], rank[j]);
            Rational next = j + 1 < n ? d->ad_effects[rank[j + 1]] * bids[rank[j + 1]] : Rational(0);
            EXPECT_EQ(o.prices[j], d->slot_effects[j] * next);
        }
    }
}

TEST(IteratedSpa, OverbiddingWeaklyDominated) {
    rnd::Rng rng(24);
    for (int t = 0; t < 300; ++t) {
        std::size_t n = 2 + t % 4, m = 1 + t % std::min<std::size_t>(n, 3);
        Instance inst = rnd::random_instance(rng, n, m);
        auto bids = random_bids(rng, inst, false);
        auto tie = TieBreakRule::by_priority(shuffled(rng, n));
        std::size_t i = rnd::uniform(rng, 0, n - 1);
        Rational best = -1;
        for (int k = 0; k <= 60; ++k) {
            bids[i] = inst.values[i] * Rational(k, 60);
            best = max(best, run_iterated_spa(inst, bids, best_to_worst(m), tie).utilities[i]);
        }
        // Also every other bid's score level, scaled to i's slot-1 CTR.
        for (std::size_t k = 0; k < n; ++k)
            if (k != i) {
                for (std::size_t j = 0; j < m; ++j) {
                    Rational x = inst.alpha(k, j) * bids[k] / inst.alpha(i, j);
                    if (x <= inst.values[i]) {
                        bids[i] = x;
                        best = max(best, run_iterated_spa(inst, bids, best_to_worst(m), tie).utilities[i]);
                    }
                }
            }
        for (int k = 0; k < 10; ++k) {
            bids[i] = inst.values[i] + rnd::random_rational(rng, 0, 5) + Rational(1, 100);
            EXPECT_LE(run_iterated_spa(inst, bids, best_to_worst(m), tie).utilities[i], best);
        }
    }
}

TEST(Vcg, OutOfOrderPrices) {
    auto o = vcg_result(builtin::out_of_order());
    EXPECT_EQ(o.allocation, (Allocation{0, 1, 2}));
    EXPECT_EQ(o.prices, (std::vector<Rational>{7, 5, 1}));
}

TEST(Vcg, LoneBidderPaysNothing) {
    auto o = vcg_result(make_instance({5}, {{1}}));
    EXPECT_EQ(o.allocation, (Allocation{0}));
    EXPECT_EQ(o.prices[0], Rational(0));
}

TEST(Vcg, IndifferentPairPrices) {
    Instance inst = builtin::indifferent_pair();
    auto o = vcg_result(inst);
    EXPECT_EQ(o, oracle::vcg(inst, inst.values));
    EXPECT_EQ(o.allocation, (Allocation{0, 1}));
    // Each unit-CTR winner displaces bidder 3 from its own slot-1 score 4/5.
    EXPECT_EQ(o.prices, (std::vector<Rational>{q("4/5"), q("4/5")}));
}

TEST(Vcg, ZeroValuesZeroPrices) {
    auto o = vcg_result(make_instance({0, 0, 0}, {{1, q("1/2")}, {1, q("1/3")}, {q("1/2"), q("1/4")}}));
    for (const auto& p : o.prices) EXPECT_EQ(p, Rational(0));
}

TEST(Vcg, EnvyExampleAllocation) { EXPECT_EQ(vcg_result(builtin::envy_counterexample()).allocation, (Allocation{0, 1})); }

TEST(Vcg, MatchesClarkeEnumeration) {
    rnd::Rng rng(25);
    for (int t = 0; t < 600; ++t) {
        std::size_t n = 1 + t % 6, m = 1 + (t / 6) % n;
        Instance inst = t % 3 ? rnd::random_instance(rng, n, m, true) : rnd::random_coarse(rng, std::max<std::size_t>(2, n));
        auto bids = t % 2 ? inst.values : random_bids(rng, inst, t % 4 == 0);
        EXPECT_EQ(run_vcg(inst, bids), oracle::vcg(inst, bids));
    }
}

TEST(Vcg, ResultIsEnvyFree) {
    rnd::Rng rng(26);
    for (int t = 0; t < 600; ++t) {
        std::size_t n = 1 + t % 6, m = 1 + (t / 6) % n;
        Instance inst = rnd::random_instance(rng, n, m, t % 2 == 0);
        auto o = vcg_result(inst);
        EXPECT_TRUE(oracle::envy_free(inst, o));
        EXPECT_TRUE(is_globally_envy_free(inst, o.allocation, o.prices).envy_free);
    }
}

TEST(Expressive, PsfBidsOnOutOfOrder) {
    Instance p = pad_to_square(builtin::out_of_order());
    ExpressiveBids b(4, std::vector<Rational>(4));
    b[0][0] = 10, b[0][2] = 1, b[1][1] = 6, b[1][0] = 7, b[2][2] = 4, b[3][3] = 0, b[3][1] = 5;
    auto r = run_expressive_auction(p, b);
    EXPECT_EQ(r.order, (OrderOfSale{2, 0, 1, 3}));
    EXPECT_EQ(r.outcome.prices, (std::vector<Rational>{7, 5, 1, 0}));
    EXPECT_EQ(r.outcome.allocation, (Allocation{0, 1, 2, kNone}));
}

TEST(Expressive, AllZeroSellsNothing) {
    auto r = run_expressive_auction(make_instance({1, 1}, {{1, 1}, {1, 1}}), ExpressiveBids(2, std::vector<Rational>(2)));
    EXPECT_EQ(r.outcome.allocation, (Allocation{kNone, kNone}));
    EXPECT_EQ(r.outcome.revenue(), Rational(0));
}

TEST(Expressive, PlainSecondPrice) {
    auto r = run_expressive_auction(make_instance({5, 3}, {{1}, {1}}), {{5}, {3}});
    EXPECT_EQ(r.outcome.allocation, (Allocation{0}));
    EXPECT_EQ(r.outcome.prices[0], Rational(3));
}

TEST(Expressive, LoneNonzeroBid) {
    Instance inst = make_instance({5, 3}, {{1}, {1}});
    EXPECT_EQ(run_expressive_auction(inst, {{5}, {0}}).outcome.allocation, (Allocation{kNone}));
    ExpressiveOptions off;
    off.unsold_rule = false;
    auto r = run_expressive_auction(inst, {{5}, {0}}, off);
    EXPECT_EQ(r.outcome.allocation, (Allocation{0}));
    EXPECT_EQ(r.outcome.prices[0], Rational(0));
}

TEST(Expressive, CapacityLimit) {
    rnd::Rng rng(1);
    Instance big = rnd::random_instance(rng, 9, 2);
    EXPECT_THROW(run_expressive_auction(big, ExpressiveBids(9, std::vector<Rational>(2))), std::length_error);
}

TEST(Expressive, RevenueMatchesExhaustiveRecursion) {
    rnd::Rng rng(27);
    for (int t = 0; t < 400; ++t) {
        std::size_t n = 1 + t % 5, m = 1 + (t / 5) % n;
        Instance inst = rnd::random_instance(rng, n, m, true);
        ExpressiveBids b(n, std::vector<Rational>(m));
        for (auto& row : b)
            for (auto& x : row) x = rnd::uniform(rng, 0, 2) ? Rational(rnd::uniform(rng, 0, 4)) : Rational(0);
        ExpressiveOptions opt;
        opt.unsold_rule = t % 2 == 0;
        auto r = run_expressive_auction(inst, b, opt);
        EXPECT_EQ(r.outcome.revenue(), expressive_revenue(b, std::vector<bool>(n, true), std::vector<bool>(m, true), opt.unsold_rule));
        // Replay the reported order: each winner holds a top bid at its sale.
        ASSERT_EQ(r.order.size(), m);
        std::vector<bool> gone(n, false);
        for (std::size_t j : r.order) {
            std::size_t w = r.outcome.allocation[j];
            std::vector<Rational> xs;
            for (std::size_t i = 0; i < n; ++i)
                if (!gone[i]) xs.push_back(b[i][j]);
            std::sort(xs.rbegin(), xs.rend());
            if (w == kNone) {
                EXPECT_EQ(r.outcome.prices[j], Rational(0));
                continue;
            }
            EXPECT_EQ(b[w][j], xs[0]);
            EXPECT_EQ(r.outcome.prices[j], xs.size() > 1 ? xs[1] : Rational(0));
            gone[w] = true;
        }
    }
}
