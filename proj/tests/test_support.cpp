#include "posauc/support.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace posauc;
using builtin::q;

namespace {

using Edge = std::pair<std::size_t, std::size_t>;

}  // namespace

TEST(Padding, AddsZeroSlots) {
    auto p = pad_to_square(builtin::out_of_order());
    ASSERT_EQ(p.m(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(p.alpha(i, 3).is_zero());
    EXPECT_FALSE(p.strict_positive_ctr);
    auto v = vcg_result(p), w = vcg_result(builtin::out_of_order());
    EXPECT_EQ(v.prices[3], Rational(0));
    for (std::size_t j = 0; j < 3; ++j) {
        EXPECT_EQ(v.allocation[j], w.allocation[j]);
        EXPECT_EQ(v.prices[j], w.prices[j]);
    }
}

TEST(Padding, SquareUnchanged) {
    Instance inst = make_instance({2, 1}, {{1, q("1/2")}, {1, q("1/3")}});
    auto p = pad_to_square(inst);
    EXPECT_EQ(p.ctr, inst.ctr);
}

TEST(Graph, FourBidderExample) {
    auto p = pad_to_square(builtin::out_of_order());
    auto v = vcg_result(p);
    EXPECT_EQ(v.allocation, (Allocation{0, 1, 2, 3}));
    EXPECT_EQ(v.prices, (std::vector<Rational>{7, 5, 1, 0}));
    auto g = build_indifference_graph(p, v);
    EXPECT_EQ(g.edges, (std::vector<Edge>{{0, 2}, {1, 0}, {3, 1}}));
}

TEST(Graph, EdgesMeanIndifference) {
    rnd::Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        std::size_t n = 1 + t % 5;
        auto p = pad_to_square(rnd::random_instance(rng, n, 1 + t % n, true));
        auto v = vcg_result(p);
        auto g = build_indifference_graph(p, v);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                bool indiff = p.value(v.allocation[i], i) - v.prices[i] == p.value(v.allocation[i], j) - v.prices[j];
                EXPECT_EQ(g.has_edge(i, j), indiff);
            }
    }
}

TEST(Graph, RejectsNonSquare) {
    auto inst = builtin::out_of_order();
    EXPECT_THROW(build_indifference_graph(inst, vcg_result(inst)), std::invalid_argument);
}

TEST(Forest, FourBidderChain) {
    auto p = pad_to_square(builtin::out_of_order());
    auto v = vcg_result(p);
    auto f = build_psf(build_indifference_graph(p, v));
    EXPECT_EQ(f.roots, (std::vector<std::size_t>{3}));
    EXPECT_EQ(f.parent, (std::vector<std::size_t>{1, 3, 0, kNone}));
    EXPECT_EQ(f.depth, (std::vector<std::size_t>{2, 1, 3, 0}));
    EXPECT_EQ(pso_from_psf(f), (OrderOfSale{2, 0, 1, 3}));
    auto b = expressive_equilibrium_bids(p, f, v);
    ExpressiveBids want{{10, 0, 1, 0}, {7, 6, 0, 0}, {0, 0, 4, 0}, {0, 5, 0, 0}};
    EXPECT_EQ(b, want);
}

TEST(Forest, SingleBidder) {
    Instance inst = make_instance({3}, {{q("1/2")}});
    auto pl = run_psf_pipeline(inst);
    EXPECT_EQ(pl.forest.roots, (std::vector<std::size_t>{0}));
    EXPECT_EQ(pl.order, (OrderOfSale{0}));
    EXPECT_TRUE(pl.reproduces_vcg);
    EXPECT_TRUE(pl.all_deviations_ok);
}

TEST(Forest, AllZeroPricesAreRoots) {
    Instance inst = make_instance({1, 0, 0}, {{1, q("1/2"), q("1/4")}, {1, q("1/2"), q("1/4")}, {1, q("1/2"), q("1/4")}});
    auto pl = run_psf_pipeline(inst);
    EXPECT_EQ(pl.vcg.prices, (std::vector<Rational>{0, 0, 0}));
    EXPECT_EQ(pl.forest.roots.size(), 3u);
    EXPECT_EQ(pl.forest.parent, (std::vector<std::size_t>{kNone, kNone, kNone}));
    EXPECT_TRUE(pl.reproduces_vcg);
    EXPECT_TRUE(pl.all_deviations_ok);
}

TEST(Forest, Star) {
    // Identical CTRs for the low bidders make every higher slot point at the last.
    Instance inst = make_instance({4, 3, 2, 1}, {{1, q("1/2"), q("1/4")}, {1, q("1/2"), q("1/4")},
                                                 {1, q("1/2"), q("1/4")}, {1, q("1/2"), q("1/4")}});
    auto pl = run_psf_pipeline(inst);
    for (std::size_t j = 0; j < 4; ++j)
        if (pl.forest.parent[j] != kNone) {
            EXPECT_TRUE(pl.graph.has_edge(pl.forest.parent[j], j));
        }
    EXPECT_TRUE(pl.reproduces_vcg);
    EXPECT_TRUE(pl.all_deviations_ok);
}

TEST(Forest, ParentsAreEdgesOneLevelUp) {
    rnd::Rng rng(9);
    for (int t = 0; t < 300; ++t) {
        std::size_t n = 1 + t % 6;
        auto p = pad_to_square(rnd::random_instance(rng, n, 1 + t % n, true));
        auto v = vcg_result(p);
        auto g = build_indifference_graph(p, v);
        auto f = build_psf(g);
        for (std::size_t j = 0; j < n; ++j) {
            if (v.prices[j].is_zero()) {
                EXPECT_EQ(f.parent[j], kNone);
                EXPECT_EQ(f.depth[j], 0u);
                continue;
            }
            ASSERT_NE(f.parent[j], kNone);
            EXPECT_TRUE(g.has_edge(f.parent[j], j));
            EXPECT_EQ(f.depth[f.parent[j]] + 1, f.depth[j]);
        }
        auto order = pso_from_psf(f);
        std::vector<std::size_t> pos(n);
        for (std::size_t k = 0; k < n; ++k) pos[order[k]] = k;
        for (std::size_t j = 0; j < n; ++j)
            if (f.parent[j] != kNone) {
                EXPECT_LT(pos[j], pos[f.parent[j]]);
            }
    }
}

TEST(Deviation, FourBidderExampleHolds) {
    auto pl = run_psf_pipeline(builtin::out_of_order());
    EXPECT_TRUE(pl.reproduces_vcg);
    EXPECT_TRUE(pl.order_is_revenue_choice);
    EXPECT_EQ(pl.auction.outcome.prices, (std::vector<Rational>{7, 5, 1, 0}));
    EXPECT_TRUE(pl.all_deviations_ok);
    for (const auto& d : pl.deviations) EXPECT_GT(d.rows_tried, 0u);
}

// Without the unsold rule a lone bid on the zero-price slot buys it for
// nothing, which the deviation search must find.
TEST(Deviation, UnsoldRuleOffIsExploitable) {
    ExpressiveOptions off;
    off.unsold_rule = false;
    auto pl = run_psf_pipeline(builtin::out_of_order(), true, off);
    EXPECT_FALSE(pl.all_deviations_ok);
}

TEST(Deviation, CatchesUnderpricingSupporter) {
    auto p = pad_to_square(builtin::out_of_order());
    auto v = vcg_result(p);
    auto f = build_psf(build_indifference_graph(p, v));
    auto b = expressive_equilibrium_bids(p, f, v);
    b[1][0] = 6;  // slot 1's supporter now prices it below 7
    auto d = verify_no_profitable_deviation(p, b, 0);
    EXPECT_FALSE(d.ok);
    EXPECT_EQ(d.slot, 0u);
    EXPECT_LT(d.price, Rational(7));
}

// A zero-price slot whose holder is its only bidder goes unsold, so that
// holder can gain by buying another slot at or above its VCG price.
TEST(Deviation, UnsoldHolderGainsAtVcgPrices) {
    Instance inst = make_instance({q("29/30"), q("2/3"), 5, 4}, {{q("2/3"), q("1/2"), q("2/7"), q("2/7")},
                                                                 {1, q("6/11"), q("1/3"), 0},
                                                                 {1, q("13/14"), q("1/2"), q("4/13")},
                                                                 {q("2/3"), q("7/11"), q("2/11"), q("2/13")}});
    auto pl = run_psf_pipeline(inst);
    EXPECT_TRUE(pl.reproduces_vcg);
    EXPECT_TRUE(pl.all_deviations_ok);
    EXPECT_EQ(pl.auction.outcome.allocation[3], kNone);
    ASSERT_TRUE(pl.deviations[0].utility_gain);
    EXPECT_GT(pl.deviations[0].gain_utility, Rational(0));
}

TEST(Pipeline, RandomInstancesReproduceVcg) {
    rnd::Rng rng(3);
    for (int t = 0; t < 150; ++t) {
        std::size_t n = 1 + t % 5;
        Instance inst = rnd::random_instance(rng, n, 1 + t % n, true);
        auto pl = run_psf_pipeline(inst, n <= 4);
        auto ref = oracle::vcg(pl.padded, pl.padded.values);
        ASSERT_TRUE(pl.reproduces_vcg) << "trial " << t;
        EXPECT_EQ(pl.vcg.prices, ref.prices);
        EXPECT_EQ(pl.auction.outcome.revenue(), ref.revenue());
        if (n <= 4) {
            EXPECT_TRUE(pl.all_deviations_ok) << "trial " << t;
        }
    }
}

TEST(Pipeline, MatchesUpToUnsold) {
    Outcome vcg;
    vcg.allocation = {0, 1};
    vcg.prices = {2, 0};
    Outcome got = vcg;
    got.allocation[1] = kNone;
    EXPECT_TRUE(matches_vcg_up_to_unsold(got, vcg));
    vcg.prices[1] = 1;
    got.prices[1] = 1;
    EXPECT_FALSE(matches_vcg_up_to_unsold(got, vcg));
}
