#include "posauc/builtin.hpp"
#include "posauc/io.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace posauc;
using builtin::q;
using io::json;

TEST(Json, RoundTrip) {
    for (const auto& inst : {builtin::indifferent_pair(), builtin::out_of_order(), builtin::envy_counterexample()}) {
        json j = io::instance_to_json(inst);
        Instance back = io::instance_from_json(json::parse(j.dump()));
        EXPECT_EQ(back.values, inst.values);
        EXPECT_EQ(back.ctr, inst.ctr);
        EXPECT_EQ(back.strict_positive_ctr, inst.strict_positive_ctr);
        EXPECT_EQ(io::digest(back), io::digest(inst));
    }
}

TEST(Json, AcceptsIntegersDecimalsAndFractions) {
    auto inst = io::instance_from_json(json::parse(R"({"values": [2, "0.5", "3/4"], "ctr": [["1"], ["1/2"], ["0.25"]]})"));
    EXPECT_EQ(inst.values, (std::vector<Rational>{2, q("1/2"), q("3/4")}));
    EXPECT_EQ(inst.alpha(2, 0), q("1/4"));
}

TEST(Json, RejectsFloats) {
    try {
        io::instance_from_json(json::parse(R"({"values": [0.5], "ctr": [["1"]]})"));
        FAIL();
    } catch (const io::InputError& e) {
        EXPECT_NE(std::string(e.what()).find("values[0]"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("floating-point"), std::string::npos);
    }
}

TEST(Json, RejectsUnknownAndMissingFields) {
    EXPECT_THROW(io::instance_from_json(json::parse(R"({"values": [1], "ctr": [["1"]], "x": 1})")), io::InputError);
    EXPECT_THROW(io::instance_from_json(json::parse(R"({"values": [1]})")), io::InputError);
    EXPECT_THROW(io::instance_from_json(json::parse(R"({"ctr": [["1"]]})")), io::InputError);
    EXPECT_THROW(io::instance_from_json(json::parse(R"([1, 2])")), io::InputError);
    EXPECT_THROW(io::instance_from_json(json::parse(R"({"values": ["x"], "ctr": [["1"]]})")), io::InputError);
}

TEST(Json, ValidationErrorsBecomeInputErrors) {
    // Increasing CTR row.
    EXPECT_THROW(io::instance_from_json(json::parse(R"({"values": [1], "ctr": [["1/2", "1"]]})")), io::InputError);
    // Negative value.
    EXPECT_THROW(io::instance_from_json(json::parse(R"({"values": ["-1"], "ctr": [["1"]]})")), io::InputError);
}

TEST(Json, SyntaxErrorReportsLineAndColumn) {
    try {
        io::parse_json_text("{\n  \"values\": [1,,2]\n}", "f.json");
        FAIL();
    } catch (const io::InputError& e) {
        EXPECT_EQ(std::string(e.what()).rfind("f.json:2:", 0), 0u) << e.what();
    }
}

TEST(Json, MissingFile) { EXPECT_THROW(io::load_instance("/nonexistent/instance.json"), io::InputError); }

TEST(Digest, DeterministicAndSensitive) {
    auto a = builtin::out_of_order(), b = builtin::out_of_order();
    EXPECT_EQ(io::digest(a), io::digest(b));
    EXPECT_EQ(io::digest(a).rfind("sha256:", 0), 0u);
    EXPECT_EQ(io::digest(a).size(), 7u + 64u);
    b.values[0] = 11;
    EXPECT_NE(io::digest(a), io::digest(b));
}

TEST(Digest, KnownVector) { EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"); }

TEST(Parse, Lists) {
    EXPECT_EQ(io::parse_rational_list("1,2/5,0.5", "b"), (std::vector<Rational>{1, q("2/5"), q("1/2")}));
    EXPECT_THROW(io::parse_rational_list("1,,2", "b"), io::InputError);
    EXPECT_EQ(io::parse_index_list("3,1,2", 3, "o"), (std::vector<std::size_t>{2, 0, 1}));
    EXPECT_THROW(io::parse_index_list("0,1", 3, "o"), io::InputError);
    EXPECT_THROW(io::parse_index_list("4", 3, "o"), io::InputError);
    EXPECT_THROW(io::parse_index_list("1x", 3, "o"), io::InputError);
    EXPECT_EQ(io::parse_matrix("1,0;2,3/2", "m"), (Matrix{{1, 0}, {2, q("3/2")}}));
}

TEST(Parse, Tiebreak) {
    auto p = io::parse_tiebreak("priority:3,1,2", 3);
    EXPECT_EQ(p.kind, TieBreakRule::Kind::Priority);
    EXPECT_EQ(p.priority, (std::vector<std::size_t>{2, 0, 1}));
    EXPECT_EQ(io::parse_tiebreak("click-ratio", 3).kind, TieBreakRule::Kind::HighestClickRatio);
    EXPECT_EQ(io::parse_tiebreak("click-ratio:2,1,3", 3).priority, (std::vector<std::size_t>{1, 0, 2}));
    EXPECT_EQ(io::parse_tiebreak("revenue-max", 3).kind, TieBreakRule::Kind::RevenueMax);
    EXPECT_THROW(io::parse_tiebreak("priority:1,1,2", 3), io::InputError);
    EXPECT_THROW(io::parse_tiebreak("coin", 3), io::InputError);
    EXPECT_THROW(io::parse_tiebreak("revenue-max:1,2,3", 3), io::InputError);
    json j = io::tiebreak_to_json(p);
    EXPECT_EQ(j["kind"], "priority");
    EXPECT_EQ(j["priority"], json::array({3, 1, 2}));
}

TEST(Csv, Flatten) {
    json j = {{"b", {{"x", "1/2"}, {"y", json::array({1, nullptr})}}}, {"a", true}, {"s", "p,q"}};
    std::ostringstream out;
    io::flatten_csv(j, "", out);
    EXPECT_EQ(out.str(), "a,true\nb.x,1/2\nb.y[1],1\nb.y[2],null\ns,\"p,q\"\n");
}

TEST(Outcome, OneBasedWithNullForUnsold) {
    Outcome o;
    o.allocation = {2, kNone};
    o.prices = {q("1/2"), 0};
    o.utilities = {0, 0, 1};
    json j = io::outcome_to_json(o);
    EXPECT_EQ(j["allocation"], json::array({3, nullptr}));
    EXPECT_EQ(j["prices"], json::array({"1/2", "0/1"}));
    EXPECT_EQ(j["revenue"], "1/2");
}
