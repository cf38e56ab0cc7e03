#pragma once

#include "posauc/instance.hpp"

namespace posauc::builtin {

inline Rational q(const char* s) { return Rational::parse(s); }

// Two unit-CTR bidders and a third with a steeper click drop.
inline Instance indifferent_pair() {
    return make_instance({q("1"), q("1"), q("2")},
                         {{q("1"), q("1")}, {q("1"), q("1")}, {q("2/5"), q("1/5")}});
}

// Four bidders, three slots, zero CTR entries; values are free.
inline Instance tie_rule_family(const std::vector<Rational>& values) {
    return make_instance(values, {{q("1"), q("1"), q("0")},
                                  {q("1"), q("1"), q("0")},
                                  {q("1"), q("1/2"), q("1/2")},
                                  {q("1"), q("1/2"), q("1/2")}});
}

// Four bidders, three slots; VCG prices (7,5,1) need an out-of-order sale.
inline Instance out_of_order() {
    return make_instance({q("10"), q("8"), q("8"), q("5")}, {{q("1"), q("2/5"), q("2/5")},
                                                             {q("1"), q("3/4"), q("1/7")},
                                                             {q("1"), q("1/2"), q("1/2")},
                                                             {q("1"), q("1"), q("0")}});
}

// Three bidders for which no efficient envy-free equilibrium exists.
inline Instance envy_counterexample() {
    return make_instance({q("1"), q("1"), q("1")},
                         {{q("9/10"), q("1/2")}, {q("1/2"), q("2/5")}, {q("3/5"), q("1/10")}}, true);
}

// Two-bidder family whose price of anarchy is (2 - 2d) / (1 + d).
inline Instance anarchy_family(const Rational& delta, std::size_t extra_zero_bidders = 0) {
    if (!(Rational(0) < delta) || !(delta < Rational(1, 3)))
        throw std::invalid_argument("anarchy_family: delta must lie in (0, 1/3)");
    std::vector<Rational> v{1, 1};
    Matrix a{{Rational(1) - delta, delta}, {Rational(1), Rational(1) - delta}};
    for (std::size_t k = 0; k < extra_zero_bidders; ++k) {
        v.push_back(0);
        a.push_back({Rational(1), Rational(1)});
    }
    return make_instance(std::move(v), std::move(a));
}

}  // namespace posauc::builtin
