#pragma once

#include "posauc/rational.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace posauc {

// a . x <= b, or a . x < b when strict.
struct LinearConstraint {
    std::vector<Rational> a;
    bool strict = false;
    Rational b;
    std::string label;
};

enum class Rel { Le, Lt, Ge, Gt, Eq };

class ConstraintSystem {
public:
    explicit ConstraintSystem(std::size_t vars = 0) : vars_(vars) {}

    std::size_t vars() const { return vars_; }
    const std::vector<LinearConstraint>& rows() const { return rows_; }

    void add(std::vector<Rational> a, Rel rel, Rational b, std::string label = {}) {
        if (a.size() != vars_) throw std::invalid_argument("constraint: wrong coefficient count");
        switch (rel) {
        case Rel::Le: rows_.push_back({std::move(a), false, std::move(b), std::move(label)}); break;
        case Rel::Lt: rows_.push_back({std::move(a), true, std::move(b), std::move(label)}); break;
        case Rel::Ge:
        case Rel::Gt:
            for (auto& x : a) x = -x;
            rows_.push_back({std::move(a), rel == Rel::Gt, -b, std::move(label)});
            break;
        case Rel::Eq:
            add(a, Rel::Le, b, label);
            add(std::move(a), Rel::Ge, std::move(b), std::move(label));
            break;
        }
    }

    // Convenience for sparse rows: {(var, coeff), ...} rel b.
    void add_terms(const std::vector<std::pair<std::size_t, Rational>>& terms, Rel rel, Rational b,
                   std::string label = {}) {
        std::vector<Rational> a(vars_);
        for (const auto& [v, c] : terms) a.at(v) += c;
        add(std::move(a), rel, std::move(b), std::move(label));
    }

    void append(const ConstraintSystem& o) {
        if (o.vars_ != vars_) throw std::invalid_argument("constraint: dimension mismatch");
        rows_.insert(rows_.end(), o.rows_.begin(), o.rows_.end());
    }

    bool satisfied_by(const std::vector<Rational>& x) const {
        for (const auto& r : rows_) {
            Rational lhs;
            for (std::size_t k = 0; k < vars_; ++k) lhs += r.a[k] * x[k];
            if (r.strict ? !(lhs < r.b) : !(lhs <= r.b)) return false;
        }
        return true;
    }

private:
    std::size_t vars_;
    std::vector<LinearConstraint> rows_;
};

struct FmResult {
    bool feasible = false;
    std::vector<Rational> witness;
};

namespace detail {

struct FmRow {
    std::vector<Rational> a;
    bool strict;
    Rational b;
};

// Scale by the first nonzero coefficient's magnitude and merge rows with
// identical left sides, keeping the tightest bound. Returns false when a
// constant row is violated.
inline bool fm_normalize(std::vector<FmRow>& rows) {
    std::map<std::vector<Rational>, std::pair<Rational, bool>> best;
    for (auto& r : rows) {
        auto nz = std::find_if(r.a.begin(), r.a.end(), [](const Rational& x) { return !x.is_zero(); });
        if (nz == r.a.end()) {
            if (r.strict ? !(Rational(0) < r.b) : !(Rational(0) <= r.b)) return false;
            continue;
        }
        Rational s = abs(*nz);
        if (s != Rational(1)) {
            for (auto& x : r.a) x /= s;
            r.b /= s;
        }
        auto [it, fresh] = best.try_emplace(r.a, r.b, r.strict);
        if (!fresh) {
            auto& [b, strict] = it->second;
            if (r.b < b) b = r.b, strict = r.strict;
            else if (r.b == b) strict = strict || r.strict;
        }
    }
    rows.clear();
    for (auto& [a, bs] : best) rows.push_back({a, bs.second, bs.first});
    return true;
}

}  // namespace detail

// Fourier-Motzkin elimination with strict/weak tracking. On feasibility a
// witness is built by back-substitution; `preferred[k]` lists values tried
// first for variable k.
inline FmResult fm_decide(const ConstraintSystem& sys, const std::vector<std::vector<Rational>>& preferred = {}) {
    const std::size_t V = sys.vars();
    std::vector<detail::FmRow> rows;
    for (const auto& r : sys.rows()) rows.push_back({r.a, r.strict, r.b});
    if (!detail::fm_normalize(rows)) return {};

    std::vector<std::vector<detail::FmRow>> stages;
    std::vector<std::size_t> elim;
    std::vector<bool> gone(V, false);
    for (std::size_t step = 0; step < V; ++step) {
        std::size_t pick = V;
        std::size_t best_cost = 0;
        for (std::size_t k = 0; k < V; ++k) {
            if (gone[k]) continue;
            std::size_t pos = 0, neg = 0;
            for (const auto& r : rows) {
                int s = r.a[k].sign();
                pos += s > 0;
                neg += s < 0;
            }
            std::size_t cost = pos * neg;
            if (pick == V || cost < best_cost) pick = k, best_cost = cost;
        }
        gone[pick] = true;
        elim.push_back(pick);
        stages.push_back(rows);

        std::vector<detail::FmRow> next, up, lo;
        for (auto& r : rows) {
            int s = r.a[pick].sign();
            (s == 0 ? next : (s > 0 ? up : lo)).push_back(std::move(r));
        }
        for (const auto& u : up)
            for (const auto& l : lo) {
                Rational cu = -l.a[pick], cl = u.a[pick];
                detail::FmRow c{std::vector<Rational>(V), u.strict || l.strict, u.b * cu + l.b * cl};
                for (std::size_t k = 0; k < V; ++k)
                    if (k != pick) c.a[k] = u.a[k] * cu + l.a[k] * cl;
                next.push_back(std::move(c));
            }
        if (!detail::fm_normalize(next)) return {};
        rows = std::move(next);
    }

    FmResult res;
    res.feasible = true;
    res.witness.assign(V, Rational(0));
    for (std::size_t t = V; t-- > 0;) {
        const std::size_t k = elim[t];
        std::optional<Rational> lo, hi;
        bool lo_strict = false, hi_strict = false;
        for (const auto& r : stages[t]) {
            int s = r.a[k].sign();
            if (s == 0) continue;
            Rational rest = r.b;
            for (std::size_t q = 0; q < V; ++q)
                if (q != k && !r.a[q].is_zero()) rest -= r.a[q] * res.witness[q];
            Rational bound = rest / r.a[k];
            if (s > 0) {
                if (!hi || bound < *hi || (bound == *hi && r.strict)) hi = bound, hi_strict = r.strict;
            } else {
                if (!lo || *lo < bound || (bound == *lo && r.strict)) lo = bound, lo_strict = r.strict;
            }
        }
        auto ok = [&](const Rational& x) {
            if (lo && (lo_strict ? !(*lo < x) : !(*lo <= x))) return false;
            if (hi && (hi_strict ? !(x < *hi) : !(x <= *hi))) return false;
            return true;
        };
        std::optional<Rational> pick;
        if (k < preferred.size())
            for (const auto& c : preferred[k])
                if (ok(c)) {
                    pick = c;
                    break;
                }
        if (!pick) {
            if (lo && !lo_strict) pick = *lo;
            else if (hi && !hi_strict) pick = *hi;
            else if (lo && hi) pick = (*lo + *hi) / Rational(2);
            else if (lo) pick = *lo + Rational(1);
            else if (hi) pick = *hi - Rational(1);
            else pick = Rational(0);
        }
        if (!ok(*pick)) throw std::logic_error("fm_decide: empty interval during back-substitution");
        res.witness[k] = *pick;
    }
    if (!sys.satisfied_by(res.witness)) throw std::logic_error("fm_decide: witness fails the system");
    return res;
}

}  // namespace posauc
