#pragma once

#include "posauc/instance.hpp"

#include <algorithm>
#include <vector>

namespace posauc {

// Max-weight assignment of every row (slot) to a distinct column (bidder).
// Rows beyond the column count are matched to zero-weight dummy columns,
// reported as kNone.
struct AssignmentSolution {
    Rational value;
    Allocation match;               // column per row
    std::vector<Rational> row_pot;  // dual u_r, free
    std::vector<Rational> col_pot;  // dual y_c >= 0, zero on unmatched columns
};

inline AssignmentSolution max_weight_assignment(const Matrix& w) {
    const std::size_t rows = w.size();
    const std::size_t real_cols = rows ? w.front().size() : 0;
    const std::size_t cols = std::max(real_cols, rows);
    auto cost = [&](std::size_t r, std::size_t c) -> Rational {
        return c < real_cols ? -w[r][c] : Rational(0);
    };

    // Shortest augmenting path Hungarian method, 1-based with column 0 as sentinel.
    std::vector<Rational> u(rows + 1), v(cols + 1);
    std::vector<std::size_t> p(cols + 1, 0), way(cols + 1, 0);
    for (std::size_t i = 1; i <= rows; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<Rational> minv(cols + 1);
        std::vector<bool> finite(cols + 1, false), used(cols + 1, false);
        do {
            used[j0] = true;
            std::size_t i0 = p[j0], j1 = 0;
            Rational delta;
            bool have_delta = false;
            for (std::size_t j = 1; j <= cols; ++j) {
                if (used[j]) continue;
                Rational cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (!finite[j] || cur < minv[j]) {
                    minv[j] = cur;
                    finite[j] = true;
                    way[j] = j0;
                }
                if (!have_delta || minv[j] < delta) {
                    delta = minv[j];
                    have_delta = true;
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= cols; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    AssignmentSolution s;
    s.match.assign(rows, kNone);
    for (std::size_t j = 1; j <= cols; ++j)
        if (p[j] != 0 && j - 1 < real_cols) s.match[p[j] - 1] = j - 1;
    s.row_pot.resize(rows);
    s.col_pot.resize(real_cols);
    for (std::size_t i = 0; i < rows; ++i) s.row_pot[i] = -u[i + 1];
    for (std::size_t j = 0; j < real_cols; ++j) s.col_pot[j] = -v[j + 1];
    for (std::size_t i = 0; i < rows; ++i)
        if (s.match[i] != kNone) s.value += w[i][s.match[i]];
    return s;
}

// Every optimal assignment, in lexicographic order. Uses complementary
// slackness against the Hungarian duals: an assignment is optimal iff it uses
// only tight edges and covers every column with positive dual.
inline std::vector<Allocation> all_optimal_assignments(const Matrix& w, const AssignmentSolution& s) {
    const std::size_t rows = w.size();
    const std::size_t cols = rows ? w.front().size() : 0;
    std::vector<Allocation> out;
    if (rows == 0) {
        out.push_back({});
        return out;
    }
    std::vector<std::vector<std::size_t>> tight(rows);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (s.row_pot[r] + s.col_pot[c] == w[r][c]) tight[r].push_back(c);
    std::vector<bool> must(cols);
    std::size_t must_left = 0;
    for (std::size_t c = 0; c < cols; ++c)
        if (s.col_pot[c].sign() > 0) must[c] = true, ++must_left;

    Allocation cur(rows, kNone);
    std::vector<bool> used(cols, false);
    auto rec = [&](auto&& self, std::size_t r, std::size_t must_remaining) -> void {
        if (must_remaining > rows - r) return;
        if (r == rows) {
            out.push_back(cur);
            return;
        }
        for (std::size_t c : tight[r]) {
            if (used[c]) continue;
            used[c] = true;
            cur[r] = c;
            self(self, r + 1, must_remaining - (must[c] ? 1 : 0));
            used[c] = false;
        }
        cur[r] = kNone;
    };
    rec(rec, 0, must_left);
    return out;
}

// Exhaustive search over injective row-to-column maps; oracle for small sizes.
inline std::vector<Allocation> all_optimal_assignments_exhaustive(const Matrix& w, Rational* best_out = nullptr) {
    const std::size_t rows = w.size();
    const std::size_t cols = rows ? w.front().size() : 0;
    std::vector<Allocation> best;
    Rational best_val;
    bool have = false;
    Allocation cur(rows, kNone);
    std::vector<bool> used(cols, false);
    auto rec = [&](auto&& self, std::size_t r, const Rational& acc) -> void {
        if (r == rows) {
            if (!have || best_val < acc) {
                best_val = acc;
                best.clear();
                have = true;
            }
            if (acc == best_val) best.push_back(cur);
            return;
        }
        for (std::size_t c = 0; c < cols; ++c) {
            if (used[c]) continue;
            used[c] = true;
            cur[r] = c;
            self(self, r + 1, acc + w[r][c]);
            used[c] = false;
        }
    };
    rec(rec, 0, Rational(0));
    if (best_out) *best_out = best_val;
    return best;
}

}  // namespace posauc
