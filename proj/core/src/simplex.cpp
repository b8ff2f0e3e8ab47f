// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/simplex.hpp"

#include <cmath>
#include <limits>

namespace ficut {

namespace {

constexpr double kEps = 1e-9;

struct Tableau {
    Matrix a;            // m x ncols
    Vector b;            // m
    Vector cost;         // ncols reduced-cost row
    double obj = 0.0;    // negated objective value of the current basis
    std::vector<size_t> basis;

    void pivot(size_t row, size_t col) {
        double p = a[row][col];
        for (double& v : a[row]) v /= p;
        b[row] /= p;
        for (size_t i = 0; i < a.size(); ++i) {
            if (i == row || a[i][col] == 0.0) continue;
            double f = a[i][col];
            for (size_t j = 0; j < a[i].size(); ++j) a[i][j] -= f * a[row][j];
            b[i] -= f * b[row];
        }
        if (cost[col] != 0.0) {
            double f = cost[col];
            for (size_t j = 0; j < cost.size(); ++j) cost[j] -= f * a[row][j];
            obj -= f * b[row];
        }
        basis[row] = col;
    }

    // Bland's rule iteration; returns false on unboundedness.
    bool iterate() {
        while (true) {
            size_t enter = cost.size();
            for (size_t j = 0; j < cost.size(); ++j)
                if (cost[j] < -kEps) {
                    enter = j;
                    break;
                }
            if (enter == cost.size()) return true;
            size_t leave = a.size();
            double best = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < a.size(); ++i) {
                if (a[i][enter] <= kEps) continue;
                double ratio = b[i] / a[i][enter];
                if (ratio < best - kEps ||
                    (ratio < best + kEps && (leave == a.size() || basis[i] < basis[leave]))) {
                    best = ratio;
                    leave = i;
                }
            }
            if (leave == a.size()) return false;
            pivot(leave, enter);
        }
    }
};

} // namespace

LpSolution solve_lp(const LpProblem& p) {
    const size_t n = p.c.size();
    const size_t m = p.rows.size();

    // Normalize to b >= 0 and count auxiliary columns.
    std::vector<Vector> rows(m);
    std::vector<LpRel> rels(m);
    Vector rhs(m);
    size_t slacks = 0;
    for (size_t i = 0; i < m; ++i) {
        rows[i] = p.rows[i].a;
        rows[i].resize(n, 0.0);
        rels[i] = p.rows[i].rel;
        rhs[i] = p.rows[i].b;
        if (rhs[i] < 0.0) {
            for (double& v : rows[i]) v = -v;
            rhs[i] = -rhs[i];
            if (rels[i] == LpRel::Le)
                rels[i] = LpRel::Ge;
            else if (rels[i] == LpRel::Ge)
                rels[i] = LpRel::Le;
        }
        if (rels[i] != LpRel::Eq) ++slacks;
    }

    const size_t ncols = n + slacks + m; // structural + slack/surplus + artificial
    Tableau t;
    t.a.assign(m, Vector(ncols, 0.0));
    t.b = rhs;
    t.basis.assign(m, 0);
    size_t next_slack = n;
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) t.a[i][j] = rows[i][j];
        size_t art = n + slacks + i;
        switch (rels[i]) {
        case LpRel::Le:
            t.a[i][next_slack] = 1.0;
            // A slack at zero is a valid starting basic variable; the
            // artificial column stays out of the basis and is never entered
            // (phase-1 cost keeps it at zero reduced cost only while basic).
            t.basis[i] = next_slack++;
            break;
        case LpRel::Ge:
            t.a[i][next_slack++] = -1.0;
            t.a[i][art] = 1.0;
            t.basis[i] = art;
            break;
        case LpRel::Eq:
            t.a[i][art] = 1.0;
            t.basis[i] = art;
            break;
        }
    }

    // Phase 1: minimize the artificials.
    t.cost.assign(ncols, 0.0);
    for (size_t i = 0; i < m; ++i)
        for (size_t j = n + slacks; j < ncols; ++j)
            if (j == t.basis[i]) {
                // cancel basic artificial from the cost row
                for (size_t k = 0; k < ncols; ++k) t.cost[k] -= t.a[i][k];
                t.obj -= t.b[i];
            }
    for (size_t j = n + slacks; j < ncols; ++j) t.cost[j] += 1.0;
    if (!t.iterate()) return {LpStatus::Infeasible, {}, 0.0}; // cannot happen: phase 1 is bounded
    if (-t.obj > 1e-7) return {LpStatus::Infeasible, {}, 0.0};

    // Drive leftover basic artificials out or drop their (redundant) rows.
    for (size_t i = 0; i < t.a.size();) {
        if (t.basis[i] < n + slacks) {
            ++i;
            continue;
        }
        size_t col = ncols;
        for (size_t j = 0; j < n + slacks; ++j)
            if (std::fabs(t.a[i][j]) > kEps) {
                col = j;
                break;
            }
        if (col == ncols) {
            t.a.erase(t.a.begin() + static_cast<long>(i));
            t.b.erase(t.b.begin() + static_cast<long>(i));
            t.basis.erase(t.basis.begin() + static_cast<long>(i));
        } else {
            t.pivot(i, col);
            ++i;
        }
    }

    // Phase 2 over the original objective, artificial columns pinned out by
    // a prohibitive reduced cost.
    t.cost.assign(ncols, 0.0);
    t.obj = 0.0;
    for (size_t j = 0; j < n; ++j) t.cost[j] = p.c[j];
    for (size_t j = n + slacks; j < ncols; ++j) t.cost[j] = 1e30;
    for (size_t i = 0; i < t.a.size(); ++i) {
        double cb = t.basis[i] < n ? p.c[t.basis[i]] : 0.0;
        if (cb == 0.0) continue;
        for (size_t j = 0; j < ncols; ++j) t.cost[j] -= cb * t.a[i][j];
        t.obj -= cb * t.b[i];
    }
    if (!t.iterate()) return {LpStatus::Unbounded, {}, 0.0};

    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.x.assign(n, 0.0);
    for (size_t i = 0; i < t.a.size(); ++i)
        if (t.basis[i] < n) sol.x[t.basis[i]] = t.b[i];
    sol.objective = -t.obj;
    return sol;
}

} // namespace ficut
