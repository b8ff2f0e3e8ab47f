// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/enumerate.hpp"

#include <cmath>

#include "ficut/errors.hpp"

namespace ficut {

size_t Grid::size() const {
    size_t n = 1;
    for (const auto& axis : values) n *= axis.size();
    return n;
}

State Grid::state(size_t index) const {
    State s;
    for (size_t a = vars.size(); a-- > 0;) {
        size_t n = values[a].size();
        s[vars[a]] = values[a][index % n];
        index /= n;
    }
    return s;
}

std::optional<size_t> Grid::index_of(const State& s) const {
    size_t index = 0;
    for (size_t a = 0; a < vars.size(); ++a) {
        auto it = s.find(vars[a]);
        if (it == s.end()) return std::nullopt;
        auto k = snap(a, it->second);
        if (!k) return std::nullopt;
        index = index * values[a].size() + *k;
    }
    return index;
}

std::optional<size_t> Grid::axis_of(const std::string& var) const {
    for (size_t a = 0; a < vars.size(); ++a)
        if (vars[a] == var) return a;
    return std::nullopt;
}

std::optional<size_t> Grid::snap(size_t axis, double v) const {
    const auto& vals = values[axis];
    for (size_t k = 0; k < vals.size(); ++k)
        if (std::fabs(vals[k] - v) <= 1e-9) return k;
    return std::nullopt;
}

Relation compose(const Relation& r, const Relation& s) {
    Relation out;
    for (const auto& [a, b] : r)
        for (auto it = s.lower_bound({b, 0}); it != s.end() && it->first == b; ++it)
            out.emplace(a, it->second);
    return out;
}

Relation star_closure(const Relation& r, size_t num_states) {
    Relation closure;
    for (size_t i = 0; i < num_states; ++i) closure.emplace(i, i);
    while (true) {
        Relation next = closure;
        Relation step = compose(closure, r);
        next.insert(step.begin(), step.end());
        if (next == closure) return closure;
        closure.swap(next);
    }
}

namespace {

// Replaces the coordinate of `var` and returns the flat index of the result.
size_t with_coord(const Grid& grid, size_t index, size_t axis, size_t value_idx) {
    size_t stride = 1;
    for (size_t a = grid.vars.size(); a-- > axis + 1;) stride *= grid.values[a].size();
    size_t n = grid.values[axis].size();
    size_t old = (index / stride) % n;
    return index - old * stride + value_idx * stride;
}

Relation enumerate_rec(const Program& p, const Grid& grid, const Environment& env) {
    size_t total = grid.size();
    switch (p.kind()) {
    case ProgramKind::Assign: {
        auto axis = grid.axis_of(p.node().var);
        if (!axis) throw OracleError("assigned variable '" + p.node().var + "' not on the grid");
        Relation out;
        for (size_t i = 0; i < total; ++i) {
            double v;
            try {
                v = eval_term(grid.state(i), env, p.node().term);
            } catch (const EvalError&) {
                continue; // stuck state
            }
            if (auto k = grid.snap(*axis, v)) out.emplace(i, with_coord(grid, i, *axis, *k));
        }
        return out;
    }
    case ProgramKind::Havoc: {
        auto axis = grid.axis_of(p.node().var);
        if (!axis) throw OracleError("havoced variable '" + p.node().var + "' not on the grid");
        Relation out;
        for (size_t i = 0; i < total; ++i)
            for (size_t k = 0; k < grid.values[*axis].size(); ++k)
                out.emplace(i, with_coord(grid, i, *axis, k));
        return out;
    }
    case ProgramKind::Test: {
        Relation out;
        for (size_t i = 0; i < total; ++i) {
            try {
                if (eval_formula(grid.state(i), env, p.node().formula)) out.emplace(i, i);
            } catch (const EvalError&) {
                // stuck state
            }
        }
        return out;
    }
    case ProgramKind::Choice: {
        Relation a = enumerate_rec(p.lhs(), grid, env);
        Relation b = enumerate_rec(p.rhs(), grid, env);
        a.insert(b.begin(), b.end());
        return a;
    }
    case ProgramKind::Seq:
        return compose(enumerate_rec(p.lhs(), grid, env), enumerate_rec(p.rhs(), grid, env));
    case ProgramKind::Star: {
        Relation body = enumerate_rec(p.lhs(), grid, env);
        return star_closure(body, total);
    }
    case ProgramKind::Ode:
        throw OracleError("differential equation in the finite-grid oracle");
    }
    throw OracleError("corrupt program");
}

} // namespace

Relation enumerate_transitions(const Program& p, const Grid& grid, const Environment& env) {
    return enumerate_rec(p, grid, env);
}

} // namespace ficut
