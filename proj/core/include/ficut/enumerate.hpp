// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ficut/ast.hpp"
#include "ficut/eval.hpp"

namespace ficut {

/// Finite grid of states: the cartesian product of per-variable value lists.
/// States are addressed by a flat index in row-major order (first variable
/// varies slowest).
struct Grid {
    std::vector<std::string> vars;
    std::vector<std::vector<double>> values;

    size_t size() const;
    State state(size_t index) const;
    /// Index of the grid state matching `s` on every grid variable to within
    /// 1e-9; nullopt when some coordinate is off-grid.
    std::optional<size_t> index_of(const State& s) const;
    std::optional<size_t> axis_of(const std::string& var) const;
    /// Closest value on `axis` within 1e-9, if any.
    std::optional<size_t> snap(size_t axis, double v) const;
};

/// Transition relation as a set of (pre, post) flat-index pairs.
using Relation = std::set<std::pair<size_t, size_t>>;

/// Exhaustive transition relation of an ODE-free program over the grid.
/// Assignments whose value lands off-grid contribute no transition, failed
/// tests and runtime evaluation errors make the state stuck, loops are the
/// reflexive-transitive closure. Throws OracleError on differential
/// equations.
Relation enumerate_transitions(const Program& p, const Grid& grid,
                               const Environment& env = {});

/// R ; S relational composition and reflexive-transitive closure, exposed
/// for the semantic property tests.
Relation compose(const Relation& r, const Relation& s);
Relation star_closure(const Relation& r, size_t num_states);

} // namespace ficut
