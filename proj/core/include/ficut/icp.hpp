// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ficut/ast.hpp"
#include "ficut/interval.hpp"

namespace ficut {

enum class ConstraintRel { LeZero, LtZero, EqZero };

/// Normalized constraint: expr rel 0.
struct Constraint {
    Term expr;
    ConstraintRel rel;
};

struct ConstraintSystem {
    std::vector<Constraint> constraints;
    Box domain;
    double delta = 1e-4;
};

enum class DeltaStatus { Unsat, DeltaSat, ResourceLimit };

struct DeltaResult {
    DeltaStatus status = DeltaStatus::Unsat;
    Box witness; // populated for DeltaSat
    uint64_t boxes_explored = 0;

    bool unsat() const { return status == DeltaStatus::Unsat; }
    bool delta_sat() const { return status == DeltaStatus::DeltaSat; }
};

inline constexpr uint64_t kDefaultBoxBudget = 1000000;

/// Branch-and-prune δ-complete check. Deterministic: depth-first worklist,
/// widest axis split at the midpoint, lower half explored first. Unsat only
/// when the whole domain is pruned; budget exhaustion is reported as
/// ResourceLimit, never as Unsat.
DeltaResult check(const ConstraintSystem& sys, uint64_t box_budget = kDefaultBoxBudget);

/// Normalizes comparison atoms (and boolean constants) to `expr rel 0`
/// constraints; expressions are expanded to polynomial normal form when
/// possible so interval verdicts on derivative queries are exact.
/// A `false` atom yields the single constraint 1 <= 0; `true` atoms vanish.
std::vector<Constraint> constraints_of(const std::vector<Formula>& atoms);

/// One constraint per line in the model-file infix grammar, preceded by the
/// domain bounds; for offline cross-checking with an external solver.
std::string dump_query(const ConstraintSystem& sys);

/// Satisfiability of an arbitrary modality- and quantifier-free formula over
/// the domain: the formula is put in disjunctive normal form and each
/// disjunct checked in order. Unsat only when every disjunct is Unsat;
/// DeltaSat returns the first witness; a ResourceLimit on any disjunct
/// (without a sat verdict elsewhere) is reported as ResourceLimit.
DeltaResult check_formula(const Formula& f, const Box& domain, double delta,
                          uint64_t box_budget = kDefaultBoxBudget);

} // namespace ficut
