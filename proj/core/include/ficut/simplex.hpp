// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ficut/linalg.hpp"

namespace ficut {

enum class LpRel { Le, Ge, Eq };

struct LpRow {
    Vector a;
    LpRel rel;
    double b;
    std::string provenance; // trace/sample or counterexample id that produced the row
};

/// minimize c·x subject to the rows, x >= 0.
struct LpProblem {
    Vector c;
    std::vector<LpRow> rows;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Vector x;
    double objective = 0.0;
};

/// Two-phase primal simplex with Bland's rule (lowest-index entering and
/// leaving candidates): terminating and deterministic; fine for the problem
/// sizes here.
LpSolution solve_lp(const LpProblem& p);

} // namespace ficut
