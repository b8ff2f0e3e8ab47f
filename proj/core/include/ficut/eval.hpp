// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>

#include "ficut/ast.hpp"

namespace ficut {

/// Total map from state-variable names to reals.
using State = std::map<std::string, double>;
/// Map from logical-variable names to reals.
using Environment = std::map<std::string, double>;

/// Exact valuation of a term under standard real arithmetic.
/// Throws EvalError on sqrt of a negative or division by zero.
double eval_term(const State& state, const Environment& env, const Term& term);

/// Exact valuation of a modality- and quantifier-free formula.
/// Throws UnsupportedConstruct on modalities/quantifiers.
bool eval_formula(const State& state, const Environment& env, const Formula& formula);

bool eval_cmp(CmpOp op, double lhs, double rhs);

} // namespace ficut
