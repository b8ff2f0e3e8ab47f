// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "ficut/ast.hpp"

namespace ficut {

/// Capture-free substitution of variables by terms. Quantified occurrences
/// of a substituted logical variable are left untouched.
Term substitute(const Term& t, const std::map<std::string, Term>& sigma);
Formula substitute(const Formula& f, const std::map<std::string, Term>& sigma);

/// The program of the forward invariant cut premise: alpha ; ?(!C).
Program cut_restrict(const Program& alpha, const Formula& C);

/// Restriction alpha|D: every visited state is required to satisfy D.
/// Atomic statements are bracketed by ?(D); tests and evolution domains are
/// strengthened; loops re-check D before entry.
Program restrict_program(const Program& alpha, const Formula& D);

/// Bottom-up constant folding plus unit/zero identities. Division by a
/// constant zero and sqrt of a negative constant are left unfolded.
Term simplify(const Term& t);

/// Propositional simplification over simplified subterms: boolean identities,
/// double negation, and comparisons between constants folded to true/false.
Formula simplify(const Formula& f);

/// Negation normal form of a modality-free formula; negations end up only on
/// boolean constants, and negated comparisons flip the operator instead.
Formula nnf(const Formula& f);

/// Disjunctive normal form of a modality- and quantifier-free formula as a
/// list of conjunctions of atoms (Cmp or BoolConst). The trivially false
/// disjuncts are dropped; an empty result means the formula is false.
std::vector<std::vector<Formula>> dnf(const Formula& f);

} // namespace ficut
