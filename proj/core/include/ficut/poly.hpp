// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "ficut/ast.hpp"

namespace ficut {

/// Exponent-per-variable monomial key; absent variables have exponent 0.
using Monomial = std::map<std::string, int>;
/// Sparse multivariate polynomial in monomial normal form. Coefficients of
/// exactly 0.0 are never stored, so structural equality is semantic equality.
using Poly = std::map<Monomial, double>;

/// Expansion into normal form; nullopt when the term is not polynomial
/// (sqrt, division by a non-constant).
std::optional<Poly> to_poly(const Term& t);

/// Canonical term for a polynomial; to_poly(poly_to_term(p)) == p.
/// Variables are rebuilt as state variables unless `logical` lists them.
Term poly_to_term(const Poly& p, const std::set<std::string>& logical = {});

/// to_poly followed by poly_to_term. Collapses dependency-prone expressions
/// like x*x - x^2 to their normal form, which makes the interval checker's
/// verdicts on Lie-derivative queries exact.
std::optional<Term> expand_polynomial(const Term& t);

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, double k);
Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_diff(const Poly& a, const std::string& var);
int poly_degree(const Poly& a);

} // namespace ficut
