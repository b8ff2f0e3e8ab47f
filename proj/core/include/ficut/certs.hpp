// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ficut/ast.hpp"
#include "ficut/interval.hpp"
#include "ficut/linalg.hpp"

namespace ficut {

/// Sublevel-set certificate C = {x | x'Px <= level} (optionally under a
/// mode guard). The Cholesky factor recorded at construction witnesses
/// positive definiteness.
struct QuadraticCertificate {
    std::vector<std::string> vars;
    Matrix P;
    std::optional<double> level;
    Formula guard; // invalid() when absent
    Matrix chol;
    std::map<std::string, std::string> provenance;

    /// x'Px as a Term over vars.
    Term quadratic_term() const;
    /// The cut formula x'Px <= level (conjoined with the guard if present).
    Formula cut_formula() const;
};

/// Polynomial certificate B = sum coeffs[i] * basis[i]; the barrier set is
/// {B <= 0}.
struct BarrierCertificate {
    std::vector<std::string> vars;
    std::vector<Term> basis;
    Vector coeffs;
    Box domain;
    double epsilon = 1e-6;
    std::map<std::string, std::string> provenance;

    Term barrier_term() const;
};

/// Text round-trip with a provenance header; read back by proof tactics.
std::string serialize(const QuadraticCertificate& c);
std::string serialize(const BarrierCertificate& c);

/// Parses either kind; exactly one optional is set on success. Throws
/// ModelError on malformed input.
struct ParsedCertificate {
    std::optional<QuadraticCertificate> quadratic;
    std::optional<BarrierCertificate> barrier;
};
ParsedCertificate parse_certificate(const std::string& text);

} // namespace ficut
