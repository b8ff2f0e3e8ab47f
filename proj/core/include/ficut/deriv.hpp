// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "ficut/ast.hpp"

namespace ficut {

/// Structural partial derivative d(t)/d(var). Quotient and chain rules cover
/// division and sqrt; only trivial identities are folded afterwards.
Term differentiate(const Term& t, const std::string& var);

/// Symbolic Lie derivative of V along the field: sum of dV/dx_i * f_i.
Term lie_derivative(const Term& V, const std::vector<OdeEquation>& field);

} // namespace ficut
