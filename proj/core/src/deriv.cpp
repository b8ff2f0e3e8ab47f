// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/deriv.hpp"

#include "ficut/errors.hpp"
#include "ficut/transform.hpp"

namespace ficut {

Term differentiate(const Term& t, const std::string& var) {
    switch (t.kind()) {
    case TermKind::Constant:
        return Term::constant(0.0);
    case TermKind::StateVar:
    case TermKind::LogicalVar:
        return Term::constant(t.node().name == var ? 1.0 : 0.0);
    case TermKind::Add:
        return Term::add(differentiate(t.lhs(), var), differentiate(t.rhs(), var));
    case TermKind::Sub:
        return Term::sub(differentiate(t.lhs(), var), differentiate(t.rhs(), var));
    case TermKind::Mul:
        return Term::add(Term::mul(differentiate(t.lhs(), var), t.rhs()),
                         Term::mul(t.lhs(), differentiate(t.rhs(), var)));
    case TermKind::Div:
        return Term::div(Term::sub(Term::mul(differentiate(t.lhs(), var), t.rhs()),
                                   Term::mul(t.lhs(), differentiate(t.rhs(), var))),
                         Term::pow(t.rhs(), 2));
    case TermKind::Pow: {
        int n = t.node().exponent;
        if (n == 0) return Term::constant(0.0);
        Term inner = differentiate(t.lhs(), var);
        Term scaled = Term::mul(Term::constant(static_cast<double>(n)),
                                n == 1 ? Term::constant(1.0) : Term::pow(t.lhs(), n - 1));
        return Term::mul(scaled, inner);
    }
    case TermKind::Sqrt:
        return Term::div(differentiate(t.lhs(), var),
                         Term::mul(Term::constant(2.0), Term::sqrt(t.lhs())));
    case TermKind::Neg:
        return Term::neg(differentiate(t.lhs(), var));
    }
    throw EvalError("corrupt term");
}

Term lie_derivative(const Term& V, const std::vector<OdeEquation>& field) {
    Term sum = Term::constant(0.0);
    for (const auto& eq : field)
        sum = Term::add(sum, Term::mul(differentiate(V, eq.var), eq.rhs));
    return simplify(sum);
}

} // namespace ficut
