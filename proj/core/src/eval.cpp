// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/eval.hpp"

#include <cmath>

#include "ficut/errors.hpp"

namespace ficut {

double eval_term(const State& state, const Environment& env, const Term& term) {
    const TermNode& n = term.node();
    switch (n.kind) {
    case TermKind::Constant:
        return n.value;
    case TermKind::StateVar: {
        auto it = state.find(n.name);
        if (it == state.end()) throw EvalError("state variable '" + n.name + "' not in state");
        return it->second;
    }
    case TermKind::LogicalVar: {
        auto it = env.find(n.name);
        if (it == env.end()) throw EvalError("logical variable '" + n.name + "' not in environment");
        return it->second;
    }
    case TermKind::Add:
        return eval_term(state, env, term.lhs()) + eval_term(state, env, term.rhs());
    case TermKind::Sub:
        return eval_term(state, env, term.lhs()) - eval_term(state, env, term.rhs());
    case TermKind::Mul:
        return eval_term(state, env, term.lhs()) * eval_term(state, env, term.rhs());
    case TermKind::Div: {
        double d = eval_term(state, env, term.rhs());
        if (d == 0.0) throw EvalError("division by zero");
        return eval_term(state, env, term.lhs()) / d;
    }
    case TermKind::Pow: {
        double b = eval_term(state, env, term.lhs());
        double r = 1.0;
        for (int i = 0; i < n.exponent; ++i) r *= b;
        return r;
    }
    case TermKind::Sqrt: {
        double a = eval_term(state, env, term.lhs());
        if (a < 0.0) throw EvalError("sqrt of negative value");
        return std::sqrt(a);
    }
    case TermKind::Neg:
        return -eval_term(state, env, term.lhs());
    }
    throw EvalError("corrupt term");
}

bool eval_cmp(CmpOp op, double lhs, double rhs) {
    switch (op) {
    case CmpOp::Eq: return lhs == rhs;
    case CmpOp::Ge: return lhs >= rhs;
    case CmpOp::Gt: return lhs > rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Lt: return lhs < rhs;
    }
    return false;
}

bool eval_formula(const State& state, const Environment& env, const Formula& formula) {
    const FormulaNode& n = formula.node();
    switch (n.kind) {
    case FormulaKind::BoolConst:
        return n.bvalue;
    case FormulaKind::Cmp:
        return eval_cmp(n.cmp, eval_term(state, env, n.tlhs), eval_term(state, env, n.trhs));
    case FormulaKind::Not:
        return !eval_formula(state, env, formula.lhs());
    case FormulaKind::And:
        return eval_formula(state, env, formula.lhs()) && eval_formula(state, env, formula.rhs());
    case FormulaKind::Or:
        return eval_formula(state, env, formula.lhs()) || eval_formula(state, env, formula.rhs());
    case FormulaKind::Imply:
        return !eval_formula(state, env, formula.lhs()) || eval_formula(state, env, formula.rhs());
    case FormulaKind::Forall:
    case FormulaKind::Exists:
        throw UnsupportedConstruct("quantified formula in exact evaluator");
    case FormulaKind::Box:
    case FormulaKind::Diamond:
        throw UnsupportedConstruct("modal formula in exact evaluator");
    }
    throw UnsupportedConstruct("corrupt formula");
}

} // namespace ficut
