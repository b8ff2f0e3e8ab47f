// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/transform.hpp"

#include <cmath>

#include "ficut/errors.hpp"
#include "ficut/eval.hpp"

namespace ficut {

Term substitute(const Term& t, const std::map<std::string, Term>& sigma) {
    switch (t.kind()) {
    case TermKind::Constant:
        return t;
    case TermKind::StateVar:
    case TermKind::LogicalVar: {
        auto it = sigma.find(t.node().name);
        return it != sigma.end() ? it->second : t;
    }
    case TermKind::Add: return Term::add(substitute(t.lhs(), sigma), substitute(t.rhs(), sigma));
    case TermKind::Sub: return Term::sub(substitute(t.lhs(), sigma), substitute(t.rhs(), sigma));
    case TermKind::Mul: return Term::mul(substitute(t.lhs(), sigma), substitute(t.rhs(), sigma));
    case TermKind::Div: return Term::div(substitute(t.lhs(), sigma), substitute(t.rhs(), sigma));
    case TermKind::Pow: return Term::pow(substitute(t.lhs(), sigma), t.node().exponent);
    case TermKind::Sqrt: return Term::sqrt(substitute(t.lhs(), sigma));
    case TermKind::Neg: return Term::neg(substitute(t.lhs(), sigma));
    }
    throw EvalError("corrupt term");
}

namespace {

Program substitute_program(const Program& p, const std::map<std::string, Term>& sigma) {
    auto check_target = [&](const std::string& var) {
        if (sigma.count(var))
            throw UnsupportedConstruct("substitution into a program that binds '" + var + "'");
    };
    switch (p.kind()) {
    case ProgramKind::Assign:
        check_target(p.node().var);
        return Program::assign(p.node().var, substitute(p.node().term, sigma));
    case ProgramKind::Havoc:
        check_target(p.node().var);
        return p;
    case ProgramKind::Ode: {
        std::vector<OdeEquation> eqs;
        for (const auto& eq : p.node().odes) {
            check_target(eq.var);
            eqs.push_back({eq.var, substitute(eq.rhs, sigma)});
        }
        return Program::ode(std::move(eqs), substitute(p.node().formula, sigma));
    }
    case ProgramKind::Test:
        return Program::test(substitute(p.node().formula, sigma));
    case ProgramKind::Choice:
        return Program::choice(substitute_program(p.lhs(), sigma),
                               substitute_program(p.rhs(), sigma));
    case ProgramKind::Seq:
        return Program::seq(substitute_program(p.lhs(), sigma),
                            substitute_program(p.rhs(), sigma));
    case ProgramKind::Star:
        return Program::star(substitute_program(p.lhs(), sigma));
    }
    throw EvalError("corrupt program");
}

} // namespace

Formula substitute(const Formula& f, const std::map<std::string, Term>& sigma) {
    switch (f.kind()) {
    case FormulaKind::BoolConst:
        return f;
    case FormulaKind::Cmp:
        return Formula::cmp(f.node().cmp, substitute(f.node().tlhs, sigma),
                            substitute(f.node().trhs, sigma));
    case FormulaKind::Not:
        return Formula::negate(substitute(f.lhs(), sigma));
    case FormulaKind::And:
        return Formula::conj(substitute(f.lhs(), sigma), substitute(f.rhs(), sigma));
    case FormulaKind::Or:
        return Formula::disj(substitute(f.lhs(), sigma), substitute(f.rhs(), sigma));
    case FormulaKind::Imply:
        return Formula::imply(substitute(f.lhs(), sigma), substitute(f.rhs(), sigma));
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
        // The bound variable shadows any outer substitution.
        std::map<std::string, Term> inner = sigma;
        inner.erase(f.node().var);
        Formula body = substitute(f.lhs(), inner);
        return f.kind() == FormulaKind::Forall ? Formula::forall(f.node().var, body)
                                               : Formula::exists(f.node().var, body);
    }
    case FormulaKind::Box:
        return Formula::box(substitute_program(Program(f.node().prog->ptr()), sigma),
                            substitute(f.lhs(), sigma));
    case FormulaKind::Diamond:
        return Formula::diamond(substitute_program(Program(f.node().prog->ptr()), sigma),
                                substitute(f.lhs(), sigma));
    }
    throw EvalError("corrupt formula");
}

Program cut_restrict(const Program& alpha, const Formula& C) {
    return Program::seq(alpha, Program::test(Formula::negate(C)));
}

Program restrict_program(const Program& alpha, const Formula& D) {
    switch (alpha.kind()) {
    case ProgramKind::Assign:
    case ProgramKind::Havoc:
        return Program::seq(Program::test(D), Program::seq(alpha, Program::test(D)));
    case ProgramKind::Test:
        return Program::test(Formula::conj(alpha.node().formula, D));
    case ProgramKind::Ode:
        return Program::ode(alpha.node().odes, Formula::conj(alpha.node().formula, D));
    case ProgramKind::Choice:
        return Program::choice(restrict_program(alpha.lhs(), D),
                               restrict_program(alpha.rhs(), D));
    case ProgramKind::Seq:
        return Program::seq(restrict_program(alpha.lhs(), D), restrict_program(alpha.rhs(), D));
    case ProgramKind::Star:
        return Program::seq(Program::test(D), Program::star(restrict_program(alpha.lhs(), D)));
    }
    throw EvalError("corrupt program");
}

namespace {

bool is_const(const Term& t, double& out) {
    if (t.kind() != TermKind::Constant) return false;
    out = t.node().value;
    return true;
}

} // namespace

Term simplify(const Term& t) {
    switch (t.kind()) {
    case TermKind::Constant:
    case TermKind::StateVar:
    case TermKind::LogicalVar:
        return t;
    default:
        break;
    }
    Term a = simplify(t.lhs());
    Term b = t.node().rhs ? simplify(t.rhs()) : Term();
    double ca = 0, cb = 0;
    bool la = is_const(a, ca);
    bool lb = b.valid() && is_const(b, cb);
    switch (t.kind()) {
    case TermKind::Add:
        if (la && lb) return Term::constant(ca + cb);
        if (la && ca == 0.0) return b;
        if (lb && cb == 0.0) return a;
        return Term::add(a, b);
    case TermKind::Sub:
        if (la && lb) return Term::constant(ca - cb);
        if (lb && cb == 0.0) return a;
        if (la && ca == 0.0) return Term::neg(b);
        return Term::sub(a, b);
    case TermKind::Mul:
        if (la && lb) return Term::constant(ca * cb);
        if ((la && ca == 0.0) || (lb && cb == 0.0)) return Term::constant(0.0);
        if (la && ca == 1.0) return b;
        if (lb && cb == 1.0) return a;
        return Term::mul(a, b);
    case TermKind::Div:
        if (la && lb && cb != 0.0) return Term::constant(ca / cb);
        if (lb && cb == 1.0) return a;
        return Term::div(a, b);
    case TermKind::Pow: {
        int e = t.node().exponent;
        if (e == 0) return Term::constant(1.0);
        if (e == 1) return a;
        if (la) {
            double r = 1.0;
            for (int i = 0; i < e; ++i) r *= ca;
            return Term::constant(r);
        }
        return Term::pow(a, e);
    }
    case TermKind::Sqrt:
        if (la && ca >= 0.0) return Term::constant(std::sqrt(ca));
        return Term::sqrt(a);
    case TermKind::Neg:
        if (a.kind() == TermKind::Neg) return a.lhs();
        return Term::neg(a); // the factory folds the constant case
    default:
        throw EvalError("corrupt term");
    }
}

Formula simplify(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::BoolConst:
        return f;
    case FormulaKind::Cmp: {
        Term a = simplify(f.node().tlhs);
        Term b = simplify(f.node().trhs);
        double ca, cb;
        if (is_const(a, ca) && is_const(b, cb))
            return Formula::boolean(eval_cmp(f.node().cmp, ca, cb));
        if (a == b) {
            switch (f.node().cmp) {
            case CmpOp::Eq:
            case CmpOp::Ge:
            case CmpOp::Le: return Formula::boolean(true);
            case CmpOp::Gt:
            case CmpOp::Lt: return Formula::boolean(false);
            }
        }
        return Formula::cmp(f.node().cmp, a, b);
    }
    case FormulaKind::Not: {
        Formula a = simplify(f.lhs());
        if (a.is_true()) return Formula::boolean(false);
        if (a.is_false()) return Formula::boolean(true);
        if (a.kind() == FormulaKind::Not) return a.lhs();
        return Formula::negate(a);
    }
    case FormulaKind::And: {
        Formula a = simplify(f.lhs());
        Formula b = simplify(f.rhs());
        if (a.is_false() || b.is_false()) return Formula::boolean(false);
        if (a.is_true()) return b;
        if (b.is_true()) return a;
        if (a == b) return a;
        return Formula::conj(a, b);
    }
    case FormulaKind::Or: {
        Formula a = simplify(f.lhs());
        Formula b = simplify(f.rhs());
        if (a.is_true() || b.is_true()) return Formula::boolean(true);
        if (a.is_false()) return b;
        if (b.is_false()) return a;
        if (a == b) return a;
        return Formula::disj(a, b);
    }
    case FormulaKind::Imply: {
        Formula a = simplify(f.lhs());
        Formula b = simplify(f.rhs());
        if (a.is_false() || b.is_true()) return Formula::boolean(true);
        if (a.is_true()) return b;
        if (a == b) return Formula::boolean(true);
        if (b.is_false()) return simplify(Formula::negate(a));
        return Formula::imply(a, b);
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
        Formula body = simplify(f.lhs());
        if (body.is_true() || body.is_false()) return body;
        return f.kind() == FormulaKind::Forall ? Formula::forall(f.node().var, body)
                                               : Formula::exists(f.node().var, body);
    }
    case FormulaKind::Box:
        return Formula::box(Program(f.node().prog->ptr()), simplify(f.lhs()));
    case FormulaKind::Diamond:
        return Formula::diamond(Program(f.node().prog->ptr()), simplify(f.lhs()));
    }
    throw EvalError("corrupt formula");
}

namespace {

Formula nnf_pos(const Formula& f);
Formula nnf_neg(const Formula& f);

Formula nnf_pos(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::BoolConst:
    case FormulaKind::Cmp:
        return f;
    case FormulaKind::Not:
        return nnf_neg(f.lhs());
    case FormulaKind::And:
        return Formula::conj(nnf_pos(f.lhs()), nnf_pos(f.rhs()));
    case FormulaKind::Or:
        return Formula::disj(nnf_pos(f.lhs()), nnf_pos(f.rhs()));
    case FormulaKind::Imply:
        return Formula::disj(nnf_neg(f.lhs()), nnf_pos(f.rhs()));
    case FormulaKind::Forall:
        return Formula::forall(f.node().var, nnf_pos(f.lhs()));
    case FormulaKind::Exists:
        return Formula::exists(f.node().var, nnf_pos(f.lhs()));
    case FormulaKind::Box:
    case FormulaKind::Diamond:
        throw UnsupportedConstruct("modal formula in negation normal form");
    }
    throw EvalError("corrupt formula");
}

Formula nnf_neg(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::BoolConst:
        return Formula::boolean(!f.node().bvalue);
    case FormulaKind::Cmp: {
        const Term& a = f.node().tlhs;
        const Term& b = f.node().trhs;
        switch (f.node().cmp) {
        case CmpOp::Eq:
            return Formula::disj(Formula::cmp(CmpOp::Lt, a, b), Formula::cmp(CmpOp::Gt, a, b));
        case CmpOp::Ge: return Formula::cmp(CmpOp::Lt, a, b);
        case CmpOp::Gt: return Formula::cmp(CmpOp::Le, a, b);
        case CmpOp::Le: return Formula::cmp(CmpOp::Gt, a, b);
        case CmpOp::Lt: return Formula::cmp(CmpOp::Ge, a, b);
        }
        throw EvalError("corrupt comparison");
    }
    case FormulaKind::Not:
        return nnf_pos(f.lhs());
    case FormulaKind::And:
        return Formula::disj(nnf_neg(f.lhs()), nnf_neg(f.rhs()));
    case FormulaKind::Or:
        return Formula::conj(nnf_neg(f.lhs()), nnf_neg(f.rhs()));
    case FormulaKind::Imply:
        return Formula::conj(nnf_pos(f.lhs()), nnf_neg(f.rhs()));
    case FormulaKind::Forall:
        return Formula::exists(f.node().var, nnf_neg(f.lhs()));
    case FormulaKind::Exists:
        return Formula::forall(f.node().var, nnf_neg(f.lhs()));
    case FormulaKind::Box:
    case FormulaKind::Diamond:
        throw UnsupportedConstruct("modal formula in negation normal form");
    }
    throw EvalError("corrupt formula");
}

std::vector<std::vector<Formula>> dnf_of_nnf(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::BoolConst:
        if (f.node().bvalue) return {{}};
        return {};
    case FormulaKind::Cmp:
        return {{f}};
    case FormulaKind::Or: {
        auto a = dnf_of_nnf(f.lhs());
        auto b = dnf_of_nnf(f.rhs());
        a.insert(a.end(), b.begin(), b.end());
        return a;
    }
    case FormulaKind::And: {
        auto a = dnf_of_nnf(f.lhs());
        auto b = dnf_of_nnf(f.rhs());
        std::vector<std::vector<Formula>> out;
        for (const auto& ca : a)
            for (const auto& cb : b) {
                std::vector<Formula> c = ca;
                c.insert(c.end(), cb.begin(), cb.end());
                out.push_back(std::move(c));
            }
        return out;
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists:
        throw UnsupportedConstruct("quantified formula in disjunctive normal form");
    default:
        throw UnsupportedConstruct("non-normalized formula in disjunctive normal form");
    }
}

} // namespace

Formula nnf(const Formula& f) { return nnf_pos(f); }

std::vector<std::vector<Formula>> dnf(const Formula& f) { return dnf_of_nnf(nnf(f)); }

} // namespace ficut
