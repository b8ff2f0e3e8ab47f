// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/ast.hpp"

#include <cassert>
#include <sstream>

namespace ficut {

namespace {
std::shared_ptr<const TermNode> tnode(TermNode n) {
    return std::make_shared<const TermNode>(std::move(n));
}
std::shared_ptr<const FormulaNode> fnode(FormulaNode n) {
    return std::make_shared<const FormulaNode>(std::move(n));
}
std::shared_ptr<const ProgramNode> pnode(ProgramNode n) {
    return std::make_shared<const ProgramNode>(std::move(n));
}
} // namespace

Term Term::constant(double v) { return Term(tnode({.kind = TermKind::Constant, .value = v})); }
Term Term::state_var(std::string name) {
    return Term(tnode({.kind = TermKind::StateVar, .name = std::move(name)}));
}
Term Term::logical_var(std::string name) {
    return Term(tnode({.kind = TermKind::LogicalVar, .name = std::move(name)}));
}
Term Term::add(Term a, Term b) {
    return Term(tnode({.kind = TermKind::Add, .lhs = a.ptr(), .rhs = b.ptr()}));
}
Term Term::sub(Term a, Term b) {
    return Term(tnode({.kind = TermKind::Sub, .lhs = a.ptr(), .rhs = b.ptr()}));
}
Term Term::mul(Term a, Term b) {
    return Term(tnode({.kind = TermKind::Mul, .lhs = a.ptr(), .rhs = b.ptr()}));
}
Term Term::div(Term a, Term b) {
    return Term(tnode({.kind = TermKind::Div, .lhs = a.ptr(), .rhs = b.ptr()}));
}
Term Term::pow(Term base, int exponent) {
    assert(exponent >= 0);
    return Term(tnode({.kind = TermKind::Pow, .exponent = exponent, .lhs = base.ptr()}));
}
Term Term::sqrt(Term a) { return Term(tnode({.kind = TermKind::Sqrt, .lhs = a.ptr()})); }
Term Term::neg(Term a) {
    // Negated literals are folded so "-3" has a single AST form.
    if (a.kind() == TermKind::Constant) return constant(-a.node().value);
    return Term(tnode({.kind = TermKind::Neg, .lhs = a.ptr()}));
}

bool Term::operator==(const Term& o) const {
    if (node_ == o.node_) return true;
    if (!node_ || !o.node_) return false;
    const TermNode& a = *node_;
    const TermNode& b = *o.node_;
    if (a.kind != b.kind || a.value != b.value || a.name != b.name || a.exponent != b.exponent)
        return false;
    if (Term(a.lhs).valid() != Term(b.lhs).valid()) return false;
    if (a.lhs && !(Term(a.lhs) == Term(b.lhs))) return false;
    if (Term(a.rhs).valid() != Term(b.rhs).valid()) return false;
    if (a.rhs && !(Term(a.rhs) == Term(b.rhs))) return false;
    return true;
}

void Term::collect_vars(std::set<std::string>& out) const {
    if (!node_) return;
    if (node_->kind == TermKind::StateVar || node_->kind == TermKind::LogicalVar)
        out.insert(node_->name);
    if (node_->lhs) Term(node_->lhs).collect_vars(out);
    if (node_->rhs) Term(node_->rhs).collect_vars(out);
}

std::set<std::string> Term::vars() const {
    std::set<std::string> out;
    collect_vars(out);
    return out;
}

Formula Formula::boolean(bool v) {
    return Formula(fnode({.kind = FormulaKind::BoolConst, .bvalue = v}));
}
Formula Formula::cmp(CmpOp op, Term lhs, Term rhs) {
    return Formula(fnode({.kind = FormulaKind::Cmp, .cmp = op, .tlhs = lhs, .trhs = rhs}));
}
Formula Formula::negate(Formula f) {
    return Formula(fnode({.kind = FormulaKind::Not, .lhs = f.ptr()}));
}
Formula Formula::conj(Formula a, Formula b) {
    return Formula(fnode({.kind = FormulaKind::And, .lhs = a.ptr(), .rhs = b.ptr()}));
}
Formula Formula::disj(Formula a, Formula b) {
    return Formula(fnode({.kind = FormulaKind::Or, .lhs = a.ptr(), .rhs = b.ptr()}));
}
Formula Formula::imply(Formula a, Formula b) {
    return Formula(fnode({.kind = FormulaKind::Imply, .lhs = a.ptr(), .rhs = b.ptr()}));
}
Formula Formula::forall(std::string var, Formula body) {
    return Formula(fnode({.kind = FormulaKind::Forall, .var = std::move(var), .lhs = body.ptr()}));
}
Formula Formula::exists(std::string var, Formula body) {
    return Formula(fnode({.kind = FormulaKind::Exists, .var = std::move(var), .lhs = body.ptr()}));
}
Formula Formula::box(Program prog, Formula body) {
    return Formula(fnode({.kind = FormulaKind::Box,
                          .lhs = body.ptr(),
                          .prog = std::make_shared<const Program>(std::move(prog))}));
}
Formula Formula::diamond(Program prog, Formula body) {
    return Formula(fnode({.kind = FormulaKind::Diamond,
                          .lhs = body.ptr(),
                          .prog = std::make_shared<const Program>(std::move(prog))}));
}

bool Formula::operator==(const Formula& o) const {
    if (node_ == o.node_) return true;
    if (!node_ || !o.node_) return false;
    const FormulaNode& a = *node_;
    const FormulaNode& b = *o.node_;
    if (a.kind != b.kind || a.bvalue != b.bvalue || a.cmp != b.cmp || a.var != b.var) return false;
    if (a.tlhs.valid() != b.tlhs.valid() || (a.tlhs.valid() && !(a.tlhs == b.tlhs))) return false;
    if (a.trhs.valid() != b.trhs.valid() || (a.trhs.valid() && !(a.trhs == b.trhs))) return false;
    if ((a.lhs != nullptr) != (b.lhs != nullptr)) return false;
    if (a.lhs && !(Formula(a.lhs) == Formula(b.lhs))) return false;
    if ((a.rhs != nullptr) != (b.rhs != nullptr)) return false;
    if (a.rhs && !(Formula(a.rhs) == Formula(b.rhs))) return false;
    if ((a.prog != nullptr) != (b.prog != nullptr)) return false;
    if (a.prog && !(*a.prog == *b.prog)) return false;
    return true;
}

bool Formula::modality_free() const {
    if (!node_) return true;
    if (node_->kind == FormulaKind::Box || node_->kind == FormulaKind::Diamond) return false;
    if (node_->lhs && !Formula(node_->lhs).modality_free()) return false;
    if (node_->rhs && !Formula(node_->rhs).modality_free()) return false;
    return true;
}

bool Formula::first_order_free() const {
    if (!node_) return true;
    switch (node_->kind) {
    case FormulaKind::Box:
    case FormulaKind::Diamond:
    case FormulaKind::Forall:
    case FormulaKind::Exists:
        return false;
    default:
        break;
    }
    if (node_->lhs && !Formula(node_->lhs).first_order_free()) return false;
    if (node_->rhs && !Formula(node_->rhs).first_order_free()) return false;
    return true;
}

void Formula::collect_vars(std::set<std::string>& out) const {
    if (!node_) return;
    if (node_->tlhs.valid()) node_->tlhs.collect_vars(out);
    if (node_->trhs.valid()) node_->trhs.collect_vars(out);
    if (node_->lhs) Formula(node_->lhs).collect_vars(out);
    if (node_->rhs) Formula(node_->rhs).collect_vars(out);
}

Program Program::assign(std::string var, Term value) {
    return Program(pnode({.kind = ProgramKind::Assign, .var = std::move(var), .term = value}));
}
Program Program::havoc(std::string var) {
    return Program(pnode({.kind = ProgramKind::Havoc, .var = std::move(var)}));
}
Program Program::ode(std::vector<OdeEquation> equations, Formula domain) {
    return Program(
        pnode({.kind = ProgramKind::Ode, .odes = std::move(equations), .formula = domain}));
}
Program Program::test(Formula condition) {
    return Program(pnode({.kind = ProgramKind::Test, .formula = condition}));
}
Program Program::choice(Program a, Program b) {
    return Program(pnode({.kind = ProgramKind::Choice, .lhs = a.ptr(), .rhs = b.ptr()}));
}
Program Program::seq(Program a, Program b) {
    return Program(pnode({.kind = ProgramKind::Seq, .lhs = a.ptr(), .rhs = b.ptr()}));
}
Program Program::star(Program body) {
    return Program(pnode({.kind = ProgramKind::Star, .lhs = body.ptr()}));
}

bool Program::operator==(const Program& o) const {
    if (node_ == o.node_) return true;
    if (!node_ || !o.node_) return false;
    const ProgramNode& a = *node_;
    const ProgramNode& b = *o.node_;
    if (a.kind != b.kind || a.var != b.var) return false;
    if (a.term.valid() != b.term.valid() || (a.term.valid() && !(a.term == b.term))) return false;
    if (a.odes.size() != b.odes.size()) return false;
    for (size_t i = 0; i < a.odes.size(); ++i)
        if (a.odes[i].var != b.odes[i].var || !(a.odes[i].rhs == b.odes[i].rhs)) return false;
    if (a.formula.valid() != b.formula.valid() || (a.formula.valid() && !(a.formula == b.formula)))
        return false;
    if ((a.lhs != nullptr) != (b.lhs != nullptr)) return false;
    if (a.lhs && !(Program(a.lhs) == Program(b.lhs))) return false;
    if ((a.rhs != nullptr) != (b.rhs != nullptr)) return false;
    if (a.rhs && !(Program(a.rhs) == Program(b.rhs))) return false;
    return true;
}

bool Program::contains_ode() const {
    if (!node_) return false;
    if (node_->kind == ProgramKind::Ode) return true;
    if (node_->lhs && Program(node_->lhs).contains_ode()) return true;
    if (node_->rhs && Program(node_->rhs).contains_ode()) return true;
    return false;
}

void Program::collect_bound_vars(std::set<std::string>& out) const {
    if (!node_) return;
    switch (node_->kind) {
    case ProgramKind::Assign:
    case ProgramKind::Havoc:
        out.insert(node_->var);
        break;
    case ProgramKind::Ode:
        for (const auto& eq : node_->odes) out.insert(eq.var);
        break;
    default:
        break;
    }
    if (node_->lhs) Program(node_->lhs).collect_bound_vars(out);
    if (node_->rhs) Program(node_->rhs).collect_bound_vars(out);
}

std::set<std::string> Program::bound_vars() const {
    std::set<std::string> out;
    collect_bound_vars(out);
    return out;
}

// ---------------------------------------------------------------------------
// Printing. Precedence levels keep output minimal while re-parsable.

namespace {

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// term precedence: 0 add/sub, 1 mul/div, 2 unary/pow, 3 atom
void print_term(std::ostringstream& os, const Term& t, int parent_prec) {
    const TermNode& n = t.node();
    switch (n.kind) {
    case TermKind::Constant:
        if (n.value < 0) {
            if (parent_prec > 2) os << "(" << format_number(n.value) << ")";
            else os << format_number(n.value);
        } else {
            os << format_number(n.value);
        }
        break;
    case TermKind::StateVar:
    case TermKind::LogicalVar:
        os << n.name;
        break;
    case TermKind::Add: {
        bool paren = parent_prec > 0;
        if (paren) os << "(";
        print_term(os, t.lhs(), 0);
        os << " + ";
        print_term(os, t.rhs(), 1);
        if (paren) os << ")";
        break;
    }
    case TermKind::Sub: {
        bool paren = parent_prec > 0;
        if (paren) os << "(";
        print_term(os, t.lhs(), 0);
        os << " - ";
        print_term(os, t.rhs(), 1);
        if (paren) os << ")";
        break;
    }
    case TermKind::Mul: {
        bool paren = parent_prec > 1;
        if (paren) os << "(";
        print_term(os, t.lhs(), 1);
        os << "*";
        print_term(os, t.rhs(), 2);
        if (paren) os << ")";
        break;
    }
    case TermKind::Div: {
        bool paren = parent_prec > 1;
        if (paren) os << "(";
        print_term(os, t.lhs(), 1);
        os << "/";
        print_term(os, t.rhs(), 2);
        if (paren) os << ")";
        break;
    }
    case TermKind::Pow: {
        Term base = t.lhs();
        bool paren = base.kind() != TermKind::StateVar && base.kind() != TermKind::LogicalVar &&
                     base.kind() != TermKind::Sqrt &&
                     !(base.kind() == TermKind::Constant && base.node().value >= 0);
        if (paren) os << "(";
        print_term(os, base, paren ? 0 : 3);
        if (paren) os << ")";
        os << "^" << n.exponent;
        break;
    }
    case TermKind::Sqrt:
        os << "sqrt(";
        print_term(os, t.lhs(), 0);
        os << ")";
        break;
    case TermKind::Neg:
        os << "-";
        print_term(os, t.lhs(), 2);
        break;
    }
}

// formula precedence: 0 imply, 1 or, 2 and, 3 unary/atom
void print_formula(std::ostringstream& os, const Formula& f, int parent_prec);
void print_program(std::ostringstream& os, const Program& p, int parent_prec);

void print_formula(std::ostringstream& os, const Formula& f, int parent_prec) {
    const FormulaNode& n = f.node();
    switch (n.kind) {
    case FormulaKind::BoolConst:
        os << (n.bvalue ? "true" : "false");
        break;
    case FormulaKind::Cmp:
        print_term(os, n.tlhs, 0);
        os << " " << to_string(n.cmp) << " ";
        print_term(os, n.trhs, 0);
        break;
    case FormulaKind::Not:
        os << "!";
        if (f.lhs().kind() == FormulaKind::Cmp || f.lhs().kind() == FormulaKind::BoolConst) {
            os << "(";
            print_formula(os, f.lhs(), 0);
            os << ")";
        } else {
            print_formula(os, f.lhs(), 3);
        }
        break;
    case FormulaKind::And: {
        bool paren = parent_prec > 2;
        if (paren) os << "(";
        print_formula(os, f.lhs(), 2);
        os << " & ";
        print_formula(os, f.rhs(), 3);
        if (paren) os << ")";
        break;
    }
    case FormulaKind::Or: {
        bool paren = parent_prec > 1;
        if (paren) os << "(";
        print_formula(os, f.lhs(), 1);
        os << " | ";
        print_formula(os, f.rhs(), 2);
        if (paren) os << ")";
        break;
    }
    case FormulaKind::Imply: {
        bool paren = parent_prec > 0;
        if (paren) os << "(";
        print_formula(os, f.lhs(), 1);
        os << " -> ";
        print_formula(os, f.rhs(), 0);
        if (paren) os << ")";
        break;
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
        bool paren = parent_prec > 0;
        if (paren) os << "(";
        os << (n.kind == FormulaKind::Forall ? "forall " : "exists ") << n.var << ". ";
        print_formula(os, f.lhs(), 0);
        if (paren) os << ")";
        break;
    }
    case FormulaKind::Box:
        os << "[";
        print_program(os, *n.prog, 0);
        os << "]";
        print_formula(os, f.lhs(), 3);
        break;
    case FormulaKind::Diamond:
        os << "<";
        print_program(os, *n.prog, 0);
        os << ">";
        print_formula(os, f.lhs(), 3);
        break;
    }
}

// program precedence: 0 choice, 1 seq, 2 atom
void print_program(std::ostringstream& os, const Program& p, int parent_prec) {
    const ProgramNode& n = p.node();
    switch (n.kind) {
    case ProgramKind::Assign:
        os << n.var << " := ";
        print_term(os, n.term, 0);
        break;
    case ProgramKind::Havoc:
        os << n.var << " := *";
        break;
    case ProgramKind::Test:
        os << "?(";
        print_formula(os, n.formula, 0);
        os << ")";
        break;
    case ProgramKind::Ode: {
        os << "{";
        bool first = true;
        for (const auto& eq : n.odes) {
            if (!first) os << ", ";
            first = false;
            os << eq.var << "' = ";
            print_term(os, eq.rhs, 0);
        }
        os << " & ";
        print_formula(os, n.formula, 0);
        os << "}";
        break;
    }
    case ProgramKind::Choice: {
        bool paren = parent_prec > 0;
        if (paren) os << "(";
        print_program(os, p.lhs(), 0);
        os << " ++ ";
        print_program(os, p.rhs(), 1);
        if (paren) os << ")";
        break;
    }
    case ProgramKind::Seq: {
        bool paren = parent_prec > 1;
        if (paren) os << "(";
        print_program(os, p.lhs(), 1);
        os << "; ";
        print_program(os, p.rhs(), 2);
        if (paren) os << ")";
        break;
    }
    case ProgramKind::Star:
        os << "{";
        print_program(os, p.lhs(), 0);
        os << "}*";
        break;
    }
}

} // namespace

std::string to_string(CmpOp op) {
    switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ge: return ">=";
    case CmpOp::Gt: return ">";
    case CmpOp::Le: return "<=";
    case CmpOp::Lt: return "<";
    }
    return "?";
}

std::string to_string(const Term& t) {
    std::ostringstream os;
    print_term(os, t, 0);
    return os.str();
}

std::string to_string(const Formula& f) {
    std::ostringstream os;
    print_formula(os, f, 0);
    return os.str();
}

std::string to_string(const Program& p) {
    std::ostringstream os;
    print_program(os, p, 0);
    return os.str();
}

} // namespace ficut
