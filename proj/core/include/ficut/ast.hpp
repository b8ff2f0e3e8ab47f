// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "ficut/symbols.hpp"

namespace ficut {

// Immutable expression trees with shared structure. All three ASTs are
// value types wrapping shared const nodes; copies are cheap and thread-safe.

class Term;
class Formula;
class Program;

enum class TermKind { Constant, StateVar, LogicalVar, Add, Sub, Mul, Div, Pow, Sqrt, Neg };

struct TermNode {
    TermKind kind;
    double value = 0.0;    // Constant
    std::string name;      // variables
    int exponent = 0;      // Pow, always >= 0
    std::shared_ptr<const TermNode> lhs, rhs;
};

class Term {
  public:
    Term() = default;
    explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}

    static Term constant(double v);
    static Term state_var(std::string name);
    static Term logical_var(std::string name);
    static Term add(Term a, Term b);
    static Term sub(Term a, Term b);
    static Term mul(Term a, Term b);
    static Term div(Term a, Term b);
    static Term pow(Term base, int exponent);
    static Term sqrt(Term a);
    static Term neg(Term a);

    const TermNode& node() const { return *node_; }
    std::shared_ptr<const TermNode> ptr() const { return node_; }
    bool valid() const { return node_ != nullptr; }
    TermKind kind() const { return node_->kind; }
    Term lhs() const { return Term(node_->lhs); }
    Term rhs() const { return Term(node_->rhs); }

    bool operator==(const Term& o) const;
    bool operator!=(const Term& o) const { return !(*this == o); }

    void collect_vars(std::set<std::string>& out) const;
    std::set<std::string> vars() const;

  private:
    std::shared_ptr<const TermNode> node_;
};

enum class CmpOp { Eq, Ge, Gt, Le, Lt };

enum class FormulaKind { BoolConst, Cmp, Not, And, Or, Imply, Forall, Exists, Box, Diamond };

struct FormulaNode {
    FormulaKind kind;
    bool bvalue = false; // BoolConst
    CmpOp cmp = CmpOp::Eq;
    Term tlhs, trhs;  // Cmp
    std::string var;  // quantifiers (logical variables only)
    std::shared_ptr<const FormulaNode> lhs, rhs;
    std::shared_ptr<const Program> prog; // modalities
};

class Formula {
  public:
    Formula() = default;
    explicit Formula(std::shared_ptr<const FormulaNode> node) : node_(std::move(node)) {}

    static Formula boolean(bool v);
    static Formula cmp(CmpOp op, Term lhs, Term rhs);
    static Formula negate(Formula f);
    static Formula conj(Formula a, Formula b);
    static Formula disj(Formula a, Formula b);
    static Formula imply(Formula a, Formula b);
    static Formula forall(std::string var, Formula body);
    static Formula exists(std::string var, Formula body);
    static Formula box(Program prog, Formula body);
    static Formula diamond(Program prog, Formula body);

    const FormulaNode& node() const { return *node_; }
    std::shared_ptr<const FormulaNode> ptr() const { return node_; }
    bool valid() const { return node_ != nullptr; }
    FormulaKind kind() const { return node_->kind; }
    Formula lhs() const { return Formula(node_->lhs); }
    Formula rhs() const { return Formula(node_->rhs); }

    bool operator==(const Formula& o) const;
    bool operator!=(const Formula& o) const { return !(*this == o); }

    bool is_true() const { return valid() && node_->kind == FormulaKind::BoolConst && node_->bvalue; }
    bool is_false() const {
        return valid() && node_->kind == FormulaKind::BoolConst && !node_->bvalue;
    }
    /// No modalities anywhere in the formula.
    bool modality_free() const;
    /// No modalities and no quantifiers (the exact-evaluator fragment).
    bool first_order_free() const;

    void collect_vars(std::set<std::string>& out) const;

  private:
    std::shared_ptr<const FormulaNode> node_;
};

enum class ProgramKind { Assign, Havoc, Ode, Test, Choice, Seq, Star };

struct OdeEquation {
    std::string var;
    Term rhs;
};

struct ProgramNode {
    ProgramKind kind;
    std::string var;  // Assign/Havoc target
    Term term;        // Assign value
    std::vector<OdeEquation> odes;
    Formula formula;  // Ode domain / Test condition
    std::shared_ptr<const ProgramNode> lhs, rhs; // Choice/Seq children, Star body in lhs
};

class Program {
  public:
    Program() = default;
    explicit Program(std::shared_ptr<const ProgramNode> node) : node_(std::move(node)) {}

    static Program assign(std::string var, Term value);
    static Program havoc(std::string var);
    static Program ode(std::vector<OdeEquation> equations, Formula domain);
    static Program test(Formula condition);
    static Program choice(Program a, Program b);
    static Program seq(Program a, Program b);
    static Program star(Program body);

    const ProgramNode& node() const { return *node_; }
    std::shared_ptr<const ProgramNode> ptr() const { return node_; }
    bool valid() const { return node_ != nullptr; }
    ProgramKind kind() const { return node_->kind; }
    Program lhs() const { return Program(node_->lhs); }
    Program rhs() const { return Program(node_->rhs); }

    bool operator==(const Program& o) const;
    bool operator!=(const Program& o) const { return !(*this == o); }

    bool contains_ode() const;
    /// State variables written by this program (assign/havoc targets, ode vars).
    void collect_bound_vars(std::set<std::string>& out) const;
    std::set<std::string> bound_vars() const;

  private:
    std::shared_ptr<const ProgramNode> node_;
};

// Pretty printers; output re-parses to an equal AST (round-trip property).
std::string to_string(const Term& t);
std::string to_string(const Formula& f);
std::string to_string(const Program& p);
std::string to_string(CmpOp op);

} // namespace ficut
