// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "ficut/ast.hpp"
#include "ficut/symbols.hpp"

namespace ficut {

/// Parsed model file: declarations plus named programs and formulas.
/// Program/formula references are inlined at parse time, so every stored
/// AST is self-contained.
struct Model {
    SymbolTable symbols;
    std::vector<std::string> program_order;
    std::vector<std::string> formula_order;
    std::map<std::string, Program> programs;
    std::map<std::string, Formula> formulas;

    bool has_program(const std::string& name) const { return programs.count(name) > 0; }
    bool has_formula(const std::string& name) const { return formulas.count(name) > 0; }
    const Program& program(const std::string& name) const;
    const Formula& formula(const std::string& name) const;
};

/// Parses a model document. Throws ParseError (with line/column) on syntax
/// errors, undeclared identifiers, and duplicate definitions.
Model parse_model(const std::string& text);

/// Helpers for tests and tactic files: parse a single construct against an
/// existing model's symbol table (named references resolve against `model`).
Term parse_term(const std::string& text, const Model& model);
Formula parse_formula(const std::string& text, const Model& model);
Program parse_program(const std::string& text, const Model& model);

} // namespace ficut
