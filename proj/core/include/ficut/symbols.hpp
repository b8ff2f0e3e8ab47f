// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ficut {

enum class VarKind { State, Logical };

/// Model-level symbol table. State and logical variable sets are disjoint;
/// mode names are interned constants (consecutive integers in declaration
/// order). Per-variable interval bounds give the icp domain of interest and
/// the ranges of bounded logical variables.
class SymbolTable {
  public:
    void declare_state(const std::string& name);
    void declare_logical(const std::string& name);
    void declare_mode(const std::string& name);
    void set_range(const std::string& var, double lo, double hi);

    bool is_state(const std::string& name) const;
    bool is_logical(const std::string& name) const;
    std::optional<double> mode_value(const std::string& name) const;
    std::optional<std::string> mode_name(double value) const;
    std::optional<std::pair<double, double>> range(const std::string& var) const;

    const std::vector<std::string>& state_vars() const { return state_vars_; }
    const std::vector<std::string>& logical_vars() const { return logical_vars_; }
    const std::vector<std::string>& modes() const { return mode_names_; }

  private:
    std::vector<std::string> state_vars_;
    std::vector<std::string> logical_vars_;
    std::vector<std::string> mode_names_;
    std::map<std::string, double> mode_values_;
    std::map<std::string, std::pair<double, double>> ranges_;
};

} // namespace ficut
