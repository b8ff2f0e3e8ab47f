// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/symbols.hpp"

#include <algorithm>

#include "ficut/errors.hpp"

namespace ficut {

void SymbolTable::declare_state(const std::string& name) {
    if (is_state(name) || is_logical(name) || mode_values_.count(name))
        throw ModelError("duplicate declaration of '" + name + "'");
    state_vars_.push_back(name);
}

void SymbolTable::declare_logical(const std::string& name) {
    if (is_state(name) || is_logical(name) || mode_values_.count(name))
        throw ModelError("duplicate declaration of '" + name + "'");
    logical_vars_.push_back(name);
}

void SymbolTable::declare_mode(const std::string& name) {
    if (is_state(name) || is_logical(name) || mode_values_.count(name))
        throw ModelError("duplicate declaration of '" + name + "'");
    mode_values_[name] = static_cast<double>(mode_names_.size());
    mode_names_.push_back(name);
}

void SymbolTable::set_range(const std::string& var, double lo, double hi) {
    if (!is_state(var) && !is_logical(var))
        throw ModelError("range declared for unknown variable '" + var + "'");
    if (lo > hi) throw ModelError("empty range for '" + var + "'");
    ranges_[var] = {lo, hi};
}

bool SymbolTable::is_state(const std::string& name) const {
    return std::find(state_vars_.begin(), state_vars_.end(), name) != state_vars_.end();
}

bool SymbolTable::is_logical(const std::string& name) const {
    return std::find(logical_vars_.begin(), logical_vars_.end(), name) != logical_vars_.end();
}

std::optional<double> SymbolTable::mode_value(const std::string& name) const {
    auto it = mode_values_.find(name);
    if (it == mode_values_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> SymbolTable::mode_name(double value) const {
    for (const auto& [name, v] : mode_values_)
        if (v == value) return name;
    return std::nullopt;
}

std::optional<std::pair<double, double>> SymbolTable::range(const std::string& var) const {
    auto it = ranges_.find(var);
    if (it == ranges_.end()) return std::nullopt;
    return it->second;
}

} // namespace ficut
