// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ficut {

struct ParseError : std::runtime_error {
    int line = 0;
    int column = 0;
    ParseError(std::string msg, int line_, int col_)
        : std::runtime_error(std::move(msg) + " at line " + std::to_string(line_) + ", column " +
                             std::to_string(col_)),
          line(line_),
          column(col_) {}
};

// Ill-posed model arithmetic (sqrt of a negative, division by zero).
struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Formula construct outside the contract of the exact evaluator.
struct UnsupportedConstruct : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ODE handed to the finite-grid transition oracle.
struct OracleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Goal does not match the shape a proof rule requires.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ficut
