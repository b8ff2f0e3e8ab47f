// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ficut/model.hpp"
#include "ficut/proof.hpp"

namespace ficut {

/// One line of a tactic script: a verb, positional arguments, and key=value
/// options. `line` is 1-based for error reporting.
struct TacticStep {
    std::string verb;
    std::vector<std::string> args;
    std::map<std::string, std::string> opts;
    int line = 0;
};

/// Parses a tactic script: one tactic per line, '#' starts a comment.
/// Throws ParseError on unknown verbs.
std::vector<TacticStep> parse_tactics(const std::string& text);

struct TacticOutcome {
    std::unique_ptr<ProofNode> root;
    std::vector<std::string> log; // one entry per executed step
    bool proved = false;
};

/// Runs the script against the named goal formula, which must be an
/// implication into a box modality. Certificates built along the way are
/// registered in ctx; `cut`/`loop-inv` resolve names against formulas the
/// script registered (via as=...) before the model's own definitions.
TacticOutcome run_tactics(const Model& model, const std::vector<TacticStep>& steps,
                          ProofContext& ctx, const std::string& goal_name = "goal");

/// JSON rendering of the proof tree plus run parameters. Byte-identical
/// output for identical inputs.
std::string render_report(const TacticOutcome& outcome, const ProofContext& ctx,
                          const std::vector<TacticStep>& steps);

} // namespace ficut
