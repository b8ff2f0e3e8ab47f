// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "ficut/errors.hpp"
#include "ficut/model.hpp"
#include "ficut/tactic.hpp"

using namespace ficut;

namespace {

// A two-mode loop whose safety proof needs one cut and one loop invariant.
Model loop_model() {
    return parse_model(R"(
        statevar x, y, M.
        mode q0, q1.
        domain x in [-12, 12], y in [-12, 12], M in [0, 1].

        init :== M = q0 & x^2 + y^2 <= 10.
        safe :== x^2 + y^2 <= 50.

        m0 ::= ?(M = q0); {x' = -x, y' = -y}.
        body ::= m0
              ++ ?(M = q0); ?(x^2 + y^2 < 1); M := q1
              ++ ?(M = q1); {x' = -x, y' = -x*x*y}.

        C :== M = q1 & x^2 + y^2 <= 1.
        Inv :== M = q0 & x^2 + y^2 <= 10.
        goal :== init -> [{body}*] safe.
    )");
}

ProofContext loop_ctx(const Model& m) {
    ProofContext ctx;
    ctx.domain = Box{{"x", {-12, 12}}, {"y", {-12, 12}}, {"M", {0, 1}}};
    ctx.delta = 1e-3;
    return ctx;
}

} // namespace

TEST_CASE("tactic scripts parse into verbs, args, and options") {
    auto steps = parse_tactics(
        "# header comment\n"
        "\n"
        "cut C # trailing comment\n"
        "lyap-linear mode=m0 level=2 as=L\n"
        "auto budget=50\n");
    REQUIRE(steps.size() == 3);
    CHECK(steps[0].verb == "cut");
    REQUIRE(steps[0].args.size() == 1);
    CHECK(steps[0].args[0] == "C");
    CHECK(steps[0].line == 3);
    CHECK(steps[1].verb == "lyap-linear");
    CHECK(steps[1].opts.at("mode") == "m0");
    CHECK(steps[1].opts.at("as") == "L");
    CHECK(steps[2].opts.at("budget") == "50");

    CHECK_THROWS_AS(parse_tactics("frobnicate C\n"), ParseError);
}

TEST_CASE("cut, loop-inv, and auto close the two-mode loop") {
    Model m = loop_model();
    ProofContext ctx = loop_ctx(m);
    auto steps = parse_tactics("cut C\nloop-inv Inv\nauto\n");
    TacticOutcome out = run_tactics(m, steps, ctx);
    CHECK(out.proved);
    REQUIRE(out.log.size() == 3);
    CHECK(out.log[0] == "cut C: 3 subgoals");
    CHECK(out.log[1] == "loop-inv Inv: 3 subgoals");
    CHECK(out.log[2].find("0 open leaves") != std::string::npos);
}

TEST_CASE("auto alone leaves the loop open with a usable reason") {
    Model m = loop_model();
    ProofContext ctx = loop_ctx(m);
    TacticOutcome out = run_tactics(m, parse_tactics("auto\n"), ctx);
    CHECK(!out.proved);
    const ProofNode* n = out.root.get();
    while (!n->children.empty()) n = n->children.front().get();
    CHECK(n->reason.find("invariant") != std::string::npos);
}

TEST_CASE("lyap-linear registers a named cut formula for later steps") {
    Model m = loop_model();
    ProofContext ctx = loop_ctx(m);
    auto steps = parse_tactics("lyap-linear mode=m0 level=2 as=L\ncut L\n");
    TacticOutcome out = run_tactics(m, steps, ctx);
    REQUIRE(out.log.size() == 2);
    CHECK(out.log[0].find("lyap-linear m0: V =") == 0);
    CHECK(out.log[0].find("level 2") != std::string::npos);
    CHECK(out.log[1] == "cut L: 3 subgoals");
    CHECK(ctx.quads.size() == 1);

    // Without level= there is no sublevel set to name.
    ProofContext ctx2 = loop_ctx(m);
    CHECK_THROWS_AS(run_tactics(m, parse_tactics("lyap-linear mode=m0 as=L\n"), ctx2),
                    ModelError);
}

TEST_CASE("tactic errors carry enough context to act on") {
    Model m = loop_model();
    ProofContext ctx = loop_ctx(m);
    CHECK_THROWS_AS(run_tactics(m, parse_tactics("cut NoSuchFormula\n"), ctx), ModelError);
    CHECK_THROWS_AS(run_tactics(m, parse_tactics("cut C\n"), ctx, "nope"), ModelError);
    // `safe` is not an implication into a box modality.
    CHECK_THROWS_AS(run_tactics(m, parse_tactics("auto\n"), ctx, "safe"), ShapeError);
    // Both loops already consumed: the second cut has no star leaf to target.
    CHECK_THROWS_AS(run_tactics(m, parse_tactics("cut C\nloop-inv Inv\ncut C\n"), ctx),
                    ModelError);
}

TEST_CASE("reports are byte-identical across runs") {
    Model m = loop_model();
    auto steps = parse_tactics("cut C\nloop-inv Inv\nauto\n");

    ProofContext c1 = loop_ctx(m);
    TacticOutcome o1 = run_tactics(m, steps, c1);
    std::string r1 = render_report(o1, c1, steps);

    ProofContext c2 = loop_ctx(m);
    TacticOutcome o2 = run_tactics(m, steps, c2);
    std::string r2 = render_report(o2, c2, steps);

    CHECK(r1 == r2);
    CHECK(r1.find("\"status\": \"closed\"") != std::string::npos);
    CHECK(r1.back() == '\n');
}
