// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>

#include "ficut/enumerate.hpp"
#include "ficut/errors.hpp"
#include "ficut/model.hpp"
#include "ficut/proof.hpp"
#include "ficut/transform.hpp"

#include "generators.hpp"

using namespace ficut;

namespace {

Model plane_model() {
    return parse_model(R"(
        statevar x, y.
        domain x in [-10, 10], y in [-10, 10].
    )");
}

ProofContext plane_ctx(const Model& m) {
    ProofContext ctx;
    ctx.model = &m;
    for (const auto& v : m.symbols.state_vars()) {
        auto r = m.symbols.range(v);
        if (r) ctx.domain[v] = {r->first, r->second};
    }
    return ctx;
}

ProofNode make_node(const Model& m, const std::string& assumption, const std::string& program,
                    const std::string& conclusion) {
    ProofNode n;
    n.goal.assumption = parse_formula(assumption, m);
    if (!program.empty()) n.goal.program = parse_program(program, m);
    n.goal.conclusion = parse_formula(conclusion, m);
    return n;
}

Grid small_grid() {
    Grid g;
    g.vars = {"x", "y", "z"};
    g.values = {{-1.0, 0.0, 1.0}, {-1.0, 0.0, 1.0}, {-1.0, 0.0, 1.0}};
    return g;
}

// Truth of f at every grid state; nullopt when evaluation faults somewhere.
std::optional<std::vector<bool>> truth_table(const Formula& f, const Grid& g,
                                             const Environment& env) {
    std::vector<bool> out(g.size());
    for (size_t i = 0; i < g.size(); ++i) {
        try {
            out[i] = eval_formula(g.state(i), env, f);
        } catch (const EvalError&) {
            return std::nullopt;
        } catch (const UnsupportedConstruct&) {
            return std::nullopt;
        }
    }
    return out;
}

bool box_holds(const Relation& rel, const std::vector<bool>& post, size_t from) {
    for (const auto& [a, b] : rel)
        if (a == from && !post[b]) return false;
    return true;
}

} // namespace

TEST_CASE("conjuncts flatten nested conjunctions in order") {
    Model m = plane_model();
    Formula f = parse_formula("x > 0 & (y > 0 & x < 5)", m);
    auto cs = conjuncts(f);
    REQUIRE(cs.size() == 3);
    CHECK(cs[0] == parse_formula("x > 0", m));
    CHECK(cs[2] == parse_formula("x < 5", m));
    CHECK(conjoin(cs).kind() == FormulaKind::And);
    CHECK(conjuncts(Formula::boolean(true)).empty());
}

TEST_CASE("same_atom matches up to polynomial normal form") {
    Model m = plane_model();
    CHECK(same_atom(parse_formula("x^2 + y^2 <= 10", m), parse_formula("10 >= y*y + x*x", m)));
    CHECK(same_atom(parse_formula("x < 1", m), parse_formula("x - 1 < 0", m)));
    CHECK(!same_atom(parse_formula("x <= 1", m), parse_formula("x < 1", m)));
    CHECK(!same_atom(parse_formula("x <= 1", m), parse_formula("x <= 2", m)));
}

TEST_CASE("quadratic form and linear field extraction") {
    Model m = plane_model();
    auto q = quadratic_form_matrix(parse_term("2*x^2 + 3*x*y + 4*y^2", m), {"x", "y"});
    REQUIRE(q.has_value());
    CHECK((*q)[0][0] == 2.0);
    CHECK((*q)[0][1] == doctest::Approx(1.5));
    CHECK((*q)[1][1] == 4.0);
    CHECK(!quadratic_form_matrix(parse_term("x^2 + x", m), {"x", "y"}).has_value());
    CHECK(!quadratic_form_matrix(parse_term("x^2 + 1", m), {"x", "y"}).has_value());

    Program ode = parse_program("{x' = -3*x + 13*y, y' = -5*x - y}", m);
    auto a = linear_field_matrix(ode.node().odes, {"x", "y"});
    REQUIRE(a.has_value());
    CHECK((*a)[0][1] == 13.0);
    CHECK((*a)[1][0] == -5.0);
    Program nl = parse_program("{x' = x*y, y' = y}", m);
    CHECK(!linear_field_matrix(nl.node().odes, {"x", "y"}).has_value());
}

TEST_CASE("assumptions_unsat picks the cheapest sound route") {
    Model m = plane_model();
    ProofContext ctx = plane_ctx(m);

    // Complementary literals on the same polynomial.
    auto r1 = assumptions_unsat({parse_formula("x > 1", m), parse_formula("x <= 1", m)}, ctx);
    CHECK(r1.ok);
    CHECK(r1.route == "complementary");

    // Boundary-touching quadratic pair that icp alone cannot refute.
    auto r2 = assumptions_unsat(
        {parse_formula("x^2 + y^2 < 4", m), parse_formula("2*x^2 + 4*y^2 >= 16", m)}, ctx);
    CHECK(r2.ok);
    CHECK(r2.route == "quadratic-containment");

    // Plain interval reasoning.
    auto r3 = assumptions_unsat({parse_formula("x^2 + y^2 <= 1", m), parse_formula("x >= 2", m)},
                                ctx);
    CHECK(r3.ok);
    CHECK(r3.route == "icp");

    // Satisfiable: a witness box comes back.
    auto r4 = assumptions_unsat({parse_formula("x >= 2", m), parse_formula("x <= 3", m)}, ctx);
    CHECK(!r4.ok);
    CHECK(r4.witness.has_value());
}

TEST_CASE("entails closes boundary-exact conjuncts syntactically") {
    Model m = plane_model();
    ProofContext ctx = plane_ctx(m);
    std::vector<Formula> gamma = {parse_formula("2*x^2 + 4*y^2 <= 16", m)};
    // The negation touches the assumption boundary, so a δ-complete query
    // would stall; syntactic matching decides it.
    auto r = entails(gamma, parse_formula("2*x^2 + 4*y^2 <= 16", m), ctx);
    CHECK(r.ok);
    CHECK(r.route == "propositional");

    auto r2 = entails({parse_formula("x >= 3", m)}, parse_formula("x^2 >= 4", m), ctx);
    CHECK(r2.ok);
    auto r3 = entails({parse_formula("x >= 0", m)}, parse_formula("x >= 1", m), ctx);
    CHECK(!r3.ok);
}

TEST_CASE("forward invariant cut produces the three premises") {
    Model m = plane_model();
    ProofNode n = make_node(m, "x^2 + y^2 <= 10", "{x := x / 2}*", "x^2 + y^2 <= 10");
    Formula c = parse_formula("x^2 + y^2 <= 4", m);
    apply_fwd_inv_cut(n, c);
    REQUIRE(n.children.size() == 3);
    CHECK(n.rule == "fwd-inv-cut");

    // First premise: assumptions strengthened by !C, loop body restricted
    // by a trailing ?(!C).
    const Goal& g0 = n.children[0]->goal;
    CHECK(g0.assumption == Formula::conj(n.goal.assumption, Formula::negate(c)));
    REQUIRE(g0.program.has_value());
    CHECK(g0.program->kind() == ProgramKind::Star);
    CHECK(g0.program->lhs() == Program::seq(parse_program("x := x / 2", m),
                                            Program::test(Formula::negate(c))));
    CHECK(g0.conclusion == n.goal.conclusion);

    CHECK(n.children[1]->goal.assumption == c);
    CHECK(*n.children[1]->goal.program == parse_program("x := x / 2", m));
    CHECK(n.children[1]->goal.conclusion == c);
    CHECK(n.children[2]->goal.assumption == c);
    CHECK(!n.children[2]->goal.program.has_value());

    ProofNode bad = make_node(m, "x > 0", "x := 1", "x > 0");
    CHECK_THROWS_AS(apply_fwd_inv_cut(bad, c), ShapeError);
    ProofNode modal = make_node(m, "x > 0", "{x := 1}*", "x > 0");
    CHECK_THROWS_AS(apply_fwd_inv_cut(modal, parse_formula("[x := 1] x > 0", m)), ShapeError);
}

TEST_CASE("invariant rule produces the classic premises") {
    Model m = plane_model();
    ProofNode n = make_node(m, "x^2 + y^2 <= 1", "{x := x / 2}*", "x^2 + y^2 <= 10");
    Formula inv = parse_formula("x^2 + y^2 <= 2", m);
    apply_invariant_rule(n, inv);
    REQUIRE(n.children.size() == 3);
    CHECK(n.children[0]->goal.assumption == n.goal.assumption);
    CHECK(n.children[0]->goal.conclusion == inv);
    CHECK(!n.children[0]->goal.program.has_value());
    CHECK(n.children[1]->goal.assumption == inv);
    CHECK(n.children[1]->goal.conclusion == inv);
}

TEST_CASE("soundness of the cut rule against the transition oracle") {
    Model m = testing::generator_model();
    Grid g = small_grid();
    Environment env{{"p", 1.0}, {"q", -0.5}};

    int checked = 0;
    for (uint32_t seed = 1; seed <= 150; ++seed) {
        testing::Gen gen(seed);
        Program alpha = gen.discrete_program(2);
        Formula i = gen.formula(1);
        Formula c = gen.formula(1);
        Formula s = gen.formula(1);

        auto ti = truth_table(i, g, env);
        auto tc = truth_table(c, g, env);
        auto ts = truth_table(s, g, env);
        if (!ti || !tc || !ts) continue;

        Relation ra, rcut;
        try {
            ra = enumerate_transitions(alpha, g, env);
            rcut = enumerate_transitions(cut_restrict(alpha, c), g, env);
        } catch (const EvalError&) {
            continue;
        }

        // Premise 2: C -> [alpha]C.
        bool p2 = true;
        for (size_t st = 0; st < g.size() && p2; ++st)
            if ((*tc)[st] && !box_holds(ra, *tc, st)) p2 = false;
        // Premise 3: C -> S.
        bool p3 = true;
        for (size_t st = 0; st < g.size(); ++st)
            if ((*tc)[st] && !(*ts)[st]) p3 = false;
        // Premise 1: I & !C -> [(alpha; ?(!C))*]S.
        Relation rcut_star = star_closure(rcut, g.size());
        bool p1 = true;
        for (size_t st = 0; st < g.size() && p1; ++st)
            if ((*ti)[st] && !(*tc)[st] && !box_holds(rcut_star, *ts, st)) p1 = false;
        if (!(p1 && p2 && p3)) continue;

        // Conclusion: I -> [alpha*]S, exhaustively.
        Relation rstar = star_closure(ra, g.size());
        for (size_t st = 0; st < g.size(); ++st)
            if ((*ti)[st]) CHECK(box_holds(rstar, *ts, st));
        ++checked;
    }
    // The premises must have held non-vacuously often enough to mean something.
    CHECK(checked >= 30);
}

TEST_CASE("discharge closes straight-line discrete goals") {
    Model m = plane_model();
    ProofContext ctx = plane_ctx(m);

    ProofNode arith = make_node(m, "x >= 0", "x := x + 1", "x >= 1");
    discharge(arith, ctx);
    CHECK(arith.closed());
    CHECK(arith.rule == "arith");

    ProofNode dead = make_node(m, "x >= 0", "?(x < 0); x := x + 1", "x >= 100");
    discharge(dead, ctx);
    CHECK(dead.closed());
    CHECK(dead.rule == "excise");

    ProofNode havoc = make_node(m, "y > 3", "x := *; ?(x >= 1)", "x >= 0 & y > 3");
    discharge(havoc, ctx);
    CHECK(havoc.closed());

    ProofNode open_goal = make_node(m, "x >= 0", "x := x - 1", "x >= 0");
    discharge(open_goal, ctx);
    CHECK(!open_goal.closed());
    CHECK(!open_goal.reason.empty());

    ProofNode loop = make_node(m, "x >= 0", "{x := x + 1}*", "x >= 0");
    discharge(loop, ctx);
    CHECK(!loop.closed());
    CHECK(loop.reason.find("invariant") != std::string::npos);
}

TEST_CASE("discharge splits choices and records excised branches") {
    Model m = plane_model();
    ProofContext ctx = plane_ctx(m);
    ProofNode n = make_node(m, "x >= 0", "x := x + 1 ++ ?(x < -1); x := -100", "x >= 1");
    discharge(n, ctx);
    CHECK(n.closed());
    CHECK(n.rule == "split-choice");
    REQUIRE(n.children.size() == 2);
    CHECK(n.children[0]->rule == "arith");
    CHECK(n.children[1]->rule == "excise");
}

TEST_CASE("discharge closes invariant sublevel ode goals") {
    Model m = plane_model();
    ProofContext ctx = plane_ctx(m);

    ProofNode n = make_node(m, "x^2 + y^2 <= 1", "{x' = -x, y' = -y}", "x^2 + y^2 <= 1");
    discharge(n, ctx);
    CHECK(n.closed());
    CHECK(n.rule == "ode");
    REQUIRE(!n.log.empty());
    CHECK(n.log.front().find("analytic-decrease") != std::string::npos);

    // Strict sublevel stays strict along a non-increasing flow.
    ProofNode strict = make_node(m, "x^2 + y^2 < 4", "{x' = -x, y' = -y}", "x^2 + y^2 < 4");
    discharge(strict, ctx);
    CHECK(strict.closed());

    // An expanding flow leaves the goal open with a reason.
    ProofNode expanding = make_node(m, "x^2 + y^2 <= 1", "{x' = x, y' = y}", "x^2 + y^2 <= 1");
    discharge(expanding, ctx);
    CHECK(!expanding.closed());
    CHECK(!expanding.reason.empty());

    // Conjuncts untouched by the flow pass through the assumptions.
    ProofNode mixed = make_node(m, "x^2 <= 1 & y = 3", "{x' = -x}", "x^2 <= 1 & y = 3");
    discharge(mixed, ctx);
    CHECK(mixed.closed());
}

TEST_CASE("discharge handles vacuous domains and differential weakening") {
    Model m = plane_model();
    ProofContext ctx = plane_ctx(m);

    ProofNode vac = make_node(m, "x >= 2", "{x' = 1 & x < 1}", "y = 77");
    discharge(vac, ctx);
    CHECK(vac.closed());
    CHECK(vac.rule == "vacuous-ode");

    ProofNode weak = make_node(m, "x <= 5", "{x' = y, y' = x & x <= 5}", "x <= 5");
    discharge(weak, ctx);
    CHECK(weak.closed());
    REQUIRE(!weak.log.empty());
    CHECK(weak.log.front().find("differential weakening") != std::string::npos);
}

TEST_CASE("trailing tests fold into the ode conclusion") {
    Model m = plane_model();
    ProofContext ctx = plane_ctx(m);
    // The cut premise shape: flow followed by ?(!C), conclusion S. The test
    // is weakened away; the sublevel invariant closes the rest.
    ProofNode n = make_node(m, "x^2 + y^2 <= 1", "{x' = -x, y' = -y}; ?(!(x > 50))",
                            "x^2 + y^2 <= 1");
    discharge(n, ctx);
    CHECK(n.closed());
}

TEST_CASE("reset into a different flow closes through a connecting sublevel") {
    Model m = plane_model();
    ProofContext ctx = plane_ctx(m);
    // x^2 + y^2 is no certificate for this flow (the off-diagonal term makes
    // its derivative indefinite), so the goal needs the chain: image of the
    // reset, an invariant sublevel of the flow's own quadratic certificate,
    // and containment back in the target.
    ProofNode n = make_node(m, "x^2 + y^2 < 1",
                            "x := 0.1 * x; y := 0.1 * y; {x' = -x + 5*y, y' = -y}",
                            "x^2 + y^2 < 1");
    discharge(n, ctx);
    CHECK(n.closed());
    REQUIRE(!n.log.empty());
    CHECK(n.log.front().find("reset-flow chain") != std::string::npos);

    // Without the contracting reset the same goal stays open.
    ProofNode bare = make_node(m, "x^2 + y^2 < 1", "{x' = -x + 5*y, y' = -y}", "x^2 + y^2 < 1");
    discharge(bare, ctx);
    CHECK(!bare.closed());
}

TEST_CASE("barrier rule decides the invariance premise inline") {
    Model m = plane_model();
    ProofContext ctx = plane_ctx(m);

    BarrierCertificate cert;
    cert.vars = {"x"};
    cert.basis = {parse_term("x^2", m), parse_term("1", m)};
    cert.coeffs = {1.0, -1.0}; // B = x^2 - 1
    cert.domain = ctx.domain;

    ProofNode n = make_node(m, "x = 0", "{x' = -x}", "x < 2");
    apply_barrier_rule(n, cert, ctx);
    REQUIRE(n.children.size() == 3);
    CHECK(n.children[1]->closed());
    CHECK(n.children[1]->rule == "analytic-decrease");
    discharge(n, ctx);
    CHECK(n.closed());

    // Forced strict check runs the boundary query instead.
    ProofNode s = make_node(m, "x = 0", "{x' = -x}", "x < 2");
    apply_barrier_rule(s, cert, ctx, "strict");
    CHECK(s.children[1]->closed());
    CHECK(s.children[1]->rule == "strict-decrease");

    // An expanding field leaves the invariance premise open with a witness.
    ProofNode bad = make_node(m, "x = 0", "{x' = x}", "x < 2");
    apply_barrier_rule(bad, cert, ctx);
    CHECK(!bad.children[1]->closed());

    ProofNode shape = make_node(m, "x = 0", "x := 1", "x < 2");
    CHECK_THROWS_AS(apply_barrier_rule(shape, cert, ctx), ShapeError);
}

TEST_CASE("bounded reach envelope matches hand computation") {
    Model m = plane_model();
    Program ode = parse_program("{x' = 1, y' = -2*x}", m);
    Box domain{{"x", {0.0, 1.0}}, {"y", {-1.0, 1.0}}};
    Box init{{"x", {0.0, 0.0}}, {"y", {0.5, 0.5}}};

    ReachEnvelope zero = bounded_reach_envelope(ode.node().odes, init, 0.0, domain);
    CHECK(zero.box == init);

    ReachEnvelope env = bounded_reach_envelope(ode.node().odes, init, 0.5, domain);
    CHECK(env.box.at("x").lo == 0.0);
    CHECK(env.box.at("x").hi == doctest::Approx(0.5));
    CHECK(env.box.at("y").lo == doctest::Approx(0.5 - 1.0));
    CHECK(env.box.at("y").hi == doctest::Approx(0.5)); // -2x <= 0 on the domain

    Program sing = parse_program("{x' = 1 / x}", m);
    Box around_zero{{"x", {-1.0, 1.0}}};
    CHECK_THROWS_AS(bounded_reach_envelope(sing.node().odes, around_zero, 1.0, around_zero),
                    ModelError);
}

TEST_CASE("discharge uses an attached time bound for envelope goals") {
    Model m = parse_model(R"(
        statevar x.
        logicalvar l.
        domain x in [-10, 10].
        bounds l in [0, 0.5].
    )");
    ProofContext ctx;
    ctx.model = &m;
    ctx.domain = Box{{"x", {-10, 10}}, {"l", {0, 0.5}}};
    Program ode = parse_program("{x' = 1 - l}", m);
    ctx.time_bounds[to_string(ode)] = 0.004;

    ProofNode n = make_node(m, "x >= -0.001 & x <= 0.001", "{x' = 1 - l}",
                            "x <= 0.01 & x >= -0.01");
    discharge(n, ctx);
    CHECK(n.closed());
    REQUIRE(!n.log.empty());
    CHECK(n.log.front().find("envelope") != std::string::npos);
}

TEST_CASE("mode graph reachability") {
    Model m = parse_model(R"(
        statevar x, M.
        mode q0, q1, q2, fail.
        domain x in [-10, 10].
    )");
    Program body = parse_program(
        "?(M = q0); x := x + 1"
        " ++ ?(M = q0); M := q1"
        " ++ ?(M = q1); ?(x > 10); M := fail"
        " ++ ?(M = q2); M := q0",
        m);
    ModeGraph g = build_mode_graph(body, "M", m.symbols);
    CHECK(g.modes.size() == 4);
    REQUIRE(g.edges.size() == 3);

    auto unreachable = discrete_unreachable(g, {"q0"});
    CHECK(unreachable == std::set<std::string>{"q2"});
    auto from_q2 = discrete_unreachable(g, {"q2"});
    CHECK(from_q2.empty());
    auto from_q1 = discrete_unreachable(g, {"q1"});
    CHECK(from_q1 == std::set<std::string>{"q0", "q2"});
}

TEST_CASE("full cut proof of a two-mode loop closes under discharge") {
    Model m = parse_model(R"(
        statevar x, y, M.
        mode q0, q1.
        domain x in [-12, 12], y in [-12, 12].
    )");
    ProofContext ctx;
    ctx.model = &m;
    ctx.domain = Box{{"x", {-12, 12}}, {"y", {-12, 12}}, {"M", {0, 1}}};

    // Mode q0 decays toward the origin; entering the small disc switches to
    // a mode whose certificate is a wider off-center disc.
    ProofNode root = make_node(
        m, "M = q0 & x^2 + y^2 <= 10",
        "{?(M = q0); {x' = -x, y' = -y}"
        " ++ ?(M = q0); ?(x^2 + y^2 < 1); M := q1"
        " ++ ?(M = q1); {x' = -x, y' = -x*x*y}}*",
        "x^2 + y^2 <= 50");

    apply_fwd_inv_cut(root, parse_formula("M = q1 & x^2 + y^2 <= 1", m));
    REQUIRE(root.children.size() == 3);
    apply_invariant_rule(*root.children[0], parse_formula("M = q0 & x^2 + y^2 <= 10", m));
    discharge(root, ctx);
    root.refresh();
    CHECK(root.closed());
}
