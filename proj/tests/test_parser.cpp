// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include "ficut/errors.hpp"
#include "ficut/model.hpp"

#include "generators.hpp"

using namespace ficut;

TEST_CASE("declarations and definitions") {
    Model m = parse_model(R"(
        statevar x1, x2, M.
        logicalvar l1.
        mode q0, q1, fail.
        domain x1 in [-12, 12], x2 in [-12, 12].
        bounds l1 in [-0.86, 0.74].

        safe :== !(M = fail).
        decay ::= {x1' = -x1, x2' = -x2 & true}.
        loop ::= {decay}*.
    )");
    CHECK(m.symbols.is_state("x1"));
    CHECK(m.symbols.is_state("M"));
    CHECK(m.symbols.is_logical("l1"));
    CHECK(m.symbols.mode_value("q0") == 0.0);
    CHECK(m.symbols.mode_value("q1") == 1.0);
    CHECK(m.symbols.mode_value("fail") == 2.0);
    CHECK(m.symbols.range("x1") == std::pair{-12.0, 12.0});
    CHECK(m.symbols.range("l1") == std::pair{-0.86, 0.74});
    CHECK(m.has_formula("safe"));
    CHECK(m.program("loop").kind() == ProgramKind::Star);
    CHECK(m.program("loop").lhs() == m.program("decay"));
}

TEST_CASE("term precedence and associativity") {
    Model m = parse_model("statevar x, y, z.");
    CHECK(parse_term("x + y * z", m) ==
          Term::add(Term::state_var("x"), Term::mul(Term::state_var("y"), Term::state_var("z"))));
    CHECK(parse_term("x - y - z", m) ==
          Term::sub(Term::sub(Term::state_var("x"), Term::state_var("y")), Term::state_var("z")));
    CHECK(parse_term("-x^2", m) == Term::neg(Term::pow(Term::state_var("x"), 2)));
    CHECK(parse_term("(x + y)^2", m) ==
          Term::pow(Term::add(Term::state_var("x"), Term::state_var("y")), 2));
    CHECK(parse_term("x / y / z", m) ==
          Term::div(Term::div(Term::state_var("x"), Term::state_var("y")), Term::state_var("z")));
    CHECK(parse_term("2e-3", m) == Term::constant(0.002));
}

TEST_CASE("formula precedence") {
    Model m = parse_model("statevar x, y.");
    Formula f = parse_formula("x > 0 & y > 0 | x < 0 -> y = 0", m);
    CHECK(f.kind() == FormulaKind::Imply);
    CHECK(f.lhs().kind() == FormulaKind::Or);
    CHECK(f.lhs().lhs().kind() == FormulaKind::And);

    Formula g = parse_formula("!(x = 0) & y >= 1", m);
    CHECK(g.kind() == FormulaKind::And);
    CHECK(g.lhs().kind() == FormulaKind::Not);
}

TEST_CASE("parenthesized formula versus comparison disambiguation") {
    Model m = parse_model("statevar x, y. safe :== x > 0.");
    CHECK(parse_formula("(x + 1) < 2", m).kind() == FormulaKind::Cmp);
    CHECK(parse_formula("(x > 0 | y > 0)", m).kind() == FormulaKind::Or);
    CHECK(parse_formula("(safe) & y < 1", m).lhs() == m.formula("safe"));
}

TEST_CASE("programs and modalities") {
    Model m = parse_model("statevar x, M. mode q0, q1.");
    Program p = parse_program("x := 1; M := q1 ++ ?(x > 0)", m);
    CHECK(p.kind() == ProgramKind::Choice);
    CHECK(p.lhs().kind() == ProgramKind::Seq);

    Program h = parse_program("x := *", m);
    CHECK(h.kind() == ProgramKind::Havoc);

    Formula box = parse_formula("[{x := x + 1}*] x > 0", m);
    CHECK(box.kind() == FormulaKind::Box);
    CHECK(box.node().prog->kind() == ProgramKind::Star);

    Formula dia = parse_formula("<x := 0> x = 0", m);
    CHECK(dia.kind() == FormulaKind::Diamond);

    Program o = parse_program("{x' = -x & x >= 0}", m);
    CHECK(o.kind() == ProgramKind::Ode);
    CHECK(o.node().odes.size() == 1);
    CHECK(o.node().formula.kind() == FormulaKind::Cmp);

    // Domain defaults to true when omitted.
    Program o2 = parse_program("{x' = 1}", m);
    CHECK(o2.node().formula.is_true());
}

TEST_CASE("quantifiers bind logical variables") {
    Model m = parse_model("statevar x. logicalvar p.");
    Formula f = parse_formula("forall p. p * x >= 0 -> exists p. p = x", m);
    CHECK(f.kind() == FormulaKind::Forall);
    CHECK(f.node().var == "p");
    CHECK_THROWS_AS(parse_formula("forall x. x > 0", m), ParseError);
}

TEST_CASE("parse errors carry positions and reasons") {
    CHECK_THROWS_AS(parse_model("statevar x. statevar x."), ParseError);
    CHECK_THROWS_AS(parse_model("statevar x. f :== y > 0."), ParseError);
    CHECK_THROWS_AS(parse_model("statevar x. a ::= x := 1. a ::= x := 2."), ParseError);
    CHECK_THROWS_AS(parse_model("statevar x. o ::= {x' = 1, x' = 2}."), ParseError);
    CHECK_THROWS_AS(parse_model("statevar x. p ::= y := 1."), ParseError);
    CHECK_THROWS_AS(parse_model("statevar x. f :== x > ."), ParseError);
    try {
        parse_model("statevar x.\nf :== y > 0.");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("printer output re-parses to an equal tree") {
    Model m = testing::generator_model();
    for (uint32_t seed = 1; seed <= 300; ++seed) {
        testing::Gen gen(seed);
        Term t = gen.term(4);
        CAPTURE(to_string(t));
        CHECK(parse_term(to_string(t), m) == t);

        Formula f = gen.formula(3);
        CAPTURE(to_string(f));
        CHECK(parse_formula(to_string(f), m) == f);

        Program p = gen.program(3);
        CAPTURE(to_string(p));
        CHECK(parse_program(to_string(p), m) == p);

        Formula boxed = Formula::box(gen.program(2), gen.formula(2));
        CAPTURE(to_string(boxed));
        CHECK(parse_formula(to_string(boxed), m) == boxed);
    }
}

TEST_CASE("comments and whitespace are skipped") {
    Model m = parse_model("// leading comment\nstatevar x. // trailing\nf :== x > 0.");
    CHECK(m.has_formula("f"));
}
