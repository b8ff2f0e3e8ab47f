// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot paths: interval pruning, symbolic Lie
// derivatives, the Lyapunov solver, RK4 integration, and a full proof run.

#include <benchmark/benchmark.h>

#include "ficut/deriv.hpp"
#include "ficut/icp.hpp"
#include "ficut/model.hpp"
#include "ficut/proof.hpp"
#include "ficut/sim.hpp"
#include "ficut/synth.hpp"
#include "ficut/tactic.hpp"
#include "ficut/transform.hpp"

using namespace ficut;

namespace {

Model plane() {
    return parse_model("statevar x, y. domain x in [-10, 10], y in [-10, 10].");
}

void bm_icp_unsat(benchmark::State& state) {
    Model m = plane();
    ConstraintSystem sys;
    sys.delta = 1e-4;
    sys.domain = Box{{"x", {-10, 10}}, {"y", {-10, 10}}};
    sys.constraints = constraints_of(
        {parse_formula("x^2 + y^2 <= 1", m), parse_formula("x + y >= 3", m)});
    for (auto _ : state) benchmark::DoNotOptimize(check(sys));
}
BENCHMARK(bm_icp_unsat);

void bm_icp_deltasat(benchmark::State& state) {
    Model m = plane();
    ConstraintSystem sys;
    sys.delta = 1e-4;
    sys.domain = Box{{"x", {-10, 10}}, {"y", {-10, 10}}};
    sys.constraints = constraints_of(
        {parse_formula("x^2 + y^2 <= 4", m), parse_formula("x * y >= 1", m)});
    for (auto _ : state) benchmark::DoNotOptimize(check(sys));
}
BENCHMARK(bm_icp_deltasat);

void bm_lie_derivative(benchmark::State& state) {
    Model m = plane();
    Term v = parse_term("0.3828125*x^2 + 0.9375*x*y + 2.375*y^2", m);
    std::vector<OdeEquation> field = {{"x", parse_term("-x + 4*y", m)},
                                      {"y", parse_term("-0.25*x - y", m)}};
    for (auto _ : state) benchmark::DoNotOptimize(simplify(lie_derivative(v, field)));
}
BENCHMARK(bm_lie_derivative);

void bm_lyapunov_solve(benchmark::State& state) {
    Matrix a = {{-1.0, 4.0}, {-0.25, -1.0}};
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_lyapunov_linear(a, identity(2), {"x", "y"}));
}
BENCHMARK(bm_lyapunov_solve);

void bm_rk4_integrate(benchmark::State& state) {
    Model m = plane();
    std::vector<OdeEquation> field = {{"x", parse_term("y", m)},
                                      {"y", parse_term("-x - 0.1*y", m)}};
    State x0{{"x", 1.0}, {"y", 0.0}};
    SimConfig cfg;
    cfg.h = 1e-3;
    cfg.t_max = 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(integrate_ode(field, x0, Formula::boolean(true), cfg));
}
BENCHMARK(bm_rk4_integrate);

void bm_two_mode_proof(benchmark::State& state) {
    Model m = parse_model(R"(
        statevar x, y, M.
        mode q0, q1.
        domain x in [-12, 12], y in [-12, 12], M in [0, 1].
        init :== M = q0 & x^2 + y^2 <= 10.
        safe :== x^2 + y^2 <= 50.
        body ::= ?(M = q0); {x' = -x, y' = -y}
              ++ ?(M = q0); ?(x^2 + y^2 < 1); M := q1
              ++ ?(M = q1); {x' = -x, y' = -x*x*y}.
        C :== M = q1 & x^2 + y^2 <= 1.
        Inv :== M = q0 & x^2 + y^2 <= 10.
        goal :== init -> [{body}*] safe.
    )");
    auto steps = parse_tactics("cut C\nloop-inv Inv\nauto\n");
    for (auto _ : state) {
        ProofContext ctx;
        ctx.domain = Box{{"x", {-12, 12}}, {"y", {-12, 12}}, {"M", {0, 1}}};
        ctx.delta = 1e-3;
        benchmark::DoNotOptimize(run_tactics(m, steps, ctx));
    }
}
BENCHMARK(bm_two_mode_proof);

} // namespace

BENCHMARK_MAIN();
