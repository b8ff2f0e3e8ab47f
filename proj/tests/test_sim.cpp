// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"

#include <cmath>

#include "ficut/model.hpp"
#include "ficut/sim.hpp"

using namespace ficut;

namespace {

double endpoint_error(double h) {
    Model m = parse_model("statevar x.");
    SimConfig cfg;
    cfg.h = h;
    cfg.t_max = 1.0;
    Trace tr = integrate_ode({{"x", parse_term("-x", m)}}, {{"x", 1.0}},
                             Formula::boolean(true), cfg);
    return std::fabs(tr.samples.back().second.at("x") - std::exp(-1.0));
}

} // namespace

TEST_CASE("rk4 integrates the linear decay accurately") {
    CHECK(endpoint_error(1e-3) < 1e-6);
}

TEST_CASE("rk4 exhibits fourth-order convergence") {
    double e1 = endpoint_error(0.02);
    double e2 = endpoint_error(0.01);
    double ratio = e1 / e2;
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 32.0);
}

TEST_CASE("zero time budget yields the initial sample only") {
    Model m = parse_model("statevar x.");
    SimConfig cfg;
    cfg.t_max = 0.0;
    Trace tr = integrate_ode({{"x", parse_term("1", m)}}, {{"x", 0.0}},
                             Formula::boolean(true), cfg);
    CHECK(tr.samples.size() == 1);
    CHECK(tr.samples[0].second.at("x") == 0.0);
}

TEST_CASE("evolution domain exit stops at the last satisfying sample") {
    Model m = parse_model("statevar x.");
    SimConfig cfg;
    cfg.h = 0.01;
    cfg.t_max = 2.0;
    Trace tr = integrate_ode({{"x", parse_term("1", m)}}, {{"x", 0.0}},
                             parse_formula("x < 0.5", m), cfg);
    CHECK(tr.samples.back().second.at("x") < 0.5);
    REQUIRE(!tr.events.empty());
    CHECK(tr.events.back().kind == "domain-exit");
}

TEST_CASE("candidate certificate decreases along the curved mode's flow") {
    Model m = parse_model("statevar x1, x2.");
    SimConfig cfg;
    cfg.h = 1e-3;
    cfg.t_max = 3.0;
    Trace tr = integrate_ode({{"x1", parse_term("-(x2 + 1)*x1", m)},
                              {"x2", parse_term("x1^2", m)}},
                             {{"x1", 0.5}, {"x2", 0.5}}, Formula::boolean(true), cfg);
    Term V = parse_term("0.5*x1^2 + 0.5*(x2 - 2)^2", m);
    double prev = 1e100;
    for (const auto& [t, s] : tr.samples) {
        double v = eval_term(s, {}, V);
        CHECK(v <= prev + 1e-9);
        prev = v;
    }
}

TEST_CASE("sampled runs: tests reject, havoc respects ranges, seeds reproduce") {
    Model m = parse_model("statevar x.");
    Program p = parse_program("x := *; ?(x^2 < 4)", m);
    SimConfig cfg;
    cfg.havoc_samples = 1000;
    cfg.run_budget = 2000;
    cfg.havoc_ranges["x"] = {-3.0, 3.0};
    cfg.seed = 7;
    auto runs = sample_runs(p, {{"x", 0.0}}, {}, cfg);
    CHECK(!runs.empty());
    CHECK(runs.size() < 1000); // rejection removed some draws
    for (const auto& tr : runs) CHECK(std::fabs(tr.end_state().at("x")) < 2.0);

    auto runs2 = sample_runs(p, {{"x", 0.0}}, {}, cfg);
    REQUIRE(runs.size() == runs2.size());
    for (size_t i = 0; i < runs.size(); ++i)
        CHECK(runs[i].end_state().at("x") == runs2[i].end_state().at("x"));

    cfg.seed = 8;
    auto runs3 = sample_runs(p, {{"x", 0.0}}, {}, cfg);
    CHECK(runs3.size() != runs.size());
}

TEST_CASE("failed test aborts the run entirely") {
    Model m = parse_model("statevar x.");
    auto runs = sample_runs(parse_program("?(false)", m), {{"x", 1.0}}, {}, SimConfig{});
    CHECK(runs.empty());
}

TEST_CASE("star unrolls to the bound and includes zero iterations") {
    Model m = parse_model("statevar x.");
    SimConfig cfg;
    cfg.star_bound = 3;
    auto runs = sample_runs(parse_program("{x := x + 1}*", m), {{"x", 0.0}}, {}, cfg);
    std::set<double> endpoints;
    for (const auto& tr : runs) endpoints.insert(tr.end_state().at("x"));
    CHECK(endpoints == std::set<double>{0.0, 1.0, 2.0, 3.0});
}

TEST_CASE("ode runs are prefix-closed") {
    Model m = parse_model("statevar x.");
    SimConfig cfg;
    cfg.h = 0.1;
    cfg.t_max = 1.0;
    cfg.ode_prefixes = 11;
    auto runs = sample_runs(parse_program("{x' = 1}", m), {{"x", 0.0}}, {}, cfg);
    CHECK(runs.size() == 11); // one per sampled duration, including zero
    std::set<size_t> lengths;
    for (const auto& tr : runs) lengths.insert(tr.samples.size());
    CHECK(lengths.size() == 11);
    // Each shorter run is a prefix of the longest one.
    const Trace* longest = &runs[0];
    for (const auto& tr : runs)
        if (tr.samples.size() > longest->samples.size()) longest = &tr;
    for (const auto& tr : runs)
        for (size_t i = 0; i < tr.samples.size(); ++i) {
            CHECK(tr.samples[i].first == longest->samples[i].first);
            CHECK(tr.samples[i].second.at("x") == longest->samples[i].second.at("x"));
        }
}

TEST_CASE("mode switches are logged and discrete time stands still") {
    Model m = parse_model("statevar x, M. mode q0, q1.");
    auto runs = sample_runs(parse_program("M := q1; x := 2", m),
                            {{"x", 0.0}, {"M", 0.0}}, {}, SimConfig{});
    REQUIRE(runs.size() == 1);
    const Trace& tr = runs[0];
    CHECK(tr.samples.size() == 1); // same-timestamp updates collapse
    CHECK(tr.end_state().at("M") == 1.0);
    CHECK(tr.end_state().at("x") == 2.0);
    REQUIRE(tr.events.size() == 1);
    CHECK(tr.events[0].kind == "mode-switch");
}

TEST_CASE("csv export shape") {
    Model m = parse_model("statevar x.");
    SimConfig cfg;
    cfg.h = 0.5;
    cfg.t_max = 1.0;
    Trace tr = integrate_ode({{"x", parse_term("1", m)}}, {{"x", 0.0}},
                             Formula::boolean(true), cfg);
    std::string csv = trace_csv(tr, {"x"});
    CHECK(csv.rfind("t,x\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4); // header + 3 samples
    std::string ev = events_csv(tr);
    CHECK(ev.rfind("t,kind,detail\n", 0) == 0);
}
