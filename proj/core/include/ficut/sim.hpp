// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ficut/ast.hpp"
#include "ficut/eval.hpp"

namespace ficut {

struct TraceEvent {
    double time;
    std::string kind; // mode-switch | domain-exit | havoc-sample
    std::string detail;
};

/// Timestamped sample sequence. Discrete steps happen in zero time, so a
/// sample appended at the current timestamp replaces the endpoint instead of
/// breaking the strictly-increasing time invariant; the event log keeps the
/// record of what happened.
struct Trace {
    std::vector<std::pair<double, State>> samples;
    std::vector<TraceEvent> events;
    bool budget_exhausted = false;

    void append(double t, State s);
    double end_time() const { return samples.empty() ? 0.0 : samples.back().first; }
    const State& end_state() const { return samples.back().second; }
};

struct SimConfig {
    double h = 1e-3;      // integrator step
    double t_max = 1.0;   // per-ode time budget
    int havoc_samples = 8;
    std::map<std::string, std::pair<double, double>> havoc_ranges;
    int run_budget = 256; // cap on runs explored per call
    int star_bound = 4;
    int ode_prefixes = 16; // nondeterministic ode durations emitted per flow
    uint32_t seed = 0;
    std::string mode_var = "M";
};

/// Fixed-step RK4 flow of the field from x0 at time t0 until the evolution
/// domain fails at a sample point or the time budget runs out. The trace
/// ends at the last domain-satisfying sample.
Trace integrate_ode(const std::vector<OdeEquation>& field, const State& x0, const Formula& H,
                    const SimConfig& cfg, const Environment& env = {}, double t0 = 0.0);

/// Seeded sampling of the program's run set: assign/test exact, havoc drawn
/// uniformly from configured ranges, choice explores both branches, ode
/// durations sampled as prefixes of the flow, star unrolled to the bound.
/// Deterministic for a fixed config. Budget exhaustion sets the flag on the
/// result traces, it is not an error.
std::vector<Trace> sample_runs(const Program& alpha, const State& x0, const Environment& env,
                               const SimConfig& cfg);

/// CSV export: header "t,var1,...,varn", one row per sample.
std::string trace_csv(const Trace& trace, const std::vector<std::string>& vars);
/// Sidecar event CSV: "t,kind,detail".
std::string events_csv(const Trace& trace);

} // namespace ficut
