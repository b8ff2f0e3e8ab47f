// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/sim.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "ficut/errors.hpp"

namespace ficut {

void Trace::append(double t, State s) {
    if (!samples.empty() && samples.back().first == t) {
        samples.back().second = std::move(s);
        return;
    }
    samples.emplace_back(t, std::move(s));
}

Trace integrate_ode(const std::vector<OdeEquation>& field, const State& x0, const Formula& H,
                    const SimConfig& cfg, const Environment& env, double t0) {
    if (cfg.h <= 0.0) throw ModelError("integrator step must be positive");
    Trace tr;
    tr.append(t0, x0);
    if (!eval_formula(x0, env, H)) return tr; // zero-duration flow only

    auto deriv = [&](const State& s) {
        State d;
        for (const auto& eq : field) d[eq.var] = eval_term(s, env, eq.rhs);
        return d;
    };
    auto shifted = [&](const State& s, const State& k, double scale) {
        State r = s;
        for (const auto& [v, dv] : k) r[v] += scale * dv;
        return r;
    };

    long steps = std::lround(cfg.t_max / cfg.h);
    State x = x0;
    double t = t0;
    for (long i = 0; i < steps; ++i) {
        State k1 = deriv(x);
        State k2 = deriv(shifted(x, k1, cfg.h / 2.0));
        State k3 = deriv(shifted(x, k2, cfg.h / 2.0));
        State k4 = deriv(shifted(x, k3, cfg.h));
        State next = x;
        for (const auto& eq : field) {
            const std::string& v = eq.var;
            next[v] = x.at(v) + cfg.h / 6.0 * (k1[v] + 2.0 * k2[v] + 2.0 * k3[v] + k4[v]);
        }
        double tnext = t0 + cfg.h * static_cast<double>(i + 1);
        if (!eval_formula(next, env, H)) {
            tr.events.push_back({tnext, "domain-exit", to_string(H)});
            return tr;
        }
        tr.append(tnext, next);
        x = std::move(next);
        t = tnext;
    }
    return tr;
}

namespace {

struct Explorer {
    const SimConfig& cfg;
    const Environment& env;
    std::mt19937 rng;
    bool exhausted = false;

    explicit Explorer(const SimConfig& c, const Environment& e) : cfg(c), env(e), rng(c.seed) {}

    double draw(double lo, double hi) {
        // Integer draw keeps cross-platform determinism (distribution
        // implementations vary; raw engine output does not).
        const uint32_t r = rng();
        return lo + (hi - lo) * (static_cast<double>(r) / 4294967295.0);
    }

    void cap(std::vector<Trace>& runs) {
        if (runs.size() > static_cast<size_t>(cfg.run_budget)) {
            runs.resize(static_cast<size_t>(cfg.run_budget));
            exhausted = true;
        }
    }

    std::vector<Trace> run(const Program& p, const Trace& so_far) {
        switch (p.kind()) {
        case ProgramKind::Assign: {
            Trace t = so_far;
            State s = t.end_state();
            double v;
            try {
                v = eval_term(s, env, p.node().term);
            } catch (const EvalError&) {
                return {};
            }
            if (p.node().var == cfg.mode_var && s.count(cfg.mode_var) &&
                s.at(cfg.mode_var) != v)
                t.events.push_back({t.end_time(), "mode-switch", p.node().var});
            s[p.node().var] = v;
            t.append(t.end_time(), std::move(s));
            return {std::move(t)};
        }
        case ProgramKind::Havoc: {
            auto it = cfg.havoc_ranges.find(p.node().var);
            if (it == cfg.havoc_ranges.end())
                throw ModelError("no havoc range configured for '" + p.node().var + "'");
            std::vector<Trace> out;
            for (int i = 0; i < cfg.havoc_samples; ++i) {
                double v = draw(it->second.first, it->second.second);
                Trace t = so_far;
                State s = t.end_state();
                s[p.node().var] = v;
                t.events.push_back({t.end_time(), "havoc-sample", p.node().var});
                t.append(t.end_time(), std::move(s));
                out.push_back(std::move(t));
            }
            cap(out);
            return out;
        }
        case ProgramKind::Test: {
            try {
                if (!eval_formula(so_far.end_state(), env, p.node().formula)) return {};
            } catch (const EvalError&) {
                return {};
            }
            return {so_far};
        }
        case ProgramKind::Ode: {
            try {
                // No run at all (not even zero duration) from outside H.
                if (!eval_formula(so_far.end_state(), env, p.node().formula)) return {};
            } catch (const EvalError&) {
                return {};
            }
            Trace flow = integrate_ode(p.node().odes, so_far.end_state(), p.node().formula, cfg,
                                       env, so_far.end_time());
            // Every prefix of the flow is a run; emit a spread of durations
            // including zero and the full flow.
            std::vector<Trace> out;
            size_t n = flow.samples.size();
            size_t count = std::min<size_t>(n, static_cast<size_t>(cfg.ode_prefixes));
            for (size_t k = 0; k < count; ++k) {
                size_t last = count == 1 ? 0 : (n - 1) * k / (count - 1);
                Trace t = so_far;
                for (size_t i = 1; i <= last; ++i)
                    t.append(flow.samples[i].first, flow.samples[i].second);
                if (last == n - 1)
                    for (const auto& ev : flow.events) t.events.push_back(ev);
                out.push_back(std::move(t));
            }
            cap(out);
            return out;
        }
        case ProgramKind::Choice: {
            std::vector<Trace> out = run(p.lhs(), so_far);
            std::vector<Trace> right = run(p.rhs(), so_far);
            out.insert(out.end(), right.begin(), right.end());
            cap(out);
            return out;
        }
        case ProgramKind::Seq: {
            std::vector<Trace> out;
            for (const Trace& t : run(p.lhs(), so_far)) {
                std::vector<Trace> rest = run(p.rhs(), t);
                out.insert(out.end(), rest.begin(), rest.end());
                cap(out);
                if (out.size() == static_cast<size_t>(cfg.run_budget)) break;
            }
            return out;
        }
        case ProgramKind::Star: {
            std::vector<Trace> out{so_far};
            std::vector<Trace> frontier{so_far};
            for (int k = 0; k < cfg.star_bound && !frontier.empty(); ++k) {
                std::vector<Trace> next;
                for (const Trace& t : frontier) {
                    std::vector<Trace> step = run(p.lhs(), t);
                    next.insert(next.end(), step.begin(), step.end());
                    cap(next);
                }
                out.insert(out.end(), next.begin(), next.end());
                cap(out);
                frontier = std::move(next);
            }
            return out;
        }
        }
        throw ModelError("corrupt program");
    }
};

} // namespace

std::vector<Trace> sample_runs(const Program& alpha, const State& x0, const Environment& env,
                               const SimConfig& cfg) {
    Explorer ex(cfg, env);
    Trace start;
    start.append(0.0, x0);
    std::vector<Trace> runs = ex.run(alpha, start);
    if (ex.exhausted)
        for (Trace& t : runs) t.budget_exhausted = true;
    return runs;
}

std::string trace_csv(const Trace& trace, const std::vector<std::string>& vars) {
    std::ostringstream os;
    os.precision(12);
    os << "t";
    for (const auto& v : vars) os << "," << v;
    os << "\n";
    for (const auto& [t, s] : trace.samples) {
        os << t;
        for (const auto& v : vars) os << "," << s.at(v);
        os << "\n";
    }
    return os.str();
}

std::string events_csv(const Trace& trace) {
    std::ostringstream os;
    os.precision(12);
    os << "t,kind,detail\n";
    for (const auto& ev : trace.events) os << ev.time << "," << ev.kind << "," << ev.detail << "\n";
    return os.str();
}

} // namespace ficut
