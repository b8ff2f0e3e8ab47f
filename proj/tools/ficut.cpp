// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line frontend: prove a model against a tactic script, run a
// certificate synthesis pass, or sample simulation traces.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"

#include "ficut/errors.hpp"
#include "ficut/model.hpp"
#include "ficut/sim.hpp"
#include "ficut/synth.hpp"
#include "ficut/tactic.hpp"
#include "ficut/transform.hpp"

namespace {

using namespace ficut;

constexpr int kExitProved = 0;
constexpr int kExitError = 1;
constexpr int kExitOpen = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ModelError("cannot write " + path);
    out << text;
}

uint64_t box_budget_from_env() {
    if (const char* env = std::getenv("FICUT_BOX_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
        throw ModelError("FICUT_BOX_BUDGET is not a positive integer");
    }
    return kDefaultBoxBudget;
}

Box declared_domain(const Model& model) {
    Box domain;
    auto add = [&](const std::vector<std::string>& vars) {
        for (const auto& v : vars)
            if (auto r = model.symbols.range(v)) domain[v] = {r->first, r->second};
    };
    add(model.symbols.state_vars());
    add(model.symbols.logical_vars());
    return domain;
}

std::shared_ptr<const ProgramNode> first_ode(const std::shared_ptr<const ProgramNode>& p) {
    if (!p) return nullptr;
    switch (p->kind) {
    case ProgramKind::Ode: return p;
    case ProgramKind::Seq:
    case ProgramKind::Choice:
        if (auto hit = first_ode(p->lhs)) return hit;
        return first_ode(p->rhs);
    case ProgramKind::Star: return first_ode(p->lhs);
    default: return nullptr;
    }
}

void list_open_leaves(const ProofNode& node, std::vector<const ProofNode*>& out) {
    if (node.children.empty()) {
        if (node.status != ProofStatus::Closed) out.push_back(&node);
        return;
    }
    for (const auto& c : node.children) list_open_leaves(*c, out);
}

std::string base_var(const std::string& name) {
    auto at = name.find('@');
    return at == std::string::npos ? name : name.substr(0, at);
}

void dump_open_queries(const ProofNode& root, const Model& model, double delta,
                       const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::vector<const ProofNode*> open;
    list_open_leaves(root, open);
    int n = 0;
    for (const ProofNode* leaf : open) {
        if (leaf->goal.program || !leaf->goal.conclusion.modality_free()) continue;
        Formula negated;
        try {
            negated = nnf(Formula::negate(leaf->goal.conclusion));
        } catch (const UnsupportedConstruct&) {
            continue;
        }
        for (const auto& disjunct : dnf(Formula::conj(leaf->goal.assumption, negated))) {
            ConstraintSystem sys;
            sys.delta = delta;
            try {
                sys.constraints = constraints_of(disjunct);
            } catch (const UnsupportedConstruct&) {
                continue;
            }
            std::set<std::string> vars;
            for (const auto& f : disjunct) f.collect_vars(vars);
            bool complete = true;
            for (const auto& v : vars) {
                auto r = model.symbols.range(base_var(v));
                if (!r) {
                    complete = false;
                    break;
                }
                sys.domain[v] = {r->first, r->second};
            }
            if (!complete) continue;
            std::ostringstream name;
            name << dir << "/query" << n++ << ".txt";
            write_file(name.str(), dump_query(sys));
        }
    }
    std::cout << "wrote " << n << " queries to " << dir << "\n";
}

int cmd_prove(const std::string& model_path, const std::string& tactic_path, double delta,
              double eps, const std::string& goal_name, const std::string& report_path,
              const std::string& dump_dir) {
    Model model = parse_model(read_file(model_path));
    std::vector<TacticStep> steps = parse_tactics(read_file(tactic_path));

    ProofContext ctx;
    ctx.domain = declared_domain(model);
    ctx.delta = delta;
    ctx.eps = eps;
    ctx.box_budget = box_budget_from_env();

    TacticOutcome outcome = run_tactics(model, steps, ctx, goal_name);
    for (const auto& line : outcome.log) std::cout << line << "\n";

    if (!report_path.empty()) write_file(report_path, render_report(outcome, ctx, steps));
    if (!dump_dir.empty()) dump_open_queries(*outcome.root, model, delta, dump_dir);

    if (outcome.proved) {
        std::cout << "proved\n";
        return kExitProved;
    }
    std::vector<const ProofNode*> open;
    list_open_leaves(*outcome.root, open);
    std::cout << "open (" << open.size() << " leaves)\n";
    for (const ProofNode* leaf : open) {
        std::cout << "  " << to_string(leaf->goal) << "\n";
        if (!leaf->reason.empty()) std::cout << "    reason: " << leaf->reason << "\n";
        for (const auto& line : leaf->log) std::cout << "    " << line << "\n";
    }
    return kExitOpen;
}

int cmd_synth(const std::string& model_path, const std::string& mode,
              const std::string& method, int degree, uint32_t seed, double delta,
              const std::string& out_path) {
    Model model = parse_model(read_file(model_path));
    if (!model.has_program(mode)) throw ModelError("unknown program " + mode);
    auto ode = first_ode(model.program(mode).ptr());
    if (!ode) throw ModelError("program " + mode + " contains no ode");

    std::vector<std::string> vars;
    for (const auto& eq : ode->odes) vars.push_back(eq.var);
    std::sort(vars.begin(), vars.end());

    if (method == "lyap-linear") {
        auto A = linear_field_matrix(ode->odes, vars);
        if (!A) throw ModelError("flow of " + mode + " is not linear");
        auto cert = solve_lyapunov_linear(*A, identity(vars.size()), vars);
        if (!cert) throw ModelError("flow of " + mode + " admits no quadratic certificate");
        cert->provenance["method"] = "lyap-linear";
        cert->provenance["mode"] = mode;
        write_file(out_path, serialize(*cert));
        std::cout << "V = " << to_string(cert->quadratic_term()) << "\n";
        std::cout << "verdict: exact (Lyapunov equation residual <= 1e-9)\n";
        return kExitProved;
    }
    if (method != "barrier-lp") throw ModelError("unknown method " + method);

    Box domain;
    Box full = declared_domain(model);
    for (const auto& v : vars) {
        auto it = full.find(v);
        if (it == full.end()) throw ModelError("no declared domain for " + v);
        domain[v] = it->second;
    }

    std::vector<Trace> traces;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    SimConfig sim;
    sim.seed = seed;
    for (int k = 0; k < 16; ++k) {
        State x0;
        for (const auto& [v, iv] : domain) {
            double mid = 0.5 * (iv.lo + iv.hi);
            double half = 0.5 * (iv.hi - iv.lo);
            x0[v] = mid + 0.25 * half * unit(rng);
        }
        traces.push_back(integrate_ode(ode->odes, x0, ode->formula, sim));
    }

    SynthConfig cfg;
    cfg.seed = seed;
    cfg.delta = delta;
    cfg.box_budget = box_budget_from_env();
    SynthReport report =
        refine_loop(traces, monomial_basis(vars, degree), ode->odes, domain, cfg);
    report.certificate.provenance["mode"] = mode;
    write_file(out_path, serialize(report.certificate));
    std::cout << "V = " << to_string(report.certificate.barrier_term()) << "\n";
    if (report.verified) {
        std::cout << "verdict: verified in " << report.iterations << " iterations\n";
        return kExitProved;
    }
    std::cout << "verdict: unverified (" << report.reason << ")\n";
    return kExitOpen;
}

int cmd_simulate(const std::string& model_path, const std::string& program,
                 const std::string& init, uint32_t seed, const std::string& out_path) {
    Model model = parse_model(read_file(model_path));
    if (!model.has_program(program)) {
        std::ostringstream msg;
        msg << "unknown program " << program << "; available:";
        for (const auto& name : model.program_order) msg << " " << name;
        throw ModelError(msg.str());
    }

    State x0;
    std::stringstream ss(init);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ModelError("bad --init entry: " + item);
        x0[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }

    SimConfig cfg;
    cfg.seed = seed;
    for (const auto& v : model.symbols.state_vars())
        if (auto r = model.symbols.range(v)) cfg.havoc_ranges[v] = {r->first, r->second};

    std::vector<Trace> traces = sample_runs(model.program(program), x0, {}, cfg);
    if (traces.empty()) throw ModelError("no runs sampled");

    // Nondeterministic durations make many sampled runs trivial prefixes;
    // export the most informative one.
    const Trace* best = &traces.front();
    for (const auto& t : traces)
        if (t.samples.size() > best->samples.size()) best = &t;

    std::vector<std::string> vars;
    for (const auto& [v, value] : x0) vars.push_back(v);
    write_file(out_path, trace_csv(*best, vars));
    std::cout << "wrote " << best->samples.size() << " samples (" << traces.size()
              << " runs sampled) to " << out_path << "\n";
    return kExitProved;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"forward invariant cut proofs for hybrid programs"};
    app.require_subcommand(1);

    std::string model_path, tactic_path, report_path, dump_dir, goal_name = "goal";
    double delta = 1e-4, eps = 1e-6;
    auto* prove = app.add_subcommand("prove", "run a tactic script against a model");
    prove->add_option("model", model_path, "model file")->required();
    prove->add_option("tactics", tactic_path, "tactic script")->required();
    prove->add_option("--delta", delta, "icp precision");
    prove->add_option("--eps", eps, "strict barrier-check slack");
    prove->add_option("--goal", goal_name, "goal formula name");
    prove->add_option("--report", report_path, "write a JSON proof report");
    prove->add_option("--dump-queries", dump_dir, "dump open arithmetic queries");

    std::string mode, method = "lyap-linear", out_path;
    int degree = 2;
    uint32_t seed = 0;
    auto* synth = app.add_subcommand("synth", "synthesize a certificate for a mode");
    synth->add_option("model", model_path, "model file")->required();
    synth->add_option("--mode", mode, "program name")->required();
    synth->add_option("--method", method, "lyap-linear or barrier-lp");
    synth->add_option("--degree", degree, "candidate degree (barrier-lp)");
    synth->add_option("--seed", seed, "sampling seed");
    synth->add_option("--delta", delta, "icp precision");
    synth->add_option("-o,--output", out_path, "certificate file")->required();

    std::string program, init;
    auto* simulate = app.add_subcommand("simulate", "sample runs of a program");
    simulate->add_option("model", model_path, "model file")->required();
    simulate->add_option("--program", program, "program name")->required();
    simulate->add_option("--init", init, "comma-separated var=value start state")->required();
    simulate->add_option("--seed", seed, "sampling seed");
    simulate->add_option("-o,--output", out_path, "trace CSV file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (prove->parsed())
            return cmd_prove(model_path, tactic_path, delta, eps, goal_name, report_path,
                             dump_dir);
        if (synth->parsed())
            return cmd_synth(model_path, mode, method, degree, seed, delta, out_path);
        return cmd_simulate(model_path, program, init, seed, out_path);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return kExitError;
}
