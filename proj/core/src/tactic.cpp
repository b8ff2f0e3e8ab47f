// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/tactic.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "ficut/errors.hpp"
#include "ficut/sim.hpp"
#include "ficut/transform.hpp"

namespace ficut {

namespace {

    const std::set<std::string> kVerbs = {
        "cut",          "loop-inv",      "barrier", "lyap-linear",
        "synth-barrier", "bounded-reach", "discrete-cert", "auto",
    };

    std::string fmt(double v) {
        std::ostringstream os;
        os.precision(12);
        os << v;
        return os.str();
    }

    double opt_double(const TacticStep& s, const std::string& key, double fallback) {
        auto it = s.opts.find(key);
        if (it == s.opts.end()) return fallback;
        try {
            return std::stod(it->second);
        } catch (const std::exception&) {
            throw ModelError("tactic option " + key + " is not a number: " + it->second);
        }
    }

    std::string opt_string(const TacticStep& s, const std::string& key,
                           const std::string& fallback) {
        auto it = s.opts.find(key);
        return it == s.opts.end() ? fallback : it->second;
    }

    std::string require_opt(const TacticStep& s, const std::string& key) {
        auto it = s.opts.find(key);
        if (it == s.opts.end())
            throw ModelError("tactic " + s.verb + " requires " + key + "=...");
        return it->second;
    }

    /// Leftmost open leaf whose program satisfies pred (DFS, children first).
    template <typename Pred>
    ProofNode* find_leaf(ProofNode& node, Pred pred) {
        if (!node.children.empty()) {
            for (auto& c : node.children)
                if (ProofNode* hit = find_leaf(*c, pred)) return hit;
            return nullptr;
        }
        if (node.status != ProofStatus::Open) return nullptr;
        if (!node.goal.program || !pred(*node.goal.program)) return nullptr;
        return &node;
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

    int count_open(const ProofNode& node) {
        if (node.children.empty()) return node.status == ProofStatus::Open ? 1 : 0;
        int n = 0;
        for (const auto& c : node.children) n += count_open(*c);
        return n;
    }

    /// Narrows per-variable intervals using var-vs-constant comparisons of f.
    void tighten_box(Box& box, const Formula& f) {
        if (!f.valid()) return;
        if (f.kind() == FormulaKind::And) {
            tighten_box(box, f.lhs());
            tighten_box(box, f.rhs());
            return;
        }
        if (f.kind() != FormulaKind::Cmp) return;
        const auto& n = f.node();
        Term var, val;
        CmpOp op = n.cmp;
        if (n.tlhs.kind() == TermKind::StateVar && simplify(n.trhs).kind() == TermKind::Constant) {
            var = n.tlhs;
            val = simplify(n.trhs);
        } else if (n.trhs.kind() == TermKind::StateVar &&
                   simplify(n.tlhs).kind() == TermKind::Constant) {
            var = n.trhs;
            val = simplify(n.tlhs);
            switch (op) {
            case CmpOp::Le: op = CmpOp::Ge; break;
            case CmpOp::Lt: op = CmpOp::Gt; break;
            case CmpOp::Ge: op = CmpOp::Le; break;
            case CmpOp::Gt: op = CmpOp::Lt; break;
            default: break;
            }
        } else {
            return;
        }
        auto it = box.find(var.node().name);
        if (it == box.end()) return;
        double c = val.node().value;
        switch (op) {
        case CmpOp::Le:
        case CmpOp::Lt: it->second.hi = std::min(it->second.hi, c); break;
        case CmpOp::Ge:
        case CmpOp::Gt: it->second.lo = std::max(it->second.lo, c); break;
        case CmpOp::Eq: it->second = {c, c}; break;
        }
    }

    class Session {
      public:
        Session(const Model& model, ProofContext& ctx) : model_(model), ctx_(ctx) {}

        TacticOutcome run(const std::vector<TacticStep>& steps, const std::string& goal_name) {
            TacticOutcome out;
            out.root = make_root(goal_name);
            for (const auto& s : steps) out.log.push_back(apply(*out.root, s));
            out.root->refresh();
            out.proved = out.root->closed();
            return out;
        }

      private:
        const Model& model_;
        ProofContext& ctx_;
        std::map<std::string, Formula> named_; // registered by as=...

        std::unique_ptr<ProofNode> make_root(const std::string& goal_name) {
            if (!model_.has_formula(goal_name))
                throw ModelError("model defines no formula named " + goal_name);
            Formula g = model_.formula(goal_name);
            if (g.kind() != FormulaKind::Imply || g.rhs().kind() != FormulaKind::Box)
                throw ShapeError("goal must be an implication into a box modality");
            auto root = std::make_unique<ProofNode>();
            root->goal.assumption = g.lhs();
            root->goal.program = Program(g.rhs().node().prog->ptr());
            root->goal.conclusion = g.rhs().lhs();
            return root;
        }

        Formula lookup_formula(const std::string& name) const {
            auto it = named_.find(name);
            if (it != named_.end()) return it->second;
            if (model_.has_formula(name)) return model_.formula(name);
            throw ModelError("unknown formula " + name);
        }

        const Program& lookup_program(const std::string& name) const {
            if (!model_.has_program(name)) throw ModelError("unknown program " + name);
            return model_.program(name);
        }

        std::shared_ptr<const ProgramNode> mode_ode(const std::string& mode) const {
            auto hit = first_ode(lookup_program(mode).ptr());
            if (!hit) throw ModelError("program " + mode + " contains no ode");
            return hit;
        }

        std::string apply(ProofNode& root, const TacticStep& s) {
            if (s.verb == "cut" || s.verb == "loop-inv") {
                if (s.args.empty()) throw ModelError(s.verb + " needs a formula name");
                Formula c = lookup_formula(s.args[0]);
                ProofNode* leaf = find_leaf(
                    root, [](const Program& p) { return p.kind() == ProgramKind::Star; });
                if (!leaf) throw ModelError("no open loop goal for " + s.verb);
                if (s.verb == "cut")
                    apply_fwd_inv_cut(*leaf, c);
                else
                    apply_invariant_rule(*leaf, c);
                return s.verb + " " + s.args[0] + ": 3 subgoals";
            }
            if (s.verb == "barrier") return do_barrier(root, s);
            if (s.verb == "lyap-linear") return do_lyap(s);
            if (s.verb == "synth-barrier") return do_synth(s);
            if (s.verb == "bounded-reach") return do_bounded_reach(s);
            if (s.verb == "discrete-cert") return do_discrete(root, s);
            if (s.verb == "auto") {
                int budget = static_cast<int>(opt_double(s, "budget", 10000));
                discharge(root, ctx_, budget);
                root.refresh();
                return "auto: " + std::to_string(count_open(root)) + " open leaves remain";
            }
            throw ModelError("unknown tactic " + s.verb);
        }

        std::string do_barrier(ProofNode& root, const TacticStep& s) {
            if (s.args.empty()) throw ModelError("barrier needs a certificate file");
            std::ifstream in(s.args[0]);
            if (!in) throw ModelError("cannot read certificate file " + s.args[0]);
            std::ostringstream buf;
            buf << in.rdbuf();
            ParsedCertificate parsed = parse_certificate(buf.str());

            BarrierCertificate cert;
            if (parsed.barrier) {
                cert = *parsed.barrier;
            } else if (parsed.quadratic) {
                const QuadraticCertificate& q = *parsed.quadratic;
                if (!q.level) throw ModelError("quadratic certificate has no level");
                cert.vars = q.vars;
                cert.basis = {q.quadratic_term(), Term::constant(1.0)};
                cert.coeffs = {1.0, -*q.level};
                for (const auto& v : q.vars) {
                    auto it = ctx_.domain.find(v);
                    if (it != ctx_.domain.end()) cert.domain[v] = it->second;
                }
                cert.provenance = q.provenance;
            } else {
                throw ModelError("unrecognized certificate file " + s.args[0]);
            }
            cert.epsilon = opt_double(s, "eps", cert.epsilon);
            std::string check = opt_string(s, "check", "auto");

            ProofNode* leaf =
                find_leaf(root, [](const Program& p) { return p.kind() == ProgramKind::Ode; });
            if (!leaf) throw ModelError("no open flow goal for barrier");
            apply_barrier_rule(*leaf, cert, ctx_, check);
            ctx_.barriers.push_back(cert);
            return "barrier " + s.args[0] + " (" + check + "): 3 subgoals";
        }

        std::string do_lyap(const TacticStep& s) {
            std::string mode = require_opt(s, "mode");
            std::string q = opt_string(s, "Q", "identity");
            if (q != "identity") throw ModelError("only Q=identity is supported");
            auto ode = mode_ode(mode);

            std::vector<std::string> vars;
            for (const auto& eq : ode->odes) vars.push_back(eq.var);
            std::sort(vars.begin(), vars.end());
            auto A = linear_field_matrix(ode->odes, vars);
            if (!A) throw ModelError("flow of " + mode + " is not linear");
            auto cert = solve_lyapunov_linear(*A, identity(vars.size()), vars);
            if (!cert) throw ModelError("flow of " + mode + " admits no quadratic certificate");
            if (s.opts.count("level")) cert->level = opt_double(s, "level", 0.0);
            cert->provenance["mode"] = mode;
            ctx_.quads.push_back(*cert);

            std::string as = opt_string(s, "as", "");
            if (!as.empty()) {
                if (!cert->level) throw ModelError("lyap-linear as=... needs level=...");
                named_[as] = cert->cut_formula();
            }
            std::string msg = "lyap-linear " + mode + ": V = " + to_string(cert->quadratic_term());
            if (cert->level) msg += ", level " + fmt(*cert->level);
            return msg;
        }

        std::string do_bounded_reach(const TacticStep& s) {
            std::string mode = require_opt(s, "mode");
            double time = opt_double(s, "time", -1.0);
            if (time < 0.0) throw ModelError("bounded-reach requires time=...");
            auto ode = mode_ode(mode);
            ctx_.time_bounds[to_string(Program(ode))] = time;
            return "bounded-reach " + mode + ": flow envelopes capped at t = " + fmt(time);
        }

        std::string do_synth(const TacticStep& s) {
            std::string mode = require_opt(s, "mode");
            int degree = static_cast<int>(opt_double(s, "degree", 2));
            uint32_t seed = static_cast<uint32_t>(opt_double(s, "seed", 0));
            double contain_r = opt_double(s, "contain", 0.01);
            double exclude_r = opt_double(s, "exclude", 0.02);
            auto ode = mode_ode(mode);

            std::vector<std::string> vars;
            for (const auto& eq : ode->odes) vars.push_back(eq.var);
            std::sort(vars.begin(), vars.end());
            Formula H = ode->formula;

            Box domain;
            for (const auto& v : vars) {
                auto it = ctx_.domain.find(v);
                if (it == ctx_.domain.end()) throw ModelError("no declared domain for " + v);
                domain[v] = it->second;
            }
            tighten_box(domain, H);

            // Seeded trajectory pool from the inner quarter of the domain.
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
                traces.push_back(integrate_ode(ode->odes, x0, H, sim));
            }

            SynthConfig cfg;
            cfg.seed = seed;
            cfg.delta = ctx_.delta;
            cfg.box_budget = ctx_.box_budget;
            std::vector<Term> basis = monomial_basis(vars, degree);
            SynthReport report = refine_loop(traces, basis, ode->odes, domain, cfg);
            Term V = report.certificate.barrier_term();

            // Separating level: the contain box inside, the exclude shell out.
            Formula contain, exclude;
            for (const auto& v : vars) {
                Term x = Term::state_var(v);
                Formula lo = Formula::cmp(CmpOp::Ge, x, Term::constant(-contain_r));
                Formula hi = Formula::cmp(CmpOp::Le, x, Term::constant(contain_r));
                Formula band = Formula::conj(lo, hi);
                contain = contain.valid() ? Formula::conj(contain, band) : band;
                Formula out = Formula::disj(Formula::cmp(CmpOp::Le, x, Term::constant(-exclude_r)),
                                            Formula::cmp(CmpOp::Ge, x, Term::constant(exclude_r)));
                exclude = exclude.valid() ? Formula::disj(exclude, out) : out;
            }
            LevelReport lv = select_level(V, contain, exclude, domain, ctx_.delta, ctx_.box_budget);

            std::string msg = "synth-barrier " + mode + " degree=" + std::to_string(degree) +
                              " seed=" + std::to_string(seed) + ": V = " + to_string(V);
            double level;
            if (lv.level) {
                level = *lv.level;
                msg += ", level " + fmt(level);
            } else {
                // Interval bound over the contain box still guarantees the
                // contain side; the exclusion side stays unverified.
                Box inner;
                for (const auto& v : vars) inner[v] = {-contain_r, contain_r};
                level = interval_eval(V, inner).hi;
                msg += ", fallback level " + fmt(level) + " (no separating level";
                if (!lv.blocking_exclude.witness.empty())
                    msg += "; exclusion blocked near " +
                           box_to_string(lv.blocking_exclude.witness);
                msg += ")";
            }
            if (!report.verified) msg += "; refine loop: " + report.reason;

            Formula cut = Formula::cmp(CmpOp::Le, V, Term::constant(level));
            std::string guard = opt_string(s, "guard", "");
            if (!guard.empty()) {
                auto mv = model_.symbols.mode_value(guard);
                if (!mv) throw ModelError("unknown mode " + guard);
                std::string var = opt_string(s, "var", "M");
                cut = Formula::conj(
                    Formula::cmp(CmpOp::Eq, Term::state_var(var), Term::constant(*mv)), cut);
            }
            std::string as = opt_string(s, "as", "");
            if (!as.empty()) named_[as] = cut;

            BarrierCertificate out = report.certificate;
            out.basis.push_back(Term::constant(1.0));
            out.coeffs.push_back(-level);
            ctx_.barriers.push_back(out);
            return msg;
        }

        std::string do_discrete(ProofNode& root, const TacticStep& s) {
            std::string var = opt_string(s, "var", "M");
            std::set<std::string> start;
            {
                std::stringstream ss(require_opt(s, "start"));
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    if (!tok.empty()) start.insert(tok);
                }
            }
            ProofNode* leaf =
                find_leaf(root, [](const Program& p) { return p.kind() == ProgramKind::Star; });
            const Program& loop =
                leaf ? *leaf->goal.program : *root.goal.program;
            if (loop.kind() != ProgramKind::Star)
                throw ShapeError("discrete-cert expects a loop goal");
            ModeGraph g = build_mode_graph(loop.lhs(), var, model_.symbols);
            std::set<std::string> unreachable = discrete_unreachable(g, start);
            std::string msg = "discrete-cert: unreachable modes {";
            bool first = true;
            for (const auto& m : unreachable) {
                if (!first) msg += ", ";
                msg += m;
                first = false;
            }
            msg += "}";
            return msg;
        }

        static std::string box_to_string(const Box& b) {
            std::ostringstream os;
            os.precision(6);
            bool first = true;
            for (const auto& [v, iv] : b) {
                if (!first) os << ", ";
                os << v << " in [" << iv.lo << ", " << iv.hi << "]";
                first = false;
            }
            return os.str();
        }
    };

} // namespace

std::vector<TacticStep> parse_tactics(const std::string& text) {
    std::vector<TacticStep> steps;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream toks(line);
        std::string tok;
        TacticStep step;
        step.line = lineno;
        while (toks >> tok) {
            if (step.verb.empty()) {
                step.verb = tok;
                continue;
            }
            auto eq = tok.find('=');
            if (eq != std::string::npos && eq > 0)
                step.opts[tok.substr(0, eq)] = tok.substr(eq + 1);
            else
                step.args.push_back(tok);
        }
        if (step.verb.empty()) continue;
        if (!kVerbs.count(step.verb))
            throw ParseError("unknown tactic " + step.verb, lineno, 1);
        steps.push_back(std::move(step));
    }
    return steps;
}

TacticOutcome run_tactics(const Model& model, const std::vector<TacticStep>& steps,
                          ProofContext& ctx, const std::string& goal_name) {
    ctx.model = &model;
    Session session(model, ctx);
    return session.run(steps, goal_name);
}

namespace {

    nlohmann::ordered_json node_json(const ProofNode& n) {
        nlohmann::ordered_json j;
        j["goal"] = to_string(n.goal);
        j["rule"] = n.rule;
        switch (n.status) {
        case ProofStatus::Open: j["status"] = "open"; break;
        case ProofStatus::Closed: j["status"] = "closed"; break;
        case ProofStatus::Failed: j["status"] = "failed"; break;
        }
        j["reason"] = n.reason;
        j["log"] = n.log;
        j["children"] = nlohmann::ordered_json::array();
        for (const auto& c : n.children) j["children"].push_back(node_json(*c));
        return j;
    }

    std::string step_text(const TacticStep& s) {
        std::string out = s.verb;
        for (const auto& a : s.args) out += " " + a;
        for (const auto& [k, v] : s.opts) out += " " + k + "=" + v;
        return out;
    }

} // namespace

std::string render_report(const TacticOutcome& outcome, const ProofContext& ctx,
                          const std::vector<TacticStep>& steps) {
    nlohmann::ordered_json j;
    j["proved"] = outcome.proved;
    j["delta"] = ctx.delta;
    j["eps"] = ctx.eps;
    j["tactics"] = nlohmann::ordered_json::array();
    for (const auto& s : steps) j["tactics"].push_back(step_text(s));
    j["log"] = outcome.log;
    j["tree"] = outcome.root ? node_json(*outcome.root) : nlohmann::ordered_json();
    return j.dump(2) + "\n";
}

} // namespace ficut
