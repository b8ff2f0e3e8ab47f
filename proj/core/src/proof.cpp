// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/proof.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "ficut/deriv.hpp"
#include "ficut/errors.hpp"
#include "ficut/poly.hpp"
#include "ficut/transform.hpp"

namespace ficut {

std::string to_string(const Goal& g) {
    std::string out = to_string(g.assumption) + " -> ";
    if (g.program) out += "[" + to_string(*g.program) + "] ";
    out += to_string(g.conclusion);
    return out;
}

void ProofNode::refresh() {
    for (auto& c : children) c->refresh();
    if (children.empty()) return;
    bool all_closed = true, any_failed = false;
    for (const auto& c : children) {
        if (!c->closed()) all_closed = false;
        if (c->status == ProofStatus::Failed) any_failed = true;
    }
    if (all_closed)
        status = ProofStatus::Closed;
    else if (status == ProofStatus::Closed)
        status = ProofStatus::Open; // never keep a stale closure
    if (any_failed) status = ProofStatus::Failed;
}

std::vector<Formula> conjuncts(const Formula& f) {
    std::vector<Formula> out;
    std::deque<Formula> work{f};
    while (!work.empty()) {
        Formula g = work.front();
        work.pop_front();
        if (g.kind() == FormulaKind::And) {
            work.push_front(g.rhs());
            work.push_front(g.lhs());
        } else if (!g.is_true()) {
            out.push_back(g);
        }
    }
    return out;
}

Formula conjoin(const std::vector<Formula>& fs) {
    if (fs.empty()) return Formula::boolean(true);
    Formula out = fs.front();
    for (size_t i = 1; i < fs.size(); ++i) out = Formula::conj(out, fs[i]);
    return out;
}

namespace {

// Canonical atom: difference polynomial d with d (rel) 0, rel ∈ {Le,Lt,Eq}.
struct CanonAtom {
    Poly d;
    ConstraintRel rel;
};

std::optional<CanonAtom> canon_atom(const Formula& f) {
    if (!f.valid() || f.kind() != FormulaKind::Cmp) return std::nullopt;
    const auto& n = f.node();
    Term diff;
    ConstraintRel rel;
    switch (n.cmp) {
    case CmpOp::Le: diff = Term::sub(n.tlhs, n.trhs); rel = ConstraintRel::LeZero; break;
    case CmpOp::Lt: diff = Term::sub(n.tlhs, n.trhs); rel = ConstraintRel::LtZero; break;
    case CmpOp::Ge: diff = Term::sub(n.trhs, n.tlhs); rel = ConstraintRel::LeZero; break;
    case CmpOp::Gt: diff = Term::sub(n.trhs, n.tlhs); rel = ConstraintRel::LtZero; break;
    case CmpOp::Eq: diff = Term::sub(n.tlhs, n.trhs); rel = ConstraintRel::EqZero; break;
    default: return std::nullopt;
    }
    auto p = to_poly(simplify(diff));
    if (!p) return std::nullopt;
    return CanonAtom{*p, rel};
}

std::optional<double> poly_constant(const Poly& p) {
    if (p.empty()) return 0.0;
    if (p.size() == 1 && p.begin()->first.empty()) return p.begin()->second;
    return std::nullopt;
}

bool complementary_pair(const std::vector<CanonAtom>& atoms) {
    for (size_t i = 0; i < atoms.size(); ++i) {
        // Constant atoms: a violated numeric fact refutes the disjunct.
        if (auto v = poly_constant(atoms[i].d)) {
            switch (atoms[i].rel) {
            case ConstraintRel::LeZero:
                if (*v > 0.0) return true;
                break;
            case ConstraintRel::LtZero:
                if (*v >= 0.0) return true;
                break;
            case ConstraintRel::EqZero:
                if (*v != 0.0) return true;
                break;
            }
        }
        for (size_t j = i + 1; j < atoms.size(); ++j) {
            const auto& a = atoms[i];
            const auto& b = atoms[j];
            // a: d (rel_a) 0 and b whose polynomial is c - d: together a
            // lower and an upper bound on the same d, decided exactly.
            if (auto c = poly_constant(poly_add(a.d, b.d))) {
                bool a_eq = a.rel == ConstraintRel::EqZero;
                bool b_eq = b.rel == ConstraintRel::EqZero;
                bool strict = a.rel == ConstraintRel::LtZero || b.rel == ConstraintRel::LtZero;
                if (a_eq && b_eq) {
                    if (*c != 0.0) return true;
                } else if (a_eq || b_eq) {
                    // d pinned to a point; the other side demands d >= c
                    // (resp. d <= -c), violated when the point misses it.
                    if (*c > 0.0 || (*c == 0.0 && strict)) return true;
                } else {
                    if (*c > 0.0 || (*c == 0.0 && strict)) return true;
                }
            }
            // Same polynomial up to a constant shift, one side an equation.
            if (a.rel == ConstraintRel::EqZero || b.rel == ConstraintRel::EqZero) {
                const CanonAtom& eq = a.rel == ConstraintRel::EqZero ? a : b;
                const CanonAtom& other = a.rel == ConstraintRel::EqZero ? b : a;
                if (auto c = poly_constant(poly_add(other.d, poly_scale(eq.d, -1.0)))) {
                    // other: d + c (rel) 0 with d = 0.
                    switch (other.rel) {
                    case ConstraintRel::LeZero:
                        if (*c > 0.0) return true;
                        break;
                    case ConstraintRel::LtZero:
                        if (*c >= 0.0) return true;
                        break;
                    case ConstraintRel::EqZero:
                        if (*c != 0.0) return true;
                        break;
                    }
                }
            }
        }
    }
    return false;
}

// Splits a polynomial into homogeneous-quadratic + constant parts; fails if
// any monomial has another degree.
bool split_quadratic(const Poly& p, const std::vector<std::string>& vars, Matrix& Q,
                     double& constant) {
    size_t n = vars.size();
    Q.assign(n, Vector(n, 0.0));
    constant = 0.0;
    auto index = [&](const std::string& v) -> int {
        for (size_t i = 0; i < n; ++i)
            if (vars[i] == v) return static_cast<int>(i);
        return -1;
    };
    for (const auto& [mono, coeff] : p) {
        int total = 0;
        for (const auto& [v, e] : mono) total += e;
        if (total == 0) {
            constant = coeff;
            continue;
        }
        if (total != 2) return false;
        if (mono.size() == 1) {
            int i = index(mono.begin()->first);
            if (i < 0) return false;
            Q[i][i] += coeff;
        } else {
            int i = index(mono.begin()->first);
            int j = index(std::next(mono.begin())->first);
            if (i < 0 || j < 0) return false;
            Q[i][j] += coeff / 2.0;
            Q[j][i] += coeff / 2.0;
        }
    }
    return true;
}

std::vector<std::string> poly_vars(const Poly& p) {
    std::set<std::string> s;
    for (const auto& [mono, _] : p)
        for (const auto& [v, e] : mono) s.insert(v);
    return {s.begin(), s.end()};
}

// Refutes a disjunct holding both (q1 <= a) and (q2 > b) for concentric
// positive-definite quadratic forms with (b/a)Q1 - Q2 PSD; exact even for
// boundary-touching pairs where δ-complete checking must answer δ-sat.
bool quadratic_containment_pair(const std::vector<CanonAtom>& atoms) {
    for (size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].rel == ConstraintRel::EqZero) continue;
        for (size_t j = 0; j < atoms.size(); ++j) {
            if (i == j || atoms[j].rel == ConstraintRel::EqZero) continue;
            // atom i as the inner set: q1 - a (rel) 0; atom j as the outer
            // exclusion: b - q2 (rel) 0.
            std::set<std::string> var_set;
            for (const auto& [m, c] : atoms[i].d)
                for (const auto& [v, e] : m) var_set.insert(v);
            for (const auto& [m, c] : atoms[j].d)
                for (const auto& [v, e] : m) var_set.insert(v);
            std::vector<std::string> vars(var_set.begin(), var_set.end());
            Matrix Q1, Q2neg;
            double c1, c2;
            if (!split_quadratic(atoms[i].d, vars, Q1, c1)) continue;
            if (!split_quadratic(atoms[j].d, vars, Q2neg, c2)) continue;
            double a = -c1, b = c2;
            Matrix Q2 = mat_scale(Q2neg, -1.0);
            if (!(a > 0.0) || !(b > 0.0)) continue;
            bool strict = atoms[i].rel == ConstraintRel::LtZero ||
                          atoms[j].rel == ConstraintRel::LtZero;
            if (!strict) continue;
            if (!cholesky(Q1)) continue;
            if (is_psd(mat_sub(mat_scale(Q1, b / a), Q2))) return true;
        }
    }
    return false;
}

std::optional<Box> domain_for(const std::vector<Formula>& formulas, const ProofContext& ctx,
                              std::string& missing) {
    std::set<std::string> vars;
    for (const auto& f : formulas) f.collect_vars(vars);
    Box box;
    for (const auto& v : vars) {
        auto it = ctx.domain.find(v);
        if (it != ctx.domain.end()) {
            box[v] = it->second;
            continue;
        }
        // Havoc-fresh variables (name@k) inherit the base variable's domain.
        size_t at = v.find('@');
        if (at != std::string::npos) {
            auto base = ctx.domain.find(v.substr(0, at));
            if (base != ctx.domain.end()) {
                box[v] = base->second;
                continue;
            }
        }
        missing = v;
        return std::nullopt;
    }
    return box;
}

constexpr size_t kDnfCap = 4096;

std::string box_summary(const Box& b) {
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

} // namespace

bool same_atom(const Formula& a, const Formula& b) {
    if (a == b) return true;
    if (!a.valid() || !b.valid()) return false;
    if (a.kind() != FormulaKind::Cmp || b.kind() != FormulaKind::Cmp) return false;
    auto ca = canon_atom(a);
    auto cb = canon_atom(b);
    if (!ca || !cb) return false;
    return ca->rel == cb->rel && ca->d == cb->d;
}

std::optional<Matrix> quadratic_form_matrix(const Term& t, const std::vector<std::string>& vars) {
    auto p = to_poly(simplify(t));
    if (!p) return std::nullopt;
    Matrix Q;
    double c;
    if (!split_quadratic(*p, vars, Q, c)) return std::nullopt;
    if (c != 0.0) return std::nullopt;
    return Q;
}

std::optional<Matrix> linear_field_matrix(const std::vector<OdeEquation>& odes,
                                          const std::vector<std::string>& vars) {
    size_t n = vars.size();
    if (odes.size() != n) return std::nullopt;
    Matrix A(n, Vector(n, 0.0));
    for (const auto& eq : odes) {
        auto row = std::find(vars.begin(), vars.end(), eq.var);
        if (row == vars.end()) return std::nullopt;
        size_t i = row - vars.begin();
        auto p = to_poly(simplify(eq.rhs));
        if (!p) return std::nullopt;
        for (const auto& [mono, coeff] : *p) {
            if (mono.size() != 1 || mono.begin()->second != 1) return std::nullopt;
            auto col = std::find(vars.begin(), vars.end(), mono.begin()->first);
            if (col == vars.end()) return std::nullopt;
            A[i][col - vars.begin()] = coeff;
        }
    }
    return A;
}

ArithResult assumptions_unsat(const std::vector<Formula>& gamma, const ProofContext& ctx) {
    ArithResult result;
    Formula f = simplify(conjoin(gamma));
    if (f.is_false()) {
        result.ok = true;
        result.route = "propositional";
        return result;
    }
    std::vector<std::vector<Formula>> disjuncts;
    try {
        disjuncts = dnf(f);
    } catch (const UnsupportedConstruct& e) {
        result.detail = std::string("not decidable: ") + e.what();
        return result;
    }
    if (disjuncts.empty()) {
        result.ok = true;
        result.route = "propositional";
        return result;
    }
    if (disjuncts.size() > kDnfCap) {
        result.detail = "dnf blowup";
        return result;
    }
    std::set<std::string> routes;
    for (const auto& atoms : disjuncts) {
        std::vector<CanonAtom> canon;
        for (const auto& a : atoms)
            if (auto c = canon_atom(a)) canon.push_back(*c);
        if (complementary_pair(canon)) {
            routes.insert("complementary");
            continue;
        }
        if (quadratic_containment_pair(canon)) {
            routes.insert("quadratic-containment");
            continue;
        }
        std::string missing;
        auto box = domain_for(atoms, ctx, missing);
        if (!box) {
            result.detail = "no declared domain for " + missing;
            return result;
        }
        ConstraintSystem sys;
        sys.constraints = constraints_of(atoms);
        sys.domain = *box;
        sys.delta = ctx.delta;
        DeltaResult r = check(sys, ctx.box_budget);
        if (r.unsat()) {
            routes.insert("icp");
            continue;
        }
        if (r.delta_sat()) {
            result.witness = r.witness;
            result.detail = "delta-sat disjunct";
        } else {
            result.detail = "icp resource limit";
        }
        return result;
    }
    result.ok = true;
    result.route = routes.size() == 1 ? *routes.begin() : "mixed";
    return result;
}

ArithResult entails(const std::vector<Formula>& gamma, const Formula& phi,
                    const ProofContext& ctx) {
    // Syntactic conjunct matching first: exact even where δ-complete
    // refutation of the negation would stall on a touching boundary.
    // Equalities pinning a variable to a constant are folded into phi so
    // that e.g. tau = 0 decides p <= c + k*tau against p <= c.
    std::map<std::string, Term> pins;
    for (const auto& h : gamma) {
        if (!h.valid() || h.kind() != FormulaKind::Cmp || h.node().cmp != CmpOp::Eq) continue;
        Term a = simplify(h.node().tlhs);
        Term b = simplify(h.node().trhs);
        if (b.kind() == TermKind::Constant &&
            (a.kind() == TermKind::StateVar || a.kind() == TermKind::LogicalVar))
            pins[a.node().name] = b;
        else if (a.kind() == TermKind::Constant &&
                 (b.kind() == TermKind::StateVar || b.kind() == TermKind::LogicalVar))
            pins[b.node().name] = a;
    }
    Formula folded = pins.empty() ? phi : substitute(phi, pins);
    bool all_syntactic = true;
    for (const auto& g : conjuncts(simplify(folded))) {
        if (g.is_true()) continue;
        bool found = false;
        for (const auto& h : gamma)
            if (same_atom(g, h)) {
                found = true;
                break;
            }
        if (!found) {
            all_syntactic = false;
            break;
        }
    }
    if (all_syntactic) {
        ArithResult r;
        r.ok = true;
        r.route = "propositional";
        return r;
    }
    Formula neg;
    try {
        neg = nnf(Formula::negate(phi));
    } catch (const UnsupportedConstruct& e) {
        ArithResult r;
        r.detail = std::string("not decidable: ") + e.what();
        return r;
    }
    std::vector<Formula> extended = gamma;
    extended.push_back(neg);
    return assumptions_unsat(extended, ctx);
}

namespace {

// Star-shaped goal I -> [a*]S; returns the loop body.
Program star_body(const Goal& g) {
    if (!g.program || g.program->kind() != ProgramKind::Star)
        throw ShapeError("rule requires a goal of shape I -> [a*]S");
    return g.program->lhs();
}

std::unique_ptr<ProofNode> child_of(Formula assumption, std::optional<Program> prog,
                                    Formula conclusion) {
    auto n = std::make_unique<ProofNode>();
    n->goal = Goal{std::move(assumption), std::move(prog), std::move(conclusion)};
    return n;
}

} // namespace

void apply_invariant_rule(ProofNode& node, const Formula& c) {
    Program alpha = star_body(node.goal);
    node.rule = "invariant";
    node.children.push_back(child_of(node.goal.assumption, std::nullopt, c));
    node.children.push_back(child_of(c, alpha, c));
    node.children.push_back(child_of(c, std::nullopt, node.goal.conclusion));
}

void apply_fwd_inv_cut(ProofNode& node, const Formula& c) {
    if (!c.modality_free()) throw ShapeError("cut formula must be modality-free");
    Program alpha = star_body(node.goal);
    node.rule = "fwd-inv-cut";
    node.children.push_back(child_of(Formula::conj(node.goal.assumption, Formula::negate(c)),
                                     Program::star(cut_restrict(alpha, c)),
                                     node.goal.conclusion));
    node.children.push_back(child_of(c, alpha, c));
    node.children.push_back(child_of(c, std::nullopt, node.goal.conclusion));
}

namespace {

struct DecreaseVerdict {
    bool ok = false;
    std::string route;
    std::optional<Box> witness;
    bool resource_limit = false;
};

// Invariance of {B <= 0} along the flow: analytic when -Bdot is a PSD
// quadratic form, otherwise the weak icp query {H ∧ B<=0 ∧ Bdot>0}, then
// the strict boundary query {H ∧ B=0 ∧ Bdot>-eps}.
DecreaseVerdict check_decrease(const Term& B, const std::vector<OdeEquation>& odes,
                               const Formula& H, const ProofContext& ctx,
                               const std::string& preference) {
    DecreaseVerdict v;
    Term bdot = lie_derivative(B, odes);
    if (auto e = expand_polynomial(bdot)) bdot = *e;

    if (preference != "strict") {
        std::set<std::string> var_set;
        bdot.collect_vars(var_set);
        std::vector<std::string> vars(var_set.begin(), var_set.end());
        if (auto m = quadratic_form_matrix(bdot, vars)) {
            if (is_psd(mat_scale(*m, -1.0))) {
                v.ok = true;
                v.route = "analytic-decrease";
                return v;
            }
        }
        // Interval bound over the declared domain: exact for inclusion
        // flows like p' = l with l capped at the claimed rate, where the
        // δ-weakened boundary query is trivially satisfiable.
        std::string missing;
        if (auto box = domain_for({Formula::cmp(CmpOp::Le, bdot, Term::constant(0.0))}, ctx,
                                  missing)) {
            try {
                if (interval_eval(bdot, *box).hi <= 0.0) {
                    v.ok = true;
                    v.route = "interval-decrease";
                    return v;
                }
            } catch (const EvalError&) {
            }
        }
    }

    auto run_query = [&](const Formula& query, const char* name) -> bool {
        std::vector<Formula> parts = conjuncts(simplify(query));
        std::string missing;
        auto box = domain_for(parts, ctx, missing);
        if (!box) return false;
        DeltaResult r = check_formula(query, *box, ctx.delta, ctx.box_budget);
        if (r.unsat()) {
            v.ok = true;
            v.route = name;
            return true;
        }
        if (r.delta_sat()) v.witness = r.witness;
        if (r.status == DeltaStatus::ResourceLimit) v.resource_limit = true;
        return false;
    };

    if (preference != "strict") {
        Formula weak = Formula::conj(
            H, Formula::conj(Formula::cmp(CmpOp::Le, B, Term::constant(0.0)),
                             Formula::cmp(CmpOp::Gt, bdot, Term::constant(0.0))));
        if (run_query(weak, "weak-decrease")) return v;
        if (preference == "weak") return v;
    }
    Formula strict = Formula::conj(
        H, Formula::conj(Formula::cmp(CmpOp::Eq, B, Term::constant(0.0)),
                         Formula::cmp(CmpOp::Gt, bdot, Term::constant(-ctx.eps))));
    run_query(strict, "strict-decrease");
    return v;
}

} // namespace

void apply_barrier_rule(ProofNode& node, const BarrierCertificate& cert, const ProofContext& ctx,
                        const std::string& check) {
    if (!node.goal.program || node.goal.program->kind() != ProgramKind::Ode)
        throw ShapeError("barrier rule requires a goal of shape init -> [ode]safe");
    const ProgramNode& ode = node.goal.program->node();
    Term B = cert.barrier_term();
    Formula below = Formula::cmp(CmpOp::Le, B, Term::constant(0.0));

    node.rule = "barrier";
    node.children.push_back(child_of(node.goal.assumption, std::nullopt, below));
    auto middle = child_of(below, node.goal.program, below);
    DecreaseVerdict v = check_decrease(B, ode.odes, ode.formula, ctx,
                                       check == "auto" ? "" : check);
    if (v.ok) {
        middle->status = ProofStatus::Closed;
        middle->rule = v.route;
    } else {
        middle->reason = v.resource_limit ? "icp resource limit" : "decrease check delta-sat";
        if (v.witness) middle->log.push_back("blocking box: " + box_summary(*v.witness));
    }
    node.children.push_back(std::move(middle));
    node.children.push_back(child_of(below, std::nullopt, node.goal.conclusion));
}

ReachEnvelope bounded_reach_envelope(const std::vector<OdeEquation>& odes, const Box& init,
                                     double time_bound, const Box& domain) {
    if (time_bound < 0.0) throw ModelError("negative time bound");
    ReachEnvelope env;
    env.t_lo = 0.0;
    env.t_hi = time_bound;
    env.box = init;
    for (const auto& eq : odes) {
        Interval d = interval_eval(eq.rhs, domain);
        if (!std::isfinite(d.lo) || !std::isfinite(d.hi))
            throw ModelError("unbounded derivative for " + eq.var);
        env.derivative_bounds[eq.var] = d;
        auto it = env.box.find(eq.var);
        if (it == env.box.end()) throw ModelError("envelope init misses " + eq.var);
        it->second.lo += std::min(0.0, time_bound * d.lo);
        it->second.hi += std::max(0.0, time_bound * d.hi);
    }
    return env;
}

std::set<std::string> discrete_unreachable(const ModeGraph& g,
                                           const std::set<std::string>& start) {
    std::set<std::string> seen = start;
    std::deque<std::string> work(start.begin(), start.end());
    while (!work.empty()) {
        std::string m = work.front();
        work.pop_front();
        for (const auto& e : g.edges)
            if (e.from == m && !seen.count(e.to)) {
                seen.insert(e.to);
                work.push_back(e.to);
            }
    }
    std::set<std::string> out;
    for (const auto& m : g.modes)
        if (!seen.count(m)) out.insert(m);
    return out;
}

namespace {

void flatten_choice(const Program& p, std::vector<Program>& out) {
    if (p.kind() == ProgramKind::Choice) {
        flatten_choice(p.lhs(), out);
        flatten_choice(p.rhs(), out);
    } else {
        out.push_back(p);
    }
}

void flatten_seq(const Program& p, std::vector<Program>& out) {
    if (p.kind() == ProgramKind::Seq) {
        flatten_seq(p.lhs(), out);
        flatten_seq(p.rhs(), out);
    } else {
        out.push_back(p);
    }
}

// Mode named by a test conjunct of the form mode_var = <mode constant>.
std::optional<std::string> test_mode(const Formula& f, const std::string& mode_var,
                                     const SymbolTable& symbols) {
    for (const auto& c : conjuncts(f)) {
        if (c.kind() != FormulaKind::Cmp || c.node().cmp != CmpOp::Eq) continue;
        const Term& l = c.node().tlhs;
        const Term& r = c.node().trhs;
        Term var, val;
        if (l.kind() == TermKind::StateVar && l.node().name == mode_var) {
            var = l;
            val = r;
        } else if (r.kind() == TermKind::StateVar && r.node().name == mode_var) {
            var = r;
            val = l;
        } else {
            continue;
        }
        Term folded = simplify(val);
        if (folded.kind() != TermKind::Constant) continue;
        if (auto name = symbols.mode_name(folded.node().value)) return name;
    }
    return std::nullopt;
}

} // namespace

ModeGraph build_mode_graph(const Program& loop_body, const std::string& mode_var,
                           const SymbolTable& symbols) {
    ModeGraph g;
    g.modes = symbols.modes();
    std::vector<Program> branches;
    flatten_choice(loop_body, branches);
    for (const auto& branch : branches) {
        std::vector<Program> steps;
        flatten_seq(branch, steps);
        std::optional<std::string> from;
        std::string guard;
        for (const auto& s : steps) {
            if (s.kind() != ProgramKind::Test) break;
            if (guard.empty()) guard = to_string(s.node().formula);
            if ((from = test_mode(s.node().formula, mode_var, symbols))) break;
        }
        std::optional<std::string> to;
        for (const auto& s : steps)
            if (s.kind() == ProgramKind::Assign && s.node().var == mode_var) {
                Term v = simplify(s.node().term);
                if (v.kind() == TermKind::Constant)
                    if (auto name = symbols.mode_name(v.node().value)) to = name;
            }
        if (!to) continue; // flows keep the mode; no edge needed
        if (from) {
            g.edges.push_back({*from, *to, guard});
        } else {
            for (const auto& m : g.modes)
                if (m != *to) g.edges.push_back({m, *to, guard});
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// discharge

namespace {

struct Exec {
    std::vector<Formula> gamma;         // facts over initial-state variables
    std::map<std::string, Term> sigma;  // current value of each written var
    int fresh = 0;
};

class Discharger {
  public:
    Discharger(const ProofContext& ctx, int budget) : ctx_(ctx), budget_(budget) {}

    void run(ProofNode& node) {
        if (!node.children.empty()) {
            for (auto& c : node.children)
                if (!c->closed()) run(*c);
            node.refresh();
            return;
        }
        if (node.status != ProofStatus::Open) return;
        if (budget_ <= 0) {
            node.reason = "budget";
            return;
        }
        --budget_;

        Exec st;
        st.gamma = conjuncts(simplify(node.goal.assumption));
        ArithResult dead = assumptions_unsat(st.gamma, ctx_);
        if (dead.ok) {
            close(node, "antecedent-unsat", dead.route);
            return;
        }
        if (!node.goal.program) {
            arith_leaf(node, st.gamma, node.goal.conclusion);
            return;
        }
        std::vector<Program> rest;
        flatten_seq(*node.goal.program, rest);
        exec(node, st, std::move(rest), node.goal.conclusion, true);
    }

  private:
    void close(ProofNode& node, std::string rule, const std::string& note) {
        node.status = ProofStatus::Closed;
        node.rule = std::move(rule);
        if (!note.empty()) node.log.push_back(note);
    }

    void arith_leaf(ProofNode& node, const std::vector<Formula>& gamma, const Formula& phi) {
        ArithResult r = entails(gamma, phi, ctx_);
        if (r.ok) {
            close(node, "arith", r.route);
            return;
        }
        node.reason = r.detail.empty() ? "arithmetic goal not validated" : r.detail;
        if (r.witness) node.log.push_back("blocking box: " + box_summary(*r.witness));
    }

    void exec(ProofNode& node, Exec st, std::vector<Program> rest, Formula post, bool leading) {
        while (!rest.empty()) {
            Program p = rest.front();
            rest.erase(rest.begin());
            switch (p.kind()) {
            case ProgramKind::Seq: {
                std::vector<Program> flat;
                flatten_seq(p, flat);
                rest.insert(rest.begin(), flat.begin(), flat.end());
                break;
            }
            case ProgramKind::Test: {
                Formula t = simplify(substitute(p.node().formula, st.sigma));
                if (t.is_false()) {
                    close(node, leading ? "excise" : "test-unsat", "test is false");
                    return;
                }
                std::vector<Formula> extended = st.gamma;
                for (const auto& c : conjuncts(t)) extended.push_back(c);
                ArithResult dead = assumptions_unsat(extended, ctx_);
                if (dead.ok) {
                    close(node, leading ? "excise" : "test-unsat",
                          "test contradicts assumptions (" + dead.route + ")");
                    return;
                }
                st.gamma = std::move(extended);
                break;
            }
            case ProgramKind::Assign: {
                st.sigma[p.node().var] = simplify(substitute(p.node().term, st.sigma));
                leading = false;
                break;
            }
            case ProgramKind::Havoc: {
                std::string fresh = p.node().var + "@" + std::to_string(++st.fresh);
                st.sigma[p.node().var] = Term::state_var(fresh);
                leading = false;
                break;
            }
            case ProgramKind::Choice: {
                std::vector<Program> branches;
                flatten_choice(p, branches);
                node.rule = "split-choice";
                for (const auto& b : branches) {
                    Program prog = b;
                    for (const auto& r : rest) prog = Program::seq(prog, r);
                    auto child = child_of(conjoin(st.gamma), prog, post);
                    ProofNode& ref = *child;
                    node.children.push_back(std::move(child));
                    if (budget_ <= 0) {
                        ref.reason = "budget";
                        continue;
                    }
                    --budget_;
                    std::vector<Program> crest;
                    flatten_seq(b, crest);
                    crest.insert(crest.end(), rest.begin(), rest.end());
                    exec(ref, st, std::move(crest), post, true);
                }
                node.refresh();
                return;
            }
            case ProgramKind::Star:
                node.reason = "loop without an invariant (use cut / loop-inv)";
                return;
            case ProgramKind::Ode: {
                // Fold a trailing suffix of tests into the conclusion.
                Formula folded = post;
                for (auto it = rest.rbegin(); it != rest.rend(); ++it) {
                    if (it->kind() != ProgramKind::Test) {
                        node.reason = "program suffix after an ode is unsupported";
                        return;
                    }
                    folded = Formula::imply(it->node().formula, folded);
                }
                ode_goal(node, st, p, folded);
                return;
            }
            }
        }
        Formula final_post;
        try {
            final_post = simplify(substitute(post, st.sigma));
        } catch (const UnsupportedConstruct& e) {
            node.reason = std::string("conclusion not substitutable: ") + e.what();
            return;
        }
        arith_leaf(node, st.gamma, final_post);
    }

    // Goals of shape gamma -> [x := sigma]{odes & H} post.
    void ode_goal(ProofNode& node, const Exec& st, const Program& ode, Formula post) {
        const ProgramNode& on = ode.node();
        // Conclusions weakened through implications: [ode](psi -> chi) is
        // implied by [ode]chi.
        while (post.valid() && post.kind() == FormulaKind::Imply) {
            node.log.push_back("conclusion weakened to consequent of: " +
                               to_string(post.lhs()));
            post = post.rhs();
        }

        Formula H = on.formula;
        if (!H.is_true()) {
            std::vector<Formula> at_entry = st.gamma;
            at_entry.push_back(simplify(substitute(H, st.sigma)));
            ArithResult vac = assumptions_unsat(at_entry, ctx_);
            if (vac.ok) {
                close(node, "vacuous-ode", "evolution domain excluded at entry (" + vac.route + ")");
                return;
            }
        }

        std::set<std::string> bound;
        for (const auto& eq : on.odes) bound.insert(eq.var);

        // Variables not bound by the flow keep their pre-flow values: apply
        // the pending substitution to the field and the evolution domain.
        std::map<std::string, Term> sigma_free = st.sigma;
        for (const auto& v : bound) sigma_free.erase(v);
        std::vector<OdeEquation> flow = on.odes;
        Formula Hf = H;
        if (!sigma_free.empty()) {
            for (auto& eq : flow) eq.rhs = simplify(substitute(eq.rhs, sigma_free));
            Hf = simplify(substitute(H, sigma_free));
        }

        std::vector<std::string> notes;
        std::vector<std::string> failures;
        for (const auto& g : conjuncts(simplify(post))) {
            std::string why;
            if (close_ode_conjunct(st, ode, flow, Hf, bound, g, why))
                notes.push_back(to_string(g) + ": " + why);
            else
                failures.push_back(to_string(g) + ": " + why);
        }
        if (failures.empty()) {
            node.status = ProofStatus::Closed;
            node.rule = "ode";
            for (auto& n : notes) node.log.push_back(n);
            return;
        }
        node.reason = failures.front();
        for (auto& n : notes) node.log.push_back(n);
        for (size_t i = 1; i < failures.size(); ++i) node.log.push_back(failures[i]);
    }

    bool close_ode_conjunct(const Exec& st, const Program& ode,
                            const std::vector<OdeEquation>& flow, const Formula& H,
                            const std::set<std::string>& bound, const Formula& g,
                            std::string& why) {
        std::set<std::string> gvars;
        g.collect_vars(gvars);
        // Variables with an identically-zero derivative are constant along
        // the flow, so they count as untouched.
        std::set<std::string> moving = bound;
        for (const auto& eq : flow) {
            Term d = simplify(eq.rhs);
            if (d.kind() == TermKind::Constant && d.node().value == 0.0) moving.erase(eq.var);
        }
        bool touches_flow = false;
        for (const auto& v : gvars)
            if (moving.count(v)) touches_flow = true;

        if (!touches_flow) {
            Formula at_entry;
            try {
                at_entry = simplify(substitute(g, st.sigma));
            } catch (const UnsupportedConstruct& e) {
                why = e.what();
                return false;
            }
            ArithResult r = entails(st.gamma, at_entry, ctx_);
            why = r.ok ? "unchanged by flow (" + r.route + ")"
                       : "unchanged conjunct not entailed (" + r.detail + ")";
            return r.ok;
        }

        // Differential weakening: the evolution domain alone may imply g.
        if (!H.is_true()) {
            ArithResult weak = entails(conjuncts(simplify(H)), g, ctx_);
            if (weak.ok) {
                why = "differential weakening (" + weak.route + ")";
                return true;
            }
        }

        if (g.kind() == FormulaKind::Cmp && g.node().cmp != CmpOp::Eq) {
            // Orient so the claim reads B <= 0 (or < 0).
            bool flipped =
                g.node().cmp == CmpOp::Ge || g.node().cmp == CmpOp::Gt;
            Term B = flipped ? Term::sub(g.node().trhs, g.node().tlhs)
                             : Term::sub(g.node().tlhs, g.node().trhs);
            // Unbound variables keep their pre-flow values inside B.
            std::map<std::string, Term> sigma_free;
            for (const auto& [v, t] : st.sigma)
                if (!bound.count(v)) sigma_free[v] = t;
            try {
                B = simplify(substitute(B, sigma_free));
            } catch (const UnsupportedConstruct& e) {
                why = e.what();
                return false;
            }
            if (sublevel_invariant(st, B, flow, H, g, why)) return true;
            std::string sub_why = why;
            Term rhs = simplify(g.node().trhs);
            if (!flipped && rhs.kind() == TermKind::Constant) {
                if (reset_chain(st, flow, g, why)) return true;
                why = "sublevel: " + sub_why + "; chain: " + why;
            } else {
                why = "sublevel: " + sub_why;
            }
        } else {
            why = "conclusion shape not handled";
        }

        if (envelope_route(st, ode, flow, bound, g, why)) return true;
        return false;
    }

    // {B <= 0} holds at entry and decreases along the flow.
    bool sublevel_invariant(const Exec& st, const Term& B,
                            const std::vector<OdeEquation>& flow, const Formula& H,
                            const Formula& g, std::string& why) {
        Formula at_entry;
        try {
            at_entry = simplify(substitute(g, st.sigma));
        } catch (const UnsupportedConstruct&) {
            why = "entry condition not substitutable";
            return false;
        }
        ArithResult init = entails(st.gamma, at_entry, ctx_);
        if (!init.ok) {
            why = "set not entered (" + init.detail + ")";
            return false;
        }
        DecreaseVerdict v = check_decrease(B, flow, H, ctx_, "");
        if (v.ok) {
            why = "sublevel invariant (" + v.route + ")";
            return true;
        }
        why = v.resource_limit ? "decrease check hit the box budget"
                               : "decrease check delta-sat";
        if (v.witness) why += " near " + box_summary(*v.witness);
        return false;
    }

    // Linear reset into a linear flow: the image ellipsoid is funneled
    // through an invariant sublevel of the flow's own Lyapunov function
    // into the target sublevel set.
    bool reset_chain(const Exec& st, const std::vector<OdeEquation>& flow, const Formula& g,
                     std::string& why) {
        std::vector<std::string> vars;
        for (const auto& eq : flow) vars.push_back(eq.var);
        std::sort(vars.begin(), vars.end());

        auto A = linear_field_matrix(flow, vars);
        if (!A) {
            why = "flow is not linear";
            return false;
        }
        // Reset matrix from sigma restricted to the flow variables.
        size_t n = vars.size();
        Matrix R = identity(n);
        bool nontrivial = false;
        for (size_t i = 0; i < n; ++i) {
            auto it = st.sigma.find(vars[i]);
            if (it == st.sigma.end()) continue;
            auto p = to_poly(it->second);
            if (!p) {
                why = "reset is not linear";
                return false;
            }
            for (size_t j = 0; j < n; ++j) R[i][j] = 0.0;
            for (const auto& [mono, coeff] : *p) {
                if (mono.size() != 1 || mono.begin()->second != 1) {
                    why = "reset is not linear";
                    return false;
                }
                auto col = std::find(vars.begin(), vars.end(), mono.begin()->first);
                if (col == vars.end()) {
                    why = "reset mixes in foreign variables";
                    return false;
                }
                R[i][col - vars.begin()] = coeff;
            }
            nontrivial = true;
        }
        if (!nontrivial) {
            why = "no reset before the flow";
            return false;
        }

        Term lhs = simplify(g.node().tlhs);
        Term rhs = simplify(g.node().trhs);
        if (rhs.kind() != TermKind::Constant) {
            why = "target level is not constant";
            return false;
        }
        auto Pt = quadratic_form_matrix(lhs, vars);
        if (!Pt || !cholesky(*Pt)) {
            why = "target set is not a definite quadratic sublevel";
            return false;
        }
        double lt = rhs.node().value;

        // Source sublevel fact among the assumptions.
        for (const auto& h : st.gamma) {
            if (h.kind() != FormulaKind::Cmp) continue;
            if (h.node().cmp != CmpOp::Le && h.node().cmp != CmpOp::Lt) continue;
            Term hr = simplify(h.node().trhs);
            if (hr.kind() != TermKind::Constant) continue;
            auto Ps = quadratic_form_matrix(simplify(h.node().tlhs), vars);
            if (!Ps || !cholesky(*Ps)) continue;
            double ls = hr.node().value;
            if (!(ls > 0.0)) continue;

            QuadraticCertificate image = ellipsoid_image(*Ps, ls, R, vars);
            auto lyap = solve_lyapunov_linear(*A, identity(n), vars);
            if (!lyap) {
                why = "flow admits no quadratic Lyapunov certificate";
                return false;
            }
            QuadraticCertificate target;
            target.vars = vars;
            target.P = *Pt;
            target.level = lt;

            // Bisect a connecting level: image ⊆ {Vf <= l*} ⊆ target.
            double hi = 0.0;
            {
                Box dom;
                std::string missing;
                auto full = domain_for({g}, ctx_, missing);
                if (!full) {
                    why = "no declared domain for " + missing;
                    return false;
                }
                dom = *full;
                hi = interval_eval(lyap->quadratic_term(), dom).hi;
                if (!(hi > 0.0) || !std::isfinite(hi)) {
                    why = "degenerate flow certificate range";
                    return false;
                }
                // Containment of the image is monotone up in the level,
                // containment in the target monotone down; bisect into the
                // window where both hold.
                double lo_l = 0.0, hi_l = hi;
                for (int iter = 0; iter < 60 && hi_l - lo_l > 1e-12 * hi; ++iter) {
                    double mid = 0.5 * (lo_l + hi_l);
                    QuadraticCertificate middle = *lyap;
                    middle.level = mid;
                    if (!(mid > 0.0) ||
                        !sublevel_contained(image, middle, dom, ctx_.delta, ctx_.box_budget)
                             .contained) {
                        lo_l = mid;
                        continue;
                    }
                    if (!sublevel_contained(middle, target, dom, ctx_.delta, ctx_.box_budget)
                             .contained) {
                        hi_l = mid;
                        continue;
                    }
                    std::ostringstream os;
                    os.precision(10);
                    os << "reset-flow chain via level " << mid << " of "
                       << to_string(lyap->quadratic_term());
                    why = os.str();
                    return true;
                }
            }
        }
        why = "no connecting sublevel found";
        return false;
    }

    // Bounded-time reach envelope attached by tactic for this ode.
    bool envelope_route(const Exec& st, const Program& ode,
                        const std::vector<OdeEquation>& flow,
                        const std::set<std::string>& bound, const Formula& g,
                        std::string& why) {
        auto it = ctx_.time_bounds.find(to_string(ode));
        if (it == ctx_.time_bounds.end()) return false;

        std::string missing;
        auto dom = domain_for(st.gamma, ctx_, missing);
        if (!dom) {
            why = "no declared domain for " + missing;
            return false;
        }
        // Initial box: the domain tightened by assumption bounds and sigma.
        Box init = *dom;
        for (const auto& h : st.gamma) tighten(init, h);
        for (const auto& eq : flow) {
            auto s = st.sigma.find(eq.var);
            if (s == st.sigma.end()) continue;
            Term v = simplify(s->second);
            if (v.kind() == TermKind::Constant)
                init[eq.var] = {v.node().value, v.node().value};
        }
        Box full = *dom;
        for (const auto& [v, iv] : ctx_.domain) full[v] = iv;
        ReachEnvelope env;
        try {
            env = bounded_reach_envelope(flow, init, it->second, full);
        } catch (const ModelError& e) {
            why = e.what();
            return false;
        }
        // Assumptions about flow-bound variables hold at entry only.
        std::vector<Formula> facts;
        for (const auto& h : st.gamma) {
            std::set<std::string> vs;
            h.collect_vars(vs);
            bool touched = false;
            for (const auto& v : vs)
                if (bound.count(v)) { touched = true; break; }
            if (!touched) facts.push_back(h);
        }
        for (const auto& eq : flow) {
            const Interval& iv = env.box.at(eq.var);
            Term v = Term::state_var(eq.var);
            facts.push_back(Formula::cmp(CmpOp::Ge, v, Term::constant(iv.lo)));
            facts.push_back(Formula::cmp(CmpOp::Le, v, Term::constant(iv.hi)));
        }
        ArithResult r = entails(facts, g, ctx_);
        if (r.ok) {
            why = "bounded-reach envelope " + box_summary(env.box) + " (" + r.route + ")";
            return true;
        }
        why = "envelope does not entail the conclusion (" + r.detail + ")";
        return false;
    }

    static void tighten(Box& box, const Formula& h) {
        if (!h.valid() || h.kind() != FormulaKind::Cmp) return;
        const auto& n = h.node();
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

    const ProofContext& ctx_;
    int budget_;
};

} // namespace

void discharge(ProofNode& node, const ProofContext& ctx, int budget) {
    Discharger d(ctx, budget);
    d.run(node);
    node.refresh();
}

} // namespace ficut
