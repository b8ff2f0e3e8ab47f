// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ficut/certs.hpp"
#include "ficut/icp.hpp"
#include "ficut/model.hpp"
#include "ficut/synth.hpp"

namespace ficut {

/// Sequent-style goal: assumption -> [program] conclusion, with the program
/// optional for plain arithmetic goals.
struct Goal {
    Formula assumption;
    std::optional<Program> program;
    Formula conclusion;
};

std::string to_string(const Goal& g);

enum class ProofStatus { Open, Closed, Failed };

struct ProofNode {
    Goal goal;
    std::string rule; // rule that produced the children, or closed the leaf
    ProofStatus status = ProofStatus::Open;
    std::string reason; // why open/failed
    std::vector<std::string> log;
    std::vector<std::unique_ptr<ProofNode>> children;

    bool closed() const { return status == ProofStatus::Closed; }
    /// Recomputes inner-node statuses bottom-up: a node with children closes
    /// iff all children are closed.
    void refresh();
};

/// Shared state consulted during discharge: the model, checker precision,
/// and certificates attached by tactics.
struct ProofContext {
    const Model* model = nullptr;
    Box domain;    // state-variable domain of interest + logical bounds
    double delta = 1e-4;
    double eps = 1e-6; // strict barrier-check slack
    uint64_t box_budget = kDefaultBoxBudget;
    std::vector<QuadraticCertificate> quads;
    std::vector<BarrierCertificate> barriers;
    std::map<std::string, double> time_bounds; // to_string(ode) -> bound
    std::map<std::string, std::string> barrier_checks; // cert tag -> strict|weak
};

/// Splits a conjunction into its leaves (a non-conjunction is a singleton).
std::vector<Formula> conjuncts(const Formula& f);
Formula conjoin(const std::vector<Formula>& fs);

/// Comparison-atom equivalence up to polynomial normal form.
bool same_atom(const Formula& a, const Formula& b);

/// The symmetric matrix of a homogeneous quadratic form over vars, or
/// nullopt when the term has monomials of degree other than two.
std::optional<Matrix> quadratic_form_matrix(const Term& t, const std::vector<std::string>& vars);

/// Affine-free linear field check: returns A when odes are exactly
/// x_i' = sum_j A[i][j] x_j over vars.
std::optional<Matrix> linear_field_matrix(const std::vector<OdeEquation>& odes,
                                          const std::vector<std::string>& vars);

/// Verdict of the arithmetic validity/unsat checker with the route that
/// decided it ("propositional", "complementary", "quadratic-containment",
/// "icp") and the blocking witness when it could not.
struct ArithResult {
    bool ok = false;
    std::string route;
    std::optional<Box> witness;
    std::string detail;
};

/// Is the conjunction of gamma unsatisfiable over the context domain?
ArithResult assumptions_unsat(const std::vector<Formula>& gamma, const ProofContext& ctx);
/// Does gamma entail phi? Syntactic conjunct matching first, then
/// refutation of gamma ∧ ¬phi.
ArithResult entails(const std::vector<Formula>& gamma, const Formula& phi,
                    const ProofContext& ctx);

/// I -> [a*]S with certificate C: children (I->C), (C->[a]C), (C->S).
void apply_invariant_rule(ProofNode& node, const Formula& c);
/// I -> [a*]S with cut C: children (I ∧ ¬C -> [(a;?¬C)*]S), (C->[a]C), (C->S).
void apply_fwd_inv_cut(ProofNode& node, const Formula& c);
/// init -> [ode]safe with barrier B: children (init->B<=0), invariance
/// (decided immediately by the icp queries; check ∈ {auto, strict, weak}),
/// (B<=0 -> safe). Resource limits leave the middle child open.
void apply_barrier_rule(ProofNode& node, const BarrierCertificate& cert,
                        const ProofContext& ctx, const std::string& check = "auto");

struct ReachEnvelope {
    Box box;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::map<std::string, Interval> derivative_bounds;
};

/// Envelope of the flow from init over [0, time_bound]: init expanded per
/// variable by the interval of its derivative over the domain, scaled by
/// the time bound. Throws ModelError on unbounded derivatives.
ReachEnvelope bounded_reach_envelope(const std::vector<OdeEquation>& odes, const Box& init,
                                     double time_bound, const Box& domain);

struct ModeGraph {
    std::vector<std::string> modes;
    struct Edge {
        std::string from, to;
        std::string guard; // printable label only
    };
    std::vector<Edge> edges;
    std::set<std::string> bad;
};

/// Modes with no directed path from any start mode (guards ignored: a
/// sound over-approximation of reachability).
std::set<std::string> discrete_unreachable(const ModeGraph& g,
                                           const std::set<std::string>& start);

/// Mode graph of a loop body: branches guarded by ?(M = q) with an
/// assignment M := q' contribute an edge q -> q'; unguarded assignments
/// contribute edges from every mode.
ModeGraph build_mode_graph(const Program& loop_body, const std::string& mode_var,
                           const SymbolTable& symbols);

/// Automated leaf discharge: excision, symbolic execution, sublevel /
/// reset-chain / envelope closure for ODE goals, arithmetic validity for
/// the rest. Budget counts created nodes; exhaustion leaves goals open.
void discharge(ProofNode& node, const ProofContext& ctx, int budget = 10000);

} // namespace ficut
