// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ficut/certs.hpp"
#include "ficut/icp.hpp"
#include "ficut/sim.hpp"
#include "ficut/simplex.hpp"

namespace ficut {

struct SynthConfig {
    double eps_pos = 1e-3;
    double eps_dec = 0.0;
    int max_iterations = 50;
    int nm_starts = 64;
    uint32_t seed = 0;
    double delta = 1e-4;
    uint64_t box_budget = kDefaultBoxBudget;
    // Validation queries exclude the ball |x| < origin_radius: at the
    // equilibrium both sides of every certificate inequality vanish, so a
    // δ-weakened query there is trivially satisfiable and proves nothing.
    // For the same reason delta must stay below the certificate margin on
    // the ball boundary, roughly eps_pos * origin_radius^2 / 2.
    double origin_radius = 1e-1;
};

/// All monomials of degree 1..degree over vars (constant excluded, so
/// candidates vanish at the origin), in a fixed deterministic order.
std::vector<Term> monomial_basis(const std::vector<std::string>& vars, int degree);

/// Exact quadratic certificate for x' = Ax: solves A'P + PA = -Q by
/// vectorizing over the n(n+1)/2 symmetric unknowns (Gaussian elimination
/// with partial pivoting). nullopt when the system is singular or P fails
/// Cholesky — "no quadratic certificate", never a crash. Residual of a
/// returned P is at most 1e-9 in max norm.
std::optional<QuadraticCertificate> solve_lyapunov_linear(const Matrix& A, const Matrix& Q,
                                                          const std::vector<std::string>& vars);

/// Every sampled state of every trace, capped for LP sanity.
std::vector<State> collect_samples(const std::vector<Trace>& traces, size_t cap = 400);

/// Feasibility LP over certificate coefficients in [-1,1]: per sample x,
/// V(x) >= eps_pos*|x|^2 and Vdot(x) <= -eps_dec*|x|^2. Returns the Bland
/// vertex or nullopt when infeasible; the assembled problem (with row
/// provenance) is exposed through problem_out.
std::optional<Vector> lp_candidate(const std::vector<State>& samples,
                                   const std::vector<Term>& basis,
                                   const std::vector<OdeEquation>& field, double eps_pos,
                                   double eps_dec, LpProblem* problem_out = nullptr);

/// Multi-start Nelder-Mead (Halton start points) maximizing Vdot over the
/// domain; a returned state has Vdot > 0. Seed-deterministic; none carries
/// no optimality claim.
std::optional<State> counterexample_search(const Term& V, const std::vector<OdeEquation>& field,
                                           const Box& domain, uint32_t seed, int starts = 64);

/// Generic form used internally and by tests: maximize `objective`; returns
/// a point with objective > 0 if one is found.
std::optional<State> maximize_positive(const Term& objective, const Box& domain, uint32_t seed,
                                       int starts = 64);

struct SynthReport {
    bool verified = false;
    BarrierCertificate certificate;
    std::optional<State> last_witness;
    int iterations = 0;
    std::string reason; // empty when verified
};

/// The simulation-guided discovery loop: LP candidate, optimizer refutation,
/// icp validation, counterexample row injection; capped by max_iterations.
SynthReport refine_loop(const std::vector<Trace>& traces, const std::vector<Term>& basis,
                        const std::vector<OdeEquation>& field, const Box& domain,
                        const SynthConfig& cfg);

struct LevelReport {
    std::optional<double> level;
    DeltaResult blocking_contain; // last failing containment query
    DeltaResult blocking_exclude; // last failing exclusion query
};

/// True when {must_contain} subset of {V <= level} and {must_exclude}
/// misses it, both certified by icp.
bool level_passes(const Term& V, double level, const Formula& must_contain,
                  const Formula& must_exclude, const Box& domain, double delta,
                  uint64_t box_budget = kDefaultBoxBudget, DeltaResult* blocking_contain = nullptr,
                  DeltaResult* blocking_exclude = nullptr);

/// Bisection for a separating sublevel on a 1e-3-relative grid over
/// [0, interval_eval(V, domain).hi].
LevelReport select_level(const Term& V, const Formula& must_contain,
                         const Formula& must_exclude, const Box& domain, double delta,
                         uint64_t box_budget = kDefaultBoxBudget);

/// Exact forward image of {x'Px <= level} under x := Rx, i.e.
/// P' = R^-T P R^-1. Throws ModelError when R is singular.
QuadraticCertificate ellipsoid_image(const Matrix& P, double level, const Matrix& R,
                                     const std::vector<std::string>& vars);

struct ContainmentReport {
    bool contained = false;
    bool analytic = false; // decided by the PSD criterion, no icp run
    DeltaResult details;
};

/// Analytic containment for concentric quadratic sublevels:
/// {x'Ax <= a} subset of {x'Bx <= b} iff (b/a)A - B is PSD (A positive
/// definite). nullopt when the criterion does not apply.
std::optional<bool> sublevel_contained_analytic(const QuadraticCertificate& inner,
                                                const QuadraticCertificate& outer);

/// Containment check: the PSD route when applicable (exact even for
/// boundary-touching pairs that any δ-complete query reports δ-sat), icp
/// query {V_in <= l_in and V_out > l_out} otherwise.
ContainmentReport sublevel_contained(const QuadraticCertificate& inner,
                                     const QuadraticCertificate& outer, const Box& domain,
                                     double delta, uint64_t box_budget = kDefaultBoxBudget);

} // namespace ficut
