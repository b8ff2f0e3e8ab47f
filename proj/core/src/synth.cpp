// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "ficut/deriv.hpp"
#include "ficut/errors.hpp"
#include "ficut/eval.hpp"
#include "ficut/poly.hpp"
#include "ficut/transform.hpp"

namespace ficut {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

std::vector<Term> monomial_basis(const std::vector<std::string>& vars, int degree) {
    std::vector<Term> out;
    std::vector<int> expo(vars.size(), 0);
    std::function<void(size_t, int)> rec = [&](size_t i, int remaining) {
        if (i == vars.size()) {
            int total = 0;
            for (int e : expo) total += e;
            if (total >= 1) {
                Monomial m;
                for (size_t k = 0; k < vars.size(); ++k)
                    if (expo[k] > 0) m[vars[k]] = expo[k];
                out.push_back(poly_to_term(Poly{{m, 1.0}}));
            }
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            expo[i] = e;
            rec(i + 1, remaining - e);
        }
        expo[i] = 0;
    };
    rec(0, degree);
    return out;
}

std::optional<QuadraticCertificate> solve_lyapunov_linear(const Matrix& A, const Matrix& Q,
                                                          const std::vector<std::string>& vars) {
    const size_t n = A.size();
    auto idx = [n](size_t i, size_t j) {
        if (i > j) std::swap(i, j);
        // offset of (i,j), i <= j, in row-major upper-triangular order
        return i * n - i * (i + 1) / 2 + j;
    };
    const size_t unknowns = n * (n + 1) / 2;
    Matrix M(unknowns, Vector(unknowns, 0.0));
    Vector rhs(unknowns, 0.0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i; j < n; ++j) {
            size_t row = idx(i, j);
            // (A'P + PA)[i][j] = sum_k A[k][i] P[k][j] + P[i][k] A[k][j]
            for (size_t k = 0; k < n; ++k) {
                M[row][idx(k, j)] += A[k][i];
                M[row][idx(i, k)] += A[k][j];
            }
            rhs[row] = -Q[i][j];
        }
    auto sol = solve_linear(M, rhs);
    if (!sol) return std::nullopt;

    QuadraticCertificate cert;
    cert.vars = vars;
    cert.P.assign(n, Vector(n));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) cert.P[i][j] = (*sol)[idx(i, j)];
    Matrix residual = mat_add(mat_add(mat_mul(transpose(A), cert.P), mat_mul(cert.P, A)), Q);
    if (max_norm(residual) > 1e-9) return std::nullopt;
    auto l = cholesky(cert.P);
    if (!l) return std::nullopt;
    cert.chol = *l;
    cert.provenance["method"] = "lyapunov-linear";
    return cert;
}

std::vector<State> collect_samples(const std::vector<Trace>& traces, size_t cap) {
    std::vector<State> out;
    for (const auto& tr : traces)
        for (const auto& [t, s] : tr.samples) {
            if (out.size() >= cap) return out;
            out.push_back(s);
        }
    return out;
}

std::optional<Vector> lp_candidate(const std::vector<State>& samples,
                                   const std::vector<Term>& basis,
                                   const std::vector<OdeEquation>& field, double eps_pos,
                                   double eps_dec, LpProblem* problem_out) {
    const size_t m = basis.size();
    std::vector<Term> basis_dot;
    basis_dot.reserve(m);
    for (const auto& phi : basis) basis_dot.push_back(lie_derivative(phi, field));

    std::set<std::string> var_set;
    for (const auto& phi : basis) phi.collect_vars(var_set);

    // Substituted variables u_j = c_j + 1 in [0, 2] keep the simplex in
    // standard form; rows are built directly over u.
    LpProblem lp;
    lp.c.assign(m, 0.0);
    for (size_t j = 0; j < m; ++j) {
        Vector a(m, 0.0);
        a[j] = 1.0;
        lp.rows.push_back({a, LpRel::Le, 2.0, "bound c" + std::to_string(j)});
    }
    for (size_t s = 0; s < samples.size(); ++s) {
        const State& x = samples[s];
        double norm2 = 0.0;
        bool have_all = true;
        for (const auto& v : var_set) {
            auto it = x.find(v);
            if (it == x.end()) {
                have_all = false;
                break;
            }
            norm2 += it->second * it->second;
        }
        if (!have_all || norm2 < 1e-12) continue; // vacuous at the origin
        try {
            Vector pos(m), dec(m);
            double shift_pos = 0.0, shift_dec = 0.0;
            for (size_t j = 0; j < m; ++j) {
                pos[j] = eval_term(x, {}, basis[j]);
                dec[j] = eval_term(x, {}, basis_dot[j]);
                shift_pos += pos[j];
                shift_dec += dec[j];
            }
            lp.rows.push_back(
                {pos, LpRel::Ge, eps_pos * norm2 + shift_pos, "sample " + std::to_string(s) + " positivity"});
            lp.rows.push_back(
                {dec, LpRel::Le, -eps_dec * norm2 + shift_dec, "sample " + std::to_string(s) + " decrease"});
        } catch (const EvalError&) {
            continue;
        }
    }
    if (problem_out) *problem_out = lp;
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    Vector coeffs(m);
    for (size_t j = 0; j < m; ++j) coeffs[j] = sol.x[j] - 1.0;
    return coeffs;
}

namespace {

double halton(uint64_t index, uint32_t base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

constexpr uint32_t kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

using Objective = std::function<double(const Vector&)>;

Vector clamp_to(const Vector& x, const std::vector<Interval>& bounds) {
    Vector y = x;
    for (size_t i = 0; i < y.size(); ++i) y[i] = std::clamp(y[i], bounds[i].lo, bounds[i].hi);
    return y;
}

// Standard Nelder-Mead minimization, deterministic, point kept in bounds by
// projection.
Vector nelder_mead(const Objective& f, Vector start, const std::vector<Interval>& bounds) {
    const size_t n = start.size();
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    std::vector<Vector> simplex{start};
    for (size_t i = 0; i < n; ++i) {
        Vector v = start;
        double step = 0.1 * std::max(1e-3, width(bounds[i]));
        v[i] = std::clamp(v[i] + step, bounds[i].lo, bounds[i].hi);
        if (v[i] == start[i]) v[i] = std::clamp(start[i] - step, bounds[i].lo, bounds[i].hi);
        simplex.push_back(v);
    }
    std::vector<double> fv(simplex.size());
    for (size_t i = 0; i < simplex.size(); ++i) fv[i] = f(simplex[i]);

    for (int iter = 0; iter < 250; ++iter) {
        std::vector<size_t> order(simplex.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        std::vector<Vector> sx;
        std::vector<double> sf;
        for (size_t i : order) {
            sx.push_back(simplex[i]);
            sf.push_back(fv[i]);
        }
        simplex = std::move(sx);
        fv = std::move(sf);
        if (fv.back() - fv.front() < 1e-13) break;

        Vector centroid(n, 0.0);
        for (size_t i = 0; i + 1 < simplex.size(); ++i)
            for (size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
        for (size_t k = 0; k < n; ++k) centroid[k] /= static_cast<double>(n);

        auto blend = [&](double w) {
            Vector v(n);
            for (size_t k = 0; k < n; ++k) v[k] = centroid[k] + w * (centroid[k] - simplex.back()[k]);
            return clamp_to(v, bounds);
        };
        Vector xr = blend(alpha);
        double fr = f(xr);
        if (fr < fv.front()) {
            Vector xe = blend(gamma);
            double fe = f(xe);
            if (fe < fr) {
                simplex.back() = xe;
                fv.back() = fe;
            } else {
                simplex.back() = xr;
                fv.back() = fr;
            }
        } else if (fr < fv[fv.size() - 2]) {
            simplex.back() = xr;
            fv.back() = fr;
        } else {
            Vector xc = blend(-rho);
            double fc = f(xc);
            if (fc < fv.back()) {
                simplex.back() = xc;
                fv.back() = fc;
            } else {
                for (size_t i = 1; i < simplex.size(); ++i) {
                    for (size_t k = 0; k < n; ++k)
                        simplex[i][k] = simplex[0][k] + sigma * (simplex[i][k] - simplex[0][k]);
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }
    size_t best = 0;
    for (size_t i = 1; i < simplex.size(); ++i)
        if (fv[i] < fv[best]) best = i;
    return simplex[best];
}

} // namespace

std::optional<State> maximize_positive(const Term& objective, const Box& domain, uint32_t seed,
                                       int starts) {
    std::vector<std::string> names;
    std::vector<Interval> bounds;
    for (const auto& [v, iv] : domain) {
        names.push_back(v);
        bounds.push_back(iv);
    }
    auto to_state = [&](const Vector& x) {
        State s;
        for (size_t i = 0; i < names.size(); ++i) s[names[i]] = x[i];
        return s;
    };
    Objective cost = [&](const Vector& x) {
        try {
            return -eval_term(to_state(x), {}, objective);
        } catch (const EvalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    Vector best_x;
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < starts; ++s) {
        Vector start(names.size());
        for (size_t i = 0; i < names.size(); ++i) {
            double u = halton(static_cast<uint64_t>(seed) * starts + s + 1,
                              kPrimes[i % (sizeof(kPrimes) / sizeof(kPrimes[0]))]);
            start[i] = bounds[i].lo + u * width(bounds[i]);
        }
        Vector x = nelder_mead(cost, start, bounds);
        double v = cost(x);
        if (v < best) {
            best = v;
            best_x = x;
        }
    }
    if (best < -1e-9) return to_state(best_x);
    return std::nullopt;
}

std::optional<State> counterexample_search(const Term& V, const std::vector<OdeEquation>& field,
                                           const Box& domain, uint32_t seed, int starts) {
    Term vdot = lie_derivative(V, field);
    if (auto e = expand_polynomial(vdot)) vdot = *e;
    return maximize_positive(vdot, domain, seed, starts);
}

SynthReport refine_loop(const std::vector<Trace>& traces, const std::vector<Term>& basis,
                        const std::vector<OdeEquation>& field, const Box& domain,
                        const SynthConfig& cfg) {
    SynthReport report;
    std::set<std::string> var_set;
    for (const auto& phi : basis) phi.collect_vars(var_set);
    std::vector<std::string> vars(var_set.begin(), var_set.end());

    Term norm2 = Term::constant(0.0);
    for (const auto& v : vars) norm2 = Term::add(norm2, Term::pow(Term::state_var(v), 2));

    std::vector<State> samples = collect_samples(traces);
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        report.iterations = iter;
        auto coeffs = lp_candidate(samples, basis, field, cfg.eps_pos, cfg.eps_dec);
        if (!coeffs) {
            report.reason = "lp infeasible at iteration " + std::to_string(iter);
            return report;
        }
        // Normalize to max coefficient 1 so the certified margins stand well
        // clear of delta; scaling preserves every certificate property.
        double scale = 0.0;
        for (double c : *coeffs) scale = std::max(scale, std::fabs(c));
        if (scale < 1e-12) scale = 1.0;
        double eps_pos_eff = cfg.eps_pos / scale;
        double eps_dec_eff = cfg.eps_dec / scale;

        BarrierCertificate cand;
        cand.vars = vars;
        cand.basis = basis;
        cand.coeffs = *coeffs;
        for (double& c : cand.coeffs) c /= scale;
        cand.domain = domain;
        cand.epsilon = eps_pos_eff;
        cand.provenance["method"] = "refine-loop";
        cand.provenance["seed"] = std::to_string(cfg.seed);
        cand.provenance["delta"] = fmt(cfg.delta);
        cand.provenance["iterations"] = std::to_string(iter);
        report.certificate = cand;

        // Refutation searches run at half the claimed margins: a hit is a
        // genuine violation worth a new LP row, while LP-tight boundary
        // points (where the inequality holds with equality) are ignored.
        Term V = cand.barrier_term();
        Term vdot = lie_derivative(V, field);
        if (auto e = expand_polynomial(vdot)) vdot = *e;
        Term decviol = simplify(
            Term::add(vdot, Term::mul(Term::constant(0.5 * eps_dec_eff), norm2)));
        if (auto e = expand_polynomial(decviol)) decviol = *e;
        if (auto cx = maximize_positive(decviol, domain,
                                        cfg.seed + static_cast<uint32_t>(iter), cfg.nm_starts)) {
            report.last_witness = cx;
            samples.push_back(*cx);
            continue;
        }
        Term posviol = simplify(
            Term::sub(Term::mul(Term::constant(0.5 * eps_pos_eff), norm2), V));
        if (auto e = expand_polynomial(posviol)) posviol = *e;
        if (auto cx = maximize_positive(posviol, domain,
                                        cfg.seed + 7919u * static_cast<uint32_t>(iter),
                                        cfg.nm_starts)) {
            report.last_witness = cx;
            samples.push_back(*cx);
            continue;
        }

        Formula outside = Formula::cmp(
            CmpOp::Ge, norm2, Term::constant(cfg.origin_radius * cfg.origin_radius));
        DeltaResult dec = check_formula(
            Formula::conj(outside, Formula::cmp(CmpOp::Gt, decviol, Term::constant(0.0))),
            domain, cfg.delta, cfg.box_budget);
        DeltaResult pos = check_formula(
            Formula::conj(outside, Formula::cmp(CmpOp::Gt, posviol, Term::constant(0.0))),
            domain, cfg.delta, cfg.box_budget);
        if (dec.status == DeltaStatus::ResourceLimit || pos.status == DeltaStatus::ResourceLimit) {
            report.reason = "icp resource limit at iteration " + std::to_string(iter);
            return report;
        }
        if (dec.unsat() && pos.unsat()) {
            report.verified = true;
            report.reason.clear();
            return report;
        }
        const DeltaResult& bad = dec.delta_sat() ? dec : pos;
        State mid;
        for (const auto& [v, iv] : box_midpoint(bad.witness)) mid[v] = iv.lo;
        report.last_witness = mid;
        samples.push_back(mid);
    }
    report.reason = "iteration cap reached";
    return report;
}

bool level_passes(const Term& V, double level, const Formula& must_contain,
                  const Formula& must_exclude, const Box& domain, double delta,
                  uint64_t box_budget, DeltaResult* blocking_contain,
                  DeltaResult* blocking_exclude) {
    Formula escape = Formula::conj(must_contain,
                                   Formula::cmp(CmpOp::Gt, V, Term::constant(level)));
    DeltaResult rc = check_formula(escape, domain, delta, box_budget);
    if (!rc.unsat()) {
        if (blocking_contain) *blocking_contain = rc;
        return false;
    }
    Formula overlap = Formula::conj(must_exclude,
                                    Formula::cmp(CmpOp::Le, V, Term::constant(level)));
    DeltaResult re = check_formula(overlap, domain, delta, box_budget);
    if (!re.unsat()) {
        if (blocking_exclude) *blocking_exclude = re;
        return false;
    }
    return true;
}

LevelReport select_level(const Term& V, const Formula& must_contain,
                         const Formula& must_exclude, const Box& domain, double delta,
                         uint64_t box_budget) {
    LevelReport report;
    double hi = interval_eval(V, domain).hi;
    if (!(hi > 0.0) || !std::isfinite(hi)) return report;
    const int grid = 1000; // 1e-3-relative level grid
    auto level_at = [&](int k) { return hi * static_cast<double>(k) / grid; };

    // Containment feasibility is monotonically increasing in the level and
    // exclusion feasibility monotonically decreasing, so bisection over the
    // grid finds the separating window if one exists.
    int lo_k = 0, hi_k = grid;
    while (lo_k <= hi_k) {
        int mid = lo_k + (hi_k - lo_k) / 2;
        double l = level_at(mid);
        DeltaResult rc, re;
        Formula escape =
            Formula::conj(must_contain, Formula::cmp(CmpOp::Gt, V, Term::constant(l)));
        rc = check_formula(escape, domain, delta, box_budget);
        if (!rc.unsat()) {
            report.blocking_contain = rc;
            lo_k = mid + 1; // level too small to contain the set
            continue;
        }
        Formula overlap =
            Formula::conj(must_exclude, Formula::cmp(CmpOp::Le, V, Term::constant(l)));
        re = check_formula(overlap, domain, delta, box_budget);
        if (!re.unsat()) {
            report.blocking_exclude = re;
            hi_k = mid - 1; // level already reaches the excluded set
            continue;
        }
        report.level = l;
        return report;
    }
    return report;
}

QuadraticCertificate ellipsoid_image(const Matrix& P, double level, const Matrix& R,
                                     const std::vector<std::string>& vars) {
    if (std::fabs(determinant(R)) <= 1e-12)
        throw ModelError("singular reset matrix in ellipsoid image");
    auto rinv = invert(R);
    if (!rinv) throw ModelError("singular reset matrix in ellipsoid image");
    QuadraticCertificate out;
    out.vars = vars;
    out.P = mat_mul(transpose(*rinv), mat_mul(P, *rinv));
    // Exact symmetrization: the product is symmetric up to rounding.
    for (size_t i = 0; i < out.P.size(); ++i)
        for (size_t j = i + 1; j < out.P.size(); ++j) {
            double avg = 0.5 * (out.P[i][j] + out.P[j][i]);
            out.P[i][j] = out.P[j][i] = avg;
        }
    out.level = level;
    if (auto l = cholesky(out.P)) out.chol = *l;
    out.provenance["method"] = "ellipsoid-image";
    return out;
}

std::optional<bool> sublevel_contained_analytic(const QuadraticCertificate& inner,
                                                const QuadraticCertificate& outer) {
    if (!inner.level || !outer.level) return std::nullopt;
    if (inner.vars != outer.vars) return std::nullopt;
    double a = *inner.level, b = *outer.level;
    if (a <= 0.0) return std::nullopt;
    if (!cholesky(inner.P)) return std::nullopt; // criterion needs definite inner form
    Matrix diff = mat_sub(mat_scale(inner.P, b / a), outer.P);
    return is_psd(diff);
}

ContainmentReport sublevel_contained(const QuadraticCertificate& inner,
                                     const QuadraticCertificate& outer, const Box& domain,
                                     double delta, uint64_t box_budget) {
    ContainmentReport report;
    if (auto analytic = sublevel_contained_analytic(inner, outer); analytic && *analytic) {
        report.contained = true;
        report.analytic = true;
        return report;
    }
    Formula query = Formula::conj(
        Formula::cmp(CmpOp::Le, inner.quadratic_term(), Term::constant(*inner.level)),
        Formula::cmp(CmpOp::Gt, outer.quadratic_term(), Term::constant(*outer.level)));
    report.details = check_formula(query, domain, delta, box_budget);
    report.contained = report.details.unsat();
    return report;
}

} // namespace ficut
