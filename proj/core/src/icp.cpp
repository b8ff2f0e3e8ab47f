// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/icp.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

#include "ficut/errors.hpp"
#include "ficut/poly.hpp"
#include "ficut/transform.hpp"

namespace ficut {

namespace {

bool prunes(const Constraint& c, const Box& box) {
    Interval e = interval_eval(c.expr, box);
    switch (c.rel) {
    case ConstraintRel::LeZero: return e.lo > 0.0;
    // Strict constraints prune with the non-strict test: a certain zero
    // lower bound already rules out e < 0.
    case ConstraintRel::LtZero: return e.lo >= 0.0;
    case ConstraintRel::EqZero: return e.lo > 0.0 || e.hi < 0.0;
    }
    return false;
}

bool midpoint_satisfies_weakened(const ConstraintSystem& sys, const Box& box) {
    Box mid = box_midpoint(box);
    for (const auto& c : sys.constraints) {
        Interval e = interval_eval(c.expr, mid);
        switch (c.rel) {
        case ConstraintRel::LeZero:
            if (!(e.hi <= sys.delta)) return false;
            break;
        case ConstraintRel::LtZero:
            if (!(e.hi < sys.delta)) return false;
            break;
        case ConstraintRel::EqZero:
            if (!(e.lo >= -sys.delta && e.hi <= sys.delta)) return false;
            break;
        }
    }
    return true;
}

} // namespace

DeltaResult check(const ConstraintSystem& sys, uint64_t box_budget) {
    if (sys.delta <= 0.0) throw ModelError("icp precision must be positive");
    DeltaResult result;
    std::vector<Box> stack{sys.domain};
    // Below this width a box is returned even if the midpoint check is shy;
    // it exists only to terminate on degenerate (zero-width) axes.
    const double floor_width = std::max(1e-15, sys.delta * 1e-9);
    while (!stack.empty()) {
        if (result.boxes_explored >= box_budget) {
            result.status = DeltaStatus::ResourceLimit;
            return result;
        }
        Box box = std::move(stack.back());
        stack.pop_back();
        ++result.boxes_explored;

        bool dead = false;
        for (const auto& c : sys.constraints)
            if (prunes(c, box)) {
                dead = true;
                break;
            }
        if (dead) continue;

        double w = box_width(box);
        if (w <= sys.delta) {
            // The witness must certify the δ-weakened system at its
            // midpoint; when interval growth obscures that, keep splitting.
            if (midpoint_satisfies_weakened(sys, box) || w <= floor_width) {
                result.status = DeltaStatus::DeltaSat;
                result.witness = box;
                return result;
            }
        }

        // Split the widest axis (alphabetically first on ties) and explore
        // the lower half first.
        auto widest = box.begin();
        for (auto it = box.begin(); it != box.end(); ++it)
            if (width(it->second) > width(widest->second)) widest = it;
        double m = midpoint(widest->second);
        Box lower = box, upper = box;
        lower[widest->first].hi = m;
        upper[widest->first].lo = m;
        stack.push_back(std::move(upper));
        stack.push_back(std::move(lower));
    }
    result.status = DeltaStatus::Unsat;
    return result;
}

std::vector<Constraint> constraints_of(const std::vector<Formula>& atoms) {
    std::vector<Constraint> out;
    for (const auto& f : atoms) {
        if (f.kind() == FormulaKind::BoolConst) {
            if (!f.node().bvalue) out.push_back({Term::constant(1.0), ConstraintRel::LeZero});
            continue;
        }
        if (f.kind() != FormulaKind::Cmp)
            throw UnsupportedConstruct("non-atomic formula in constraint conversion");
        const Term& a = f.node().tlhs;
        const Term& b = f.node().trhs;
        Term e;
        ConstraintRel rel;
        switch (f.node().cmp) {
        case CmpOp::Le: e = Term::sub(a, b); rel = ConstraintRel::LeZero; break;
        case CmpOp::Lt: e = Term::sub(a, b); rel = ConstraintRel::LtZero; break;
        case CmpOp::Ge: e = Term::sub(b, a); rel = ConstraintRel::LeZero; break;
        case CmpOp::Gt: e = Term::sub(b, a); rel = ConstraintRel::LtZero; break;
        case CmpOp::Eq: e = Term::sub(a, b); rel = ConstraintRel::EqZero; break;
        default: throw UnsupportedConstruct("corrupt comparison");
        }
        e = simplify(e);
        if (auto expanded = expand_polynomial(e)) e = *expanded;
        out.push_back({e, rel});
    }
    return out;
}

DeltaResult check_formula(const Formula& f, const Box& domain, double delta,
                          uint64_t box_budget) {
    DeltaResult agg;
    agg.status = DeltaStatus::Unsat;
    bool limited = false;
    for (const auto& disjunct : dnf(simplify(f))) {
        ConstraintSystem sys;
        sys.constraints = constraints_of(disjunct);
        sys.domain = domain;
        sys.delta = delta;
        DeltaResult r = check(sys, box_budget);
        agg.boxes_explored += r.boxes_explored;
        if (r.delta_sat()) {
            agg.status = DeltaStatus::DeltaSat;
            agg.witness = r.witness;
            return agg;
        }
        if (r.status == DeltaStatus::ResourceLimit) limited = true;
    }
    if (limited) agg.status = DeltaStatus::ResourceLimit;
    return agg;
}

std::string dump_query(const ConstraintSystem& sys) {
    std::ostringstream os;
    os.precision(17);
    os << "// delta = " << sys.delta << "\n";
    for (const auto& [var, iv] : sys.domain) {
        os << var << " >= " << iv.lo << "\n";
        os << var << " <= " << iv.hi << "\n";
    }
    for (const auto& c : sys.constraints) {
        os << to_string(c.expr);
        switch (c.rel) {
        case ConstraintRel::LeZero: os << " <= 0"; break;
        case ConstraintRel::LtZero: os << " < 0"; break;
        case ConstraintRel::EqZero: os << " = 0"; break;
        }
        os << "\n";
    }
    return os.str();
}

} // namespace ficut
