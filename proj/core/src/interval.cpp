// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/interval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ficut/errors.hpp"

namespace ficut {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Endpoint product with the 0 * inf = 0 convention (an exact zero endpoint
// annihilates even an unbounded factor).
double ep_mul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

} // namespace

Interval outward(Interval x) {
    if (std::isfinite(x.lo)) x.lo -= kOutwardSlack * std::fabs(x.lo);
    if (std::isfinite(x.hi)) x.hi += kOutwardSlack * std::fabs(x.hi);
    return x;
}

Interval iadd(Interval a, Interval b) { return outward({a.lo + b.lo, a.hi + b.hi}); }
Interval isub(Interval a, Interval b) { return outward({a.lo - b.hi, a.hi - b.lo}); }
Interval ineg(Interval a) { return {-a.hi, -a.lo}; }

Interval imul(Interval a, Interval b) {
    double p1 = ep_mul(a.lo, b.lo), p2 = ep_mul(a.lo, b.hi);
    double p3 = ep_mul(a.hi, b.lo), p4 = ep_mul(a.hi, b.hi);
    return outward({std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})});
}

Interval idiv(Interval a, Interval b) {
    if (b.lo <= 0.0 && b.hi >= 0.0) return {-kInf, kInf};
    double q1 = a.lo / b.lo, q2 = a.lo / b.hi, q3 = a.hi / b.lo, q4 = a.hi / b.hi;
    return outward({std::min({q1, q2, q3, q4}), std::max({q1, q2, q3, q4})});
}

Interval ipow(Interval a, int n) {
    if (n == 0) return {1.0, 1.0};
    if (n == 1) return a;
    auto p = [n](double v) {
        double r = 1.0;
        for (int i = 0; i < n; ++i) r *= v;
        return r;
    };
    if (n % 2 != 0) return outward({p(a.lo), p(a.hi)});
    if (a.lo >= 0.0) return outward({p(a.lo), p(a.hi)});
    if (a.hi <= 0.0) return outward({p(a.hi), p(a.lo)});
    return outward({0.0, std::max(p(a.lo), p(a.hi))});
}

Interval isqrt(Interval a) {
    if (a.hi < 0.0) return {0.0, kInf};
    double lo = a.lo <= 0.0 ? 0.0 : std::sqrt(a.lo);
    return outward({lo, std::sqrt(a.hi)});
}

Interval hull(Interval a, Interval b) {
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

bool intersects(Interval a, Interval b) { return a.lo <= b.hi && b.lo <= a.hi; }
double width(Interval a) { return a.hi - a.lo; }
double midpoint(Interval a) {
    if (a.lo == -kInf && a.hi == kInf) return 0.0;
    if (a.lo == -kInf) return a.hi;
    if (a.hi == kInf) return a.lo;
    return 0.5 * (a.lo + a.hi);
}
bool contains(Interval a, double v) { return a.lo <= v && v <= a.hi; }

double box_width(const Box& b) {
    double w = 0.0;
    for (const auto& [_, iv] : b) w = std::max(w, width(iv));
    return w;
}

Box box_midpoint(const Box& b) {
    Box m;
    for (const auto& [name, iv] : b) {
        double c = midpoint(iv);
        m[name] = {c, c};
    }
    return m;
}

Interval interval_eval(const Term& t, const Box& box) {
    switch (t.kind()) {
    case TermKind::Constant:
        return {t.node().value, t.node().value};
    case TermKind::StateVar:
    case TermKind::LogicalVar: {
        auto it = box.find(t.node().name);
        if (it == box.end())
            throw EvalError("variable '" + t.node().name + "' not in the box");
        return it->second;
    }
    case TermKind::Add: return iadd(interval_eval(t.lhs(), box), interval_eval(t.rhs(), box));
    case TermKind::Sub: return isub(interval_eval(t.lhs(), box), interval_eval(t.rhs(), box));
    case TermKind::Mul: return imul(interval_eval(t.lhs(), box), interval_eval(t.rhs(), box));
    case TermKind::Div: return idiv(interval_eval(t.lhs(), box), interval_eval(t.rhs(), box));
    case TermKind::Pow: return ipow(interval_eval(t.lhs(), box), t.node().exponent);
    case TermKind::Sqrt: return isqrt(interval_eval(t.lhs(), box));
    case TermKind::Neg: return ineg(interval_eval(t.lhs(), box));
    }
    throw EvalError("corrupt term");
}

} // namespace ficut
