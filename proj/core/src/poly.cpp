// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/poly.hpp"

#include "ficut/errors.hpp"

namespace ficut {

namespace {

void add_into(Poly& acc, const Monomial& m, double c) {
    double& slot = acc[m];
    slot += c;
    if (slot == 0.0) acc.erase(m);
}

} // namespace

Poly poly_add(const Poly& a, const Poly& b) {
    Poly out = a;
    for (const auto& [m, c] : b) add_into(out, m, c);
    return out;
}

Poly poly_scale(const Poly& a, double k) {
    Poly out;
    if (k == 0.0) return out;
    for (const auto& [m, c] : a) out[m] = c * k;
    return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) {
            Monomial m = ma;
            for (const auto& [var, e] : mb) m[var] += e;
            add_into(out, m, ca * cb);
        }
    return out;
}

Poly poly_diff(const Poly& a, const std::string& var) {
    Poly out;
    for (const auto& [m, c] : a) {
        auto it = m.find(var);
        if (it == m.end() || it->second == 0) continue;
        Monomial d = m;
        if (it->second == 1)
            d.erase(var);
        else
            d[var] = it->second - 1;
        add_into(out, d, c * it->second);
    }
    return out;
}

int poly_degree(const Poly& a) {
    int deg = 0;
    for (const auto& [m, _] : a) {
        int d = 0;
        for (const auto& [__, e] : m) d += e;
        deg = std::max(deg, d);
    }
    return deg;
}

std::optional<Poly> to_poly(const Term& t) {
    switch (t.kind()) {
    case TermKind::Constant:
        if (t.node().value == 0.0) return Poly{};
        return Poly{{Monomial{}, t.node().value}};
    case TermKind::StateVar:
    case TermKind::LogicalVar:
        return Poly{{Monomial{{t.node().name, 1}}, 1.0}};
    case TermKind::Add: {
        auto a = to_poly(t.lhs()), b = to_poly(t.rhs());
        if (!a || !b) return std::nullopt;
        return poly_add(*a, *b);
    }
    case TermKind::Sub: {
        auto a = to_poly(t.lhs()), b = to_poly(t.rhs());
        if (!a || !b) return std::nullopt;
        return poly_add(*a, poly_scale(*b, -1.0));
    }
    case TermKind::Mul: {
        auto a = to_poly(t.lhs()), b = to_poly(t.rhs());
        if (!a || !b) return std::nullopt;
        return poly_mul(*a, *b);
    }
    case TermKind::Div: {
        auto a = to_poly(t.lhs()), b = to_poly(t.rhs());
        if (!a || !b) return std::nullopt;
        // Division only by a nonzero constant stays polynomial.
        if (b->size() != 1 || !b->begin()->first.empty()) return std::nullopt;
        double c = b->begin()->second;
        if (c == 0.0) return std::nullopt;
        return poly_scale(*a, 1.0 / c);
    }
    case TermKind::Pow: {
        auto a = to_poly(t.lhs());
        if (!a) return std::nullopt;
        Poly out{{Monomial{}, 1.0}};
        for (int i = 0; i < t.node().exponent; ++i) out = poly_mul(out, *a);
        return out;
    }
    case TermKind::Neg: {
        auto a = to_poly(t.lhs());
        if (!a) return std::nullopt;
        return poly_scale(*a, -1.0);
    }
    case TermKind::Sqrt:
        return std::nullopt;
    }
    throw EvalError("corrupt term");
}

Term poly_to_term(const Poly& p, const std::set<std::string>& logical) {
    if (p.empty()) return Term::constant(0.0);
    Term sum;
    for (const auto& [m, c] : p) {
        Term factor;
        for (const auto& [var, e] : m) {
            Term v = logical.count(var) ? Term::logical_var(var) : Term::state_var(var);
            Term piece = e == 1 ? v : Term::pow(v, e);
            factor = factor.valid() ? Term::mul(factor, piece) : piece;
        }
        Term mono;
        if (!factor.valid())
            mono = Term::constant(c);
        else if (c == 1.0)
            mono = factor;
        else if (c == -1.0)
            mono = Term::neg(factor);
        else
            mono = Term::mul(Term::constant(c), factor);
        sum = sum.valid() ? Term::add(sum, mono) : mono;
    }
    return sum;
}

namespace {

void collect_logical(const Term& t, std::set<std::string>& out) {
    if (t.kind() == TermKind::LogicalVar) out.insert(t.node().name);
    if (t.node().lhs) collect_logical(t.lhs(), out);
    if (t.node().rhs) collect_logical(t.rhs(), out);
}

} // namespace

std::optional<Term> expand_polynomial(const Term& t) {
    auto p = to_poly(t);
    if (!p) return std::nullopt;
    std::set<std::string> logical;
    collect_logical(t, logical);
    return poly_to_term(*p, logical);
}

} // namespace ficut
