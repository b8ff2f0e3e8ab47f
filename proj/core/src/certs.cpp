// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/certs.hpp"

#include <sstream>

#include "ficut/errors.hpp"
#include "ficut/model.hpp"
#include "ficut/poly.hpp"

namespace ficut {

namespace {

std::string join_decls(const std::vector<std::string>& vars) {
    std::string decl = "statevar ";
    for (size_t i = 0; i < vars.size(); ++i) {
        if (i) decl += ", ";
        decl += vars[i];
    }
    decl += ".";
    return decl;
}

void write_number(std::ostringstream& os, double v) {
    os.precision(17);
    os << v;
}

} // namespace

Term QuadraticCertificate::quadratic_term() const {
    Poly p;
    for (size_t i = 0; i < vars.size(); ++i)
        for (size_t j = 0; j < vars.size(); ++j) {
            if (P[i][j] == 0.0) continue;
            Monomial m;
            m[vars[i]] += 1;
            m[vars[j]] += 1;
            p = poly_add(p, Poly{{m, P[i][j]}});
        }
    return poly_to_term(p);
}

Formula QuadraticCertificate::cut_formula() const {
    if (!level) throw ModelError("certificate has no level");
    Formula set = Formula::cmp(CmpOp::Le, quadratic_term(), Term::constant(*level));
    return guard.valid() ? Formula::conj(guard, set) : set;
}

Term BarrierCertificate::barrier_term() const {
    Poly acc;
    bool polynomial = true;
    for (size_t i = 0; i < basis.size(); ++i) {
        auto p = to_poly(basis[i]);
        if (!p) {
            polynomial = false;
            break;
        }
        acc = poly_add(acc, poly_scale(*p, coeffs[i]));
    }
    if (polynomial) return poly_to_term(acc);
    Term sum = Term::constant(0.0);
    for (size_t i = 0; i < basis.size(); ++i)
        sum = Term::add(sum, Term::mul(Term::constant(coeffs[i]), basis[i]));
    return sum;
}

std::string serialize(const QuadraticCertificate& c) {
    std::ostringstream os;
    os << "ficut-certificate v1\n";
    os << "kind: quadratic\n";
    os << "vars:";
    for (const auto& v : c.vars) os << " " << v;
    os << "\n";
    os << "P:";
    for (const auto& row : c.P)
        for (double v : row) {
            os << " ";
            write_number(os, v);
        }
    os << "\n";
    if (c.level) {
        os << "level: ";
        write_number(os, *c.level);
        os << "\n";
    }
    for (const auto& [k, v] : c.provenance) os << "meta: " << k << " " << v << "\n";
    return os.str();
}

std::string serialize(const BarrierCertificate& c) {
    std::ostringstream os;
    os << "ficut-certificate v1\n";
    os << "kind: barrier\n";
    os << "vars:";
    for (const auto& v : c.vars) os << " " << v;
    os << "\n";
    os << "basis:";
    for (size_t i = 0; i < c.basis.size(); ++i) os << (i ? " | " : " ") << to_string(c.basis[i]);
    os << "\n";
    os << "coeffs:";
    for (double v : c.coeffs) {
        os << " ";
        write_number(os, v);
    }
    os << "\n";
    if (!c.domain.empty()) {
        os << "domain:";
        bool first = true;
        for (const auto& [var, iv] : c.domain) {
            os << (first ? " " : " | ") << var << " ";
            write_number(os, iv.lo);
            os << " ";
            write_number(os, iv.hi);
            first = false;
        }
        os << "\n";
    }
    os << "epsilon: ";
    write_number(os, c.epsilon);
    os << "\n";
    for (const auto& [k, v] : c.provenance) os << "meta: " << k << " " << v << "\n";
    return os.str();
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string w;
    while (is >> w) out.push_back(w);
    return out;
}

std::vector<std::string> split_pipe(const std::string& s) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t bar = s.find('|', start);
        std::string piece = s.substr(start, bar == std::string::npos ? bar : bar - start);
        out.push_back(piece);
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    return out;
}

} // namespace

ParsedCertificate parse_certificate(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::map<std::string, std::string> fields;
    std::map<std::string, std::string> meta;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line == "ficut-certificate v1") {
            header = true;
            continue;
        }
        size_t colon = line.find(": ");
        if (colon == std::string::npos) throw ModelError("malformed certificate line: " + line);
        std::string key = line.substr(0, colon);
        std::string value = line.substr(colon + 2);
        if (key == "meta") {
            size_t sp = value.find(' ');
            if (sp == std::string::npos)
                meta[value] = "";
            else
                meta[value.substr(0, sp)] = value.substr(sp + 1);
        } else {
            fields[key] = value;
        }
    }
    if (!header) throw ModelError("missing certificate header");
    auto require = [&](const std::string& key) -> const std::string& {
        auto it = fields.find(key);
        if (it == fields.end()) throw ModelError("certificate missing field '" + key + "'");
        return it->second;
    };

    std::vector<std::string> vars = split_ws(require("vars"));
    if (vars.empty()) throw ModelError("certificate declares no variables");
    Model probe = parse_model(join_decls(vars));

    ParsedCertificate out;
    const std::string& kind = require("kind");
    if (kind == "quadratic") {
        QuadraticCertificate c;
        c.vars = vars;
        std::vector<std::string> entries = split_ws(require("P"));
        size_t n = vars.size();
        if (entries.size() != n * n) throw ModelError("P has the wrong number of entries");
        c.P.assign(n, Vector(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) c.P[i][j] = std::stod(entries[i * n + j]);
        if (fields.count("level")) c.level = std::stod(fields["level"]);
        c.provenance = meta;
        if (auto l = cholesky(c.P)) c.chol = *l;
        out.quadratic = std::move(c);
    } else if (kind == "barrier") {
        BarrierCertificate c;
        c.vars = vars;
        for (const auto& piece : split_pipe(require("basis"))) c.basis.push_back(parse_term(piece, probe));
        for (const auto& w : split_ws(require("coeffs"))) c.coeffs.push_back(std::stod(w));
        if (c.basis.size() != c.coeffs.size())
            throw ModelError("basis/coefficient length mismatch");
        if (fields.count("domain"))
            for (const auto& piece : split_pipe(fields["domain"])) {
                std::vector<std::string> parts = split_ws(piece);
                if (parts.size() != 3) throw ModelError("malformed domain entry: " + piece);
                c.domain[parts[0]] = {std::stod(parts[1]), std::stod(parts[2])};
            }
        if (fields.count("epsilon")) c.epsilon = std::stod(fields["epsilon"]);
        c.provenance = meta;
        out.barrier = std::move(c);
    } else {
        throw ModelError("unknown certificate kind '" + kind + "'");
    }
    return out;
}

} // namespace ficut
