// Copyright (c) ficut contributors.
// SPDX-License-Identifier: Apache-2.0
#include "ficut/model.hpp"

#include <cctype>
#include <cstdlib>
#include <vector>

#include "ficut/errors.hpp"

namespace ficut {

const Program& Model::program(const std::string& name) const {
    auto it = programs.find(name);
    if (it == programs.end()) throw ModelError("unknown program '" + name + "'");
    return it->second;
}

const Formula& Model::formula(const std::string& name) const {
    auto it = formulas.find(name);
    if (it == formulas.end()) throw ModelError("unknown formula '" + name + "'");
    return it->second;
}

namespace {

enum class TokKind { Ident, Number, Punct, End };

struct Token {
    TokKind kind;
    std::string text;
    double number = 0.0;
    int line = 1;
    int column = 1;
};

// Internal failure carrying the token index; converted to ParseError at the
// entry points so alternatives can be compared by how far they got.
struct Fail {
    size_t tok;
    std::string msg;
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (text[i + k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        i += n;
    };
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (is_ident_start(c)) {
            size_t j = i;
            while (j < text.size() && is_ident_char(text[j])) ++j;
            t.kind = TokKind::Ident;
            t.text = text.substr(i, j - i);
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && text[j] == '.' && j + 1 < text.size() &&
                std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
                ++j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            if (j < text.size() && (text[j] == 'e' || text[j] == 'E')) {
                size_t k = j + 1;
                if (k < text.size() && (text[k] == '+' || text[k] == '-')) ++k;
                if (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) {
                    ++k;
                    while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
                    j = k;
                }
            }
            t.kind = TokKind::Number;
            t.text = text.substr(i, j - i);
            t.number = std::strtod(t.text.c_str(), nullptr);
            advance(j - i);
        } else {
            static const char* multi[] = {"::=", ":==", ":=", "->", "++", "<=", ">="};
            t.kind = TokKind::Punct;
            t.text.clear();
            for (const char* m : multi) {
                size_t len = std::string(m).size();
                if (text.compare(i, len, m) == 0) {
                    t.text = m;
                    break;
                }
            }
            if (t.text.empty()) {
                static const std::string singles = "<>=?()[]{}!&|+-*/^;,.'";
                if (singles.find(c) == std::string::npos)
                    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
                t.text = std::string(1, c);
            }
            advance(t.text.size());
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = TokKind::End;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

class Parser {
  public:
    Parser(std::vector<Token> tokens, Model& model) : toks_(std::move(tokens)), model_(model) {}

    void parse_document() {
        while (peek().kind != TokKind::End) statement();
    }

    Term entry_term() {
        Term t = term();
        expect_end();
        return t;
    }
    Formula entry_formula() {
        Formula f = formula();
        expect_end();
        return f;
    }
    Program entry_program() {
        Program p = program();
        expect_end();
        return p;
    }

    [[noreturn]] void rethrow(const Fail& f) const {
        const Token& t = toks_[f.tok];
        throw ParseError(f.msg, t.line, t.column);
    }

  private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    Model& model_;

    const Token& peek(size_t ahead = 0) const {
        size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    bool at_punct(const std::string& p) const {
        return peek().kind == TokKind::Punct && peek().text == p;
    }
    bool at_ident(const std::string& word) const {
        return peek().kind == TokKind::Ident && peek().text == word;
    }
    bool accept(const std::string& p) {
        if (!at_punct(p)) return false;
        ++pos_;
        return true;
    }
    void expect(const std::string& p) {
        if (!accept(p)) fail("expected '" + p + "'");
    }
    [[noreturn]] void fail(const std::string& msg) const { throw Fail{pos_, msg}; }
    void expect_end() {
        if (peek().kind != TokKind::End) fail("trailing input");
    }
    std::string ident() {
        if (peek().kind != TokKind::Ident) fail("expected identifier");
        return toks_[pos_++].text;
    }

    // --- statements -------------------------------------------------------

    void statement() {
        if (at_ident("statevar")) {
            ++pos_;
            declarations(VarKind::State);
        } else if (at_ident("logicalvar")) {
            ++pos_;
            declarations(VarKind::Logical);
        } else if (at_ident("mode")) {
            ++pos_;
            do {
                size_t at = pos_;
                std::string name = ident();
                try {
                    model_.symbols.declare_mode(name);
                } catch (const ModelError& e) {
                    throw Fail{at, e.what()};
                }
            } while (accept(","));
            expect(".");
        } else if (at_ident("domain") || at_ident("bounds")) {
            ++pos_;
            do {
                size_t at = pos_;
                std::string name = ident();
                if (!at_ident("in")) fail("expected 'in'");
                ++pos_;
                expect("[");
                double lo = signed_number();
                expect(",");
                double hi = signed_number();
                expect("]");
                try {
                    model_.symbols.set_range(name, lo, hi);
                } catch (const ModelError& e) {
                    throw Fail{at, e.what()};
                }
            } while (accept(","));
            expect(".");
        } else if (peek().kind == TokKind::Ident) {
            size_t at = pos_;
            std::string name = ident();
            if (model_.has_program(name) || model_.has_formula(name))
                throw Fail{at, "duplicate definition of '" + name + "'"};
            if (accept("::=")) {
                Program p = program();
                expect(".");
                model_.programs.emplace(name, p);
                model_.program_order.push_back(name);
            } else if (accept(":==")) {
                Formula f = formula();
                expect(".");
                model_.formulas.emplace(name, f);
                model_.formula_order.push_back(name);
            } else {
                fail("expected '::=' or ':==' after definition name");
            }
        } else {
            fail("expected a declaration or definition");
        }
    }

    void declarations(VarKind kind) {
        do {
            size_t at = pos_;
            std::string name = ident();
            try {
                if (kind == VarKind::State)
                    model_.symbols.declare_state(name);
                else
                    model_.symbols.declare_logical(name);
            } catch (const ModelError& e) {
                throw Fail{at, e.what()};
            }
        } while (accept(","));
        expect(".");
    }

    double signed_number() {
        bool neg = accept("-");
        if (peek().kind != TokKind::Number) fail("expected a number");
        double v = toks_[pos_++].number;
        return neg ? -v : v;
    }

    // --- terms ------------------------------------------------------------

    Term term() {
        Term t = term_mul();
        while (true) {
            if (accept("+"))
                t = Term::add(t, term_mul());
            else if (accept("-"))
                t = Term::sub(t, term_mul());
            else
                break;
        }
        return t;
    }

    Term term_mul() {
        Term t = term_unary();
        while (true) {
            if (accept("*"))
                t = Term::mul(t, term_unary());
            else if (accept("/"))
                t = Term::div(t, term_unary());
            else
                break;
        }
        return t;
    }

    Term term_unary() {
        if (accept("-")) return Term::neg(term_unary());
        return term_pow();
    }

    Term term_pow() {
        Term base = term_atom();
        if (accept("^")) {
            if (peek().kind != TokKind::Number) fail("expected integer exponent");
            double e = toks_[pos_++].number;
            int n = static_cast<int>(e);
            if (n < 0 || static_cast<double>(n) != e) fail("exponent must be a natural number");
            return Term::pow(base, n);
        }
        return base;
    }

    Term term_atom() {
        if (peek().kind == TokKind::Number) return Term::constant(toks_[pos_++].number);
        if (at_ident("sqrt")) {
            ++pos_;
            expect("(");
            Term t = term();
            expect(")");
            return Term::sqrt(t);
        }
        if (accept("(")) {
            Term t = term();
            expect(")");
            return t;
        }
        if (peek().kind == TokKind::Ident) {
            size_t at = pos_;
            std::string name = ident();
            if (model_.symbols.is_state(name)) return Term::state_var(name);
            if (model_.symbols.is_logical(name)) return Term::logical_var(name);
            if (auto mv = model_.symbols.mode_value(name)) return Term::constant(*mv);
            throw Fail{at, "undeclared identifier '" + name + "'"};
        }
        fail("expected a term");
    }

    // --- formulas ---------------------------------------------------------

    Formula formula() {
        Formula f = formula_or();
        if (accept("->")) return Formula::imply(f, formula());
        return f;
    }

    Formula formula_or() {
        Formula f = formula_and();
        while (accept("|")) f = Formula::disj(f, formula_and());
        return f;
    }

    Formula formula_and() {
        Formula f = formula_unary();
        while (accept("&")) f = Formula::conj(f, formula_unary());
        return f;
    }

    Formula formula_unary() {
        if (accept("!")) return Formula::negate(formula_unary());
        if (at_ident("forall") || at_ident("exists")) {
            bool universal = peek().text == "forall";
            ++pos_;
            size_t at = pos_;
            std::string var = ident();
            if (!model_.symbols.is_logical(var))
                throw Fail{at, "quantified variable '" + var + "' must be a logical variable"};
            expect(".");
            Formula body = formula();
            return universal ? Formula::forall(var, body) : Formula::exists(var, body);
        }
        if (accept("[")) {
            Program p = program();
            expect("]");
            return Formula::box(p, formula_unary());
        }
        if (at_punct("<") && !cmp_can_start_here()) {
            ++pos_;
            Program p = program();
            expect(">");
            return Formula::diamond(p, formula_unary());
        }
        return formula_atom();
    }

    // A bare '<' always opens a diamond modality (comparisons start with a
    // term, never with '<'), so the check is trivially true; kept as a seam.
    bool cmp_can_start_here() const { return false; }

    Formula formula_atom() {
        if (at_ident("true")) {
            ++pos_;
            return Formula::boolean(true);
        }
        if (at_ident("false")) {
            ++pos_;
            return Formula::boolean(false);
        }
        // A leading '(' or identifier is ambiguous between a comparison and a
        // parenthesized formula / formula reference. Try the comparison first
        // and keep whichever alternative consumed more input on failure.
        size_t save = pos_;
        Fail first{0, ""};
        try {
            return comparison();
        } catch (const Fail& f) {
            first = f;
            pos_ = save;
        }
        try {
            if (accept("(")) {
                Formula f = formula();
                expect(")");
                return f;
            }
            if (peek().kind == TokKind::Ident) {
                size_t at = pos_;
                std::string name = ident();
                if (model_.has_formula(name)) return model_.formula(name);
                throw Fail{at, "undeclared identifier '" + name + "'"};
            }
            fail("expected a formula");
        } catch (const Fail& f) {
            throw f.tok >= first.tok ? f : first;
        }
    }

    Formula comparison() {
        Term lhs = term();
        CmpOp op;
        if (accept("="))
            op = CmpOp::Eq;
        else if (accept("<="))
            op = CmpOp::Le;
        else if (accept(">="))
            op = CmpOp::Ge;
        else if (accept("<"))
            op = CmpOp::Lt;
        else if (accept(">"))
            op = CmpOp::Gt;
        else
            fail("expected a comparison operator");
        return Formula::cmp(op, lhs, term());
    }

    // --- programs ---------------------------------------------------------

    Program program() {
        Program p = program_seq();
        while (accept("++")) p = Program::choice(p, program_seq());
        return p;
    }

    Program program_seq() {
        Program p = program_atom();
        while (accept(";")) p = Program::seq(p, program_atom());
        return p;
    }

    Program program_atom() {
        if (accept("?")) {
            expect("(");
            Formula f = formula();
            expect(")");
            return Program::test(f);
        }
        if (accept("(")) {
            Program p = program();
            expect(")");
            return p;
        }
        if (accept("{")) {
            if (peek().kind == TokKind::Ident && peek(1).kind == TokKind::Punct &&
                peek(1).text == "'")
                return ode_body();
            Program p = program();
            expect("}");
            if (accept("*")) return Program::star(p);
            return p;
        }
        if (peek().kind == TokKind::Ident) {
            size_t at = pos_;
            std::string name = ident();
            if (accept(":=")) {
                if (!model_.symbols.is_state(name))
                    throw Fail{at, "assignment target '" + name + "' must be a state variable"};
                if (accept("*")) return Program::havoc(name);
                return Program::assign(name, term());
            }
            if (model_.has_program(name)) return model_.program(name);
            throw Fail{at, "undeclared program '" + name + "'"};
        }
        fail("expected a program");
    }

    Program ode_body() {
        std::vector<OdeEquation> eqs;
        do {
            size_t at = pos_;
            std::string var = ident();
            if (!model_.symbols.is_state(var))
                throw Fail{at, "differential equation for non-state variable '" + var + "'"};
            for (const auto& eq : eqs)
                if (eq.var == var) throw Fail{at, "duplicate differential equation for '" + var + "'"};
            expect("'");
            expect("=");
            eqs.push_back({var, term()});
        } while (accept(","));
        Formula domain = Formula::boolean(true);
        if (accept("&")) domain = formula();
        expect("}");
        return Program::ode(std::move(eqs), domain);
    }
};

template <typename F>
auto with_parse_errors(Parser& p, F&& body) {
    try {
        return body();
    } catch (const Fail& f) {
        p.rethrow(f);
    }
}

} // namespace

Model parse_model(const std::string& text) {
    Model model;
    Parser p(tokenize(text), model);
    with_parse_errors(p, [&] { p.parse_document(); });
    return model;
}

Term parse_term(const std::string& text, const Model& model) {
    Model& m = const_cast<Model&>(model);
    Parser p(tokenize(text), m);
    return with_parse_errors(p, [&] { return p.entry_term(); });
}

Formula parse_formula(const std::string& text, const Model& model) {
    Model& m = const_cast<Model&>(model);
    Parser p(tokenize(text), m);
    return with_parse_errors(p, [&] { return p.entry_formula(); });
}

Program parse_program(const std::string& text, const Model& model) {
    Model& m = const_cast<Model&>(model);
    Parser p(tokenize(text), m);
    return with_parse_errors(p, [&] { return p.entry_program(); });
}

} // namespace ficut
