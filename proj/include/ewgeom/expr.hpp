#pragma once

#include <optional>
#include <set>

#include "ewgeom/tensor.hpp"

namespace ewgeom {

// --- symbol table -----------------------------------------------------------

struct SymbolDecl {
    std::vector<Slot> slots;
    Parity parity = Parity::Even;
};

struct SymbolTable {
    std::map<std::string, SymbolDecl> symbols;
    std::set<std::string> free_indices;

    const SymbolDecl& require(const std::string& name, std::size_t offset) const {
        auto it = symbols.find(name);
        if (it == symbols.end()) throw ParseError(offset, cat("unknown symbol '", name, "'"));
        return it->second;
    }
};

// --- AST ---------------------------------------------------------------------

struct Factor {
    std::string symbol;
    std::vector<std::string> indices;  // in declared slot order
    std::size_t offset = 0;

    friend bool operator==(const Factor& a, const Factor& b) {
        return a.symbol == b.symbol && a.indices == b.indices;
    }
};

struct Term {
    Rational coeff{1};
    std::vector<Factor> factors;

    friend bool operator==(const Term& a, const Term& b) {
        return a.coeff == b.coeff && a.factors == b.factors;
    }
};

struct ExpressionAST {
    std::vector<Term> terms;

    friend bool operator==(const ExpressionAST& a, const ExpressionAST& b) {
        return a.terms == b.terms;
    }
};

// --- lexer / parser -----------------------------------------------------------

namespace detail {

struct Lexer {
    std::string_view text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool consume(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    bool consume2(const char* two) {
        skip_ws();
        if (pos + 1 < text.size() && text[pos] == two[0] && text[pos + 1] == two[1]) {
            pos += 2;
            return true;
        }
        return false;
    }
};

// Underscore introduces a lower index group, so names are alphanumeric.
inline bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

}  // namespace detail

// Index-notation parser. Indices are single letters, optionally primed for
// the conjugate spinor species ("A'"); ^{...} and _{...} groups are read in
// order and matched against the declared slots, whose variances are
// authoritative.
inline ExpressionAST parse_raw(std::string_view text) {
    detail::Lexer lx{text};
    ExpressionAST ast;

    auto parse_rational = [&]() -> std::optional<Rational> {
        lx.skip_ws();
        std::size_t save = lx.pos;
        if (lx.pos >= lx.text.size() || !(lx.text[lx.pos] >= '0' && lx.text[lx.pos] <= '9'))
            return std::nullopt;
        long long num = 0;
        while (lx.pos < lx.text.size() && lx.text[lx.pos] >= '0' && lx.text[lx.pos] <= '9')
            num = num * 10 + (lx.text[lx.pos++] - '0');
        long long den = 1;
        if (lx.pos < lx.text.size() && lx.text[lx.pos] == '/') {
            ++lx.pos;
            if (lx.pos >= lx.text.size() || !(lx.text[lx.pos] >= '0' && lx.text[lx.pos] <= '9'))
                throw ParseError(lx.pos, "expected denominator digits after '/'");
            den = 0;
            while (lx.pos < lx.text.size() && lx.text[lx.pos] >= '0' && lx.text[lx.pos] <= '9')
                den = den * 10 + (lx.text[lx.pos++] - '0');
            if (den == 0) throw ParseError(save, "zero denominator");
        }
        return Rational(num, den);
    };

    auto parse_indices_group = [&](std::vector<std::string>& out) {
        // inside braces: letters separated by whitespace
        while (true) {
            lx.skip_ws();
            if (lx.pos >= lx.text.size()) throw ParseError(lx.pos, "unterminated index group");
            char c = lx.text[lx.pos];
            if (c == '}') {
                ++lx.pos;
                return;
            }
            if (!detail::is_ident_start(c))
                throw ParseError(lx.pos, cat("expected index letter, found '", c, "'"));
            std::string idx(1, c);
            ++lx.pos;
            if (lx.pos < lx.text.size() && lx.text[lx.pos] == '\'') {
                idx += '\'';
                ++lx.pos;
            }
            if (lx.pos < lx.text.size() && detail::is_ident_char(lx.text[lx.pos]))
                throw ParseError(lx.pos, "indices must be single letters");
            out.push_back(std::move(idx));
        }
    };

    auto parse_factor = [&]() -> Factor {
        lx.skip_ws();
        std::size_t start = lx.pos;
        if (lx.pos >= lx.text.size() || !detail::is_ident_start(lx.text[lx.pos]))
            throw ParseError(lx.pos, "expected symbol name");
        std::string name;
        while (lx.pos < lx.text.size() && detail::is_ident_char(lx.text[lx.pos]))
            name += lx.text[lx.pos++];
        Factor f;
        f.symbol = std::move(name);
        f.offset = start;
        while (true) {
            if (lx.consume2("^{") || lx.consume2("_{")) {
                parse_indices_group(f.indices);
            } else {
                break;
            }
        }
        return f;
    };

    bool first_term = true;
    while (!lx.eof()) {
        int sign = 1;
        if (lx.consume('+')) {
            sign = 1;
        } else if (lx.consume('-')) {
            sign = -1;
        } else if (!first_term) {
            throw ParseError(lx.pos, "expected '+' or '-' between terms");
        }
        first_term = false;
        if (lx.eof()) throw ParseError(lx.pos, "dangling sign at end of expression");

        Term term;
        if (auto r = parse_rational()) term.coeff = *r;
        term.coeff = term.coeff * Rational(sign);
        // factors separated by whitespace or '*'
        while (true) {
            lx.skip_ws();
            if (lx.pos >= lx.text.size()) break;
            char c = lx.text[lx.pos];
            if (c == '+' || c == '-') break;
            if (c == '*') {
                ++lx.pos;
                continue;
            }
            term.factors.push_back(parse_factor());
        }
        if (term.factors.empty())
            throw ParseError(lx.pos, "term without factors");
        ast.terms.push_back(std::move(term));
    }
    return ast;
}

// Index-use validation: every letter appears exactly twice (same species,
// opposite variance, possibly on the same factor) or once if declared free;
// primed letters belong to the conjugate spinor species.
inline void validate_expression(const ExpressionAST& ast, const SymbolTable& table) {
    for (const Term& term : ast.terms) {
        struct Use {
            Species species;
            Variance variance;
            std::size_t offset;
        };
        std::map<std::string, std::vector<Use>> uses;
        for (const Factor& f : term.factors) {
            const SymbolDecl& decl = table.require(f.symbol, f.offset);
            if (f.indices.size() != decl.slots.size())
                throw ParseError(f.offset,
                                 cat("symbol '", f.symbol, "' expects ", decl.slots.size(),
                                     " indices, found ", f.indices.size()));
            for (std::size_t s = 0; s < decl.slots.size(); ++s) {
                const Slot& slot = decl.slots[s];
                const std::string& ix = f.indices[s];
                bool primed = ix.size() > 1 && ix.back() == '\'';
                if (primed != (slot.species == Species::SpinorDotted))
                    throw ParseError(f.offset,
                                     cat("index '", ix, "' of '", f.symbol, "' must ",
                                         primed ? "" : "not ",
                                         "be primed to sit in a ",
                                         species_name(slot.species), " slot"));
                uses[ix].push_back({slot.species, slot.variance, f.offset});
            }
        }
        for (const auto& [ix, v] : uses) {
            bool declared_free = table.free_indices.count(ix) > 0;
            if (v.size() == 1) {
                if (!declared_free)
                    throw ParseError(v[0].offset,
                                     cat("index '", ix,
                                         "' appears once and is not declared free"));
                continue;
            }
            if (v.size() > 2)
                throw ParseError(v[2].offset,
                                 cat("index '", ix, "' appears ", v.size(), " times"));
            if (declared_free)
                throw ParseError(v[1].offset,
                                 cat("free index '", ix, "' appears more than once"));
            if (v[0].species != v[1].species)
                throw ParseError(v[1].offset,
                                 cat("index '", ix, "' joins species ",
                                     species_name(v[0].species), " and ",
                                     species_name(v[1].species)));
            if (v[0].variance == v[1].variance)
                throw ParseError(v[1].offset,
                                 cat("index '", ix, "' appears twice in the same variance (",
                                     variance_name(v[0].variance), ")"));
        }
    }
}

inline ExpressionAST parse_expression(std::string_view text, const SymbolTable& table) {
    ExpressionAST ast = parse_raw(text);
    validate_expression(ast, table);
    return ast;
}

// Canonical printer; print-then-parse reproduces the AST.
inline std::string print_expression(const ExpressionAST& ast, const SymbolTable& table) {
    std::ostringstream os;
    for (std::size_t t = 0; t < ast.terms.size(); ++t) {
        const Term& term = ast.terms[t];
        Rational c = term.coeff;
        bool neg = c.num < 0;
        if (neg) c = -c;
        if (t == 0) {
            if (neg) os << "- ";
        } else {
            os << (neg ? " - " : " + ");
        }
        if (!(c.num == 1 && c.den == 1)) os << c.str() << " ";
        for (std::size_t fi = 0; fi < term.factors.size(); ++fi) {
            const Factor& f = term.factors[fi];
            if (fi) os << " ";
            os << f.symbol;
            const SymbolDecl& decl = table.symbols.at(f.symbol);
            std::size_t s = 0;
            while (s < decl.slots.size()) {
                Variance v = decl.slots[s].variance;
                os << (v == Variance::Up ? "^{" : "_{");
                bool first = true;
                while (s < decl.slots.size() && decl.slots[s].variance == v) {
                    if (!first) os << " ";
                    os << f.indices[s];
                    first = false;
                    ++s;
                }
                os << "}";
            }
        }
    }
    return os.str();
}

}  // namespace ewgeom
