#pragma once

// A tiny constructor language for sequences, partitions and moduli:
//
//   expr := ident "(" args ")"
//   args := arg ("," arg)* | <empty>
//   arg  := number | ident | pair | expr
//   pair := number ":" number
//
// Identifiers are [a-z_][a-z0-9_]*; numbers are decimals with an optional
// fraction and exponent (a leading '-' is accepted). Whitespace is ignored.
// The parser is recursive descent with one token of lookahead.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "error.hpp"
#include "lacunary.hpp"
#include "modulus.hpp"
#include "sequence.hpp"

namespace lacuna::dsl {

struct Ast {
    enum class Kind { call, number, identifier, pair };

    Kind kind = Kind::call;
    std::string text; ///< callee or identifier name, or the number's source text
    double number = 0.0;
    std::vector<Ast> children;
    Span span;

    friend bool operator==(const Ast&, const Ast&) = default;
};

/// Equality ignoring source spans.
inline bool same_structure(const Ast& a, const Ast& b)
{
    if (a.kind != b.kind || a.text != b.text || a.children.size() != b.children.size())
        return false;
    if (a.kind == Ast::Kind::number && a.number != b.number)
        return false;
    for (std::size_t i = 0; i < a.children.size(); ++i)
        if (!same_structure(a.children[i], b.children[i]))
            return false;
    return true;
}

struct ParseError {
    std::string message;
    std::size_t position = 0;
    std::vector<std::string> expected;
};

class ParseResult {
public:
    ParseResult(Ast ast) : value_(std::move(ast)) {}
    ParseResult(ParseError err) : value_(std::move(err)) {}

    bool ok() const noexcept { return std::holds_alternative<Ast>(value_); }
    explicit operator bool() const noexcept { return ok(); }
    const Ast& ast() const { return std::get<Ast>(value_); }
    const ParseError& error() const { return std::get<ParseError>(value_); }

private:
    std::variant<Ast, ParseError> value_;
};

inline constexpr std::size_t kMaxNesting = 64;

namespace detail {

enum class Tok { ident, number, lparen, rparen, comma, colon, end, invalid };

struct Token {
    Tok kind = Tok::end;
    std::size_t begin = 0;
    std::size_t end = 0;
};

inline const char* describe(Tok t)
{
    switch (t) {
    case Tok::ident: return "identifier";
    case Tok::number: return "number";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::comma: return "','";
    case Tok::colon: return "':'";
    case Tok::end: return "end of input";
    case Tok::invalid: return "invalid character";
    }
    return "token";
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) { advance(); }

    ParseResult run()
    {
        Ast root;
        if (!parse_call(root, 0))
            return std::move(error_);
        if (tok_.kind != Tok::end) {
            fail("unexpected " + std::string(describe(tok_.kind)) + " after expression", {"end of input"});
            return std::move(error_);
        }
        return root;
    }

private:
    static bool ident_start(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }
    static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
    static bool digit(char c) { return c >= '0' && c <= '9'; }

    void advance()
    {
        std::size_t i = tok_.end;
        while (i < src_.size() && (src_[i] == ' ' || src_[i] == '\t' || src_[i] == '\n' || src_[i] == '\r'))
            ++i;
        tok_.begin = i;
        if (i >= src_.size()) {
            tok_ = {Tok::end, i, i};
            return;
        }
        const char c = src_[i];
        auto single = [&](Tok k) { tok_ = {k, i, i + 1}; };
        if (c == '(') return single(Tok::lparen);
        if (c == ')') return single(Tok::rparen);
        if (c == ',') return single(Tok::comma);
        if (c == ':') return single(Tok::colon);
        if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < src_.size() && ident_char(src_[j]))
                ++j;
            tok_ = {Tok::ident, i, j};
            return;
        }
        if (digit(c) || (c == '-' && i + 1 < src_.size() && digit(src_[i + 1]))) {
            std::size_t j = i + (c == '-' ? 1 : 0);
            while (j < src_.size() && digit(src_[j]))
                ++j;
            if (j + 1 < src_.size() && src_[j] == '.' && digit(src_[j + 1])) {
                j += 1;
                while (j < src_.size() && digit(src_[j]))
                    ++j;
            }
            if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src_.size() && (src_[k] == '+' || src_[k] == '-'))
                    ++k;
                if (k < src_.size() && digit(src_[k])) {
                    while (k < src_.size() && digit(src_[k]))
                        ++k;
                    j = k;
                }
            }
            tok_ = {Tok::number, i, j};
            return;
        }
        single(Tok::invalid);
    }

    std::string_view text() const { return src_.substr(tok_.begin, tok_.end - tok_.begin); }

    bool fail(std::string message, std::vector<std::string> expected)
    {
        error_ = ParseError{std::move(message), tok_.begin, std::move(expected)};
        return false;
    }

    bool expect_fail(const char* what, std::vector<std::string> expected)
    {
        return fail(std::string("expected ") + what + ", found " + describe(tok_.kind), std::move(expected));
    }

    bool parse_number(Ast& out)
    {
        const std::string_view t = text();
        std::string owned(t);
        double v = 0.0;
        // from_chars rejects a leading '+', but accepts '-', which matches the lexer.
        const auto res = std::from_chars(owned.data(), owned.data() + owned.size(), v);
        if (res.ec != std::errc{} || res.ptr != owned.data() + owned.size() || !std::isfinite(v))
            return fail("number '" + owned + "' is out of range", {"finite number"});
        out.kind = Ast::Kind::number;
        out.text = std::move(owned);
        out.number = v;
        out.span = {tok_.begin, tok_.end};
        advance();
        return true;
    }

    bool parse_call(Ast& out, std::size_t depth)
    {
        if (depth >= kMaxNesting)
            return fail("expression nested deeper than " + std::to_string(kMaxNesting) + " levels", {});
        if (tok_.kind != Tok::ident)
            return expect_fail("identifier", {"identifier"});
        out.kind = Ast::Kind::call;
        out.text = std::string(text());
        out.span.begin = tok_.begin;
        advance();
        if (tok_.kind != Tok::lparen)
            return expect_fail("'('", {"'('"});
        advance();
        if (tok_.kind != Tok::rparen) {
            while (true) {
                Ast arg;
                if (!parse_arg(arg, depth))
                    return false;
                out.children.push_back(std::move(arg));
                if (tok_.kind == Tok::comma) {
                    advance();
                    continue;
                }
                if (tok_.kind == Tok::rparen)
                    break;
                return expect_fail("',' or ')'", {"','", "')'"});
            }
        }
        out.span.end = tok_.end;
        advance();
        return true;
    }

    bool parse_arg(Ast& out, std::size_t depth)
    {
        if (tok_.kind == Tok::number) {
            Ast num;
            if (!parse_number(num))
                return false;
            if (tok_.kind != Tok::colon) {
                out = std::move(num);
                return true;
            }
            advance();
            if (tok_.kind != Tok::number)
                return expect_fail("number after ':'", {"number"});
            Ast rhs;
            if (!parse_number(rhs))
                return false;
            out.kind = Ast::Kind::pair;
            out.span = {num.span.begin, rhs.span.end};
            out.children.push_back(std::move(num));
            out.children.push_back(std::move(rhs));
            return true;
        }
        if (tok_.kind == Tok::ident) {
            const Token ident = tok_;
            const std::string name(text());
            advance();
            if (tok_.kind == Tok::lparen) {
                // Rewind one token: parse_call expects to start at the identifier.
                tok_ = ident;
                return parse_call(out, depth + 1);
            }
            out.kind = Ast::Kind::identifier;
            out.text = name;
            out.span = {ident.begin, ident.end};
            return true;
        }
        return expect_fail("argument", {"number", "identifier", "pair", "call"});
    }

    std::string_view src_;
    Token tok_;
    ParseError error_;
};

} // namespace detail

/// Parses DSL text. Never throws on malformed input; failures come back as ParseError.
inline ParseResult parse(std::string_view text)
{
    return detail::Parser(text).run();
}

/// Canonical text; parse(unparse(a)) is structurally equal to a.
inline std::string unparse(const Ast& a)
{
    switch (a.kind) {
    case Ast::Kind::number:
    case Ast::Kind::identifier:
        return a.text;
    case Ast::Kind::pair:
        return unparse(a.children.at(0)) + ":" + unparse(a.children.at(1));
    case Ast::Kind::call: {
        std::string s = a.text + "(";
        for (std::size_t i = 0; i < a.children.size(); ++i)
            s += (i ? ", " : "") + unparse(a.children[i]);
        return s + ")";
    }
    }
    return {};
}

/// Indented tree rendering for the CLI.
inline std::string pretty(const Ast& a, int indent = 0)
{
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string where = " @" + std::to_string(a.span.begin) + ".." + std::to_string(a.span.end);
    switch (a.kind) {
    case Ast::Kind::number:
        return pad + "number " + a.text + where + "\n";
    case Ast::Kind::identifier:
        return pad + "ident " + a.text + where + "\n";
    case Ast::Kind::pair:
        return pad + "pair " + unparse(a) + where + "\n";
    case Ast::Kind::call: {
        std::string s = pad + "call " + a.text + where + "\n";
        for (const auto& c : a.children)
            s += pretty(c, indent + 1);
        return s;
    }
    }
    return {};
}

using Value = std::variant<Sequence, LacunaryPartition, Modulus>;

namespace detail {

inline const std::vector<std::string>& known_names()
{
    static const std::vector<std::string> names{
        "gcdclass", "perturbed", "blockspike", "explicit", "constant", "harmonic", "linear",
        "geometric", "points",   "refine",     "identity", "power",    "bounded",  "sum",
        "compose",  "iterate"};
    return names;
}

class Lowerer {
public:
    Value lower(const Ast& a) const
    {
        if (a.kind != Ast::Kind::call)
            throw LowerError("expected a constructor call", a.span);
        const std::string& f = a.text;
        if (f == "gcdclass" || f == "perturbed" || f == "blockspike" || f == "explicit" || f == "constant" ||
            f == "harmonic" || f == "linear")
            return sequence(a);
        if (f == "geometric" || f == "points" || f == "refine")
            return partition(a);
        if (f == "identity" || f == "power" || f == "bounded" || f == "sum" || f == "compose" || f == "iterate")
            return modulus(a);
        std::string known;
        for (const auto& n : known_names())
            known += (known.empty() ? "" : ", ") + n;
        throw LowerError("unknown family '" + f + "'; known: " + known, a.span);
    }

    Sequence sequence(const Ast& a) const
    {
        const std::string& f = a.text;
        try {
            if (f == "gcdclass") {
                need_at_least(a, 1);
                return sequences::gcd_class(table(a, integer(a.children[0]), 1));
            }
            if (f == "perturbed") {
                need_at_least(a, 2);
                return sequences::perturbed_gcd_class(table(a, integer(a.children[0]), 2), real(a.children[1]));
            }
            if (f == "blockspike")
                return block_spike(a);
            if (f == "explicit") {
                if (a.children.empty() || a.children.size() > 2)
                    throw LowerError("explicit expects (prefix(...)[, tail])", a.span);
                const Ast& pre = a.children[0];
                if (pre.kind != Ast::Kind::call || pre.text != "prefix")
                    throw LowerError("explicit: first argument must be prefix(v1, v2, ...)", pre.span);
                std::vector<double> values;
                for (const auto& c : pre.children)
                    values.push_back(real(c));
                const double tail = a.children.size() == 2 ? real(a.children[1]) : 0.0;
                return sequences::explicit_list(std::move(values), tail);
            }
            if (f == "constant") {
                need(a, 1);
                return sequences::constant(real(a.children[0]));
            }
            if (f == "harmonic") {
                need(a, 1);
                return sequences::harmonic_like(real(a.children[0]));
            }
            if (f == "linear") {
                need(a, 1);
                return sequences::linear(real(a.children[0]));
            }
        } catch (const InvalidArgument& e) {
            throw LowerError(e.what(), a.span);
        }
        throw LowerError("'" + f + "' does not name a sequence", a.span);
    }

    LacunaryPartition partition(const Ast& a) const
    {
        return refinement_or_partition(a, nullptr);
    }

    RefinementMap refinement(const Ast& a) const
    {
        if (a.kind != Ast::Kind::call || a.text != "refine")
            throw LowerError("expected refine(theta, points...)", a.span);
        RefinementMap map{LacunaryPartition::from_points({1}), LacunaryPartition::from_points({1}), {}};
        refinement_or_partition(a, &map);
        return map;
    }

    Modulus modulus(const Ast& a) const
    {
        if (a.kind != Ast::Kind::call)
            throw LowerError("expected a modulus constructor", a.span);
        const std::string& f = a.text;
        try {
            if (f == "identity") {
                need(a, 0);
                return Modulus::identity();
            }
            if (f == "power") {
                need(a, 1);
                return Modulus::power(real(a.children[0]));
            }
            if (f == "bounded") {
                need(a, 0);
                return Modulus::bounded();
            }
            if (f == "sum") {
                need(a, 2);
                return Modulus::sum(modulus(a.children[0]), modulus(a.children[1]));
            }
            if (f == "compose") {
                need(a, 2);
                return Modulus::compose(modulus(a.children[0]), modulus(a.children[1]));
            }
            if (f == "iterate") {
                need(a, 2);
                return Modulus::iterate(modulus(a.children[0]), integer(a.children[1]));
            }
        } catch (const InvalidArgument& e) {
            throw LowerError(e.what(), a.span);
        }
        throw LowerError("'" + f + "' does not name a modulus", a.span);
    }

private:
    static void need(const Ast& a, std::size_t n)
    {
        if (a.children.size() != n)
            throw LowerError(a.text + " expects " + std::to_string(n) + " argument(s), got " +
                                 std::to_string(a.children.size()),
                             a.span);
    }

    static void need_at_least(const Ast& a, std::size_t n)
    {
        if (a.children.size() < n)
            throw LowerError(a.text + " expects at least " + std::to_string(n) + " argument(s)", a.span);
    }

    static double real(const Ast& a)
    {
        if (a.kind != Ast::Kind::number)
            throw LowerError("expected a number", a.span);
        return a.number;
    }

    static std::int64_t integer(const Ast& a)
    {
        const double v = real(a);
        if (v != std::floor(v) || std::fabs(v) > 9.0e15)
            throw LowerError("expected an integer, got " + a.text, a.span);
        return static_cast<std::int64_t>(v);
    }

    static DivisorTable table(const Ast& call, std::int64_t n0, std::size_t first)
    {
        std::map<std::int64_t, double> values;
        for (std::size_t i = first; i < call.children.size(); ++i) {
            const Ast& p = call.children[i];
            if (p.kind != Ast::Kind::pair)
                throw LowerError("expected divisor:value pair", p.span);
            const std::int64_t d = integer(p.children[0]);
            if (!values.emplace(d, real(p.children[1])).second)
                throw LowerError("divisor " + std::to_string(d) + " listed twice", p.span);
        }
        try {
            return DivisorTable(n0, std::move(values));
        } catch (const InvalidArgument& e) {
            throw LowerError(e.what(), call.span);
        }
    }

    Sequence block_spike(const Ast& a) const
    {
        if (a.children.size() < 3 || a.children.size() > 4)
            throw LowerError("blockspike expects (theta, H, s[, start|end])", a.span);
        const LacunaryPartition theta = partition(a.children[0]);
        SpikePlacement placement = SpikePlacement::block_end;
        if (a.children.size() == 4) {
            const Ast& p = a.children[3];
            if (p.kind == Ast::Kind::identifier && p.text == "start")
                placement = SpikePlacement::block_start;
            else if (!(p.kind == Ast::Kind::identifier && p.text == "end"))
                throw LowerError("blockspike placement must be 'start' or 'end'", p.span);
        }
        const Ast& h = a.children[1];
        const Ast& s = a.children[2];
        const bool per_block = h.kind == Ast::Kind::call || s.kind == Ast::Kind::call;
        if (!per_block)
            return sequences::block_spike(theta, real(h), integer(s), placement);

        const std::size_t blocks = theta.num_blocks();
        auto list = [&](const Ast& node, auto convert) {
            using T = decltype(convert(node));
            if (node.kind != Ast::Kind::call)
                return std::vector<T>(blocks, convert(node));
            if (node.text != "each" || node.children.size() != blocks)
                throw LowerError("expected each(...) with one entry per block (" + std::to_string(blocks) + ")",
                                 node.span);
            std::vector<T> out;
            for (const auto& c : node.children)
                out.push_back(convert(c));
            return out;
        };
        auto heights = list(h, [](const Ast& n) { return real(n); });
        auto counts = list(s, [](const Ast& n) { return integer(n); });
        return sequences::block_spike(theta, std::move(heights), std::move(counts), placement);
    }

    LacunaryPartition refinement_or_partition(const Ast& a, RefinementMap* map) const
    {
        if (a.kind != Ast::Kind::call)
            throw LowerError("expected a partition constructor", a.span);
        const std::string& f = a.text;
        try {
            if (f == "geometric") {
                need(a, 3);
                return LacunaryPartition::geometric(integer(a.children[0]), real(a.children[1]),
                                                    integer(a.children[2]));
            }
            if (f == "points") {
                std::vector<std::int64_t> pts;
                for (const auto& c : a.children)
                    pts.push_back(integer(c));
                return LacunaryPartition::from_points(std::move(pts));
            }
            if (f == "refine") {
                need_at_least(a, 1);
                const LacunaryPartition parent = partition(a.children[0]);
                std::vector<std::int64_t> extra;
                for (std::size_t i = 1; i < a.children.size(); ++i)
                    extra.push_back(integer(a.children[i]));
                RefinementMap m = lacuna::refine(parent, std::move(extra));
                LacunaryPartition child = m.child;
                if (map)
                    *map = std::move(m);
                return child;
            }
        } catch (const InvalidArgument& e) {
            throw LowerError(e.what(), a.span);
        }
        throw LowerError("'" + f + "' does not name a lacunary partition", a.span);
    }
};

inline Ast parse_or_throw(std::string_view text)
{
    auto res = parse(text);
    if (!res)
        throw LowerError("parse error: " + res.error().message, Span{res.error().position, res.error().position});
    return res.ast();
}

} // namespace detail

/// Dispatches on the root identifier.
inline Value lower(const Ast& ast)
{
    return detail::Lowerer{}.lower(ast);
}

inline Sequence lower_sequence(const Ast& ast) { return detail::Lowerer{}.sequence(ast); }
inline LacunaryPartition lower_partition(const Ast& ast) { return detail::Lowerer{}.partition(ast); }
inline Modulus lower_modulus(const Ast& ast) { return detail::Lowerer{}.modulus(ast); }
inline RefinementMap lower_refinement(const Ast& ast) { return detail::Lowerer{}.refinement(ast); }

// Text conveniences; parse failures surface as LowerError.
inline Sequence sequence(std::string_view text) { return lower_sequence(detail::parse_or_throw(text)); }
inline LacunaryPartition partition(std::string_view text) { return lower_partition(detail::parse_or_throw(text)); }
inline Modulus modulus(std::string_view text) { return lower_modulus(detail::parse_or_throw(text)); }

} // namespace lacuna::dsl
