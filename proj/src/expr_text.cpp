#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>

#include "tubekit/errors.hpp"
#include "tubekit/expr.hpp"

namespace tubekit {

namespace {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool is_atomic(const ScalarExpr& e) {
    switch (e.kind()) {
        case ExprKind::Coordinate:
        case ExprKind::Sin:
        case ExprKind::Cos:
        case ExprKind::Exp:
        case ExprKind::Log:
        case ExprKind::Sqrt:
            return true;
        case ExprKind::Constant:
            return !std::signbit(e.value());
        default:
            return false;
    }
}

void print(const ScalarExpr& e, std::string& out);

void print_paren(const ScalarExpr& e, std::string& out) {
    out += '(';
    print(e, out);
    out += ')';
}

const char* function_name(ExprKind k) {
    switch (k) {
        case ExprKind::Sin: return "sin";
        case ExprKind::Cos: return "cos";
        case ExprKind::Exp: return "exp";
        case ExprKind::Log: return "log";
        case ExprKind::Sqrt: return "sqrt";
        default: return "";
    }
}

// Printing rules mirror the parser: a term chain "a*b/c" is left-associative,
// so any child that would merge into the surrounding chain is parenthesized.
void print(const ScalarExpr& e, std::string& out) {
    const auto kids = e.children();
    switch (e.kind()) {
        case ExprKind::Constant:
            out += format_double(e.value());
            return;
        case ExprKind::Coordinate:
            out += 'x';
            out += std::to_string(e.index() + 1);
            return;
        case ExprKind::Sum:
            for (std::size_t i = 0; i < kids.size(); ++i) {
                const auto& k = kids[i];
                if (i == 0) {
                    if (k.kind() == ExprKind::Sum) print_paren(k, out);
                    else print(k, out);
                    continue;
                }
                if (k.kind() == ExprKind::Negation) {
                    out += " - ";
                    const auto& inner = k.children()[0];
                    if (inner.kind() == ExprKind::Sum || inner.kind() == ExprKind::Negation ||
                        (inner.is_constant() && std::signbit(inner.value()))) {
                        print_paren(inner, out);
                    } else {
                        print(inner, out);
                    }
                } else {
                    out += " + ";
                    if (k.kind() == ExprKind::Sum) print_paren(k, out);
                    else print(k, out);
                }
            }
            return;
        case ExprKind::Product:
            for (std::size_t i = 0; i < kids.size(); ++i) {
                const auto& k = kids[i];
                if (i > 0) out += '*';
                const bool chain = k.kind() == ExprKind::Sum || k.kind() == ExprKind::Product ||
                                   (i > 0 && k.kind() == ExprKind::Quotient);
                if (chain) print_paren(k, out);
                else print(k, out);
            }
            return;
        case ExprKind::Quotient:
            if (kids[0].kind() == ExprKind::Sum) print_paren(kids[0], out);
            else print(kids[0], out);
            out += '/';
            if (is_atomic(kids[1]) || kids[1].kind() == ExprKind::Power) print(kids[1], out);
            else print_paren(kids[1], out);
            return;
        case ExprKind::Power: {
            if (is_atomic(kids[0])) print(kids[0], out);
            else print_paren(kids[0], out);
            const Rational r = e.exponent();
            out += '^';
            if (r.den == 1 && r.num >= 0) {
                out += std::to_string(r.num);
            } else {
                out += '(';
                out += std::to_string(r.num);
                if (r.den != 1) {
                    out += '/';
                    out += std::to_string(r.den);
                }
                out += ')';
            }
            return;
        }
        case ExprKind::Negation: {
            out += '-';
            const auto& k = kids[0];
            if (is_atomic(k) || k.kind() == ExprKind::Power) {
                // "-3" would read back as a negative constant.
                if (k.is_constant()) print_paren(k, out);
                else print(k, out);
            } else {
                print_paren(k, out);
            }
            return;
        }
        default:
            out += function_name(e.kind());
            print_paren(kids[0], out);
            return;
    }
}

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    ScalarExpr parse() {
        ScalarExpr e = parse_sum();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    bool peek_digit() {
        skip_ws();
        return pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.');
    }

    ScalarExpr parse_sum() {
        std::vector<ScalarExpr> terms;
        terms.push_back(parse_term());
        for (;;) {
            if (accept('+')) {
                terms.push_back(parse_term());
            } else if (accept('-')) {
                terms.push_back(ScalarExpr::raw_unary(ExprKind::Negation, parse_term()));
            } else {
                break;
            }
        }
        if (terms.size() == 1) return terms.front();
        return ScalarExpr::raw_sum(std::move(terms));
    }

    ScalarExpr parse_term() {
        ScalarExpr cur = parse_unary();
        std::vector<ScalarExpr> chain;  // open product in this term
        auto close_chain = [&] {
            if (!chain.empty()) {
                chain.insert(chain.begin(), cur);
                cur = ScalarExpr::raw_product(std::move(chain));
                chain.clear();
            }
        };
        for (;;) {
            if (accept('*')) {
                chain.push_back(parse_unary());
            } else if (accept('/')) {
                close_chain();
                cur = ScalarExpr::raw_quotient(cur, parse_unary());
            } else {
                break;
            }
        }
        close_chain();
        return cur;
    }

    ScalarExpr parse_unary() {
        if (accept('-')) {
            if (peek_digit()) {
                const std::size_t save = pos_;
                const double v = parse_number();
                skip_ws();
                if (pos_ < s_.size() && s_[pos_] == '^') {
                    pos_ = save;
                    return ScalarExpr::raw_unary(ExprKind::Negation, parse_power());
                }
                return ScalarExpr::constant(-v);
            }
            return ScalarExpr::raw_unary(ExprKind::Negation, parse_unary());
        }
        return parse_power();
    }

    ScalarExpr parse_power() {
        ScalarExpr base = parse_atom();
        if (accept('^')) {
            return ScalarExpr::raw_power(base, parse_exponent());
        }
        return base;
    }

    std::int64_t parse_integer() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected integer");
        std::int64_t v = 0;
        const auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
        if (res.ec != std::errc()) fail("integer out of range");
        return v;
    }

    Rational parse_exponent() {
        if (accept('(')) {
            const bool neg = accept('-');
            std::int64_t num = parse_integer();
            std::int64_t den = 1;
            if (accept('/')) den = parse_integer();
            expect(')');
            if (den == 0) fail("zero exponent denominator");
            return Rational::make(neg ? -num : num, den);
        }
        return Rational::make(parse_integer(), 1);
    }

    double parse_number() {
        skip_ws();
        const char* begin = s_.data() + pos_;
        const char* end = s_.data() + s_.size();
        double v = 0.0;
        const auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc() || res.ptr == begin) fail("bad number");
        pos_ += static_cast<std::size_t>(res.ptr - begin);
        return v;
    }

    ScalarExpr parse_atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        if (accept('(')) {
            ScalarExpr e = parse_sum();
            expect(')');
            return e;
        }
        if (peek_digit()) return ScalarExpr::constant(parse_number());
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string_view word = s_.substr(start, pos_ - start);
        if (word.empty()) fail("unexpected character");
        if (word.size() > 1 && word[0] == 'x' &&
            word.find_first_not_of("0123456789", 1) == std::string_view::npos) {
            std::size_t idx = 0;
            std::from_chars(word.data() + 1, word.data() + word.size(), idx);
            if (idx == 0) fail("coordinates are numbered from x1");
            return ScalarExpr::coordinate(idx - 1);
        }
        ExprKind kind;
        if (word == "sin") kind = ExprKind::Sin;
        else if (word == "cos") kind = ExprKind::Cos;
        else if (word == "exp") kind = ExprKind::Exp;
        else if (word == "log") kind = ExprKind::Log;
        else if (word == "sqrt") kind = ExprKind::Sqrt;
        else fail("unknown identifier '" + std::string(word) + "'");
        expect('(');
        ScalarExpr arg = parse_sum();
        expect(')');
        return ScalarExpr::raw_unary(kind, arg);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string to_string(const ScalarExpr& e) {
    std::string out;
    print(e, out);
    return out;
}

ScalarExpr parse_expr(std::string_view text) { return Parser(text).parse(); }

}  // namespace tubekit
