#pragma once

// Immutable scalar expression trees over chart coordinates.
//
// Nodes are shared and never mutated after construction, so an expression can
// be copied cheaply and evaluated from several threads at once. Coordinates are
// zero-based internally and written x1..xN in text form.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tubekit {

enum class ExprKind : std::uint8_t {
    Constant,
    Coordinate,
    Sum,
    Product,
    Quotient,
    Power,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Negation,
};

// Reduced fraction with positive denominator.
struct Rational {
    std::int64_t num = 1;
    std::int64_t den = 1;

    static Rational make(std::int64_t num, std::int64_t den);
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool is_integer() const { return den == 1; }
    friend bool operator==(const Rational&, const Rational&) = default;
};

class ScalarExpr {
public:
    ScalarExpr();  // the constant 0

    static ScalarExpr constant(double value);
    static ScalarExpr coordinate(std::size_t index);

    // Raw constructors build exactly the requested node. The parser uses them
    // so that text round-trips structurally; everything else should prefer the
    // simplifying operators below.
    static ScalarExpr raw_sum(std::vector<ScalarExpr> terms);
    static ScalarExpr raw_product(std::vector<ScalarExpr> factors);
    static ScalarExpr raw_quotient(ScalarExpr num, ScalarExpr den);
    static ScalarExpr raw_power(ScalarExpr base, Rational exponent);
    static ScalarExpr raw_unary(ExprKind kind, ScalarExpr arg);

    ExprKind kind() const;
    double value() const;          // Constant only
    std::size_t index() const;     // Coordinate only
    Rational exponent() const;     // Power only
    std::span<const ScalarExpr> children() const;

    bool is_constant() const { return kind() == ExprKind::Constant; }
    bool is_constant(double v) const { return is_constant() && value() == v; }
    bool is_zero() const { return is_constant(0.0); }
    bool is_one() const { return is_constant(1.0); }

    // Number of coordinates the expression needs: max coordinate index + 1.
    std::size_t arity() const;
    std::size_t node_count() const;

    // Throws ArityError if p is shorter than arity(), DomainError on a
    // singularity. Bit-for-bit deterministic.
    double evaluate(std::span<const double> p) const;

    bool same_node(const ScalarExpr& other) const { return node_ == other.node_; }

private:
    struct Node;
    explicit ScalarExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static ScalarExpr make_node(ExprKind kind, std::vector<ScalarExpr> children, double value,
                                std::size_t index, Rational exponent);

    std::shared_ptr<const Node> node_;
};

// Simplifying constructors. They apply only exact identities (x+0, x*1, x*0,
// --x, folding of all-constant nodes), so values never change.
ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b);
ScalarExpr operator-(const ScalarExpr& a);
ScalarExpr operator+(const ScalarExpr& a, double b);
ScalarExpr operator*(double a, const ScalarExpr& b);
ScalarExpr sum(std::vector<ScalarExpr> terms);
ScalarExpr product(std::vector<ScalarExpr> factors);
ScalarExpr pow(const ScalarExpr& base, Rational exponent);
ScalarExpr sin(const ScalarExpr& a);
ScalarExpr cos(const ScalarExpr& a);
ScalarExpr exp(const ScalarExpr& a);
ScalarExpr log(const ScalarExpr& a);
ScalarExpr sqrt(const ScalarExpr& a);

ScalarExpr differentiate(const ScalarExpr& e, std::size_t coordinate);
ScalarExpr simplify(const ScalarExpr& e);

// Replaces coordinate i by replacement[i] when present. Coordinates without a
// replacement are kept as they are.
ScalarExpr substitute(const ScalarExpr& e, std::span<const std::optional<ScalarExpr>> replacement);

bool depends_on(const ScalarExpr& e, std::size_t coordinate);
bool structurally_equal(const ScalarExpr& a, const ScalarExpr& b);

// Infix text with + - * / ^, functions sin cos exp log sqrt and coordinates
// x1..xN. to_string and parse_expr are exact inverses on trees.
std::string to_string(const ScalarExpr& e);
ScalarExpr parse_expr(std::string_view text);

}  // namespace tubekit
