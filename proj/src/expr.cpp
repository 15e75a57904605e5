#include "tubekit/expr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "tubekit/errors.hpp"

namespace tubekit {

Rational Rational::make(std::int64_t num, std::int64_t den) {
    if (den == 0) throw ParseError("rational exponent with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    return Rational{num, den};
}

struct ScalarExpr::Node {
    ExprKind kind = ExprKind::Constant;
    double value = 0.0;
    std::size_t index = 0;
    Rational exponent{};
    std::vector<ScalarExpr> children;
    std::size_t arity = 0;
    std::size_t count = 1;
};

ScalarExpr ScalarExpr::make_node(ExprKind kind, std::vector<ScalarExpr> children, double value,
                                 std::size_t index, Rational exponent) {
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->value = value;
    node->index = index;
    node->exponent = exponent;
    node->arity = kind == ExprKind::Coordinate ? index + 1 : 0;
    for (const auto& c : children) {
        node->arity = std::max(node->arity, c.arity());
        node->count += c.node_count();
    }
    node->children = std::move(children);
    return ScalarExpr(std::move(node));
}

ScalarExpr::ScalarExpr() : ScalarExpr(constant(0.0)) {}

ScalarExpr ScalarExpr::constant(double value) {
    return make_node(ExprKind::Constant, {}, value, 0, {});
}

ScalarExpr ScalarExpr::coordinate(std::size_t index) {
    return make_node(ExprKind::Coordinate, {}, 0.0, index, {});
}

ScalarExpr ScalarExpr::raw_sum(std::vector<ScalarExpr> terms) {
    if (terms.size() < 2) throw ParseError("sum needs at least two terms");
    return make_node(ExprKind::Sum, std::move(terms), 0.0, 0, {});
}

ScalarExpr ScalarExpr::raw_product(std::vector<ScalarExpr> factors) {
    if (factors.size() < 2) throw ParseError("product needs at least two factors");
    return make_node(ExprKind::Product, std::move(factors), 0.0, 0, {});
}

ScalarExpr ScalarExpr::raw_quotient(ScalarExpr num, ScalarExpr den) {
    return make_node(ExprKind::Quotient, {std::move(num), std::move(den)}, 0.0, 0, {});
}

ScalarExpr ScalarExpr::raw_power(ScalarExpr base, Rational exponent) {
    return make_node(ExprKind::Power, {std::move(base)}, 0.0, 0, exponent);
}

ScalarExpr ScalarExpr::raw_unary(ExprKind kind, ScalarExpr arg) {
    switch (kind) {
        case ExprKind::Sin:
        case ExprKind::Cos:
        case ExprKind::Exp:
        case ExprKind::Log:
        case ExprKind::Sqrt:
        case ExprKind::Negation:
            return make_node(kind, {std::move(arg)}, 0.0, 0, {});
        default:
            throw ParseError("not a unary node kind");
    }
}

ExprKind ScalarExpr::kind() const { return node_->kind; }
double ScalarExpr::value() const { return node_->value; }
std::size_t ScalarExpr::index() const { return node_->index; }
Rational ScalarExpr::exponent() const { return node_->exponent; }
std::span<const ScalarExpr> ScalarExpr::children() const { return node_->children; }
std::size_t ScalarExpr::arity() const { return node_->arity; }
std::size_t ScalarExpr::node_count() const { return node_->count; }

namespace {

double checked(double v, const char* what) {
    if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
    return v;
}

double eval_power(double base, Rational r) {
    if (base == 0.0 && r.num < 0) throw DomainError("zero raised to a negative power");
    if (r.is_integer()) return checked(std::pow(base, static_cast<double>(r.num)), "power");
    if (base < 0.0) {
        if (r.den % 2 == 0) throw DomainError("even root of a negative value");
        const double mag = std::pow(-base, r.to_double());
        return checked((r.num % 2 != 0) ? -mag : mag, "power");
    }
    return checked(std::pow(base, r.to_double()), "power");
}

double eval_node(const ScalarExpr& e, std::span<const double> p) {
    const auto kids = e.children();
    switch (e.kind()) {
        case ExprKind::Constant:
            return e.value();
        case ExprKind::Coordinate:
            return p[e.index()];
        case ExprKind::Sum: {
            double acc = eval_node(kids[0], p);
            for (std::size_t i = 1; i < kids.size(); ++i) acc += eval_node(kids[i], p);
            return checked(acc, "sum");
        }
        case ExprKind::Product: {
            double acc = eval_node(kids[0], p);
            for (std::size_t i = 1; i < kids.size(); ++i) acc *= eval_node(kids[i], p);
            return checked(acc, "product");
        }
        case ExprKind::Quotient: {
            const double num = eval_node(kids[0], p);
            const double den = eval_node(kids[1], p);
            if (den == 0.0) throw DomainError("division by zero");
            return checked(num / den, "quotient");
        }
        case ExprKind::Power:
            return eval_power(eval_node(kids[0], p), e.exponent());
        case ExprKind::Sin:
            return std::sin(eval_node(kids[0], p));
        case ExprKind::Cos:
            return std::cos(eval_node(kids[0], p));
        case ExprKind::Exp:
            return checked(std::exp(eval_node(kids[0], p)), "exp");
        case ExprKind::Log: {
            const double a = eval_node(kids[0], p);
            if (!(a > 0.0)) throw DomainError("log of a non-positive value");
            return std::log(a);
        }
        case ExprKind::Sqrt: {
            const double a = eval_node(kids[0], p);
            if (a < 0.0) throw DomainError("sqrt of a negative value");
            return std::sqrt(a);
        }
        case ExprKind::Negation:
            return -eval_node(kids[0], p);
    }
    return 0.0;
}

}  // namespace

double ScalarExpr::evaluate(std::span<const double> p) const {
    if (p.size() < arity()) {
        throw ArityError("expression needs " + std::to_string(arity()) + " coordinates, got " +
                         std::to_string(p.size()));
    }
    return eval_node(*this, p);
}

// ---------------------------------------------------------------------------
// Simplifying constructors

ScalarExpr sum(std::vector<ScalarExpr> terms) {
    std::vector<ScalarExpr> kept;
    kept.reserve(terms.size());
    bool all_const = true;
    for (auto& t : terms) {
        if (t.is_zero()) continue;
        all_const = all_const && t.is_constant();
        kept.push_back(std::move(t));
    }
    if (kept.empty()) return ScalarExpr::constant(0.0);
    if (kept.size() == 1) return kept.front();
    if (all_const) {
        double acc = kept[0].value();
        for (std::size_t i = 1; i < kept.size(); ++i) acc += kept[i].value();
        return ScalarExpr::constant(acc);
    }
    return ScalarExpr::raw_sum(std::move(kept));
}

ScalarExpr product(std::vector<ScalarExpr> factors) {
    std::vector<ScalarExpr> kept;
    kept.reserve(factors.size());
    bool negate = false;
    bool all_const = true;
    for (auto& f : factors) {
        if (f.is_zero()) return ScalarExpr::constant(0.0);
        if (f.is_one()) continue;
        if (f.is_constant(-1.0)) {
            negate = !negate;
            continue;
        }
        if (f.kind() == ExprKind::Negation) {
            negate = !negate;
            f = f.children()[0];
        }
        all_const = all_const && f.is_constant();
        kept.push_back(std::move(f));
    }
    ScalarExpr out;
    if (kept.empty()) {
        out = ScalarExpr::constant(1.0);
    } else if (kept.size() == 1) {
        out = kept.front();
    } else if (all_const) {
        double acc = kept[0].value();
        for (std::size_t i = 1; i < kept.size(); ++i) acc *= kept[i].value();
        out = ScalarExpr::constant(acc);
    } else {
        out = ScalarExpr::raw_product(std::move(kept));
    }
    return negate ? -out : out;
}

ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) { return sum({a, b}); }
ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) { return sum({a, -b}); }
ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) { return product({a, b}); }
ScalarExpr operator+(const ScalarExpr& a, double b) { return a + ScalarExpr::constant(b); }
ScalarExpr operator*(double a, const ScalarExpr& b) { return ScalarExpr::constant(a) * b; }

ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) {
    if (a.is_zero()) return a;
    if (b.is_one()) return a;
    if (b.is_constant(-1.0)) return -a;
    if (a.is_constant() && b.is_constant() && b.value() != 0.0) {
        return ScalarExpr::constant(a.value() / b.value());
    }
    return ScalarExpr::raw_quotient(a, b);
}

ScalarExpr operator-(const ScalarExpr& a) {
    if (a.kind() == ExprKind::Negation) return a.children()[0];
    if (a.is_constant()) return ScalarExpr::constant(-a.value());
    return ScalarExpr::raw_unary(ExprKind::Negation, a);
}

ScalarExpr pow(const ScalarExpr& base, Rational exponent) {
    if (exponent.num == 0) return ScalarExpr::constant(1.0);
    if (exponent.num == 1 && exponent.den == 1) return base;
    if (base.is_constant()) {
        try {
            return ScalarExpr::constant(eval_power(base.value(), exponent));
        } catch (const DomainError&) {
        }
    }
    return ScalarExpr::raw_power(base, exponent);
}

namespace {

ScalarExpr fold_unary(ExprKind kind, const ScalarExpr& a) {
    if (a.is_constant()) {
        try {
            const double p = 0.0;
            const double v = ScalarExpr::raw_unary(kind, a).evaluate(std::span<const double>(&p, 0));
            return ScalarExpr::constant(v);
        } catch (const DomainError&) {
        }
    }
    return ScalarExpr::raw_unary(kind, a);
}

}  // namespace

ScalarExpr sin(const ScalarExpr& a) { return fold_unary(ExprKind::Sin, a); }
ScalarExpr cos(const ScalarExpr& a) { return fold_unary(ExprKind::Cos, a); }
ScalarExpr exp(const ScalarExpr& a) { return fold_unary(ExprKind::Exp, a); }
ScalarExpr log(const ScalarExpr& a) { return fold_unary(ExprKind::Log, a); }
ScalarExpr sqrt(const ScalarExpr& a) { return fold_unary(ExprKind::Sqrt, a); }

// ---------------------------------------------------------------------------
// Tree transforms. Each keeps a per-call memo keyed by node identity so that
// shared subtrees are visited once.

namespace {

struct NodeKey {
    const void* ptr;
    bool operator==(const NodeKey&) const = default;
};
struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const { return std::hash<const void*>{}(k.ptr); }
};

class Transformer {
public:
    virtual ~Transformer() = default;
    ScalarExpr run(const ScalarExpr& e) {
        // Leaves are cheap; only memoize interior nodes.
        if (e.children().empty()) return leaf(e);
        const NodeKey key{e.children().data()};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        ScalarExpr out = interior(e);
        memo_.emplace(key, out);
        return out;
    }

protected:
    virtual ScalarExpr leaf(const ScalarExpr& e) = 0;
    virtual ScalarExpr interior(const ScalarExpr& e) = 0;

private:
    std::unordered_map<NodeKey, ScalarExpr, NodeKeyHash> memo_;
};

ScalarExpr rebuild(const ScalarExpr& e, std::vector<ScalarExpr> kids) {
    switch (e.kind()) {
        case ExprKind::Sum:
            return sum(std::move(kids));
        case ExprKind::Product:
            return product(std::move(kids));
        case ExprKind::Quotient:
            return kids[0] / kids[1];
        case ExprKind::Power:
            return pow(kids[0], e.exponent());
        case ExprKind::Sin:
            return sin(kids[0]);
        case ExprKind::Cos:
            return cos(kids[0]);
        case ExprKind::Exp:
            return exp(kids[0]);
        case ExprKind::Log:
            return log(kids[0]);
        case ExprKind::Sqrt:
            return sqrt(kids[0]);
        case ExprKind::Negation:
            return -kids[0];
        default:
            return e;
    }
}

class Simplifier final : public Transformer {
protected:
    ScalarExpr leaf(const ScalarExpr& e) override { return e; }
    ScalarExpr interior(const ScalarExpr& e) override {
        std::vector<ScalarExpr> kids;
        kids.reserve(e.children().size());
        for (const auto& c : e.children()) kids.push_back(run(c));
        return rebuild(e, std::move(kids));
    }
};

class Substituter final : public Transformer {
public:
    explicit Substituter(std::span<const std::optional<ScalarExpr>> repl) : repl_(repl) {}

protected:
    ScalarExpr leaf(const ScalarExpr& e) override {
        if (e.kind() == ExprKind::Coordinate && e.index() < repl_.size() && repl_[e.index()]) {
            return *repl_[e.index()];
        }
        return e;
    }
    ScalarExpr interior(const ScalarExpr& e) override {
        std::vector<ScalarExpr> kids;
        kids.reserve(e.children().size());
        for (const auto& c : e.children()) kids.push_back(run(c));
        return rebuild(e, std::move(kids));
    }

private:
    std::span<const std::optional<ScalarExpr>> repl_;
};

class Differentiator final : public Transformer {
public:
    explicit Differentiator(std::size_t coord) : coord_(coord) {}

protected:
    ScalarExpr leaf(const ScalarExpr& e) override {
        if (e.kind() == ExprKind::Coordinate && e.index() == coord_) return ScalarExpr::constant(1.0);
        return ScalarExpr::constant(0.0);
    }

    ScalarExpr interior(const ScalarExpr& e) override {
        if (e.arity() <= coord_ || !depends_on(e, coord_)) return ScalarExpr::constant(0.0);
        const auto kids = e.children();
        switch (e.kind()) {
            case ExprKind::Sum: {
                std::vector<ScalarExpr> terms;
                for (const auto& k : kids) terms.push_back(run(k));
                return sum(std::move(terms));
            }
            case ExprKind::Product: {
                std::vector<ScalarExpr> terms;
                for (std::size_t i = 0; i < kids.size(); ++i) {
                    ScalarExpr d = run(kids[i]);
                    if (d.is_zero()) continue;
                    std::vector<ScalarExpr> factors(kids.begin(), kids.end());
                    factors[i] = d;
                    terms.push_back(product(std::move(factors)));
                }
                return sum(std::move(terms));
            }
            case ExprKind::Quotient: {
                const ScalarExpr& u = kids[0];
                const ScalarExpr& w = kids[1];
                const ScalarExpr du = run(u);
                const ScalarExpr dw = run(w);
                if (dw.is_zero()) return du / w;
                return (du * w - u * dw) / pow(w, Rational{2, 1});
            }
            case ExprKind::Power: {
                const Rational r = e.exponent();
                const Rational rm1 = Rational::make(r.num - r.den, r.den);
                return product({ScalarExpr::constant(r.to_double()), pow(kids[0], rm1), run(kids[0])});
            }
            case ExprKind::Sin:
                return cos(kids[0]) * run(kids[0]);
            case ExprKind::Cos:
                return -(sin(kids[0]) * run(kids[0]));
            case ExprKind::Exp:
                return e * run(kids[0]);
            case ExprKind::Log:
                return run(kids[0]) / kids[0];
            case ExprKind::Sqrt:
                return run(kids[0]) / (ScalarExpr::constant(2.0) * e);
            case ExprKind::Negation:
                return -run(kids[0]);
            default:
                return ScalarExpr::constant(0.0);
        }
    }

private:
    std::size_t coord_;
};

}  // namespace

ScalarExpr differentiate(const ScalarExpr& e, std::size_t coordinate) {
    return Differentiator(coordinate).run(e);
}

ScalarExpr simplify(const ScalarExpr& e) { return Simplifier().run(e); }

ScalarExpr substitute(const ScalarExpr& e, std::span<const std::optional<ScalarExpr>> replacement) {
    return Substituter(replacement).run(e);
}

bool depends_on(const ScalarExpr& e, std::size_t coordinate) {
    if (e.arity() <= coordinate) return false;
    if (e.kind() == ExprKind::Coordinate) return e.index() == coordinate;
    for (const auto& c : e.children()) {
        if (depends_on(c, coordinate)) return true;
    }
    return false;
}

bool structurally_equal(const ScalarExpr& a, const ScalarExpr& b) {
    if (a.same_node(b)) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case ExprKind::Constant:
            return std::bit_cast<std::uint64_t>(a.value()) == std::bit_cast<std::uint64_t>(b.value());
        case ExprKind::Coordinate:
            return a.index() == b.index();
        case ExprKind::Power:
            if (!(a.exponent() == b.exponent())) return false;
            break;
        default:
            break;
    }
    const auto ka = a.children();
    const auto kb = b.children();
    if (ka.size() != kb.size()) return false;
    for (std::size_t i = 0; i < ka.size(); ++i) {
        if (!structurally_equal(ka[i], kb[i])) return false;
    }
    return true;
}

}  // namespace tubekit
