#include "tubekit/bundle.hpp"

#include <algorithm>
#include <cmath>

#include "tubekit/errors.hpp"

namespace tubekit {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// Base vector field X (n×1) applied to base field Y: X^i ∂_i Y, evaluated.
Vector directional(const ExprMatrix& x, const ExprMatrix& y, const Point& p) {
    const std::size_t n = y.rows();
    Vector out = Vector::Zero(idx(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = x(i, 0).evaluate(p);
        if (xi == 0.0) continue;
        for (std::size_t k = 0; k < n; ++k) out(idx(k)) += xi * differentiate(y(k, 0), i).evaluate(p);
    }
    return out;
}

}  // namespace

Vector BundleChart::fiber(const Point& u) const {
    const std::size_t n = base_dim();
    return Eigen::Map<const Vector>(u.data() + n, idx(n));
}

BundleChart build_sasaki(const ChartManifold& base) {
    const std::size_t n = base.dim();
    const auto& gamma = base.symbolic_christoffel();

    ExprMatrix a(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<ScalarExpr> terms;
            for (std::size_t j = 0; j < n; ++j) {
                terms.push_back(gamma[christoffel_index(n, k, i, j)] * ScalarExpr::coordinate(n + j));
            }
            a(k, i) = sum(std::move(terms));
        }
    }

    const ExprMatrix& g = base.metric();
    const ExprMatrix ga = g * a;
    ExprMatrix metric(2 * n, 2 * n);
    metric.set_block(0, 0, g + a.transpose() * ga);
    metric.set_block(0, n, ga.transpose());
    metric.set_block(n, 0, ga);
    metric.set_block(n, n, g);

    std::vector<std::string> names = base.coordinate_names();
    for (const auto& c : base.coordinate_names()) names.push_back("v_" + c);
    std::vector<Interval> domain = base.domain();
    for (std::size_t i = 0; i < n; ++i) domain.push_back({-base.fiber_box, base.fiber_box});

    ChartManifold total("T" + base.name(), std::move(names), std::move(domain), std::move(metric));
    total.epsilon = base.epsilon;
    if (base.epsilon > 0.0) total.tube = TubeSpec{n, base.epsilon, std::vector<double>(n, 0.0)};
    return BundleChart{base, std::move(total), std::move(a)};
}

Matrix connection_matrix(const BundleChart& b, const Point& u) {
    return christoffel(b.base, b.foot(u)).contract_last(b.fiber(u));
}

Vector connection_map(const BundleChart& b, const Point& u, const Vector& w) {
    const Eigen::Index n = idx(b.base_dim());
    return w.tail(n) + connection_matrix(b, u) * w.head(n);
}

Vector projection(const BundleChart& b, const Vector& w) { return w.head(idx(b.base_dim())); }

Vector lift(const BundleChart& b, const Point& u, const Vector& x, LiftKind kind) {
    const Eigen::Index n = idx(b.base_dim());
    Vector out(2 * n);
    if (kind == LiftKind::Horizontal) {
        out.head(n) = x;
        out.tail(n) = -connection_matrix(b, u) * x;
    } else {
        out.head(n).setZero();
        out.tail(n) = x;
    }
    return out;
}

SasakiResiduals sasaki_residuals(const BundleChart& b, const Point& u, Rng& rng) {
    const std::size_t n = b.base_dim();
    const Matrix gh = b.total.metric_at(u);
    const Matrix g = b.base.metric_at(b.foot(u));
    SasakiResiduals r;
    for (int trial = 0; trial < 3; ++trial) {
        const Vector w1 = random_vector(rng, 2 * n), w2 = random_vector(rng, 2 * n);
        const double split = projection(b, w1).dot(g * projection(b, w2)) +
                             connection_map(b, u, w1).dot(g * connection_map(b, u, w2));
        r.reconstruction = std::max(r.reconstruction, std::abs(w1.dot(gh * w2) - split));

        const Vector x = random_vector(rng, n), y = random_vector(rng, n);
        const Vector xh = lift(b, u, x, LiftKind::Horizontal), xv = lift(b, u, x, LiftKind::Vertical);
        const Vector yv = lift(b, u, y, LiftKind::Vertical);
        r.orthogonality = std::max(r.orthogonality, std::abs(xh.dot(gh * yv)));
        const double norm = x.dot(g * x);
        r.lift_norm = std::max({r.lift_norm, std::abs(xh.dot(gh * xh) - norm), std::abs(xv.dot(gh * xv) - norm)});
    }
    r.frame = gram_residual(lift_frame(b, u).columns, gh);
    return r;
}

LiftFrame lift_frame(const BundleChart& b, const Point& u) {
    return lift_frame(b, u, orthonormal_frame(b.base, b.foot(u)).frame);
}

LiftFrame lift_frame(const BundleChart& b, const Point& u, const Matrix& base_frame) {
    const Eigen::Index n = idx(b.base_dim());
    const Matrix a = connection_matrix(b, u);
    LiftFrame f;
    f.base_frame = base_frame;
    f.columns = Matrix::Zero(2 * n, 2 * n);
    f.columns.topLeftCorner(n, n) = base_frame;
    f.columns.bottomLeftCorner(n, n) = -a * base_frame;
    f.columns.bottomRightCorner(n, n) = base_frame;
    return f;
}

BundleStructures build_bundle_acs(const BundleChart& b) {
    const std::size_t n = b.base_dim();
    const ExprMatrix& a = b.connection;
    const ExprMatrix id = ExprMatrix::identity(n);

    BundleStructures s;
    s.j1 = ExprMatrix(2 * n, 2 * n);
    s.j1.set_block(0, 0, -a);
    s.j1.set_block(0, n, -id);
    s.j1.set_block(n, 0, a * a + id);
    s.j1.set_block(n, n, a);

    if (b.base.acs()) {
        const ExprMatrix& j = *b.base.acs();
        ExprMatrix j2(2 * n, 2 * n);
        j2.set_block(0, 0, j);
        j2.set_block(n, 0, -(a * j) - j * a);
        j2.set_block(n, n, -j);
        s.j3 = s.j1 * j2;
        s.j2 = std::move(j2);
    }
    return s;
}

ExprMatrix bundle_structure(const BundleChart& b, int index) {
    if (index < 1 || index > 3) throw std::invalid_argument("bundle structure index must be 1, 2 or 3");
    if (index > 1 && !b.base.acs()) throw MissingBaseACS("J" + std::to_string(index) + " needs a base structure");
    BundleStructures s = build_bundle_acs(b);
    if (index == 1) return s.j1;
    return index == 2 ? *s.j2 : *s.j3;
}

ChartManifold bundle_with_structure(const BundleChart& b, int index) {
    const ChartManifold& t = b.total;
    ChartManifold out(t.name() + "_J" + std::to_string(index), t.coordinate_names(), t.domain(), t.metric(),
                      bundle_structure(b, index));
    out.tube = t.tube;
    out.epsilon = t.epsilon;
    return out;
}

ExprVector horizontal_lift_field(const BundleChart& b, const ExprMatrix& x) {
    const std::size_t n = b.base_dim();
    const ExprMatrix ax = b.connection * x;
    ExprVector out(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = x(i, 0);
        out[n + i] = -ax(i, 0);
    }
    return out;
}

ExprVector vertical_lift_field(const BundleChart& b, const ExprMatrix& x) {
    const std::size_t n = b.base_dim();
    ExprVector out(2 * n, ScalarExpr::constant(0.0));
    for (std::size_t i = 0; i < n; ++i) out[n + i] = x(i, 0);
    return out;
}

ExprVector bracket(const ExprVector& a, const ExprVector& c) {
    const std::size_t m = a.size();
    ExprVector out(m);
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<ScalarExpr> terms;
        for (std::size_t i = 0; i < m; ++i) {
            if (!a[i].is_zero()) terms.push_back(a[i] * differentiate(c[k], i));
            if (!c[i].is_zero()) terms.push_back(-(c[i] * differentiate(a[k], i)));
        }
        out[k] = terms.empty() ? ScalarExpr::constant(0.0) : sum(std::move(terms));
    }
    return out;
}

Vector evaluate(const ExprVector& f, const Point& p) {
    Vector out(idx(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) out(idx(i)) = f[i].evaluate(p);
    return out;
}

BracketReport check_bracket_identities(const BundleChart& b, const ExprMatrix& x, const ExprMatrix& y,
                                       const Point& u) {
    const std::size_t n = b.base_dim();
    if (x.rows() != n || y.rows() != n || x.cols() != 1 || y.cols() != 1) {
        throw ArityError("base fields must be n×1 columns");
    }
    b.total.check_point(u);
    const Point p = b.foot(u);
    const Eigen::Index ni = idx(n);

    const ExprVector xh = horizontal_lift_field(b, x), yh = horizontal_lift_field(b, y);
    const ExprVector xv = vertical_lift_field(b, x), yv = vertical_lift_field(b, y);

    const Vector xp = x.evaluate(p).col(0), yp = y.evaluate(p).col(0);
    const Vector nabla_xy = directional(x, y, p) + christoffel(b.base, p).contract(xp, yp);
    const Vector base_bracket = directional(x, y, p) - directional(y, x, p);

    BracketReport r;
    r.vertical_vertical = max_abs(evaluate(bracket(xv, yv), u));

    Vector expect_hv = Vector::Zero(2 * ni);
    expect_hv.tail(ni) = nabla_xy;
    r.horizontal_vertical = max_abs(evaluate(bracket(xh, yv), u) - expect_hv);

    const Vector hh = evaluate(bracket(xh, yh), u);
    r.projected_horizontal = max_abs(projection(b, hh) - base_bracket);
    r.connection_of_bracket = connection_map(b, u, hh);
    r.curvature_term = curvature(b.base, p).apply(xp, yp, b.fiber(u));
    r.curvature = max_abs(r.connection_of_bracket - r.curvature_term);
    r.curvature_flipped = max_abs(r.connection_of_bracket + r.curvature_term);
    return r;
}

}  // namespace tubekit
