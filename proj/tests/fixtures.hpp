#pragma once

// Shared oracles and fixture manifolds for the test binaries.

#include <cmath>
#include <vector>

#include "tubekit/bundle.hpp"
#include "tubekit/chart.hpp"

namespace fixtures {

using namespace tubekit;

inline Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

// Christoffel symbols from central differences of the numeric metric.
inline Christoffel fd_christoffel(const ChartManifold& m, const Point& p, double h = 1e-5) {
    const std::size_t n = m.dim();
    std::vector<Matrix> dg(n);
    for (std::size_t l = 0; l < n; ++l) {
        Point a = p, b = p;
        a[l] += h;
        b[l] -= h;
        dg[l] = (m.metric_at(a) - m.metric_at(b)) / (2.0 * h);
    }
    const Matrix ginv = m.metric_at(p).inverse();
    Christoffel out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            Vector first(static_cast<Eigen::Index>(n));
            for (std::size_t q = 0; q < n; ++q) first(q) = 0.5 * (dg[i](q, j) + dg[j](i, q) - dg[q](i, j));
            const Vector second = ginv * first;
            for (std::size_t k = 0; k < n; ++k) out(k, i, j) = second(k);
        }
    }
    return out;
}

// Flat ℝ⁶ with J = R(x) J₀ R(x)ᵀ, R a product of coordinate-dependent Givens
// rotations: orthogonal, squares to −I, generic otherwise.
inline ChartManifold perturbed_r6() {
    const std::size_t n = 6;
    auto x = [](std::size_t i) { return ScalarExpr::coordinate(i); };
    auto c = [](double v) { return ScalarExpr::constant(v); };
    struct Plane {
        std::size_t a, b;
        ScalarExpr angle;
    };
    const std::vector<Plane> planes = {
        {0, 2, c(0.5) * sin(x(0) + c(2.0) * x(2))},
        {1, 4, c(0.7) * x(3) * x(1) + c(0.2)},
        {3, 5, c(0.4) * cos(x(4) - x(5))},
        {2, 5, c(0.6) * x(0) - c(0.3) * x(5) * x(5)},
        {0, 3, c(0.3) * exp(c(0.5) * x(1))},
    };
    ExprMatrix r = ExprMatrix::identity(n);
    for (const auto& pl : planes) {
        ExprMatrix giv = ExprMatrix::identity(n);
        giv(pl.a, pl.a) = cos(pl.angle);
        giv(pl.b, pl.b) = cos(pl.angle);
        giv(pl.a, pl.b) = -sin(pl.angle);
        giv(pl.b, pl.a) = sin(pl.angle);
        r = r * giv;
    }
    const ExprMatrix j = r * ExprMatrix::constant(standard_complex_structure(n)) * r.transpose();
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    return ChartManifold("perturbed_r6", names, std::vector<Interval>(n, Interval{-1.0, 1.0}),
                         ExprMatrix::identity(n), j);
}

inline ExprMatrix column(std::initializer_list<double> v) {
    ExprMatrix out(v.size(), 1);
    std::size_t i = 0;
    for (double x : v) out(i++, 0) = ScalarExpr::constant(x);
    return out;
}

}  // namespace fixtures
