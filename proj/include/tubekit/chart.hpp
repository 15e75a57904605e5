#pragma once

// Single-chart Riemannian (optionally almost Hermitian) manifolds and the
// pointwise geometry computed from their symbolic metric.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tubekit/expr_matrix.hpp"
#include "tubekit/tensor.hpp"

namespace tubekit {

// Open interval (lo, hi).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return x > lo && x < hi; }
    double width() const { return hi - lo; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

// Tube declared in a manifest: the first `tangential` coordinates run along
// the submanifold, the rest are transverse and equal `origin` on it.
struct TubeSpec {
    std::size_t tangential = 0;
    double epsilon = 0.0;
    std::vector<double> origin;
    friend bool operator==(const TubeSpec&, const TubeSpec&) = default;
};

class ChartManifold {
public:
    ChartManifold(std::string name, std::vector<std::string> coordinate_names, std::vector<Interval> domain,
                  ExprMatrix metric, std::optional<ExprMatrix> acs = std::nullopt);

    const std::string& name() const { return name_; }
    std::size_t dim() const { return coordinate_names_.size(); }
    const std::vector<std::string>& coordinate_names() const { return coordinate_names_; }
    const std::vector<Interval>& domain() const { return domain_; }
    const ExprMatrix& metric() const { return metric_; }
    const std::optional<ExprMatrix>& acs() const { return acs_; }
    bool has_acs() const { return acs_.has_value(); }

    // Optional manifest extras.
    std::optional<TubeSpec> tube;
    double epsilon = 0.0;     // null-section tube radius for bundle constructions, 0 = unset
    double fiber_box = 1.0;   // |v|_inf bound of the bundle chart built over this base

    bool contains(const Point& p) const;
    // Throws ArityError or OutsideDomain.
    void check_point(const Point& p) const;

    Matrix metric_at(const Point& p) const;
    MetricJet metric_jet(const Point& p) const;
    // hess[a][b](i, j) = ∂_a ∂_b g_ij
    std::vector<std::vector<Matrix>> metric_hessian(const Point& p) const;
    // Throws MissingBaseACS.
    AcsJet acs_jet(const Point& p) const;
    StructureJet structure_jet(const Point& p) const;

    // Γ^k_{ij} as expressions (symbolic inverse of the metric).
    const std::vector<ScalarExpr>& symbolic_christoffel() const;

private:
    struct Derived;
    const Derived& derived() const;

    std::string name_;
    std::vector<std::string> coordinate_names_;
    std::vector<Interval> domain_;
    ExprMatrix metric_;
    std::optional<ExprMatrix> acs_;
    std::shared_ptr<Derived> derived_;
};

// Index of Γ^k_{ij} inside symbolic_christoffel().
inline std::size_t christoffel_index(std::size_t n, std::size_t k, std::size_t i, std::size_t j) {
    return (k * n + i) * n + j;
}

Christoffel christoffel(const ChartManifold& m, const Point& p);
Riemann curvature(const ChartManifold& m, const Point& p);
// (∇_i J)^k_j for the manifold's almost complex structure.
std::vector<Matrix> covariant_derivative_acs(const ChartManifold& m, const Point& p);
// (∇_l g)_{ij}; vanishes for the Levi-Civita connection.
std::vector<Matrix> covariant_derivative_metric(const ChartManifold& m, const Point& p);
// (∇_i T)^k_j for an arbitrary (1,1) field given as expressions.
std::vector<Matrix> covariant_derivative_11(const ChartManifold& m, const ExprMatrix& field, const Point& p);

struct FramedPoint {
    Point point;
    Matrix frame;  // columns e_a with g(e_a, e_b) = δ_ab
};

// Gram-Schmidt of the coordinate basis in index order.
FramedPoint orthonormal_frame(const ChartManifold& m, const Point& p);
// Gram-Schmidt of arbitrary columns against g.
Matrix gram_schmidt(const Matrix& columns, const Matrix& g);

// Residual summary of the type invariants: symmetry, positive definiteness,
// J² = −I and g(JX, JY) = g(X, Y) at the probe points.
struct InvariantReport {
    double max_acs_square_residual = 0.0;
    double max_acs_isometry_residual = 0.0;
    bool positive_definite = true;
    bool symmetric = true;
    bool ok(double tol) const {
        return positive_definite && symmetric && max_acs_square_residual <= tol &&
               max_acs_isometry_residual <= tol;
    }
};
InvariantReport check_invariants(const ChartManifold& m, std::size_t probes, std::uint64_t seed);

// Convenience constructors used by tests and the catalog.
ExprMatrix diagonal_metric(const std::vector<ScalarExpr>& diag);
// Standard block complex structure: J ∂_{2a} = ∂_{2a+1}, J ∂_{2a+1} = −∂_{2a}.
Matrix standard_complex_structure(std::size_t n);

}  // namespace tubekit
