#pragma once

// Tangent bundle of a chart manifold with the Sasaki metric.
//
// Bundle coordinates are (x^1..x^n, v^1..v^n) where v are fiber components in
// the coordinate frame ∂_i. With A^k_i = Γ^k_{ij} v^j:
//
//   horizontal lift  X^h = (X, −A X)        vertical lift  X^v = (0, X)
//   connection map   K(W) = W_v + A W_x     projection     π_*(W) = W_x
//   ĝ = [[g + AᵀgA, Aᵀg], [gA, g]]
//
// J₁, J₂, J₃ act on lifts as  J₁X^h = X^v, J₁X^v = −X^h,
// J₂X^h = (JX)^h, J₂X^v = −(JX)^v, J₃ = J₁J₂.

#include <optional>

#include "tubekit/chart.hpp"
#include "tubekit/sampling.hpp"

namespace tubekit {

enum class LiftKind { Horizontal, Vertical };

struct BundleChart {
    ChartManifold base;
    ChartManifold total;     // 2n chart carrying ĝ; no structure attached
    ExprMatrix connection;   // A^k_i over the 2n coordinates

    std::size_t base_dim() const { return base.dim(); }
    Point foot(const Point& u) const { return Point(u.begin(), u.begin() + static_cast<std::ptrdiff_t>(base_dim())); }
    Vector fiber(const Point& u) const;
};

BundleChart build_sasaki(const ChartManifold& base);

// A(k, i) = Γ^k_{ij}(x) v^j at the bundle point.
Matrix connection_matrix(const BundleChart& b, const Point& u);
Vector connection_map(const BundleChart& b, const Point& u, const Vector& w);
Vector projection(const BundleChart& b, const Vector& w);
Vector lift(const BundleChart& b, const Point& u, const Vector& x, LiftKind kind);

// Columns: horizontal lifts of a base g-orthonormal frame, then vertical lifts.
struct LiftFrame {
    Matrix base_frame;
    Matrix columns;
    Vector horizontal(std::size_t a) const { return columns.col(static_cast<Eigen::Index>(a)); }
    Vector vertical(std::size_t a) const {
        return columns.col(static_cast<Eigen::Index>(a + static_cast<std::size_t>(base_frame.cols())));
    }
};
LiftFrame lift_frame(const BundleChart& b, const Point& u);
LiftFrame lift_frame(const BundleChart& b, const Point& u, const Matrix& base_frame);

// Residuals at one bundle point, each a max over random vectors drawn from rng:
//   reconstruction  ĝ(W, W') − g(π_*W, π_*W') − g(KW, KW')
//   orthogonality   ĝ(X^h, Y^v)
//   lift_norm       ĝ(X^h, X^h) − g(X, X) and ĝ(X^v, X^v) − g(X, X)
//   frame           Gram residual of lift_frame
struct SasakiResiduals {
    double reconstruction = 0.0;
    double orthogonality = 0.0;
    double lift_norm = 0.0;
    double frame = 0.0;
};
SasakiResiduals sasaki_residuals(const BundleChart& b, const Point& u, Rng& rng);

// J₁ always; J₂ and J₃ only when the base carries an almost complex structure.
struct BundleStructures {
    ExprMatrix j1;
    std::optional<ExprMatrix> j2;
    std::optional<ExprMatrix> j3;
};
BundleStructures build_bundle_acs(const BundleChart& b);
// Structure index 1, 2 or 3; throws MissingBaseACS for 2 and 3 on a bare base.
ExprMatrix bundle_structure(const BundleChart& b, int index);
// The bundle chart with J_index attached, ready for the Hermitian analysis.
ChartManifold bundle_with_structure(const BundleChart& b, int index);

// Residuals of the lift bracket identities for base fields X, Y (n×1
// expression columns over the base coordinates) at a bundle point:
//   [X^v, Y^v] = 0,  [X^h, Y^v] = (∇_X Y)^v,  π_*[X^h, Y^h] = [X, Y],
//   K[X^h, Y^h] = R(X, Y)U.
// `curvature_flipped` is the last residual against −R(X, Y)U.
struct BracketReport {
    double vertical_vertical = 0.0;
    double horizontal_vertical = 0.0;
    double projected_horizontal = 0.0;
    double curvature = 0.0;
    double curvature_flipped = 0.0;
    Vector connection_of_bracket;   // K[X^h, Y^h]
    Vector curvature_term;          // R(X, Y)U
};
BracketReport check_bracket_identities(const BundleChart& b, const ExprMatrix& x, const ExprMatrix& y,
                                       const Point& u);

// Symbolic vector field on the 2n chart and its lifts.
using ExprVector = std::vector<ScalarExpr>;
ExprVector horizontal_lift_field(const BundleChart& b, const ExprMatrix& x);
ExprVector vertical_lift_field(const BundleChart& b, const ExprMatrix& x);
ExprVector bracket(const ExprVector& a, const ExprVector& c);
Vector evaluate(const ExprVector& f, const Point& p);

}  // namespace tubekit
