#pragma once

// Second fundamental tensor of an almost Hermitian pair (J, g),
//   h(X, Y, Z) = ½(g(∇_X Y, Z) − g(∇_X JY, JZ)) = ½ g(J(∇_X J)Y, Z),
// the lift case tables on the tangent bundle, the Lee-type form β and the
// sixteen-class membership test.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "tubekit/bundle.hpp"
#include "tubekit/chart.hpp"

namespace tubekit {

enum class HPath {
    Connection,  // ½(g(∇_X Y, Z) − g(∇_X JY, JZ)) with constant-coefficient fields
    Structure,   // ½ g(J(∇_X J)Y, Z)
};

// Throws NotOrthonormal when the Gram residual of (X, Y, Z) exceeds ortho_tol.
double second_fundamental_tensor(const StructureJet& s, const Vector& x, const Vector& y, const Vector& z,
                                 HPath path = HPath::Connection, double ortho_tol = 1e-8);
double second_fundamental_tensor(const ChartManifold& m, const Point& p, const Vector& x, const Vector& y,
                                 const Vector& z, HPath path = HPath::Connection);

// All components h_{ijk} = h(∂_i, ∂_j, ∂_k); trilinear, no orthonormality needed.
class HTensor {
public:
    HTensor() = default;
    explicit HTensor(const StructureJet& s);

    std::size_t dim() const { return n_; }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[(i * n_ + j) * n_ + k]; }
    double operator()(const Vector& x, const Vector& y, const Vector& z) const;
    double max_abs() const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

// Lift kinds of (X, Y, Z) in case c = 1..8:
//   hhh, hhv, hvh, vhh, vvv, vvh, vhv, hvv
std::array<LiftKind, 3> case_lifts(int c);

// Printed: the case formulas as published.
// Derived: the same formulas with the signs that the direct bundle
// computation produces under this library's curvature convention
// (h¹ cases 2–5 and h² cases 2 and 4 negated).
enum class HTable { Printed, Derived };

// Closed forms of h¹ and h² on lifts; X, Y, Z are base vectors, orthonormal
// at π(U). Throw BadCase outside 1..8; h² throws MissingBaseACS on a bare base.
double h1_closed_form(int c, const BundleChart& b, const Point& u, const Vector& x, const Vector& y,
                      const Vector& z, HTable table = HTable::Printed);
double h2_closed_form(int c, const BundleChart& b, const Point& u, const Vector& x, const Vector& y,
                      const Vector& z, HTable table = HTable::Printed);

// h of (J_a, ĝ) on the bundle chart itself, evaluated on lifts of X, Y, Z.
// `bundle` is bundle_with_structure(b, a).
double bundle_h_direct(const BundleChart& b, const ChartManifold& bundle, int c, const Point& u, const Vector& x,
                       const Vector& y, const Vector& z);

// Covector β with 2β(X) = δΦ(JX), δΦ(W) = −Σ_a (∇_{e_a}Φ)(e_a, W),
// Φ(X, Y) = g(JX, Y); β(X) = beta·X. `frame` must be g-orthonormal.
Vector beta_form(const StructureJet& s, const Matrix& frame);
Vector beta_form(const StructureJet& s);
double beta(const ChartManifold& m, const Point& p, const Vector& x);

struct GHClassRow {
    std::string label;   // "K", "U1", ..., "U1+U2", ..., "U"
    std::string alias;   // NK, AK, QK, H, SK where the table names one
    bool member = false;
    double residual = 0.0;
    std::size_t samples = 0;
};

struct GHClassReport {
    std::string manifold;
    std::vector<GHClassRow> rows;  // K, U1..U4, unions, U; in table order
    bool dimension_valid = false;  // the table is stated for real dimension >= 6
    double tolerance = 0.0;
    double coefficient = 0.0;      // 1/(2(n−1)) used in the U4-type rows
    std::uint64_t seed = 0;
    std::size_t points = 0;
    std::size_t vectors = 0;

    const GHClassRow& row(const std::string& label) const;
    bool member(const std::string& label) const { return row(label).member; }
    std::vector<std::string> members() const;
    // Most specific class: the member row with the fewest summands (K first).
    std::string tightest() const;
};

struct GHOptions {
    std::size_t points = 20;
    std::size_t vectors = 12;
    double tol = 1e-6;
    std::uint64_t seed = 2024;
    // 0 selects 1/(2(n−1)) with n = dim/2.
    double coefficient = 0.0;
    // Optional explicit sample points; otherwise probe points of the domain.
    std::vector<Point> at;
};

GHClassReport gh_classify(const ChartManifold& m, const GHOptions& options = {});
// Same rows evaluated from precomputed jets (used for deformed fields).
GHClassReport gh_classify(const std::string& name, const std::vector<StructureJet>& jets, const GHOptions& options);

}  // namespace tubekit
