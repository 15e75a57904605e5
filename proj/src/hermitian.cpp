#include "tubekit/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tubekit/errors.hpp"
#include "tubekit/sampling.hpp"

namespace tubekit {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

Matrix along(const std::vector<Matrix>& fields, const Vector& x) {
    Matrix out = Matrix::Zero(fields.front().rows(), fields.front().cols());
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (x(idx(i)) != 0.0) out += x(idx(i)) * fields[i];
    }
    return out;
}

void require_orthonormal(const Matrix& g, const Vector& x, const Vector& y, const Vector& z, double tol) {
    Matrix cols(x.size(), 3);
    cols << x, y, z;
    // Repeated vectors are allowed; only distinct columns must be orthogonal.
    const Matrix gram = cols.transpose() * g * cols;
    double worst = 0.0;
    for (Eigen::Index a = 0; a < 3; ++a) {
        worst = std::max(worst, std::abs(gram(a, a) - 1.0));
        for (Eigen::Index c = 0; c < 3; ++c) {
            if (a != c && !cols.col(a).isApprox(cols.col(c), 0.0)) worst = std::max(worst, std::abs(gram(a, c)));
        }
    }
    if (worst > tol) throw NotOrthonormal("vectors are not orthonormal (residual " + std::to_string(worst) + ")");
}

void check_case(int c) {
    if (c < 1 || c > 8) throw BadCase("lift case must be in 1..8, got " + std::to_string(c));
}

}  // namespace

double second_fundamental_tensor(const StructureJet& s, const Vector& x, const Vector& y, const Vector& z, HPath path,
                                 double ortho_tol) {
    const Matrix& g = s.metric.g;
    const Matrix& j = s.acs.J;
    require_orthonormal(g, x, y, z, ortho_tol);
    if (path == HPath::Connection) {
        const Vector nxy = s.gamma.contract(x, y);
        const Vector jy = j * y;
        const Vector nxjy = along(s.acs.dJ, x) * y + s.gamma.contract(x, jy);
        return 0.5 * (nxy.dot(g * z) - nxjy.dot(g * (j * z)));
    }
    const Matrix nx = along(covariant_derivative_11(s.acs, s.gamma), x);
    return 0.5 * (j * (nx * y)).dot(g * z);
}

double second_fundamental_tensor(const ChartManifold& m, const Point& p, const Vector& x, const Vector& y,
                                 const Vector& z, HPath path) {
    return second_fundamental_tensor(m.structure_jet(p), x, y, z, path);
}

HTensor::HTensor(const StructureJet& s) : n_(s.metric.g.rows()), data_(n_ * n_ * n_) {
    const auto nabla = covariant_derivative_11(s.acs, s.gamma);
    for (std::size_t i = 0; i < n_; ++i) {
        const Matrix m = 0.5 * s.metric.g * s.acs.J * nabla[i];  // (k, j) -> h_{ijk}
        for (std::size_t j = 0; j < n_; ++j) {
            for (std::size_t k = 0; k < n_; ++k) data_[(i * n_ + j) * n_ + k] = m(idx(k), idx(j));
        }
    }
}

double HTensor::operator()(const Vector& x, const Vector& y, const Vector& z) const {
    double out = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        if (x(idx(i)) == 0.0) continue;
        for (std::size_t j = 0; j < n_; ++j) {
            if (y(idx(j)) == 0.0) continue;
            double inner = 0.0;
            for (std::size_t k = 0; k < n_; ++k) inner += data_[(i * n_ + j) * n_ + k] * z(idx(k));
            out += x(idx(i)) * y(idx(j)) * inner;
        }
    }
    return out;
}

double HTensor::max_abs() const {
    double out = 0.0;
    for (double v : data_) out = std::max(out, std::abs(v));
    return out;
}

std::array<LiftKind, 3> case_lifts(int c) {
    check_case(c);
    constexpr auto H = LiftKind::Horizontal;
    constexpr auto V = LiftKind::Vertical;
    static constexpr std::array<std::array<LiftKind, 3>, 8> table{{
        {H, H, H}, {H, H, V}, {H, V, H}, {V, H, H}, {V, V, V}, {V, V, H}, {V, H, V}, {H, V, V},
    }};
    return table[static_cast<std::size_t>(c - 1)];
}

double h1_closed_form(int c, const BundleChart& b, const Point& u, const Vector& x, const Vector& y,
                      const Vector& z, HTable table) {
    check_case(c);
    const Point p = b.foot(u);
    const Matrix g = b.base.metric_at(p);
    require_orthonormal(g, x, y, z, 1e-8);
    const Riemann r = curvature(b.base, p);
    const Vector gu = g * b.fiber(u);
    auto rg = [&](const Vector& a1, const Vector& a2, const Vector& a3) { return r.apply(a1, a2, a3).dot(gu); };
    const double sign = table == HTable::Derived ? -1.0 : 1.0;
    switch (c) {
        case 2: return sign * -0.25 * (rg(x, y, z) + rg(z, x, y));
        case 3: return sign * -0.25 * (rg(z, x, y) + rg(x, y, z));
        case 4: return sign * -0.25 * rg(z, y, x);
        case 5: return sign * 0.25 * rg(z, y, x);
        default: return 0.0;
    }
}

double h2_closed_form(int c, const BundleChart& b, const Point& u, const Vector& x, const Vector& y,
                      const Vector& z, HTable table) {
    check_case(c);
    if (!b.base.acs()) throw MissingBaseACS("h² needs a base structure");
    const Point p = b.foot(u);
    const StructureJet s = b.base.structure_jet(p);
    const Matrix& g = s.metric.g;
    const Matrix& j = s.acs.J;
    require_orthonormal(g, x, y, z, 1e-8);
    const Riemann r = curvature(b.base, p);
    const Vector gu = g * b.fiber(u);
    auto rg = [&](const Vector& a1, const Vector& a2, const Vector& a3) { return r.apply(a1, a2, a3).dot(gu); };
    const double sign = table == HTable::Derived ? -1.0 : 1.0;
    switch (c) {
        case 1:
        case 8: return second_fundamental_tensor(s, x, y, z);
        case 2: return sign * -0.25 * (rg(x, y, z) + rg(x, j * y, j * z));
        case 3: return -0.25 * (rg(x, z, y) + rg(x, j * z, j * y));
        case 4: return sign * -0.25 * (rg(z, y, x) - rg(j * z, j * y, x));
        default: return 0.0;
    }
}

double bundle_h_direct(const BundleChart& b, const ChartManifold& bundle, int c, const Point& u, const Vector& x,
                       const Vector& y, const Vector& z) {
    const auto kinds = case_lifts(c);
    const StructureJet s = bundle.structure_jet(u);
    return second_fundamental_tensor(s, lift(b, u, x, kinds[0]), lift(b, u, y, kinds[1]), lift(b, u, z, kinds[2]));
}

Vector beta_form(const StructureJet& s, const Matrix& frame) {
    const auto nabla = covariant_derivative_11(s.acs, s.gamma);
    Vector w = Vector::Zero(s.metric.g.rows());
    for (Eigen::Index a = 0; a < frame.cols(); ++a) {
        const Vector e = frame.col(a);
        w += along(nabla, e) * e;
    }
    return -0.5 * s.acs.J.transpose() * (s.metric.g * w);
}

Vector beta_form(const StructureJet& s) {
    const Matrix& g = s.metric.g;
    return beta_form(s, gram_schmidt(Matrix::Identity(g.rows(), g.cols()), g));
}

double beta(const ChartManifold& m, const Point& p, const Vector& x) { return beta_form(m.structure_jet(p)).dot(x); }

const GHClassRow& GHClassReport::row(const std::string& label) const {
    for (const auto& r : rows) {
        if (r.label == label || (!r.alias.empty() && r.alias == label)) return r;
    }
    throw std::out_of_range("no class row '" + label + "'");
}

std::vector<std::string> GHClassReport::members() const {
    std::vector<std::string> out;
    for (const auto& r : rows) {
        if (r.member) out.push_back(r.label);
    }
    return out;
}

std::string GHClassReport::tightest() const {
    auto summands = [](const std::string& label) {
        if (label == "K") return std::size_t{0};
        if (label == "U") return std::size_t{5};
        return static_cast<std::size_t>(std::count(label.begin(), label.end(), '+')) + 1;
    };
    const GHClassRow* best = nullptr;
    for (const auto& r : rows) {
        if (r.member && (best == nullptr || summands(r.label) < summands(best->label))) best = &r;
    }
    return best == nullptr ? std::string("U") : best->label;
}

namespace {

struct Sample {
    const HTensor& h;
    const Vector& beta;
    const Matrix& g;
    const Matrix& j;
    double c;

    double ip(const Vector& a, const Vector& b) const { return a.dot(g * b); }
    double b(const Vector& a) const { return beta.dot(a); }
    double beta_residual(const Vector& x, const Vector& y, const Vector& z) const {
        return std::max({std::abs(b(x)), std::abs(b(y)), std::abs(b(z))});
    }
};

using Condition = std::function<double(const Sample&, const Vector&, const Vector&, const Vector&)>;

struct RowSpec {
    const char* label;
    const char* alias;
    Condition residual;  // null for "no condition"
};

double cyclic(const std::function<double(const Vector&, const Vector&, const Vector&)>& f, const Vector& x,
              const Vector& y, const Vector& z) {
    return f(x, y, z) + f(y, z, x) + f(z, x, y);
}

const std::vector<RowSpec>& row_specs() {
    static const std::vector<RowSpec> rows = {
        {"K", "", [](const Sample& s, const Vector& x, const Vector& y, const Vector& z) {
             return std::abs(s.h(x, y, z));
         }},
        {"U1", "NK", [](const Sample& s, const Vector& x, const Vector& y, const Vector&) {
             return std::abs(s.h(x, x, y));
         }},
        {"U2", "AK", [](const Sample& s, const Vector& x, const Vector& y, const Vector& z) {
             return std::abs(cyclic([&](const Vector& a, const Vector& b, const Vector& c) { return s.h(a, b, c); },
                                    x, y, z));
         }},
        {"U3", "", [](const Sample& s, const Vector& x, const Vector& y, const Vector& z) {
             return std::max(std::abs(s.h(x, y, z) - s.h(s.j * x, s.j * y, z)), s.beta_residual(x, y, z));
         }},
        {"U4", "", [](const Sample& s, const Vector& x, const Vector& y, const Vector& z) {
             const Vector jy = s.j * y, jz = s.j * z;
             const double rhs = s.c * (s.ip(x, y) * s.b(z) - s.ip(x, z) * s.b(y) - s.ip(x, jy) * s.b(jz) +
                                       s.ip(x, jz) * s.b(jy));
             return std::abs(s.h(x, y, z) - rhs);
         }},
        {"U1+U2", "QK", [](const Sample& s, const Vector& x, const Vector& y, const Vector& z) {
             return std::abs(s.h(x, y, s.j * z) - s.h(s.j * x, y, z));
         }},
        {"U3+U4", "H", [](const Sample& s, const Vector& x, const Vector& y, const Vector& z) {
             return std::abs(s.h(x, y, s.j * z) + s.h(s.j * x, y, z));
         }},
        {"U1+U3", "", [](const Sample& s, const Vector& x, const Vector& y, const Vector& z) {
             const Vector jx = s.j * x;
             return std::max(std::abs(s.h(x, x, y) - s.h(jx, jx, y)), s.beta_residual(x, y, z));
         }},
        {"U2+U4", "", [](const Sample& s, const Vector& x, const Vector& y, const Vector& z) {
             return std::abs(cyclic(
                 [&](const Vector& a, const Vector& b, const Vector& c) {
                     // Sign chosen so that U4 satisfies the row.
                     return s.h(a, b, s.j * c) + 2.0 * s.c * s.ip(s.j * a, b) * s.b(c);
                 },
                 x, y, z));
         }},
        {"U1+U4", "", [](const Sample& s, const Vector& x, const Vector& y, const Vector&) {
             const Vector jx = s.j * x, jy = s.j * y;
             const double rhs = -s.c * (s.ip(x, y) * s.b(x) - s.ip(x, x) * s.b(y) - s.ip(x, jy) * s.b(jx));
             return std::abs(s.h(x, x, y) - rhs);
         }},
        {"U2+U3", "", [](const Sample& s, const Vector& x, const Vector& y, const Vector& z) {
             const double sum = cyclic(
                 [&](const Vector& a, const Vector& b, const Vector& c) { return s.h(a, b, s.j * c) + s.h(s.j * a, b, c); },
                 x, y, z);
             return std::max(std::abs(sum), s.beta_residual(x, y, z));
         }},
        {"U1+U2+U3", "SK", [](const Sample& s, const Vector& x, const Vector& y, const Vector& z) {
             return s.beta_residual(x, y, z);
         }},
        {"U1+U2+U4", "", [](const Sample& s, const Vector& x, const Vector& y, const Vector& z) {
             const Vector jy = s.j * y, jz = s.j * z;
             const double rhs = 2.0 * s.c *
                                (s.ip(x, y) * s.b(jz) - s.ip(x, z) * s.b(jy) + s.ip(x, jy) * s.b(z) -
                                 s.ip(x, jz) * s.b(y));
             return std::abs(s.h(x, y, jz) - s.h(s.j * x, y, z) - rhs);
         }},
        {"U1+U3+U4", "", [](const Sample& s, const Vector& x, const Vector& y, const Vector&) {
             const Vector jx = s.j * x;
             return std::abs(s.h(x, jx, y) + s.h(jx, x, y));
         }},
        {"U2+U3+U4", "", [](const Sample& s, const Vector& x, const Vector& y, const Vector& z) {
             return std::abs(cyclic(
                 [&](const Vector& a, const Vector& b, const Vector& c) { return s.h(a, b, s.j * c) + s.h(s.j * a, b, c); },
                 x, y, z));
         }},
        {"U", "", nullptr},
    };
    return rows;
}

}  // namespace

GHClassReport gh_classify(const std::string& name, const std::vector<StructureJet>& jets, const GHOptions& options) {
    if (jets.empty()) throw std::invalid_argument("classification needs at least one sample point");
    const std::size_t dim = static_cast<std::size_t>(jets.front().metric.g.rows());
    GHClassReport report;
    report.manifold = name;
    report.dimension_valid = dim >= 6;
    report.tolerance = options.tol;
    report.seed = options.seed;
    report.points = jets.size();
    report.vectors = options.vectors;
    const double half = static_cast<double>(dim) / 2.0;
    report.coefficient = options.coefficient != 0.0 ? options.coefficient
                         : half > 1.0                ? 1.0 / (2.0 * (half - 1.0))
                                                     : 0.0;

    const auto& specs = row_specs();
    for (const auto& spec : specs) report.rows.push_back({spec.label, spec.alias, false, 0.0, 0});

    Rng rng(options.seed);
    for (const auto& jet : jets) {
        const HTensor h(jet);
        const Vector b = beta_form(jet);
        const Sample s{h, b, jet.metric.g, jet.acs.J, report.coefficient};
        for (std::size_t t = 0; t < options.vectors; ++t) {
            Matrix triple(idx(dim), 3);
            if (dim >= 3) {
                triple = random_orthonormal(rng, jet.metric.g, 3);
            } else {
                for (Eigen::Index c = 0; c < 3; ++c) triple.col(c) = random_unit(rng, jet.metric.g);
            }
            const Vector x = triple.col(0), y = triple.col(1), z = triple.col(2);
            for (std::size_t r = 0; r < specs.size(); ++r) {
                ++report.rows[r].samples;
                if (!specs[r].residual) continue;
                report.rows[r].residual = std::max(report.rows[r].residual, specs[r].residual(s, x, y, z));
            }
        }
    }
    for (auto& r : report.rows) r.member = r.residual <= options.tol;
    return report;
}

GHClassReport gh_classify(const ChartManifold& m, const GHOptions& options) {
    if (!m.has_acs()) throw MissingBaseACS("classification needs an almost complex structure");
    const std::vector<Point> points = options.at.empty() ? probe_points(m.domain(), options.points, options.seed)
                                                         : options.at;
    std::vector<StructureJet> jets;
    jets.reserve(points.size());
    for (const auto& p : points) jets.push_back(m.structure_jet(p));
    return gh_classify(m.name(), jets, options);
}

}  // namespace tubekit
