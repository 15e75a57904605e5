#include "tubekit/chart.hpp"

#include <cmath>
#include <mutex>

#include "tubekit/errors.hpp"
#include "tubekit/sampling.hpp"

namespace tubekit {

struct ChartManifold::Derived {
    std::once_flag first_once;
    std::vector<ExprMatrix> dmetric;
    std::vector<ExprMatrix> dacs;

    std::once_flag second_once;
    std::vector<std::vector<ExprMatrix>> d2metric;  // [a][b], a <= b filled, mirrored

    std::once_flag christoffel_once;
    std::vector<ScalarExpr> christoffel;
};

ChartManifold::ChartManifold(std::string name, std::vector<std::string> coordinate_names,
                             std::vector<Interval> domain, ExprMatrix metric, std::optional<ExprMatrix> acs)
    : name_(std::move(name)),
      coordinate_names_(std::move(coordinate_names)),
      domain_(std::move(domain)),
      metric_(std::move(metric)),
      acs_(std::move(acs)),
      derived_(std::make_shared<Derived>()) {
    const std::size_t n = coordinate_names_.size();
    if (n == 0) throw InvariantViolation("chart dimension must be positive");
    if (domain_.size() != n) throw InvariantViolation("domain box needs one interval per coordinate");
    for (const auto& iv : domain_) {
        if (!(iv.lo < iv.hi)) throw InvariantViolation("empty domain interval");
    }
    if (metric_.rows() != n || metric_.cols() != n) throw InvariantViolation("metric grid has wrong shape");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) metric_(j, i) = metric_(i, j);
    }
    if (metric_.arity() > n) throw InvariantViolation("metric references a coordinate beyond the chart");
    if (acs_) {
        if (acs_->rows() != n || acs_->cols() != n) throw InvariantViolation("acs grid has wrong shape");
        if (acs_->arity() > n) throw InvariantViolation("acs references a coordinate beyond the chart");
    }
}

const ChartManifold::Derived& ChartManifold::derived() const {
    std::call_once(derived_->first_once, [this] {
        const std::size_t n = dim();
        derived_->dmetric.reserve(n);
        for (std::size_t l = 0; l < n; ++l) derived_->dmetric.push_back(metric_.derivative(l));
        if (acs_) {
            derived_->dacs.reserve(n);
            for (std::size_t l = 0; l < n; ++l) derived_->dacs.push_back(acs_->derivative(l));
        }
    });
    return *derived_;
}

bool ChartManifold::contains(const Point& p) const {
    if (p.size() != dim()) return false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!domain_[i].contains(p[i])) return false;
    }
    return true;
}

void ChartManifold::check_point(const Point& p) const {
    if (p.size() != dim()) {
        throw ArityError("point has " + std::to_string(p.size()) + " coordinates, chart '" + name_ + "' has " +
                         std::to_string(dim()));
    }
    if (!contains(p)) throw OutsideDomain("point outside the domain box of '" + name_ + "'");
}

Matrix ChartManifold::metric_at(const Point& p) const {
    if (p.size() != dim()) throw ArityError("point arity does not match chart dimension");
    return metric_.evaluate(p);
}

MetricJet ChartManifold::metric_jet(const Point& p) const {
    if (p.size() != dim()) throw ArityError("point arity does not match chart dimension");
    const auto& d = derived();
    MetricJet jet;
    jet.g = metric_.evaluate(p);
    jet.dg.reserve(dim());
    for (const auto& dm : d.dmetric) jet.dg.push_back(dm.evaluate(p));
    return jet;
}

std::vector<std::vector<Matrix>> ChartManifold::metric_hessian(const Point& p) const {
    const auto& d = derived();
    const std::size_t n = dim();
    std::call_once(derived_->second_once, [&] {
        derived_->d2metric.assign(n, std::vector<ExprMatrix>(n));
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a; b < n; ++b) derived_->d2metric[a][b] = d.dmetric[a].derivative(b);
        }
    });
    std::vector<std::vector<Matrix>> out(n, std::vector<Matrix>(n));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            out[a][b] = derived_->d2metric[a][b].evaluate(p);
            out[b][a] = out[a][b];
        }
    }
    return out;
}

AcsJet ChartManifold::acs_jet(const Point& p) const {
    if (!acs_) throw MissingBaseACS("chart '" + name_ + "' carries no almost complex structure");
    if (p.size() != dim()) throw ArityError("point arity does not match chart dimension");
    const auto& d = derived();
    AcsJet jet;
    jet.J = acs_->evaluate(p);
    jet.dJ.reserve(dim());
    for (const auto& dj : d.dacs) jet.dJ.push_back(dj.evaluate(p));
    return jet;
}

StructureJet ChartManifold::structure_jet(const Point& p) const {
    StructureJet s;
    s.acs = acs_jet(p);
    s.metric = metric_jet(p);
    s.gamma = christoffel_from_jet(s.metric);
    return s;
}

const std::vector<ScalarExpr>& ChartManifold::symbolic_christoffel() const {
    const auto& d = derived();
    std::call_once(derived_->christoffel_once, [&] {
        const std::size_t n = dim();
        const ExprMatrix inv = symbolic_inverse(metric_);
        std::vector<ScalarExpr> first(n * n * n);  // Γ_{l,ij}
        for (std::size_t l = 0; l < n; ++l) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j) {
                    const ScalarExpr v =
                        ScalarExpr::constant(0.5) * (d.dmetric[i](l, j) + d.dmetric[j](i, l) - d.dmetric[l](i, j));
                    first[christoffel_index(n, l, i, j)] = v;
                    first[christoffel_index(n, l, j, i)] = v;
                }
            }
        }
        auto& out = derived_->christoffel;
        out.assign(n * n * n, ScalarExpr());
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j) {
                    std::vector<ScalarExpr> terms;
                    for (std::size_t l = 0; l < n; ++l) {
                        const auto& f = first[christoffel_index(n, l, i, j)];
                        if (inv(k, l).is_zero() || f.is_zero()) continue;
                        terms.push_back(inv(k, l) * f);
                    }
                    const ScalarExpr v = sum(std::move(terms));
                    out[christoffel_index(n, k, i, j)] = v;
                    out[christoffel_index(n, k, j, i)] = v;
                }
            }
        }
    });
    return derived_->christoffel;
}

Christoffel christoffel(const ChartManifold& m, const Point& p) {
    m.check_point(p);
    return christoffel_from_jet(m.metric_jet(p));
}

Riemann curvature(const ChartManifold& m, const Point& p) {
    m.check_point(p);
    const std::size_t n = m.dim();
    const MetricJet jet = m.metric_jet(p);
    const Christoffel gamma = christoffel_from_jet(jet);
    const auto hess = m.metric_hessian(p);
    Eigen::LLT<Matrix> llt(jet.g);
    if (llt.info() != Eigen::Success) throw SingularMetric("metric is not positive definite");

    // ∂_m Γ^k_{ij} = g^{kl} (∂_m Γ_{l,ij} − ∂_m g_{lp} Γ^p_{ij})
    std::vector<Christoffel> dgamma(n, Christoffel(n));
    Vector rhs(static_cast<Eigen::Index>(n));
    for (std::size_t mi = 0; mi < n; ++mi) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                for (std::size_t l = 0; l < n; ++l) {
                    double v = 0.5 * (hess[mi][i](l, j) + hess[mi][j](i, l) - hess[mi][l](i, j));
                    for (std::size_t q = 0; q < n; ++q) v -= jet.dg[mi](l, q) * gamma(q, i, j);
                    rhs[l] = v;
                }
                const Vector sol = llt.solve(rhs);
                for (std::size_t k = 0; k < n; ++k) {
                    dgamma[mi](k, i, j) = sol[k];
                    dgamma[mi](k, j, i) = sol[k];
                }
            }
        }
    }
    return riemann_from(gamma, dgamma);
}

std::vector<Matrix> covariant_derivative_acs(const ChartManifold& m, const Point& p) {
    m.check_point(p);
    const AcsJet acs = m.acs_jet(p);
    return covariant_derivative_11(acs, christoffel_from_jet(m.metric_jet(p)));
}

std::vector<Matrix> covariant_derivative_metric(const ChartManifold& m, const Point& p) {
    m.check_point(p);
    const MetricJet jet = m.metric_jet(p);
    return covariant_derivative_02(jet, christoffel_from_jet(jet));
}

std::vector<Matrix> covariant_derivative_11(const ChartManifold& m, const ExprMatrix& field, const Point& p) {
    m.check_point(p);
    AcsJet jet;
    jet.J = field.evaluate(p);
    for (std::size_t i = 0; i < m.dim(); ++i) jet.dJ.push_back(field.derivative(i).evaluate(p));
    return covariant_derivative_11(jet, christoffel_from_jet(m.metric_jet(p)));
}

Matrix gram_schmidt(const Matrix& columns, const Matrix& g) {
    Matrix out = columns;
    for (Eigen::Index c = 0; c < out.cols(); ++c) {
        Vector v = out.col(c);
        // Two passes keep the Gram residual at rounding level.
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index prev = 0; prev < c; ++prev) {
                const Vector e = out.col(prev);
                v -= e * e.dot(g * v);
            }
        }
        const double norm2 = v.dot(g * v);
        if (!(norm2 > 0.0)) throw SingularMetric("Gram-Schmidt met a degenerate direction");
        out.col(c) = v / std::sqrt(norm2);
    }
    return out;
}

FramedPoint orthonormal_frame(const ChartManifold& m, const Point& p) {
    m.check_point(p);
    const Matrix g = m.metric_at(p);
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) throw SingularMetric("metric is not positive definite");
    return FramedPoint{p, gram_schmidt(Matrix::Identity(g.rows(), g.cols()), g)};
}

InvariantReport check_invariants(const ChartManifold& m, std::size_t probes, std::uint64_t seed) {
    InvariantReport report;
    report.symmetric = m.metric().is_symmetric();
    Rng rng(seed ^ 0x5eedULL);
    for (const auto& p : probe_points(m.domain(), probes, seed)) {
        const Matrix g = m.metric_at(p);
        Eigen::LLT<Matrix> llt(g);
        if (llt.info() != Eigen::Success) {
            report.positive_definite = false;
            continue;
        }
        if (!m.has_acs()) continue;
        const Matrix j = m.acs()->evaluate(p);
        const Matrix sq = j * j + Matrix::Identity(j.rows(), j.cols());
        report.max_acs_square_residual = std::max(report.max_acs_square_residual, sq.cwiseAbs().maxCoeff());
        const Vector x = random_vector(rng, m.dim());
        const Vector y = random_vector(rng, m.dim());
        const double iso = std::abs((j * x).dot(g * (j * y)) - x.dot(g * y));
        report.max_acs_isometry_residual = std::max(report.max_acs_isometry_residual, iso);
    }
    return report;
}

ExprMatrix diagonal_metric(const std::vector<ScalarExpr>& diag) {
    ExprMatrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

Matrix standard_complex_structure(std::size_t n) {
    Matrix j = Matrix::Zero(n, n);
    for (std::size_t a = 0; a + 1 < n; a += 2) {
        j(a + 1, a) = 1.0;
        j(a, a + 1) = -1.0;
    }
    return j;
}

}  // namespace tubekit
