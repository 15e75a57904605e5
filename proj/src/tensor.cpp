#include "tubekit/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "tubekit/errors.hpp"

namespace tubekit {

namespace {

double max_abs_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

Vector Christoffel::contract(const Vector& x, const Vector& y) const {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(n_));
    for (std::size_t k = 0; k < n_; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) acc += (*this)(k, i, j) * x[i] * y[j];
        }
        out[k] = acc;
    }
    return out;
}

Matrix Christoffel::contract_last(const Vector& v) const {
    Matrix a = Matrix::Zero(n_, n_);
    for (std::size_t k = 0; k < n_; ++k) {
        for (std::size_t i = 0; i < n_; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n_; ++j) acc += (*this)(k, i, j) * v[j];
            a(k, i) = acc;
        }
    }
    return a;
}

double Christoffel::max_abs() const { return max_abs_of(data_); }

Vector Riemann::apply(const Vector& x, const Vector& y, const Vector& z) const {
    Vector out = Vector::Zero(static_cast<Eigen::Index>(n_));
    for (std::size_t l = 0; l < n_; ++l) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n_; ++k) {
            if (z[k] == 0.0) continue;
            for (std::size_t i = 0; i < n_; ++i) {
                if (x[i] == 0.0) continue;
                for (std::size_t j = 0; j < n_; ++j) acc += (*this)(l, k, i, j) * z[k] * x[i] * y[j];
            }
        }
        out[l] = acc;
    }
    return out;
}

double Riemann::max_abs() const { return max_abs_of(data_); }

Christoffel christoffel_first_kind(const MetricJet& jet) {
    const std::size_t n = static_cast<std::size_t>(jet.g.rows());
    Christoffel first(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i; j < n; ++j) {
                const double v = 0.5 * (jet.dg[i](k, j) + jet.dg[j](i, k) - jet.dg[k](i, j));
                first(k, i, j) = v;
                first(k, j, i) = v;
            }
        }
    }
    return first;
}

Christoffel christoffel_from_jet(const MetricJet& jet) {
    const std::size_t n = static_cast<std::size_t>(jet.g.rows());
    Eigen::LLT<Matrix> llt(jet.g);
    if (llt.info() != Eigen::Success) throw SingularMetric("metric is not positive definite");
    const Christoffel first = christoffel_first_kind(jet);
    Christoffel gamma(n);
    Vector rhs(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) rhs[k] = first(k, i, j);
            const Vector sol = llt.solve(rhs);
            for (std::size_t k = 0; k < n; ++k) {
                gamma(k, i, j) = sol[k];
                gamma(k, j, i) = sol[k];
            }
        }
    }
    return gamma;
}

std::vector<Matrix> covariant_derivative_11(const AcsJet& acs, const Christoffel& gamma) {
    const std::size_t n = static_cast<std::size_t>(acs.J.rows());
    std::vector<Matrix> out(n, Matrix::Zero(n, n));
    for (std::size_t i = 0; i < n; ++i) {
        Matrix gi(n, n);  // gi(k, l) = Γ^k_{il}
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = 0; l < n; ++l) gi(k, l) = gamma(k, i, l);
        }
        out[i] = acs.dJ[i] + gi * acs.J - acs.J * gi;
    }
    return out;
}

std::vector<Matrix> covariant_derivative_02(const MetricJet& field, const Christoffel& gamma) {
    const std::size_t n = static_cast<std::size_t>(field.g.rows());
    std::vector<Matrix> out(n, Matrix::Zero(n, n));
    for (std::size_t l = 0; l < n; ++l) {
        Matrix gl(n, n);  // gl(m, i) = Γ^m_{li}
        for (std::size_t m = 0; m < n; ++m) {
            for (std::size_t i = 0; i < n; ++i) gl(m, i) = gamma(m, l, i);
        }
        out[l] = field.dg[l] - gl.transpose() * field.g - field.g * gl;
    }
    return out;
}

Riemann riemann_from(const Christoffel& gamma, const std::vector<Christoffel>& dgamma) {
    const std::size_t n = gamma.dim();
    Riemann r(n);
    for (std::size_t l = 0; l < n; ++l) {
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    double v = dgamma[i](l, j, k) - dgamma[j](l, i, k);
                    for (std::size_t m = 0; m < n; ++m) {
                        v += gamma(l, i, m) * gamma(m, j, k) - gamma(l, j, m) * gamma(m, i, k);
                    }
                    r(l, k, i, j) = v;
                }
            }
        }
    }
    return r;
}

double gram_residual(const Matrix& frame, const Matrix& g) {
    const Matrix gram = frame.transpose() * g * frame;
    return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

}  // namespace tubekit
