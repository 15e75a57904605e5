#include "tubekit/expr_matrix.hpp"

#include <algorithm>

#include "tubekit/errors.hpp"

namespace tubekit {

ExprMatrix ExprMatrix::identity(std::size_t n) {
    ExprMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = ScalarExpr::constant(1.0);
    return m;
}

ExprMatrix ExprMatrix::constant(const Matrix& src) {
    ExprMatrix m(static_cast<std::size_t>(src.rows()), static_cast<std::size_t>(src.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = ScalarExpr::constant(src(i, j));
    }
    return m;
}

Matrix ExprMatrix::evaluate(std::span<const double> p) const {
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, j).evaluate(p);
    }
    return out;
}

ExprMatrix ExprMatrix::derivative(std::size_t coordinate) const {
    ExprMatrix out(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = differentiate(data_[k], coordinate);
    return out;
}

ExprMatrix ExprMatrix::transpose() const {
    ExprMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    }
    return out;
}

ExprMatrix ExprMatrix::simplified() const {
    ExprMatrix out(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = simplify(data_[k]);
    return out;
}

ExprMatrix ExprMatrix::substituted(std::span<const std::optional<ScalarExpr>> replacement) const {
    ExprMatrix out(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = substitute(data_[k], replacement);
    return out;
}

void ExprMatrix::set_block(std::size_t r, std::size_t c, const ExprMatrix& block) {
    for (std::size_t i = 0; i < block.rows(); ++i) {
        for (std::size_t j = 0; j < block.cols(); ++j) (*this)(r + i, c + j) = block(i, j);
    }
}

ExprMatrix ExprMatrix::block(std::size_t r, std::size_t c, std::size_t rows, std::size_t cols) const {
    ExprMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = (*this)(r + i, c + j);
    }
    return out;
}

std::size_t ExprMatrix::arity() const {
    std::size_t a = 0;
    for (const auto& e : data_) a = std::max(a, e.arity());
    return a;
}

bool ExprMatrix::is_symmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = i + 1; j < cols_; ++j) {
            if (!structurally_equal((*this)(i, j), (*this)(j, i))) return false;
        }
    }
    return true;
}

ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b) {
    ExprMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            std::vector<ScalarExpr> terms;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
                terms.push_back(a(i, k) * b(k, j));
            }
            out(i, j) = sum(std::move(terms));
        }
    }
    return out;
}

ExprMatrix operator+(const ExprMatrix& a, const ExprMatrix& b) {
    ExprMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
    }
    return out;
}

ExprMatrix operator-(const ExprMatrix& a, const ExprMatrix& b) {
    ExprMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
    }
    return out;
}

ExprMatrix operator-(const ExprMatrix& a) {
    ExprMatrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = -a(i, j);
    }
    return out;
}

ExprMatrix symbolic_inverse(const ExprMatrix& m) {
    const std::size_t n = m.rows();
    if (m.cols() != n) throw SingularMetric("inverse of a non-square matrix");
    ExprMatrix a = m;
    ExprMatrix inv = ExprMatrix::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        const ScalarExpr pivot = a(c, c);
        if (pivot.is_zero()) throw SingularMetric("structurally zero pivot in symbolic inverse");
        for (std::size_t j = 0; j < n; ++j) {
            a(c, j) = j == c ? ScalarExpr::constant(1.0) : a(c, j) / pivot;
            inv(c, j) = inv(c, j) / pivot;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a(r, c).is_zero()) continue;
            const ScalarExpr f = a(r, c);
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) = j == c ? ScalarExpr::constant(0.0) : a(r, j) - f * a(c, j);
                if (!inv(c, j).is_zero()) inv(r, j) = inv(r, j) - f * inv(c, j);
            }
        }
    }
    return inv;
}

}  // namespace tubekit
