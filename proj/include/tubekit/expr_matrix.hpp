#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tubekit/expr.hpp"
#include "tubekit/tensor.hpp"

namespace tubekit {

// Row-major matrix of expressions. Used for metric grids, (1,1) fields and
// frame changes on bundle charts.
class ExprMatrix {
public:
    ExprMatrix() = default;
    ExprMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static ExprMatrix zero(std::size_t rows, std::size_t cols) { return ExprMatrix(rows, cols); }
    static ExprMatrix identity(std::size_t n);
    static ExprMatrix constant(const Matrix& m);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    ScalarExpr& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const ScalarExpr& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Matrix evaluate(std::span<const double> p) const;
    ExprMatrix derivative(std::size_t coordinate) const;
    ExprMatrix transpose() const;
    ExprMatrix simplified() const;
    ExprMatrix substituted(std::span<const std::optional<ScalarExpr>> replacement) const;

    // Copies `block` into this matrix with its top-left corner at (r, c).
    void set_block(std::size_t r, std::size_t c, const ExprMatrix& block);
    ExprMatrix block(std::size_t r, std::size_t c, std::size_t rows, std::size_t cols) const;

    std::size_t arity() const;
    bool is_symmetric() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<ScalarExpr> data_;
};

ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b);
ExprMatrix operator+(const ExprMatrix& a, const ExprMatrix& b);
ExprMatrix operator-(const ExprMatrix& a, const ExprMatrix& b);
ExprMatrix operator-(const ExprMatrix& a);

// Gauss-Jordan elimination on expressions without pivot search. Throws
// SingularMetric when a pivot is structurally zero. Intended for the small,
// mostly diagonal metrics of the manifold catalog.
ExprMatrix symbolic_inverse(const ExprMatrix& m);

}  // namespace tubekit
