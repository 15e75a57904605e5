#pragma once

// Dense component storage for the small tensors that show up at a single
// chart point, and the pointwise formulas that only need first-order jet data.
//
// Index order is fixed everywhere:
//   Christoffel  (k, i, j)      Γ^k_{ij}, row-major
//   Riemann      (l, k, i, j)   R(∂_i, ∂_j)∂_k = R^l_{kij} ∂_l
//   dg[l](i, j)                 ∂_l g_ij
//   dJ[i](k, j)                 ∂_i J^k_j
//   nabla[i](k, j)              (∇_i J)^k_j

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace tubekit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Point = std::vector<double>;

class Christoffel {
public:
    Christoffel() = default;
    explicit Christoffel(std::size_t n) : n_(n), data_(n * n * n, 0.0) {}

    std::size_t dim() const { return n_; }
    double& operator()(std::size_t k, std::size_t i, std::size_t j) { return data_[(k * n_ + i) * n_ + j]; }
    double operator()(std::size_t k, std::size_t i, std::size_t j) const {
        return data_[(k * n_ + i) * n_ + j];
    }
    const std::vector<double>& data() const { return data_; }

    // Γ(X, Y)^k = Γ^k_{ij} X^i Y^j
    Vector contract(const Vector& x, const Vector& y) const;
    // Matrix A with A(k, i) = Γ^k_{ij} v^j
    Matrix contract_last(const Vector& v) const;
    double max_abs() const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

class Riemann {
public:
    Riemann() = default;
    explicit Riemann(std::size_t n) : n_(n), data_(n * n * n * n, 0.0) {}

    std::size_t dim() const { return n_; }
    double& operator()(std::size_t l, std::size_t k, std::size_t i, std::size_t j) {
        return data_[((l * n_ + k) * n_ + i) * n_ + j];
    }
    double operator()(std::size_t l, std::size_t k, std::size_t i, std::size_t j) const {
        return data_[((l * n_ + k) * n_ + i) * n_ + j];
    }
    const std::vector<double>& data() const { return data_; }

    // R(X, Y)Z
    Vector apply(const Vector& x, const Vector& y, const Vector& z) const;
    double max_abs() const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct MetricJet {
    Matrix g;
    std::vector<Matrix> dg;
};

struct AcsJet {
    Matrix J;
    std::vector<Matrix> dJ;
};

// Metric, almost complex structure and connection at one point; everything
// the Hermitian analysis needs.
struct StructureJet {
    MetricJet metric;
    AcsJet acs;
    Christoffel gamma;
};

// Solves  g_lk Γ^l_{ij} = ½(∂_i g_kj + ∂_j g_ik − ∂_k g_ij)  by Cholesky.
// Throws SingularMetric when g is not positive definite.
Christoffel christoffel_from_jet(const MetricJet& jet);

// Lowered symbols Γ_{k,ij} = ½(∂_i g_kj + ∂_j g_ik − ∂_k g_ij).
Christoffel christoffel_first_kind(const MetricJet& jet);

// (∇_i J)^k_j = ∂_i J^k_j + Γ^k_{il} J^l_j − Γ^l_{ij} J^k_l
std::vector<Matrix> covariant_derivative_11(const AcsJet& acs, const Christoffel& gamma);

// (∇_l T)_{ij} = ∂_l T_ij − Γ^m_{li} T_mj − Γ^m_{lj} T_im
std::vector<Matrix> covariant_derivative_02(const MetricJet& field, const Christoffel& gamma);

// R^l_{kij} from Γ and its first derivatives dgamma[m] = ∂_m Γ.
Riemann riemann_from(const Christoffel& gamma, const std::vector<Christoffel>& dgamma);

// ‖A^T G A − I‖_max
double gram_residual(const Matrix& frame, const Matrix& g);

}  // namespace tubekit
