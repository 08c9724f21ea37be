#pragma once

#include <Eigen/Dense>

namespace collage {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// LU with partial pivoting. Throws SingularMatrixError when a pivot falls
/// below 1e-14·‖A‖∞.
Vector solve_dense(const DenseMatrix& a, const Vector& rhs);

/// ‖A z − rhs‖∞ / (‖A‖∞‖z‖∞ + ‖rhs‖∞)
double relative_residual(const DenseMatrix& a, const Vector& z, const Vector& rhs);

double smallest_singular_value(const DenseMatrix& a);
double largest_singular_value(const DenseMatrix& a);

/// Orthonormal basis (columns) of the right null space {x : A x = 0},
/// cut at singular values ≤ rel_tol·σ_max. A zero matrix has the full space as kernel.
DenseMatrix null_space(const DenseMatrix& a, double rel_tol = 1e-10);

/// Cholesky factorisation G = L Lᵀ of an SPD matrix.
class SpdFactor {
public:
    explicit SpdFactor(const DenseMatrix& g);

    [[nodiscard]] Eigen::Index size() const { return llt_.rows(); }
    /// L⁻¹ r
    [[nodiscard]] Vector whiten(const Vector& r) const;
    /// L⁻¹ M
    [[nodiscard]] DenseMatrix whiten_rows(const DenseMatrix& m) const;
    /// L⁻¹ M L⁻ᵀ, the matrix of the bilinear form in the orthonormalised basis.
    [[nodiscard]] DenseMatrix congruence(const DenseMatrix& m) const;
    /// √(rᵀ G⁻¹ r)
    [[nodiscard]] double dual_norm(const Vector& r) const;
    /// √(xᵀ G x)
    [[nodiscard]] double primal_norm(const Vector& x) const;

private:
    Eigen::LLT<DenseMatrix> llt_;
};

/// √(rᵀ G⁻¹ r) via Cholesky; throws NotSpdError.
double spd_inverse_quadratic(const DenseMatrix& g, const Vector& r);

} // namespace collage
