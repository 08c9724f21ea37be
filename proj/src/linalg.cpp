#include "collage/linalg.hpp"

#include "collage/errors.hpp"

#include <cmath>

namespace collage {

namespace {

double inf_norm(const DenseMatrix& a)
{
    return a.size() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
}

const DenseMatrix& require_square(const DenseMatrix& g)
{
    if (g.rows() != g.cols()) {
        throw DimensionMismatch("SpdFactor: Gram matrix must be square");
    }
    return g;
}

} // namespace

Vector solve_dense(const DenseMatrix& a, const Vector& rhs)
{
    if (a.rows() != a.cols()) {
        throw DimensionMismatch("solve_dense: matrix must be square");
    }
    if (rhs.size() != a.rows()) {
        throw DimensionMismatch("solve_dense: rhs length differs from matrix size");
    }
    const Eigen::PartialPivLU<DenseMatrix> lu(a);
    const double threshold = 1e-14 * inf_norm(a);
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    if (a.rows() > 0 && (pivots.minCoeff() <= threshold || !std::isfinite(pivots.sum()))) {
        throw SingularMatrixError("solve_dense: pivot below 1e-14·‖A‖∞");
    }
    return lu.solve(rhs);
}

double relative_residual(const DenseMatrix& a, const Vector& z, const Vector& rhs)
{
    const double num = (a * z - rhs).cwiseAbs().maxCoeff();
    const double den = inf_norm(a) * z.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff();
    return den == 0.0 ? num : num / den;
}

double smallest_singular_value(const DenseMatrix& a)
{
    if (a.size() == 0) {
        return 0.0;
    }
    const Eigen::JacobiSVD<DenseMatrix> svd(a);
    return svd.singularValues().minCoeff();
}

double largest_singular_value(const DenseMatrix& a)
{
    if (a.size() == 0) {
        return 0.0;
    }
    const Eigen::JacobiSVD<DenseMatrix> svd(a);
    return svd.singularValues().maxCoeff();
}

DenseMatrix null_space(const DenseMatrix& a, double rel_tol)
{
    const Eigen::JacobiSVD<DenseMatrix> svd(a, Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    const double smax = s.size() > 0 ? s.maxCoeff() : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > rel_tol * smax) {
            ++rank;
        }
    }
    const Eigen::Index n = a.cols();
    return svd.matrixV().rightCols(n - rank);
}

SpdFactor::SpdFactor(const DenseMatrix& g) : llt_(require_square(g))
{
    if (llt_.info() != Eigen::Success) {
        throw NotSpdError("SpdFactor: Cholesky factorisation failed");
    }
    const auto diag = DenseMatrix(llt_.matrixL()).diagonal();
    if (g.rows() > 0 && !(diag.minCoeff() > 0.0)) {
        throw NotSpdError("SpdFactor: matrix is not positive definite");
    }
}

Vector SpdFactor::whiten(const Vector& r) const
{
    if (r.size() != size()) {
        throw DimensionMismatch("SpdFactor::whiten: length mismatch");
    }
    return llt_.matrixL().solve(r);
}

DenseMatrix SpdFactor::whiten_rows(const DenseMatrix& m) const { return llt_.matrixL().solve(m); }

DenseMatrix SpdFactor::congruence(const DenseMatrix& m) const
{
    const DenseMatrix left = llt_.matrixL().solve(m);
    return llt_.matrixL().solve(left.transpose()).transpose();
}

double SpdFactor::dual_norm(const Vector& r) const { return whiten(r).norm(); }

double SpdFactor::primal_norm(const Vector& x) const
{
    if (x.size() != size()) {
        throw DimensionMismatch("SpdFactor::primal_norm: length mismatch");
    }
    // ‖Lᵀx‖ avoids forming xᵀGx.
    return (llt_.matrixU() * x).norm();
}

double spd_inverse_quadratic(const DenseMatrix& g, const Vector& r) { return SpdFactor(g).dual_norm(r); }

} // namespace collage
