#include "collage/forward.hpp"

#include "collage/errors.hpp"
#include "collage/quadrature.hpp"

#include <cmath>
#include <tuple>

namespace collage {

MixedSolution solve_forward(const SaddleSystem& system)
{
    const BlockSystem block = build_block(system);
    MixedSolution sol;
    sol.m = system.m;
    const Vector z = solve_dense(block.matrix, block.rhs);
    sol.w = z.head(system.m);
    sol.psi = z.tail(system.m);
    sol.residual = relative_residual(block.matrix, z, block.rhs);
    return sol;
}

MixedSolution solve_forward(int m, const FormCoefficients& coeffs, const TensorPolynomial& f)
{
    return solve_forward(assemble_system(m, coeffs, f));
}

namespace {

// Values of every 1D factor (value or slope) at the quadrature points.
DenseMatrix sample_factors(int kmax, std::span<const double> pts, bool slope)
{
    DenseMatrix out(kmax, static_cast<Eigen::Index>(pts.size()));
    for (int k = 1; k <= kmax; ++k) {
        const BasisFunction1D g(k);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            out(k - 1, static_cast<Eigen::Index>(i)) = slope ? g.derivative(pts[i]) : g(pts[i]);
        }
    }
    return out;
}

// Coefficients arranged as a kmax×kmax matrix indexed by (p, q).
DenseMatrix factor_coefficients(const Vector& c, int kmax)
{
    DenseMatrix out = DenseMatrix::Zero(kmax, kmax);
    for (Eigen::Index n = 0; n < c.size(); ++n) {
        const auto [p, q] = sigma(static_cast<int>(n) + 1);
        out(p - 1, q - 1) += c(n);
    }
    return out;
}

struct SampledField {
    DenseMatrix value;
    DenseMatrix dx;
    DenseMatrix dy;
};

SampledField reconstruct(const Vector& c, int kmax, const DenseMatrix& val, const DenseMatrix& der)
{
    const DenseMatrix coef = factor_coefficients(c, kmax);
    return {val.transpose() * coef * val, der.transpose() * coef * val, val.transpose() * coef * der};
}

DenseMatrix sample_exact(const TensorPolynomial& p, std::span<const double> pts)
{
    const auto n = static_cast<Eigen::Index>(pts.size());
    DenseMatrix out = DenseMatrix::Zero(n, n);
    for (const auto& term : p.terms()) {
        Vector vx(n);
        Vector vy(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            vx(i) = term.x(pts[static_cast<std::size_t>(i)]);
            vy(i) = term.y(pts[static_cast<std::size_t>(i)]);
        }
        out += vx * vy.transpose();
    }
    return out;
}

double weighted_l2(const DenseMatrix& e, const Vector& w)
{
    return std::sqrt(std::max(0.0, w.dot((e.cwiseProduct(e)) * w)));
}

} // namespace

ErrorReport error_norms(const MixedSolution& sol, const TensorPolynomial& psi0, const TensorPolynomial& w0,
                        ErrorQuadrature quad)
{
    const int kmax = max_factor_index(std::max(sol.m, 1));
    const std::vector<double> base = finest_breakpoints(kmax);
    const std::vector<double> breaks = uniform_breaks(static_cast<int>(base.size() - 1) * quad.refinement);
    const CompositeRule rule = composite_rule(breaks, quad.npoints);
    const std::span<const double> pts = rule.points;
    const Vector weights = Eigen::Map<const Vector>(rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size()));

    const DenseMatrix val = sample_factors(kmax, pts, false);
    const DenseMatrix der = sample_factors(kmax, pts, true);

    const auto field_errors = [&](const Vector& coeffs, const TensorPolynomial& exact) {
        const SampledField rec = reconstruct(coeffs, kmax, val, der);
        const DenseMatrix ev = rec.value - sample_exact(exact, pts);
        const DenseMatrix ex = rec.dx - sample_exact(exact.derivative(1, 0), pts);
        const DenseMatrix ey = rec.dy - sample_exact(exact.derivative(0, 1), pts);
        const double l2 = weighted_l2(ev, weights);
        const double h10 = std::hypot(weighted_l2(ex, weights), weighted_l2(ey, weights));
        return std::pair{l2, h10};
    };

    ErrorReport r;
    r.m = sol.m;
    std::tie(r.psi_l2, r.psi_h10) = field_errors(sol.psi, psi0);
    std::tie(r.w_l2, r.w_h10) = field_errors(sol.w, w0);
    return r;
}

ManufacturedProblem ManufacturedProblem::reference(double delta)
{
    ManufacturedProblem p;
    p.delta = delta;
    p.psi0 = reference_psi0();
    p.w0 = -1.0 * laplacian(p.psi0);
    p.f = manufactured_f(p.psi0, delta);
    return p;
}

std::vector<ErrorReport> convergence_table(std::span<const int> m_list, double delta)
{
    if (m_list.empty()) {
        throw DomainError("convergence_table: empty list of dimensions");
    }
    const ManufacturedProblem problem = ManufacturedProblem::reference(delta);
    std::vector<ErrorReport> rows;
    rows.reserve(m_list.size());
    for (int m : m_list) {
        const MixedSolution sol = solve_forward(m, FormCoefficients::direct(delta), problem.f);
        rows.push_back(error_norms(sol, problem.psi0, problem.w0));
    }
    return rows;
}

} // namespace collage
