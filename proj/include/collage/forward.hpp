#pragma once

#include "collage/assembly.hpp"

#include <span>
#include <vector>

namespace collage {

/// Galerkin solution (w_m, ψ_m) as coefficient vectors in {G0_n}.
struct MixedSolution {
    int m = 0;
    Vector w;
    Vector psi;
    /// Relative block residual of the solve.
    double residual = 0.0;
};

MixedSolution solve_forward(const SaddleSystem& system);
MixedSolution solve_forward(int m, const FormCoefficients& coeffs, const TensorPolynomial& f);

struct ErrorReport {
    int m = 0;
    double psi_l2 = 0.0;
    double psi_h10 = 0.0;
    double w_l2 = 0.0;
    double w_h10 = 0.0;
};

struct ErrorQuadrature {
    /// Each finest-level dyadic cell is split into this many panels.
    int refinement = 1;
    int npoints = 6;
};

/// L² and Dirichlet-seminorm errors of the reconstructed fields against the
/// exact pair, by Gauss quadrature on the finest dyadic cells of the basis.
ErrorReport error_norms(const MixedSolution& sol, const TensorPolynomial& psi0, const TensorPolynomial& w0,
                        ErrorQuadrature quad = {});

/// The manufactured biharmonic problem: ψ₀, w₀ = −Δψ₀, f = Δ²ψ₀ + δψ₀.
struct ManufacturedProblem {
    double delta = 0.0;
    TensorPolynomial psi0;
    TensorPolynomial w0;
    TensorPolynomial f;

    static ManufacturedProblem reference(double delta);
};

std::vector<ErrorReport> convergence_table(std::span<const int> m_list, double delta);

} // namespace collage
