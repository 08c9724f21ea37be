#pragma once

#include "collage/assembly.hpp"
#include "collage/forward.hpp"

#include <span>
#include <vector>

namespace collage {

/// Discrete stability constants of one member of the mixed family, all
/// measured in the Gram-weighted (H¹₀) geometry.
struct StabilityReport {
    double alpha = 0.0; ///< coercivity of a on the kernel of b; +∞ when the kernel is trivial
    double beta = 0.0;  ///< inf-sup constant of b
    double norm_a = 0.0;
    double norm_c = 0.0;
    double rho = 0.0;
    int kernel_dim = 0;
    bool condition_ok = false;
    /// ρ/(1 − ρ‖c‖); meaningful only when condition_ok.
    double collage_factor = 0.0;
};

/// max{1/α, (1/β)(1+‖a‖/α), (‖a‖/β²)(1+‖a‖/α)}, with 1/∞ = 0.
double stability_factor(double alpha, double beta, double norm_a);

StabilityReport compute_constants(const SaddleSystem& system, const DenseMatrix& gram_e, const DenseMatrix& gram_f);

struct CollageCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual_x = 0.0; ///< dual norm of x* − a(x̂,·) − b(·,ŷ)
    double residual_y = 0.0; ///< dual norm of y* − b(x̂,·) − c(ŷ,·)
    bool satisfied = false;
};

/// Evaluates both sides of the collage bound for a guess (ŵ, ψ̂).
/// Throws ConditionViolatedError if the report does not satisfy ‖c‖ < 1/ρ.
CollageCheck collage_check(const SaddleSystem& system, const MixedSolution& sol, const Vector& w_hat,
                           const Vector& psi_hat, const StabilityReport& report, const DenseMatrix& gram_e,
                           const DenseMatrix& gram_f);

/// Extremal constants over a finite family of coefficient choices.
struct FamilyReport {
    double alpha = 0.0;      ///< inf α_j
    double beta = 0.0;       ///< inf β_j
    double sup_norm_a = 0.0; ///< sup ‖a_j‖
    double inf_norm_c = 0.0; ///< inf ‖c_j‖
    double sup_norm_c = 0.0; ///< sup ‖c_j‖
    double rho = 0.0;        ///< sup_j ρ_j
    bool condition_ok = false; ///< sup ‖c_j‖ < 1/ρ
    std::size_t members = 0;
};

FamilyReport family_constants(int m, std::span<const FormCoefficients> family);

} // namespace collage
