#include "collage/stability.hpp"

#include "collage/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace collage {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kKernelTolerance = 1e-10;

} // namespace

double stability_factor(double alpha, double beta, double norm_a)
{
    if (!(beta > 0.0) || !(alpha > 0.0)) {
        return kInf;
    }
    const double inv_alpha = std::isinf(alpha) ? 0.0 : 1.0 / alpha;
    const double growth = 1.0 + norm_a * inv_alpha;
    return std::max({inv_alpha, growth / beta, norm_a * growth / (beta * beta)});
}

StabilityReport compute_constants(const SaddleSystem& system, const DenseMatrix& gram_e, const DenseMatrix& gram_f)
{
    const SpdFactor le(gram_e);
    const SpdFactor lf(gram_f);
    if (le.size() != system.a.rows() || lf.size() != system.b.rows()) {
        throw DimensionMismatch("compute_constants: Gram sizes differ from the system");
    }

    // b(x, y) = yᵀ B x; in orthonormal coordinates B̃ = L_F⁻¹ B L_E⁻ᵀ.
    const DenseMatrix b_white = lf.whiten_rows(le.whiten_rows(system.b.transpose()).transpose());
    const DenseMatrix a_white = le.congruence(system.a);
    const DenseMatrix c_white = lf.congruence(system.c);

    StabilityReport r;
    r.beta = smallest_singular_value(b_white);
    r.norm_a = largest_singular_value(a_white);
    r.norm_c = largest_singular_value(c_white);

    const DenseMatrix kernel = null_space(b_white, kKernelTolerance);
    r.kernel_dim = static_cast<int>(kernel.cols());
    if (kernel.cols() == 0) {
        r.alpha = kInf;
    } else {
        r.alpha = smallest_singular_value(kernel.transpose() * a_white * kernel);
    }

    r.rho = stability_factor(r.alpha, r.beta, r.norm_a);
    r.condition_ok = std::isfinite(r.rho) && r.rho * r.norm_c < 1.0;
    r.collage_factor = r.condition_ok ? r.rho / (1.0 - r.rho * r.norm_c) : kInf;
    return r;
}

CollageCheck collage_check(const SaddleSystem& system, const MixedSolution& sol, const Vector& w_hat,
                           const Vector& psi_hat, const StabilityReport& report, const DenseMatrix& gram_e,
                           const DenseMatrix& gram_f)
{
    if (!report.condition_ok) {
        throw ConditionViolatedError("collage_check: ‖c‖ < 1/ρ does not hold");
    }
    const SpdFactor le(gram_e);
    const SpdFactor lf(gram_f);

    const Vector r1 = system.load_x - system.a * w_hat - system.b.transpose() * psi_hat;
    const Vector r2 = system.load_y - system.b * w_hat - system.c * psi_hat;

    CollageCheck out;
    out.lhs = std::max(le.primal_norm(sol.w - w_hat), lf.primal_norm(sol.psi - psi_hat));
    out.residual_x = le.dual_norm(r1);
    out.residual_y = lf.dual_norm(r2);
    out.rhs = report.collage_factor * (out.residual_x + out.residual_y);
    out.satisfied = out.lhs <= out.rhs * (1.0 + 1e-9);
    return out;
}

FamilyReport family_constants(int m, std::span<const FormCoefficients> family)
{
    if (family.empty()) {
        throw DomainError("family_constants: empty family");
    }
    const TensorGrams grams = tensor_grams(m);
    FamilyReport f;
    f.alpha = kInf;
    f.beta = kInf;
    f.inf_norm_c = kInf;
    for (const FormCoefficients& c : family) {
        const StabilityReport r = compute_constants(assemble_forms(grams, c), grams.stiff, grams.stiff);
        f.alpha = std::min(f.alpha, r.alpha);
        f.beta = std::min(f.beta, r.beta);
        f.sup_norm_a = std::max(f.sup_norm_a, r.norm_a);
        f.inf_norm_c = std::min(f.inf_norm_c, r.norm_c);
        f.sup_norm_c = std::max(f.sup_norm_c, r.norm_c);
        f.rho = std::max(f.rho, r.rho);
    }
    f.members = family.size();
    f.condition_ok = std::isfinite(f.rho) && f.rho * f.sup_norm_c < 1.0;
    return f;
}

} // namespace collage
