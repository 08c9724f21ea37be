#include "collage/errors.hpp"
#include "collage/stability.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace collage;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double power_iteration(const DenseMatrix& mass, const DenseMatrix& stiff)
{
    const Eigen::LLT<DenseMatrix> llt(stiff);
    Vector x = Vector::Ones(mass.rows());
    for (int it = 0; it < 3000; ++it) {
        x = llt.solve(mass * x);
        x /= std::sqrt(x.dot(stiff * x));
    }
    return x.dot(mass * x) / x.dot(stiff * x);
}

struct Fixture {
    TensorGrams grams;
    SaddleSystem system;
    MixedSolution sol;
    StabilityReport report;

    Fixture(int m, double delta) : grams(tensor_grams(m))
    {
        const auto p = ManufacturedProblem::reference(delta);
        system = assemble_forms(grams, FormCoefficients::direct(delta));
        const LoadVectors l = assemble_loads(m, p.f);
        system.load_x = l.x;
        system.load_y = l.y;
        sol = solve_forward(system);
        report = compute_constants(system, grams.stiff, grams.stiff);
    }
};

} // namespace

TEST(StabilityFactor, Formula)
{
    EXPECT_DOUBLE_EQ(stability_factor(kInf, 1.0, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(stability_factor(kInf, 0.5, 3.0), std::max(2.0, 3.0 / 0.25));
    // α = 2, β = 1, ‖a‖ = 4: max{1/2, 1·3, 4·3}
    EXPECT_DOUBLE_EQ(stability_factor(2.0, 1.0, 4.0), 12.0);
    EXPECT_EQ(stability_factor(kInf, 0.0, 1.0), kInf);
}

TEST(ComputeConstants, WhitenedBiharmonicBHasUnitInfSup)
{
    for (int m : {1, 9, 25, 81}) {
        const Fixture f(m, 0.25);
        EXPECT_NEAR(f.report.beta, 1.0, 1e-9) << m;
        EXPECT_EQ(f.report.kernel_dim, 0);
        EXPECT_EQ(f.report.alpha, kInf);
        EXPECT_TRUE(f.report.condition_ok);
    }
}

TEST(ComputeConstants, NormCMatchesRayleighOracleAndPoincareBound)
{
    const double poincare = 1.0 / (2.0 * std::numbers::pi * std::numbers::pi);
    for (int m : {9, 25, 49}) {
        for (double delta : {1.0 / 15.0, 0.25}) {
            const Fixture f(m, delta);
            const double oracle = delta * power_iteration(f.grams.mass, f.grams.stiff);
            EXPECT_NEAR(f.report.norm_c, oracle, 1e-10);
            EXPECT_LE(f.report.norm_c, delta * poincare + 1e-3);
        }
    }
}

TEST(ComputeConstants, ZeroPerturbation)
{
    const Fixture f(25, 0.0);
    EXPECT_EQ(f.report.norm_c, 0.0);
    EXPECT_TRUE(f.report.condition_ok);
    EXPECT_DOUBLE_EQ(f.report.collage_factor, f.report.rho);
}

TEST(ComputeConstants, ScalingBScalesBeta)
{
    const TensorGrams g = tensor_grams(16);
    const StabilityReport r = compute_constants(assemble_forms(g, {3.0, 1.0, 0.1}), g.stiff, g.stiff);
    EXPECT_NEAR(r.beta, 3.0, 1e-9);
}

TEST(ComputeConstants, NontrivialKernelYieldsFiniteAlpha)
{
    // Zeroing C1 leaves b ≡ 0, so the whole space is the kernel and α = σ_min of whitened A.
    const TensorGrams g = tensor_grams(4);
    const StabilityReport r = compute_constants(assemble_forms(g, {0.0, 1.0, 0.0}), g.stiff, g.stiff);
    EXPECT_EQ(r.kernel_dim, 4);
    EXPECT_EQ(r.beta, 0.0);
    EXPECT_TRUE(std::isfinite(r.alpha));
    EXPECT_GT(r.alpha, 0.0);
    EXPECT_FALSE(r.condition_ok);
}

TEST(ComputeConstants, PermutationInvariance)
{
    const int m = 9;
    const TensorGrams g = tensor_grams(m);
    const SaddleSystem s = assemble_forms(g, FormCoefficients::direct(0.25));
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(m);
    perm.setIdentity();
    std::mt19937_64 rng(4);
    std::shuffle(perm.indices().data(), perm.indices().data() + m, rng);
    SaddleSystem p = s;
    p.a = perm * s.a * perm.transpose();
    p.b = perm * s.b * perm.transpose();
    p.c = perm * s.c * perm.transpose();
    const DenseMatrix gp = perm * g.stiff * perm.transpose();
    const StabilityReport r0 = compute_constants(s, g.stiff, g.stiff);
    const StabilityReport r1 = compute_constants(p, gp, gp);
    EXPECT_NEAR(r0.beta, r1.beta, 1e-12);
    EXPECT_NEAR(r0.norm_a, r1.norm_a, 1e-12);
    EXPECT_NEAR(r0.norm_c, r1.norm_c, 1e-12);
}

TEST(ComputeConstants, NotSpdGram)
{
    const TensorGrams g = tensor_grams(4);
    EXPECT_THROW(compute_constants(assemble_forms(g, {1, 1, 0}), -g.stiff, g.stiff), NotSpdError);
}

TEST(CollageCheck, ExactGuessHasZeroSides)
{
    const Fixture f(25, 1.0 / 15.0);
    const CollageCheck c = collage_check(f.system, f.sol, f.sol.w, f.sol.psi, f.report, f.grams.stiff, f.grams.stiff);
    EXPECT_LT(c.lhs, 1e-12);
    EXPECT_LT(c.rhs, 1e-10);
    EXPECT_TRUE(c.satisfied);
}

TEST(CollageCheck, ZeroGuessIsBounded)
{
    const Fixture f(25, 0.25);
    const Vector z = Vector::Zero(25);
    const CollageCheck c = collage_check(f.system, f.sol, z, z, f.report, f.grams.stiff, f.grams.stiff);
    EXPECT_GT(c.lhs, 0.0);
    EXPECT_GE(c.rhs, c.lhs);
    EXPECT_TRUE(c.satisfied);
}

TEST(CollageCheck, RandomPerturbationsSatisfyBound)
{
    std::mt19937_64 rng(99);
    std::normal_distribution<double> n;
    for (int m : {9, 25}) {
        for (double delta : {0.0, 1.0 / 15.0, 0.25}) {
            const Fixture f(m, delta);
            for (int t = 0; t < 100; ++t) {
                Vector w = f.sol.w;
                Vector psi = f.sol.psi;
                for (int i = 0; i < m; ++i) {
                    w(i) += 0.1 * n(rng);
                    psi(i) += 0.01 * n(rng);
                }
                const CollageCheck c = collage_check(f.system, f.sol, w, psi, f.report, f.grams.stiff, f.grams.stiff);
                ASSERT_TRUE(c.satisfied) << "m=" << m << " delta=" << delta << " lhs=" << c.lhs << " rhs=" << c.rhs;
            }
        }
    }
}

TEST(CollageCheck, ViolatedConditionThrows)
{
    Fixture f(9, 0.25);
    f.report.condition_ok = false;
    EXPECT_THROW(collage_check(f.system, f.sol, f.sol.w, f.sol.psi, f.report, f.grams.stiff, f.grams.stiff),
                 ConditionViolatedError);
}

TEST(FamilyConstants, InfimaAndSuprema)
{
    const std::vector<FormCoefficients> family{{0.8, 1.0, 0.1}, {1.2, 1.1, 0.3}, {1.0, 0.9, 0.2}};
    const FamilyReport r = family_constants(16, family);
    EXPECT_EQ(r.members, 3u);
    EXPECT_NEAR(r.beta, 0.8, 1e-9);
    EXPECT_LE(r.inf_norm_c, r.sup_norm_c);
    EXPECT_GE(r.rho, 1.0 / 0.8 - 1e-9);
    EXPECT_TRUE(r.condition_ok);
    EXPECT_THROW(family_constants(16, std::span<const FormCoefficients>{}), DomainError);
}
