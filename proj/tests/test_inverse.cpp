#include "collage/errors.hpp"
#include "collage/inverse.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

using namespace collage;

namespace {

Polynomial1D bump() { return Polynomial1D({0.0, 1.0, -1.0}); } // t(1−t)

TensorPolynomial reference_load(double c3) { return manufactured_f(reference_psi0(), c3); }

TargetPair clean_target(WMode mode, InterpolationKind kind = InterpolationKind::lagrange)
{
    TargetOptions o;
    o.w_mode = mode;
    o.interpolation = kind;
    return make_target(reference_psi0(), o);
}

} // namespace

TEST(NodalBasis, KroneckerAtNodes)
{
    for (auto kind : {InterpolationKind::lagrange, InterpolationKind::bilinear}) {
        const NodalBasis1D b(9, kind);
        for (int a = 1; a <= 9; ++a) {
            for (int c = 0; c <= 10; ++c) {
                EXPECT_NEAR(b.value(a, c / 10.0), a == c ? 1.0 : 0.0, 1e-12) << to_string(kind);
            }
        }
    }
}

TEST(NodalBasis, DerivativeMatchesCentralDifference)
{
    const NodalBasis1D b(7, InterpolationKind::lagrange);
    const double eps = 1e-6;
    for (int a = 1; a <= 7; ++a) {
        for (double t : {0.03, 0.31, 0.5, 0.93}) {
            const double fd = (b.value(a, t + eps) - b.value(a, t - eps)) / (2 * eps);
            EXPECT_NEAR(b.derivative(a, t), fd, 1e-6);
        }
        // At a node the product rule must avoid the removable 0/0.
        EXPECT_TRUE(std::isfinite(b.derivative(a, a / 8.0)));
    }
    const NodalBasis1D hats(4, InterpolationKind::bilinear);
    EXPECT_NEAR(hats.derivative(2, 0.3), 5.0, 1e-12);
    EXPECT_NEAR(hats.derivative(2, 0.5), -5.0, 1e-12);
}

TEST(MakeTarget, NodeValueAtCentre)
{
    for (auto kind : {InterpolationKind::lagrange, InterpolationKind::bilinear}) {
        const TargetPair t = clean_target(WMode::analytic, kind);
        EXPECT_NEAR(t.u_hat(0.5, 0.5), 0.0152587890625, 1e-15);
        EXPECT_NEAR(t.w_hat(0.5, 0.5), 0.9765625, 1e-13);
        EXPECT_EQ(t.u_hat.samples.values.rows(), 9);
    }
}

TEST(MakeTarget, LagrangeInterpolantIsExactForReference)
{
    const TargetPair t = clean_target(WMode::analytic);
    const TensorPolynomial psi0 = reference_psi0();
    const TensorPolynomial w0 = -1.0 * laplacian(psi0);
    for (double x : {0.013, 0.27, 0.55, 0.96}) {
        for (double y : {0.05, 0.44, 0.71}) {
            EXPECT_NEAR(t.u_hat(x, y), psi0(x, y), 1e-12);
            EXPECT_NEAR(t.w_hat(x, y), w0(x, y), 1e-10);
        }
    }
}

TEST(MakeTarget, BilinearIsPiecewiseLinearBetweenNodes)
{
    const TargetPair t = clean_target(WMode::analytic, InterpolationKind::bilinear);
    const double mid = t.u_hat(0.45, 0.5);
    EXPECT_NEAR(mid, 0.5 * (t.u_hat(0.4, 0.5) + t.u_hat(0.5, 0.5)), 1e-15);
    EXPECT_EQ(t.u_hat(0.0, 0.3), 0.0);
}

TEST(MakeTarget, NoiseIsBoundedRelativeAndSeeded)
{
    TargetOptions o;
    o.noise_level = 0.02;
    o.seed = 42;
    o.w_mode = WMode::analytic;
    const TargetPair clean = clean_target(WMode::analytic);
    const TargetPair a = make_target(reference_psi0(), o);
    const TargetPair b = make_target(reference_psi0(), o);
    EXPECT_EQ(a.u_hat.samples.values, b.u_hat.samples.values);
    EXPECT_EQ(a.w_hat.samples.values, b.w_hat.samples.values);
    const DenseMatrix ratio = a.u_hat.samples.values.cwiseQuotient(clean.u_hat.samples.values);
    EXPECT_LE((ratio.array() - 1.0).abs().maxCoeff(), 0.02);
    EXPECT_GT((ratio.array() - 1.0).abs().maxCoeff(), 0.0);
    o.seed = 43;
    EXPECT_NE(make_target(reference_psi0(), o).u_hat.samples.values, a.u_hat.samples.values);
}

TEST(MakeTarget, InvalidArguments)
{
    EXPECT_THROW(make_target(reference_psi0(), 1, 0.0, 0, WMode::analytic), DomainError);
    EXPECT_THROW(make_target(reference_psi0(), 9, -0.1, 0, WMode::analytic), DomainError);
}

TEST(FiniteDifference, SecondOrderExactForQuadratics)
{
    // u = x(1−x)·y(1−y): −Δu = 2y(1−y) + 2x(1−x).
    const int n = 6;
    const double h = 1.0 / (n + 1);
    DenseMatrix u(n, n);
    DenseMatrix expect(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x = (i + 1) * h;
            const double y = (j + 1) * h;
            u(i, j) = bump()(x) * bump()(y);
            expect(i, j) = 2 * bump()(y) + 2 * bump()(x);
        }
    }
    EXPECT_LE((finite_difference_laplacian(u, h, FdStencil::second_order) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FiniteDifference, FourthOrderExactForQuintics)
{
    // u = (x⁵ − x)·y(1−y): −Δu = −20x³·y(1−y) + 2(x⁵ − x).
    const Polynomial1D p({0.0, -1.0, 0.0, 0.0, 0.0, 1.0});
    const int n = 9;
    const double h = 1.0 / (n + 1);
    DenseMatrix u(n, n);
    DenseMatrix expect(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double x = (i + 1) * h;
            const double y = (j + 1) * h;
            u(i, j) = p(x) * bump()(y);
            expect(i, j) = -p.derivative(2)(x) * bump()(y) + 2.0 * p(x);
        }
    }
    EXPECT_LE((finite_difference_laplacian(u, h, FdStencil::fourth_order) - expect).cwiseAbs().maxCoeff(), 1e-11);
    EXPECT_THROW(finite_difference_laplacian(DenseMatrix::Zero(4, 4), 0.2, FdStencil::fourth_order), DomainError);
    EXPECT_THROW(finite_difference_laplacian(DenseMatrix::Zero(4, 3), 0.2, FdStencil::second_order),
                 DimensionMismatch);
}

TEST(FiniteDifference, FourthOrderConvergesFaster)
{
    const TensorPolynomial psi0 = reference_psi0();
    const TensorPolynomial w0 = -1.0 * laplacian(psi0);
    std::array<double, 2> err2{};
    std::array<double, 2> err4{};
    const std::array<int, 2> grids{9, 19};
    for (std::size_t g = 0; g < 2; ++g) {
        const int n = grids[g];
        const double h = 1.0 / (n + 1);
        DenseMatrix u(n, n);
        DenseMatrix w(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                u(i, j) = psi0((i + 1) * h, (j + 1) * h);
                w(i, j) = w0((i + 1) * h, (j + 1) * h);
            }
        }
        err2[g] = (finite_difference_laplacian(u, h, FdStencil::second_order) - w).cwiseAbs().maxCoeff();
        err4[g] = (finite_difference_laplacian(u, h, FdStencil::fourth_order) - w).cwiseAbs().maxCoeff();
    }
    EXPECT_LT(err4[0], err2[0]);
    EXPECT_GT(err2[0] / err2[1], 3.0);
    EXPECT_GT(err4[0] / err4[1], err2[0] / err2[1]);
}

TEST(TestSpace, HatGrams)
{
    const TestSpace s(4);
    const double h = 0.2;
    EXPECT_NEAR(s.mass_1d()(1, 1), 4.0 * h / 6.0, 1e-15);
    EXPECT_NEAR(s.mass_1d()(1, 2), h / 6.0, 1e-15);
    EXPECT_NEAR(s.stiff_1d()(1, 1), 2.0 / h, 1e-12);
    EXPECT_NEAR(s.stiff_1d()(1, 2), -1.0 / h, 1e-12);
    EXPECT_EQ(s.mass_1d()(0, 3), 0.0);
    EXPECT_LE((s.cross_mass(s.hats()) - s.mass_1d()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((s.cross_stiff(s.hats()) - s.stiff_1d()).cwiseAbs().maxCoeff(), 1e-12);
    const DenseMatrix g = s.dirichlet_gram();
    EXPECT_EQ(g.rows(), 16);
    EXPECT_LE((g - g.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_THROW(TestSpace(1), DomainError);
}

TEST(TestSpace, LoadOfConstant)
{
    const TestSpace s(9);
    const auto one = TensorPolynomial::separable(Polynomial1D::constant(1.0), Polynomial1D::constant(1.0));
    const Vector l = s.load(one);
    for (Eigen::Index i = 0; i < l.size(); ++i) {
        EXPECT_NEAR(l(i), 0.01, 1e-15);
    }
}

TEST(DualNorm, MatchesDirectGramInverse)
{
    const TestSpace s(7);
    const DualNorm riesz(s, DualNormKind::riesz);
    const DualNorm plain(s, DualNormKind::euclidean);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n;
    Vector r(s.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        r(i) = n(rng);
    }
    EXPECT_NEAR(riesz(r), spd_inverse_quadratic(s.dirichlet_gram(), r), 1e-12 * riesz(r));
    EXPECT_NEAR(plain(r), r.norm(), 1e-14);
    EXPECT_THROW((void)riesz(Vector::Zero(3)), DimensionMismatch);
}

TEST(DualNorm, InvariantUnderSwappingTestOrdering)
{
    // Relabelling i·n+j → j·n+i permutes both the functional and the Gram.
    const int n = 6;
    const TestSpace s(n);
    const DenseMatrix g = s.dirichlet_gram();
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(n * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            perm.indices()(i * n + j) = j * n + i;
        }
    }
    const Vector r = Vector::LinSpaced(n * n, -1.0, 3.0);
    const double a = spd_inverse_quadratic(g, r);
    const double b = spd_inverse_quadratic(perm * g * perm.transpose(), perm * r);
    EXPECT_NEAR(a, b, 1e-12 * a);
    EXPECT_NEAR(DualNorm(s, DualNormKind::riesz)(r), a, 1e-12 * a);
}

TEST(CollageObjective, AffineInCoefficients)
{
    const ResidualModel model(clean_target(WMode::finite_difference), reference_load(0.25), 9);
    const FormCoefficients p{0.3, 1.7, -2.0};
    const FormCoefficients q{1.1, -0.4, 5.0};
    const double t = 0.37;
    const FormCoefficients mix{t * p.c1 + (1 - t) * q.c1, t * p.c2 + (1 - t) * q.c2, t * p.c3 + (1 - t) * q.c3};
    const auto rp = model.residuals(p);
    const auto rq = model.residuals(q);
    const auto rm = model.residuals(mix);
    EXPECT_LE((rm.r1 - (t * rp.r1 + (1 - t) * rq.r1)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE((rm.r2 - (t * rp.r2 + (1 - t) * rq.r2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CollageObjective, ZeroCoefficientsLeaveLoadTerm)
{
    const ResidualModel model(clean_target(WMode::analytic), reference_load(0.25), 9);
    const CollageObjective o = collage_objective(model, {0.0, 0.0, 0.0});
    EXPECT_EQ(o.r1_norm, 0.0);
    EXPECT_NEAR(o.xi, model.norm()(model.load()), 1e-14);
    EXPECT_GT(o.xi, 0.0);
}

TEST(CollageObjective, TrueCoefficientsAreNearlyOptimal)
{
    const TargetPair t = clean_target(WMode::analytic);
    const TensorPolynomial f = reference_load(0.25);
    const double at_truth = collage_objective(t, {1.0, 1.0, 0.25}, f, 9).xi;
    EXPECT_LT(at_truth, 1e-10);
    for (const FormCoefficients& c : {FormCoefficients{1.01, 1.0, 0.25}, FormCoefficients{1.0, 0.99, 0.25},
                                      FormCoefficients{1.0, 1.0, 0.5}}) {
        EXPECT_GT(collage_objective(t, c, f, 9).xi, at_truth);
    }
}

TEST(Estimate, AnalyticRecovery)
{
    for (int nt : {9, 19}) {
        const CollageEstimate e = estimate_parameters(clean_target(WMode::analytic), reference_load(0.25), nt);
        EXPECT_LT(std::abs(e.coeffs.c1 - 1.0), 1e-3);
        EXPECT_LT(std::abs(e.coeffs.c2 - 1.0), 1e-3);
        EXPECT_LT(std::abs(e.coeffs.c3 - 0.25), 1e-2);
        EXPECT_FALSE(e.clipped);
    }
}

TEST(Estimate, MinimisesSquaredResidual)
{
    TargetOptions o;
    o.w_mode = WMode::finite_difference;
    o.noise_level = 0.01;
    o.seed = 3;
    const ResidualModel model(make_target(reference_psi0(), o), reference_load(0.25), 9);
    const CollageEstimate e = estimate_parameters(model);
    const double best = squared_residual(model, e.coeffs);
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n;
    for (int t = 0; t < 200; ++t) {
        const double s = std::pow(10.0, -3.0 + 3.0 * (t % 4) / 3.0);
        const FormCoefficients c{e.coeffs.c1 + s * n(rng), e.coeffs.c2 + s * n(rng), e.coeffs.c3 + 100 * s * n(rng)};
        EXPECT_GE(squared_residual(model, c), best * (1.0 - 1e-12));
    }
    const CollageObjective at = collage_objective(model, e.coeffs);
    EXPECT_NEAR(e.collage_distance, at.xi, 1e-14);
    EXPECT_NEAR(e.residual_split.first + e.residual_split.second, e.collage_distance, 1e-14);
}

TEST(Estimate, ScaleConsistency)
{
    // Scaling data and load together leaves the coefficients unchanged.
    TargetOptions o;
    o.w_mode = WMode::finite_difference;
    const TensorPolynomial psi0 = reference_psi0();
    const CollageEstimate a = estimate_parameters(make_target(psi0, o), reference_load(0.25), 9);
    const CollageEstimate b = estimate_parameters(make_target(3.0 * psi0, o), 3.0 * reference_load(0.25), 9);
    EXPECT_NEAR(a.coeffs.c1, b.coeffs.c1, 1e-9);
    EXPECT_NEAR(a.coeffs.c2, b.coeffs.c2, 1e-9);
    EXPECT_NEAR(a.coeffs.c3, b.coeffs.c3, 1e-6);
    EXPECT_NEAR(b.collage_distance, 3.0 * a.collage_distance, 1e-9);
}

TEST(Estimate, DegenerateTargetIsRankDeficient)
{
    TargetOptions o;
    o.w_mode = WMode::analytic;
    const TargetPair zero = make_target(TensorPolynomial{}, o);
    EXPECT_THROW(estimate_parameters(zero, reference_load(0.25), 9), RankDeficientError);
}

TEST(Estimate, BoxClipsAndFlags)
{
    const ParameterBox box{{0.0, 0.0, 0.3}, {2.0, 2.0, 1.0}};
    const CollageEstimate e = estimate_parameters(clean_target(WMode::analytic), reference_load(0.25), 9, box);
    EXPECT_TRUE(e.clipped);
    EXPECT_DOUBLE_EQ(e.coeffs.c3, 0.3);
}

TEST(Estimate, FiniteDifferenceIsWorseThanAnalytic)
{
    const TensorPolynomial f = reference_load(0.25);
    const CollageEstimate fd = estimate_parameters(clean_target(WMode::finite_difference), f, 9);
    const CollageEstimate an = estimate_parameters(clean_target(WMode::analytic), f, 9);
    EXPECT_GT(std::abs(fd.coeffs.c3 - 0.25), std::abs(an.coeffs.c3 - 0.25));
    EXPECT_GT(fd.collage_distance, an.collage_distance);
}

TEST(NoiseSweep, DeterministicAndStatistics)
{
    InverseConfig c;
    const std::array<double, 2> twice{0.0, 0.0};
    const auto rows = noise_sweep(twice, 3, 5, c);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].mean, rows[1].mean);
    EXPECT_EQ(rows[0].mean_distance, rows[1].mean_distance);
    EXPECT_LT(rows[0].stddev.c3, 1e-10);

    const std::array<double, 3> levels{0.0, 0.01, 0.02};
    const auto a = noise_sweep(levels, 4, 11, c);
    const auto b = noise_sweep(levels, 4, 11, c);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        EXPECT_EQ(a[i].mean, b[i].mean);
        EXPECT_EQ(a[i].stddev, b[i].stddev);
        EXPECT_EQ(a[i].trials, 4);
        EXPECT_EQ(a[i].estimates.size(), 4u);
    }
    EXPECT_GT(a[2].stddev.c3, 0.0);
    EXPECT_THROW(noise_sweep(std::span<const double>{}, 1, 0, c), DomainError);
    EXPECT_THROW(noise_sweep(levels, 0, 0, c), DomainError);
}

TEST(NoiseSweep, TrialSeedsAreDistinct)
{
    EXPECT_NE(trial_seed(7, 0), trial_seed(7, 1));
    EXPECT_NE(trial_seed(7, 0), trial_seed(8, 0));
    EXPECT_EQ(trial_seed(7, 3), trial_seed(7, 3));
}

TEST(NoiseSweep, LargeNoiseIsNotClamped)
{
    InverseConfig c;
    const std::array<double, 1> level{0.02};
    const auto rows = noise_sweep(level, 5, 7, c);
    for (const auto& e : rows[0].estimates) {
        EXPECT_FALSE(e.clipped);
    }
}
