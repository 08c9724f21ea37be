#pragma once

#include "collage/assembly.hpp"
#include "collage/linalg.hpp"
#include "collage/polynomials.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace collage {

enum class WMode { analytic, finite_difference };
enum class InterpolationKind { lagrange, bilinear };
enum class FdStencil { second_order, fourth_order };
enum class NoiseDistribution { uniform, gaussian };
enum class DualNormKind { riesz, euclidean };

std::string_view to_string(WMode m);
std::string_view to_string(InterpolationKind k);
std::string_view to_string(FdStencil s);
std::string_view to_string(NoiseDistribution d);
std::string_view to_string(DualNormKind k);

/// Samples on the interior nodes (i h, j h), 1 <= i,j <= n, h = 1/(n+1).
/// values(i-1, j-1) is the sample at (i h, j h); the boundary ring is zero.
struct SampledField {
    int grid_n = 0;
    DenseMatrix values;

    [[nodiscard]] double spacing() const { return 1.0 / (grid_n + 1); }
};

/// Tensor-product nodal basis on the uniform node set {0, h, ..., 1}
/// restricted to interior nodes, so every member vanishes at 0 and 1.
class NodalBasis1D {
public:
    NodalBasis1D(int interior_nodes, InterpolationKind kind);

    [[nodiscard]] int size() const { return n_; }
    [[nodiscard]] InterpolationKind kind() const { return kind_; }
    /// Points where the members may lose smoothness; always includes 0 and 1.
    [[nodiscard]] const std::vector<double>& breakpoints() const { return breaks_; }

    /// Value / derivative of the member attached to interior node a (1-based).
    [[nodiscard]] double value(int a, double t) const;
    [[nodiscard]] double derivative(int a, double t) const;

private:
    int n_;
    InterpolationKind kind_;
    std::vector<double> nodes_; ///< includes the two boundary nodes
    std::vector<double> breaks_;
};

/// Interpolant of a SampledField in a NodalBasis1D ⊗ NodalBasis1D space.
struct InterpolatedField {
    SampledField samples;
    NodalBasis1D basis;

    [[nodiscard]] double operator()(double x, double y) const;
};

struct TargetPair {
    InterpolatedField u_hat;
    InterpolatedField w_hat;
    WMode w_mode = WMode::analytic;
};

struct TargetOptions {
    int grid_n = 9;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
    WMode w_mode = WMode::analytic;
    InterpolationKind interpolation = InterpolationKind::lagrange;
    FdStencil fd_stencil = FdStencil::fourth_order;
    NoiseDistribution noise = NoiseDistribution::uniform;
};

/// Discrete −Δ of interior samples with zero Dirichlet boundary.
DenseMatrix finite_difference_laplacian(const DenseMatrix& u, double h, FdStencil stencil);

TargetPair make_target(const TensorPolynomial& psi0, const TargetOptions& options);
TargetPair make_target(const TensorPolynomial& psi0, int grid_n, double noise_level, std::uint64_t seed,
                       WMode w_mode);

/// Uniform P1 hats in each direction with n interior nodes, tensorised.
/// 2D test functions are ordered i·n + j, i the x-index.
class TestSpace {
public:
    explicit TestSpace(int interior_nodes);

    [[nodiscard]] int per_axis() const { return n_; }
    [[nodiscard]] int size() const { return n_ * n_; }
    [[nodiscard]] const NodalBasis1D& hats() const { return hats_; }
    [[nodiscard]] const DenseMatrix& mass_1d() const { return mass_; }
    [[nodiscard]] const DenseMatrix& stiff_1d() const { return stiff_; }

    /// Assembled Dirichlet Gram K⊗M + M⊗K (dense, size n²).
    [[nodiscard]] DenseMatrix dirichlet_gram() const;
    /// ∫ f φ_i for every test function, 6-point Gauss on the support cells.
    [[nodiscard]] Vector load(const TensorPolynomial& f) const;

    /// Cross mass / stiffness matrices against a nodal basis: entry (i, a)
    /// is ∫ φ_i ψ_a or ∫ φ_i' ψ_a'.
    [[nodiscard]] DenseMatrix cross_mass(const NodalBasis1D& other) const;
    [[nodiscard]] DenseMatrix cross_stiff(const NodalBasis1D& other) const;

private:
    int n_;
    NodalBasis1D hats_;
    DenseMatrix mass_;
    DenseMatrix stiff_;
};

/// Map W with WᵀW = G⁻¹, so that the dual norm of r is ‖W r‖.
class DualNorm {
public:
    DualNorm(const TestSpace& space, DualNormKind kind);

    [[nodiscard]] DualNormKind kind() const { return kind_; }
    [[nodiscard]] Vector whiten(const Vector& r) const;
    [[nodiscard]] double operator()(const Vector& r) const { return whiten(r).norm(); }

private:
    DualNormKind kind_;
    int n_;
    // Generalised eigenpairs of the 1D pencil (K, M): VᵀMV = I, VᵀKV = Λ.
    DenseMatrix eigvecs_;
    Vector eigvals_;
};

/// Residual functionals of the collage objective against a fixed target.
/// Both are affine in (C1, C2, C3):
///   r1 = C1·S ψ̂ − C2·M ŵ
///   r2 = −F + C1·S ŵ + C3·M ψ̂
class ResidualModel {
public:
    ResidualModel(const TargetPair& target, const TensorPolynomial& f, int test_grid_n,
                  DualNormKind norm = DualNormKind::riesz);

    struct Residuals {
        Vector r1;
        Vector r2;
    };

    [[nodiscard]] Residuals residuals(const FormCoefficients& c) const;
    [[nodiscard]] const TestSpace& space() const { return space_; }
    [[nodiscard]] const DualNorm& norm() const { return norm_; }

    [[nodiscard]] const Vector& stiff_u() const { return stiff_u_; }
    [[nodiscard]] const Vector& mass_w() const { return mass_w_; }
    [[nodiscard]] const Vector& stiff_w() const { return stiff_w_; }
    [[nodiscard]] const Vector& mass_u() const { return mass_u_; }
    [[nodiscard]] const Vector& load() const { return load_; }

private:
    TestSpace space_;
    DualNorm norm_;
    Vector load_;
    Vector stiff_u_;
    Vector mass_w_;
    Vector stiff_w_;
    Vector mass_u_;
};

struct CollageObjective {
    double xi = 0.0;
    double r1_norm = 0.0;
    double r2_norm = 0.0;
    Vector r1;
    Vector r2;
};

CollageObjective collage_objective(const ResidualModel& model, const FormCoefficients& coeffs);
CollageObjective collage_objective(const TargetPair& target, const FormCoefficients& coeffs,
                                   const TensorPolynomial& f, int test_grid_n,
                                   DualNormKind norm = DualNormKind::riesz);

struct ParameterBox {
    FormCoefficients lower;
    FormCoefficients upper;
};

struct CollageEstimate {
    FormCoefficients coeffs;
    double collage_distance = 0.0;
    /// The two dual-norm summands of the collage distance.
    std::pair<double, double> residual_split{0.0, 0.0};
    bool clipped = false;
};

/// Sum of squared dual norms, the quantity the estimator minimises.
double squared_residual(const ResidualModel& model, const FormCoefficients& coeffs);

CollageEstimate estimate_parameters(const ResidualModel& model, const std::optional<ParameterBox>& box = {});
CollageEstimate estimate_parameters(const TargetPair& target, const TensorPolynomial& f, int test_grid_n,
                                    const std::optional<ParameterBox>& box = {},
                                    DualNormKind norm = DualNormKind::riesz);

struct InverseConfig {
    double delta = 0.25;
    int grid_n = 9;
    int test_grid_n = 9;
    WMode w_mode = WMode::finite_difference;
    InterpolationKind interpolation = InterpolationKind::lagrange;
    FdStencil fd_stencil = FdStencil::fourth_order;
    NoiseDistribution noise = NoiseDistribution::uniform;
    DualNormKind norm = DualNormKind::riesz;
    std::optional<ParameterBox> box;
};

struct SweepRow {
    double noise_level = 0.0;
    int trials = 0;
    FormCoefficients mean;
    FormCoefficients stddev;
    double mean_distance = 0.0;
    double stddev_distance = 0.0;
    std::vector<CollageEstimate> estimates;
};

/// Seed of trial t; independent of the noise level, so every level sees
/// the same underlying draw scaled by its amplitude.
std::uint64_t trial_seed(std::uint64_t seed, int trial);

std::vector<SweepRow> noise_sweep(std::span<const double> levels, int trials, std::uint64_t seed,
                                  const InverseConfig& config);

} // namespace collage
