#include "collage/inverse.hpp"

#include "collage/errors.hpp"
#include "collage/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <tuple>

namespace collage {

std::string_view to_string(WMode m) { return m == WMode::analytic ? "analytic" : "fd"; }

std::string_view to_string(InterpolationKind k) { return k == InterpolationKind::lagrange ? "lagrange" : "bilinear"; }

std::string_view to_string(FdStencil s) { return s == FdStencil::second_order ? "2" : "4"; }

std::string_view to_string(NoiseDistribution d) { return d == NoiseDistribution::uniform ? "uniform" : "gaussian"; }

std::string_view to_string(DualNormKind k) { return k == DualNormKind::riesz ? "riesz" : "euclidean"; }

// ---------------------------------------------------------------------------

NodalBasis1D::NodalBasis1D(int interior_nodes, InterpolationKind kind) : n_(interior_nodes), kind_(kind)
{
    if (interior_nodes < 1) {
        throw DomainError("NodalBasis1D: need at least one interior node");
    }
    const double h = 1.0 / (n_ + 1);
    nodes_.resize(static_cast<std::size_t>(n_) + 2);
    for (int k = 0; k <= n_ + 1; ++k) {
        nodes_[static_cast<std::size_t>(k)] = k * h;
    }
    nodes_.back() = 1.0;
    if (kind_ == InterpolationKind::bilinear) {
        breaks_ = nodes_;
    } else {
        breaks_ = {0.0, 1.0};
    }
}

double NodalBasis1D::value(int a, double t) const
{
    const auto ua = static_cast<std::size_t>(a);
    if (kind_ == InterpolationKind::bilinear) {
        const double lo = nodes_[ua - 1];
        const double mid = nodes_[ua];
        const double hi = nodes_[ua + 1];
        if (t <= lo || t >= hi) {
            return 0.0;
        }
        return t <= mid ? (t - lo) / (mid - lo) : (hi - t) / (hi - mid);
    }
    double v = 1.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (k != ua) {
            v *= (t - nodes_[k]) / (nodes_[ua] - nodes_[k]);
        }
    }
    return v;
}

double NodalBasis1D::derivative(int a, double t) const
{
    const auto ua = static_cast<std::size_t>(a);
    if (kind_ == InterpolationKind::bilinear) {
        const double lo = nodes_[ua - 1];
        const double mid = nodes_[ua];
        const double hi = nodes_[ua + 1];
        if (t < lo || t > hi) {
            return 0.0;
        }
        return t < mid ? 1.0 / (mid - lo) : -1.0 / (hi - mid);
    }
    // Product rule without dividing by (t − x_k).
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        if (k == ua) {
            continue;
        }
        double term = 1.0 / (nodes_[ua] - nodes_[k]);
        for (std::size_t j = 0; j < nodes_.size(); ++j) {
            if (j != ua && j != k) {
                term *= (t - nodes_[j]) / (nodes_[ua] - nodes_[j]);
            }
        }
        sum += term;
    }
    return sum;
}

double InterpolatedField::operator()(double x, double y) const
{
    const int n = samples.grid_n;
    Vector vx(n);
    Vector vy(n);
    for (int a = 0; a < n; ++a) {
        vx(a) = basis.value(a + 1, x);
        vy(a) = basis.value(a + 1, y);
    }
    return vx.dot(samples.values * vy);
}

// ---------------------------------------------------------------------------

namespace {

// Second derivative along the first index, zero boundary on both ends.
DenseMatrix second_difference(const DenseMatrix& u, double h, FdStencil stencil)
{
    const Eigen::Index n = u.rows();
    const auto at = [&](Eigen::Index i, Eigen::Index j) {
        // i runs over 0..n+1 including the zero boundary nodes.
        return (i <= 0 || i >= n + 1) ? 0.0 : u(i - 1, j);
    };
    DenseMatrix d(n, u.cols());
    const double h2 = h * h;
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        for (Eigen::Index i = 1; i <= n; ++i) {
            double v = 0.0;
            if (stencil == FdStencil::second_order) {
                v = (at(i - 1, j) - 2.0 * at(i, j) + at(i + 1, j)) / h2;
            } else if (i == 1) {
                v = (10.0 * at(0, j) - 15.0 * at(1, j) - 4.0 * at(2, j) + 14.0 * at(3, j) - 6.0 * at(4, j) +
                     at(5, j)) /
                    (12.0 * h2);
            } else if (i == n) {
                v = (10.0 * at(n + 1, j) - 15.0 * at(n, j) - 4.0 * at(n - 1, j) + 14.0 * at(n - 2, j) -
                     6.0 * at(n - 3, j) + at(n - 4, j)) /
                    (12.0 * h2);
            } else {
                v = (-at(i - 2, j) + 16.0 * at(i - 1, j) - 30.0 * at(i, j) + 16.0 * at(i + 1, j) - at(i + 2, j)) /
                    (12.0 * h2);
            }
            d(i - 1, j) = v;
        }
    }
    return d;
}

class NoiseSource {
public:
    NoiseSource(std::uint64_t seed, NoiseDistribution dist) : rng_(seed), dist_(dist) {}

    double draw()
    {
        if (dist_ == NoiseDistribution::uniform) {
            return uniform_(rng_);
        }
        return normal_(rng_);
    }

    void perturb(DenseMatrix& v, double level)
    {
        // Row-major order so the draw sequence does not depend on storage order.
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            for (Eigen::Index j = 0; j < v.cols(); ++j) {
                const double eps = draw();
                v(i, j) *= 1.0 + level * eps;
            }
        }
    }

private:
    std::mt19937_64 rng_;
    NoiseDistribution dist_;
    std::uniform_real_distribution<double> uniform_{-1.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

DenseMatrix sample_interior(const TensorPolynomial& p, int n)
{
    const double h = 1.0 / (n + 1);
    DenseMatrix v(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            v(i, j) = p((i + 1) * h, (j + 1) * h);
        }
    }
    return v;
}

} // namespace

DenseMatrix finite_difference_laplacian(const DenseMatrix& u, double h, FdStencil stencil)
{
    if (u.rows() != u.cols()) {
        throw DimensionMismatch("finite_difference_laplacian: samples must be square");
    }
    if (stencil == FdStencil::fourth_order && u.rows() < 5) {
        throw DomainError("finite_difference_laplacian: fourth-order stencil needs at least 5 interior nodes");
    }
    const DenseMatrix dxx = second_difference(u, h, stencil);
    const DenseMatrix dyy = second_difference(u.transpose(), h, stencil).transpose();
    return -(dxx + dyy);
}

TargetPair make_target(const TensorPolynomial& psi0, const TargetOptions& o)
{
    if (o.grid_n < 2) {
        throw DomainError("make_target: grid_n must be at least 2");
    }
    if (!(o.noise_level >= 0.0)) {
        throw DomainError("make_target: noise_level must be nonnegative");
    }
    NoiseSource noise(o.seed, o.noise);
    const double h = 1.0 / (o.grid_n + 1);

    DenseMatrix u = sample_interior(psi0, o.grid_n);
    if (o.noise_level > 0.0) {
        noise.perturb(u, o.noise_level);
    }
    DenseMatrix w;
    if (o.w_mode == WMode::analytic) {
        w = sample_interior(-1.0 * laplacian(psi0), o.grid_n);
        if (o.noise_level > 0.0) {
            noise.perturb(w, o.noise_level);
        }
    } else {
        w = finite_difference_laplacian(u, h, o.fd_stencil);
    }

    const NodalBasis1D basis(o.grid_n, o.interpolation);
    return TargetPair{InterpolatedField{SampledField{o.grid_n, std::move(u)}, basis},
                      InterpolatedField{SampledField{o.grid_n, std::move(w)}, basis}, o.w_mode};
}

TargetPair make_target(const TensorPolynomial& psi0, int grid_n, double noise_level, std::uint64_t seed,
                       WMode w_mode)
{
    TargetOptions o;
    o.grid_n = grid_n;
    o.noise_level = noise_level;
    o.seed = seed;
    o.w_mode = w_mode;
    return make_target(psi0, o);
}

// ---------------------------------------------------------------------------

namespace {

enum class Pairing { values, slopes };

DenseMatrix pair_bases(const NodalBasis1D& test, const NodalBasis1D& other, Pairing kind)
{
    const std::vector<double> breaks = merge_breakpoints(test.breakpoints(), other.breakpoints());
    const CompositeRule rule = composite_rule(breaks, kDefaultGaussPoints);
    const auto np = static_cast<Eigen::Index>(rule.points.size());
    const auto sample = [&](const NodalBasis1D& b) {
        DenseMatrix s(b.size(), np);
        for (int a = 0; a < b.size(); ++a) {
            for (Eigen::Index q = 0; q < np; ++q) {
                const double t = rule.points[static_cast<std::size_t>(q)];
                s(a, q) = kind == Pairing::values ? b.value(a + 1, t) : b.derivative(a + 1, t);
            }
        }
        return s;
    };
    const Vector w = Eigen::Map<const Vector>(rule.weights.data(), np);
    return sample(test) * w.asDiagonal() * sample(other).transpose();
}

Vector flatten(const DenseMatrix& m)
{
    Vector v(m.size());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            v(i * m.cols() + j) = m(i, j);
        }
    }
    return v;
}

DenseMatrix unflatten(const Vector& v, Eigen::Index n)
{
    DenseMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = v(i * n + j);
        }
    }
    return m;
}

} // namespace

TestSpace::TestSpace(int interior_nodes)
    : n_(interior_nodes), hats_(interior_nodes, InterpolationKind::bilinear)
{
    if (interior_nodes < 2) {
        throw DomainError("TestSpace: test grid needs at least 2 interior nodes per axis");
    }
    mass_ = pair_bases(hats_, hats_, Pairing::values);
    stiff_ = pair_bases(hats_, hats_, Pairing::slopes);
}

DenseMatrix TestSpace::dirichlet_gram() const
{
    const Eigen::Index n = n_;
    DenseMatrix g(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            for (Eigen::Index k = 0; k < n; ++k) {
                for (Eigen::Index l = 0; l < n; ++l) {
                    g(i * n + j, k * n + l) = stiff_(i, k) * mass_(j, l) + mass_(i, k) * stiff_(j, l);
                }
            }
        }
    }
    return g;
}

Vector TestSpace::load(const TensorPolynomial& f) const
{
    const double h = 1.0 / (n_ + 1);
    Vector out(size());
    for (int i = 1; i <= n_; ++i) {
        const std::vector<double> bx{(i - 1) * h, i * h, (i + 1) * h};
        for (int j = 1; j <= n_; ++j) {
            const std::vector<double> by{(j - 1) * h, j * h, (j + 1) * h};
            out((i - 1) * n_ + (j - 1)) = integrate_2d(
                [&](double x, double y) { return f(x, y) * hats_.value(i, x) * hats_.value(j, y); }, bx, by);
        }
    }
    return out;
}

DenseMatrix TestSpace::cross_mass(const NodalBasis1D& other) const { return pair_bases(hats_, other, Pairing::values); }

DenseMatrix TestSpace::cross_stiff(const NodalBasis1D& other) const { return pair_bases(hats_, other, Pairing::slopes); }

// ---------------------------------------------------------------------------

DualNorm::DualNorm(const TestSpace& space, DualNormKind kind) : kind_(kind), n_(space.per_axis())
{
    if (kind_ == DualNormKind::riesz) {
        const Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(space.stiff_1d(), space.mass_1d());
        if (es.info() != Eigen::Success) {
            throw NotSpdError("DualNorm: 1D generalised eigenproblem failed");
        }
        eigvecs_ = es.eigenvectors();
        eigvals_ = es.eigenvalues();
    }
}

Vector DualNorm::whiten(const Vector& r) const
{
    if (r.size() != static_cast<Eigen::Index>(n_) * n_) {
        throw DimensionMismatch("DualNorm::whiten: residual length differs from the test space");
    }
    if (kind_ == DualNormKind::euclidean) {
        return r;
    }
    // G = (V⊗V)⁻ᵀ (Λ⊗I + I⊗Λ) (V⊗V)⁻¹, hence G⁻¹ = (V⊗V) D⁻¹ (V⊗V)ᵀ.
    const DenseMatrix projected = eigvecs_.transpose() * unflatten(r, n_) * eigvecs_;
    DenseMatrix scaled(n_, n_);
    for (int a = 0; a < n_; ++a) {
        for (int b = 0; b < n_; ++b) {
            scaled(a, b) = projected(a, b) / std::sqrt(eigvals_(a) + eigvals_(b));
        }
    }
    return flatten(scaled);
}

// ---------------------------------------------------------------------------

ResidualModel::ResidualModel(const TargetPair& target, const TensorPolynomial& f, int test_grid_n,
                             DualNormKind norm)
    : space_(test_grid_n), norm_(space_, norm)
{
    const NodalBasis1D& basis = target.u_hat.basis;
    const DenseMatrix mx = space_.cross_mass(basis);
    const DenseMatrix kx = space_.cross_stiff(basis);
    const auto mass = [&](const DenseMatrix& v) -> Vector { return flatten(mx * v * mx.transpose()); };
    const auto stiff = [&](const DenseMatrix& v) -> Vector {
        return flatten(kx * v * mx.transpose() + mx * v * kx.transpose());
    };
    const DenseMatrix& u = target.u_hat.samples.values;
    const DenseMatrix& w = target.w_hat.samples.values;
    load_ = space_.load(f);
    stiff_u_ = stiff(u);
    mass_w_ = mass(w);
    stiff_w_ = stiff(w);
    mass_u_ = mass(u);
}

ResidualModel::Residuals ResidualModel::residuals(const FormCoefficients& c) const
{
    return {c.c1 * stiff_u_ - c.c2 * mass_w_, -load_ + c.c1 * stiff_w_ + c.c3 * mass_u_};
}

CollageObjective collage_objective(const ResidualModel& model, const FormCoefficients& coeffs)
{
    auto [r1, r2] = model.residuals(coeffs);
    CollageObjective out;
    out.r1_norm = model.norm()(r1);
    out.r2_norm = model.norm()(r2);
    out.xi = out.r1_norm + out.r2_norm;
    out.r1 = std::move(r1);
    out.r2 = std::move(r2);
    return out;
}

CollageObjective collage_objective(const TargetPair& target, const FormCoefficients& coeffs,
                                   const TensorPolynomial& f, int test_grid_n, DualNormKind norm)
{
    return collage_objective(ResidualModel(target, f, test_grid_n, norm), coeffs);
}

double squared_residual(const ResidualModel& model, const FormCoefficients& coeffs)
{
    const auto [r1, r2] = model.residuals(coeffs);
    return model.norm().whiten(r1).squaredNorm() + model.norm().whiten(r2).squaredNorm();
}

CollageEstimate estimate_parameters(const ResidualModel& model, const std::optional<ParameterBox>& box)
{
    const DualNorm& norm = model.norm();
    const Eigen::Index n = model.space().size();

    // Stacked whitened residual r(C) = r0 + D C.
    DenseMatrix design = DenseMatrix::Zero(2 * n, 3);
    design.col(0) << norm.whiten(model.stiff_u()), norm.whiten(model.stiff_w());
    design.col(1).head(n) = -norm.whiten(model.mass_w());
    design.col(2).tail(n) = norm.whiten(model.mass_u());
    Vector offset = Vector::Zero(2 * n);
    offset.tail(n) = -norm.whiten(model.load());

    // Column equilibration; the C3 column is orders of magnitude smaller.
    Vector scale(3);
    for (Eigen::Index k = 0; k < 3; ++k) {
        scale(k) = design.col(k).norm();
        if (!(scale(k) > 0.0) || !std::isfinite(scale(k))) {
            throw RankDeficientError("estimate_parameters: design column " + std::to_string(k + 1) + " vanishes");
        }
    }
    const DenseMatrix balanced = design * scale.cwiseInverse().asDiagonal();
    const Eigen::HouseholderQR<DenseMatrix> qr(balanced);
    const Vector rdiag = qr.matrixQR().topRows(3).diagonal().cwiseAbs();
    if (rdiag.minCoeff() <= 1e-12 * rdiag.maxCoeff()) {
        throw RankDeficientError("estimate_parameters: least-squares design matrix is rank deficient");
    }
    const Vector scaled_solution = qr.solve(Vector(-offset));
    const Vector solution = scaled_solution.cwiseQuotient(scale);

    CollageEstimate est;
    est.coeffs = {solution(0), solution(1), solution(2)};
    if (box) {
        const auto clip = [&](double& v, double lo, double hi) {
            if (v < lo || v > hi) {
                v = std::clamp(v, lo, hi);
                est.clipped = true;
            }
        };
        clip(est.coeffs.c1, box->lower.c1, box->upper.c1);
        clip(est.coeffs.c2, box->lower.c2, box->upper.c2);
        clip(est.coeffs.c3, box->lower.c3, box->upper.c3);
    }
    const CollageObjective obj = collage_objective(model, est.coeffs);
    est.residual_split = {obj.r1_norm, obj.r2_norm};
    est.collage_distance = obj.r1_norm + obj.r2_norm;
    return est;
}

CollageEstimate estimate_parameters(const TargetPair& target, const TensorPolynomial& f, int test_grid_n,
                                    const std::optional<ParameterBox>& box, DualNormKind norm)
{
    return estimate_parameters(ResidualModel(target, f, test_grid_n, norm), box);
}

// ---------------------------------------------------------------------------

std::uint64_t trial_seed(std::uint64_t seed, int trial)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::vector<SweepRow> noise_sweep(std::span<const double> levels, int trials, std::uint64_t seed,
                                  const InverseConfig& config)
{
    if (levels.empty()) {
        throw DomainError("noise_sweep: no noise levels given");
    }
    if (trials < 1) {
        throw DomainError("noise_sweep: trials must be at least 1");
    }
    const TensorPolynomial psi0 = reference_psi0();
    const TensorPolynomial f = manufactured_f(psi0, config.delta);

    std::vector<SweepRow> rows;
    rows.reserve(levels.size());
    for (double level : levels) {
        SweepRow row;
        row.noise_level = level;
        row.trials = trials;
        for (int t = 0; t < trials; ++t) {
            TargetOptions o;
            o.grid_n = config.grid_n;
            o.noise_level = level;
            o.seed = trial_seed(seed, t);
            o.w_mode = config.w_mode;
            o.interpolation = config.interpolation;
            o.fd_stencil = config.fd_stencil;
            o.noise = config.noise;
            const TargetPair target = make_target(psi0, o);
            row.estimates.push_back(estimate_parameters(ResidualModel(target, f, config.test_grid_n, config.norm),
                                                        config.box));
        }
        const auto stats = [&](auto field) {
            double mean = 0.0;
            for (const auto& e : row.estimates) {
                mean += field(e);
            }
            mean /= trials;
            double var = 0.0;
            for (const auto& e : row.estimates) {
                var += (field(e) - mean) * (field(e) - mean);
            }
            return std::pair{mean, trials > 1 ? std::sqrt(var / (trials - 1)) : 0.0};
        };
        std::tie(row.mean.c1, row.stddev.c1) = stats([](const CollageEstimate& e) { return e.coeffs.c1; });
        std::tie(row.mean.c2, row.stddev.c2) = stats([](const CollageEstimate& e) { return e.coeffs.c2; });
        std::tie(row.mean.c3, row.stddev.c3) = stats([](const CollageEstimate& e) { return e.coeffs.c3; });
        std::tie(row.mean_distance, row.stddev_distance) =
            stats([](const CollageEstimate& e) { return e.collage_distance; });
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace collage
