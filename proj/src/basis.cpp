#include "collage/basis.hpp"

#include "collage/errors.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace collage {

namespace {

void require_unit(double t, const char* who)
{
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError(std::string(who) + ": argument outside [0,1]");
    }
}

int isqrt(int n)
{
    int r = static_cast<int>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) {
        --r;
    }
    while ((r + 1) * (r + 1) <= n) {
        ++r;
    }
    return r;
}

} // namespace

HaarIndex::HaarIndex(int k) : k_(k)
{
    if (k < 1) {
        throw DomainError("HaarIndex: k must be positive");
    }
    if (k >= 2) {
        const auto m = static_cast<unsigned>(k - 1);
        level_ = std::bit_width(m) - 1;
        shift_ = static_cast<int>(m - (1u << level_));
    }
}

double HaarIndex::support_begin() const { return is_constant() ? 0.0 : std::ldexp(shift_, -level_); }

double HaarIndex::support_end() const { return is_constant() ? 1.0 : std::ldexp(shift_ + 1, -level_); }

double HaarIndex::midpoint() const { return std::ldexp(2 * shift_ + 1, -(level_ + 1)); }

double HaarIndex::amplitude() const { return is_constant() ? 1.0 : std::exp2(0.5 * level_); }

double haar_eval(HaarIndex k, double t)
{
    require_unit(t, "haar_eval");
    if (k.is_constant()) {
        return 1.0;
    }
    const double a = k.support_begin();
    const double b = k.support_end();
    const bool inside = (t >= a && t < b) || (t == 1.0 && b == 1.0);
    if (!inside) {
        return 0.0;
    }
    return t < k.midpoint() ? k.amplitude() : -k.amplitude();
}

BasisFunction1D::BasisFunction1D(int k) : k_(k), generator_(k + 1)
{
    if (k < 1) {
        throw DomainError("BasisFunction1D: k must be positive");
    }
    const double a = generator_.support_begin();
    const double mid = generator_.midpoint();
    const double b = generator_.support_end();
    const double h = generator_.amplitude();
    // h·(t − a) rising, h·(b − t) falling.
    shape_ = PiecewisePolynomial({a, mid, b}, {Polynomial1D({-h * a, h}), Polynomial1D({h * b, -h})});
    slope_ = shape_.derivative();
}

double g0_eval(int k, double t)
{
    require_unit(t, "g0_eval");
    return BasisFunction1D(k)(t);
}

std::pair<int, int> sigma(int n)
{
    if (n < 1) {
        throw DomainError("sigma: n must be positive");
    }
    const int r = isqrt(n);
    const int excess = n - r * r;
    if (excess == 0) {
        return {r, r};
    }
    if (excess <= r) {
        return {excess, r + 1};
    }
    return {r + 1, excess - r};
}

BasisFunction2D::BasisFunction2D(int n)
    : n_(n), x_(sigma(n).first), y_(sigma(n).second)
{
}

double BasisFunction2D::operator()(double s, double t) const { return x_(s) * y_(t); }

double bivariate_eval(int n, double s, double t)
{
    require_unit(s, "bivariate_eval");
    require_unit(t, "bivariate_eval");
    return BasisFunction2D(n)(s, t);
}

int max_factor_index(int m)
{
    int kmax = 1;
    for (int n = 1; n <= m; ++n) {
        const auto [p, q] = sigma(n);
        kmax = std::max({kmax, p, q});
    }
    return kmax;
}

std::vector<double> finest_breakpoints(int kmax)
{
    const int level = HaarIndex(kmax + 1).level();
    std::vector<double> b;
    const int cells = 1 << (level + 1);
    b.reserve(static_cast<std::size_t>(cells) + 1);
    for (int i = 0; i <= cells; ++i) {
        b.push_back(std::ldexp(i, -(level + 1)));
    }
    return b;
}

Gram1D inner_products_1d(int m1d)
{
    if (m1d < 1) {
        throw DomainError("inner_products_1d: m1d must be positive");
    }
    std::vector<BasisFunction1D> fns;
    fns.reserve(static_cast<std::size_t>(m1d));
    for (int k = 1; k <= m1d; ++k) {
        fns.emplace_back(k);
    }
    Gram1D g{Eigen::MatrixXd(m1d, m1d), Eigen::MatrixXd(m1d, m1d)};
    for (int p = 0; p < m1d; ++p) {
        for (int q = p; q < m1d; ++q) {
            const auto& fp = fns[static_cast<std::size_t>(p)];
            const auto& fq = fns[static_cast<std::size_t>(q)];
            g.mass(p, q) = g.mass(q, p) = integrate_product(fp.shape(), fq.shape());
            g.stiff(p, q) = g.stiff(q, p) = integrate_product(fp.slope(), fq.slope());
        }
    }
    return g;
}

} // namespace collage
