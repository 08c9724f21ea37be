#include "collage/quadrature.hpp"

#include "collage/errors.hpp"

#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>
#include <utility>

namespace collage {

namespace {

QuadratureRule1D build_gauss_rule(int n)
{
    QuadratureRule1D rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess for the i-th largest root.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        const auto legendre = [n](double t) {
            // Returns (P_n(t), P_n'(t)) by the three-term recurrence.
            double p0 = 1.0;
            double p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            return std::pair{p1, n * (t * p1 - p0) / (t * t - 1.0)};
        };
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = w;
        rule.weights[hi] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    }
    return rule;
}

} // namespace

const QuadratureRule1D& gauss_rule(int npoints)
{
    if (npoints < 1 || npoints > kMaxGaussPoints) {
        throw UnsupportedOrderError("gauss_rule: npoints must lie in [1, 32], got " + std::to_string(npoints));
    }
    static std::array<std::optional<QuadratureRule1D>, kMaxGaussPoints + 1> cache;
    static std::mutex mutex;
    std::lock_guard lock(mutex);
    auto& slot = cache[static_cast<std::size_t>(npoints)];
    if (!slot) {
        slot = build_gauss_rule(npoints);
    }
    return *slot;
}

CompositeRule composite_rule(std::span<const double> breaks, int npoints)
{
    const QuadratureRule1D& rule = gauss_rule(npoints);
    CompositeRule out;
    if (breaks.size() < 2) {
        return out;
    }
    out.points.reserve((breaks.size() - 1) * rule.nodes.size());
    out.weights.reserve(out.points.capacity());
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p];
        const double b = breaks[p + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            out.points.push_back(mid + half * rule.nodes[q]);
            out.weights.push_back(half * rule.weights[q]);
        }
    }
    return out;
}

double integrate_1d(const std::function<double(double)>& f, std::span<const double> breaks, int npoints)
{
    const CompositeRule rule = composite_rule(breaks, npoints);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
        sum += rule.weights[i] * f(rule.points[i]);
    }
    return sum;
}

double integrate_2d(const std::function<double(double, double)>& f, std::span<const double> panels_x,
                    std::span<const double> panels_y, int npoints)
{
    const CompositeRule rx = composite_rule(panels_x, npoints);
    const CompositeRule ry = composite_rule(panels_y, npoints);
    double sum = 0.0;
    for (std::size_t i = 0; i < rx.points.size(); ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < ry.points.size(); ++j) {
            inner += ry.weights[j] * f(rx.points[i], ry.points[j]);
        }
        sum += rx.weights[i] * inner;
    }
    return sum;
}

std::vector<double> uniform_breaks(int panels)
{
    std::vector<double> b(static_cast<std::size_t>(panels) + 1);
    for (int i = 0; i <= panels; ++i) {
        b[static_cast<std::size_t>(i)] = static_cast<double>(i) / panels;
    }
    return b;
}

} // namespace collage
