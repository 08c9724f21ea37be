#pragma once

#include <functional>
#include <span>
#include <vector>

namespace collage {

/// Gauss–Legendre rule on the reference interval [-1, 1].
struct QuadratureRule1D {
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] int order() const { return static_cast<int>(nodes.size()); }
};

inline constexpr int kMaxGaussPoints = 32;
inline constexpr int kDefaultGaussPoints = 6;

/// Nodes and weights by Newton iteration on the Legendre polynomial.
/// Rules are cached; the returned reference stays valid for the program lifetime.
const QuadratureRule1D& gauss_rule(int npoints);

/// Composite rule mapped to the panels [breaks[i], breaks[i+1]].
struct CompositeRule {
    std::vector<double> points;
    std::vector<double> weights;
};

CompositeRule composite_rule(std::span<const double> breaks, int npoints = kDefaultGaussPoints);

double integrate_1d(const std::function<double(double)>& f, std::span<const double> breaks,
                    int npoints = kDefaultGaussPoints);

/// Tensor-product composite Gauss–Legendre over the box spanned by the two
/// breakpoint lists (each strictly increasing).
double integrate_2d(const std::function<double(double, double)>& f, std::span<const double> panels_x,
                    std::span<const double> panels_y, int npoints = kDefaultGaussPoints);

/// Uniform breakpoints {0, 1/n, ..., 1}.
std::vector<double> uniform_breaks(int panels);

} // namespace collage
