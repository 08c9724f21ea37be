#pragma once

#include "collage/polynomials.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace collage {

/// Flat index k of the Haar system. k = 1 is the constant function; for
/// k >= 2, k = 2^level + shift + 1 with 0 <= shift < 2^level.
class HaarIndex {
public:
    explicit HaarIndex(int k);

    [[nodiscard]] int flat() const { return k_; }
    [[nodiscard]] bool is_constant() const { return k_ == 1; }
    /// Dyadic level j (only meaningful for k >= 2).
    [[nodiscard]] int level() const { return level_; }
    [[nodiscard]] int shift() const { return shift_; }

    /// Support [i/2^j, (i+1)/2^j] for k >= 2, [0,1] for k = 1.
    [[nodiscard]] double support_begin() const;
    [[nodiscard]] double support_end() const;
    [[nodiscard]] double midpoint() const;
    /// L²-normalised amplitude 2^{j/2}.
    [[nodiscard]] double amplitude() const;

private:
    int k_;
    int level_ = 0;
    int shift_ = 0;
};

/// L²-orthonormal Haar function h_k. Intervals are half-open on the right;
/// t = 1 is assigned to the last cell so that h_k(1) is the left limit.
double haar_eval(HaarIndex k, double t);

/// Element g0_k = g_{k+2} = ∫₀ᵗ h_{k+1} of the H¹₀(0,1) Schauder basis.
/// A hat over the support of h_{k+1}, exact piecewise-linear representation.
class BasisFunction1D {
public:
    explicit BasisFunction1D(int k);

    [[nodiscard]] int index() const { return k_; }
    [[nodiscard]] HaarIndex generator() const { return generator_; }
    [[nodiscard]] const PiecewisePolynomial& shape() const { return shape_; }
    [[nodiscard]] const PiecewisePolynomial& slope() const { return slope_; }

    [[nodiscard]] double operator()(double t) const { return shape_(t); }
    [[nodiscard]] double derivative(double t) const { return slope_(t); }

private:
    int k_;
    HaarIndex generator_;
    PiecewisePolynomial shape_;
    PiecewisePolynomial slope_;
};

double g0_eval(int k, double t);

/// Enumeration of N onto N×N by square shells; prefixes of length m² cover {1..m}².
std::pair<int, int> sigma(int n);

/// G0_n(s,t) = g0_p(s)·g0_q(t), (p,q) = sigma(n).
class BasisFunction2D {
public:
    explicit BasisFunction2D(int n);

    [[nodiscard]] int index() const { return n_; }
    [[nodiscard]] int p() const { return x_.index(); }
    [[nodiscard]] int q() const { return y_.index(); }
    [[nodiscard]] const BasisFunction1D& x_factor() const { return x_; }
    [[nodiscard]] const BasisFunction1D& y_factor() const { return y_; }

    [[nodiscard]] double operator()(double s, double t) const;

private:
    int n_;
    BasisFunction1D x_;
    BasisFunction1D y_;
};

double bivariate_eval(int n, double s, double t);

/// Largest 1D factor index used by the first m tensor functions.
int max_factor_index(int m);

/// Finest dyadic breakpoints {0, 2^-L, ..., 1} resolving every factor g0_1..g0_kmax.
std::vector<double> finest_breakpoints(int kmax);

struct Gram1D {
    Eigen::MatrixXd mass;  ///< ∫ g0_p g0_q
    Eigen::MatrixXd stiff; ///< ∫ g0_p' g0_q'
};

/// Exact 1D Gram blocks for g0_1..g0_{m1d} (0-based storage).
Gram1D inner_products_1d(int m1d);

} // namespace collage
