#pragma once

#include <span>
#include <utility>
#include <vector>

namespace collage {

/// Univariate polynomial in the monomial basis; coeffs()[i] multiplies t^i.
///
/// Always kept in canonical form: the highest stored coefficient is
/// nonzero, and the zero polynomial has no coefficients at all.
class Polynomial1D {
public:
    Polynomial1D() = default;
    explicit Polynomial1D(std::vector<double> coeffs);

    static Polynomial1D constant(double c);
    static Polynomial1D monomial(int power, double c = 1.0);
    /// (t - root)
    static Polynomial1D linear_factor(double root);

    [[nodiscard]] std::span<const double> coeffs() const { return coeffs_; }
    [[nodiscard]] bool is_zero() const { return coeffs_.empty(); }
    /// Degree of a nonzero polynomial; -1 for the zero polynomial.
    [[nodiscard]] int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    [[nodiscard]] double operator()(double t) const;

    [[nodiscard]] Polynomial1D derivative(int order = 1) const;
    /// Antiderivative vanishing at t = 0.
    [[nodiscard]] Polynomial1D antiderivative() const;
    [[nodiscard]] double integrate(double a, double b) const;
    [[nodiscard]] Polynomial1D pow(int exponent) const;

    Polynomial1D& operator+=(const Polynomial1D& other);
    Polynomial1D& operator-=(const Polynomial1D& other);
    Polynomial1D& operator*=(double s);

    friend Polynomial1D operator+(Polynomial1D a, const Polynomial1D& b) { return a += b; }
    friend Polynomial1D operator-(Polynomial1D a, const Polynomial1D& b) { return a -= b; }
    friend Polynomial1D operator*(Polynomial1D a, double s) { return a *= s; }
    friend Polynomial1D operator*(double s, Polynomial1D a) { return a *= s; }
    friend Polynomial1D operator*(const Polynomial1D& a, const Polynomial1D& b);

    friend bool operator==(const Polynomial1D&, const Polynomial1D&) = default;

private:
    void canonicalize();

    std::vector<double> coeffs_;
};

/// dᵒʳᵈᵉʳp/dtᵒʳᵈᵉʳ.
Polynomial1D poly_derivative(const Polynomial1D& p, int order);

/// Bivariate polynomial stored as a sum of separable terms p(x)·q(y).
class TensorPolynomial {
public:
    struct Term {
        Polynomial1D x;
        Polynomial1D y;
    };

    TensorPolynomial() = default;
    explicit TensorPolynomial(std::vector<Term> terms);

    static TensorPolynomial separable(Polynomial1D px, Polynomial1D py);

    [[nodiscard]] std::span<const Term> terms() const { return terms_; }
    [[nodiscard]] double operator()(double x, double y) const;

    /// Partial derivative of the given orders in x and y.
    [[nodiscard]] TensorPolynomial derivative(int order_x, int order_y) const;

    TensorPolynomial& operator+=(const TensorPolynomial& other);
    TensorPolynomial& operator*=(double s);

    friend TensorPolynomial operator+(TensorPolynomial a, const TensorPolynomial& b) { return a += b; }
    friend TensorPolynomial operator*(TensorPolynomial a, double s) { return a *= s; }
    friend TensorPolynomial operator*(double s, TensorPolynomial a) { return a *= s; }

private:
    std::vector<Term> terms_;
};

TensorPolynomial laplacian(const TensorPolynomial& p);

/// Load of the biharmonic problem with perturbation: Δ²ψ₀ + δ·ψ₀.
TensorPolynomial manufactured_f(const TensorPolynomial& psi0, double delta);

/// The manufactured solution 10³(x(x−1))⁴(y(y−1))⁴, expanded to monomials.
TensorPolynomial reference_psi0();

/// Piecewise polynomial on [breakpoints.front(), breakpoints.back()],
/// extended by zero outside. Piece i lives on [breakpoints[i], breakpoints[i+1]].
class PiecewisePolynomial {
public:
    PiecewisePolynomial() = default;
    PiecewisePolynomial(std::vector<double> breakpoints, std::vector<Polynomial1D> pieces);

    [[nodiscard]] std::span<const double> breakpoints() const { return breakpoints_; }
    [[nodiscard]] std::span<const Polynomial1D> pieces() const { return pieces_; }
    [[nodiscard]] double support_begin() const { return breakpoints_.front(); }
    [[nodiscard]] double support_end() const { return breakpoints_.back(); }

    /// Value at t; at an interior breakpoint the right piece is used, at
    /// the right end of the support the last piece.
    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] PiecewisePolynomial derivative() const;

    /// Piece whose polynomial is active at t, or nullptr outside the support.
    [[nodiscard]] const Polynomial1D* piece_at(double t) const;

private:
    std::vector<double> breakpoints_;
    std::vector<Polynomial1D> pieces_;
};

/// Union of breakpoint sets, sorted and deduplicated.
std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b);

/// ∫ f·g over the real line, exact: both factors are multiplied piece by
/// piece over the merged breakpoints and integrated in closed form.
double integrate_product(const PiecewisePolynomial& f, const PiecewisePolynomial& g);

} // namespace collage
