#include "collage/polynomials.hpp"

#include "collage/errors.hpp"

#include <algorithm>
#include <cmath>

namespace collage {

Polynomial1D::Polynomial1D(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { canonicalize(); }

Polynomial1D Polynomial1D::constant(double c) { return Polynomial1D({c}); }

Polynomial1D Polynomial1D::monomial(int power, double c)
{
    std::vector<double> coeffs(static_cast<std::size_t>(power) + 1, 0.0);
    coeffs.back() = c;
    return Polynomial1D(std::move(coeffs));
}

Polynomial1D Polynomial1D::linear_factor(double root) { return Polynomial1D({-root, 1.0}); }

void Polynomial1D::canonicalize()
{
    while (!coeffs_.empty() && coeffs_.back() == 0.0) {
        coeffs_.pop_back();
    }
}

double Polynomial1D::operator()(double t) const
{
    double value = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        value = value * t + *it;
    }
    return value;
}

Polynomial1D Polynomial1D::derivative(int order) const
{
    if (order < 0) {
        throw DomainError("Polynomial1D::derivative: negative order");
    }
    std::vector<double> c = coeffs_;
    for (int k = 0; k < order && !c.empty(); ++k) {
        for (std::size_t i = 1; i < c.size(); ++i) {
            c[i - 1] = c[i] * static_cast<double>(i);
        }
        c.pop_back();
    }
    return Polynomial1D(std::move(c));
}

Polynomial1D Polynomial1D::antiderivative() const
{
    if (coeffs_.empty()) {
        return {};
    }
    std::vector<double> c(coeffs_.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        c[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
    }
    return Polynomial1D(std::move(c));
}

double Polynomial1D::integrate(double a, double b) const
{
    const Polynomial1D anti = antiderivative();
    return anti(b) - anti(a);
}

Polynomial1D Polynomial1D::pow(int exponent) const
{
    if (exponent < 0) {
        throw DomainError("Polynomial1D::pow: negative exponent");
    }
    Polynomial1D result = constant(1.0);
    for (int k = 0; k < exponent; ++k) {
        result = result * *this;
    }
    return result;
}

Polynomial1D& Polynomial1D::operator+=(const Polynomial1D& other)
{
    if (other.coeffs_.size() > coeffs_.size()) {
        coeffs_.resize(other.coeffs_.size(), 0.0);
    }
    for (std::size_t i = 0; i < other.coeffs_.size(); ++i) {
        coeffs_[i] += other.coeffs_[i];
    }
    canonicalize();
    return *this;
}

Polynomial1D& Polynomial1D::operator-=(const Polynomial1D& other)
{
    return *this += other * -1.0;
}

Polynomial1D& Polynomial1D::operator*=(double s)
{
    for (double& c : coeffs_) {
        c *= s;
    }
    canonicalize();
    return *this;
}

Polynomial1D operator*(const Polynomial1D& a, const Polynomial1D& b)
{
    if (a.is_zero() || b.is_zero()) {
        return {};
    }
    std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) {
            c[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
    }
    return Polynomial1D(std::move(c));
}

Polynomial1D poly_derivative(const Polynomial1D& p, int order) { return p.derivative(order); }

// ---------------------------------------------------------------------------

TensorPolynomial::TensorPolynomial(std::vector<Term> terms) : terms_(std::move(terms))
{
    std::erase_if(terms_, [](const Term& t) { return t.x.is_zero() || t.y.is_zero(); });
}

TensorPolynomial TensorPolynomial::separable(Polynomial1D px, Polynomial1D py)
{
    return TensorPolynomial({Term{std::move(px), std::move(py)}});
}

double TensorPolynomial::operator()(double x, double y) const
{
    double value = 0.0;
    for (const Term& t : terms_) {
        value += t.x(x) * t.y(y);
    }
    return value;
}

TensorPolynomial TensorPolynomial::derivative(int order_x, int order_y) const
{
    std::vector<Term> out;
    out.reserve(terms_.size());
    for (const Term& t : terms_) {
        out.push_back({t.x.derivative(order_x), t.y.derivative(order_y)});
    }
    return TensorPolynomial(std::move(out));
}

TensorPolynomial& TensorPolynomial::operator+=(const TensorPolynomial& other)
{
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    return *this;
}

TensorPolynomial& TensorPolynomial::operator*=(double s)
{
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (Term& t : terms_) {
        t.x *= s;
    }
    return *this;
}

TensorPolynomial laplacian(const TensorPolynomial& p) { return p.derivative(2, 0) + p.derivative(0, 2); }

TensorPolynomial manufactured_f(const TensorPolynomial& psi0, double delta)
{
    return laplacian(laplacian(psi0)) + delta * psi0;
}

TensorPolynomial reference_psi0()
{
    // t(t-1) = t^2 - t
    const Polynomial1D quartic = Polynomial1D({0.0, -1.0, 1.0}).pow(4);
    return TensorPolynomial::separable(1.0e3 * quartic, quartic);
}

// ---------------------------------------------------------------------------

PiecewisePolynomial::PiecewisePolynomial(std::vector<double> breakpoints, std::vector<Polynomial1D> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces))
{
    if (breakpoints_.size() < 2 || pieces_.size() + 1 != breakpoints_.size()) {
        throw DimensionMismatch("PiecewisePolynomial: need n+1 breakpoints for n pieces");
    }
    if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end()) ||
        std::adjacent_find(breakpoints_.begin(), breakpoints_.end()) != breakpoints_.end()) {
        throw DomainError("PiecewisePolynomial: breakpoints must be strictly increasing");
    }
}

const Polynomial1D* PiecewisePolynomial::piece_at(double t) const
{
    if (breakpoints_.empty() || t < breakpoints_.front() || t > breakpoints_.back()) {
        return nullptr;
    }
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - breakpoints_.begin());
    idx = idx == 0 ? 0 : idx - 1;
    idx = std::min(idx, pieces_.size() - 1);
    return &pieces_[idx];
}

double PiecewisePolynomial::operator()(double t) const
{
    const Polynomial1D* piece = piece_at(t);
    return piece ? (*piece)(t) : 0.0;
}

PiecewisePolynomial PiecewisePolynomial::derivative() const
{
    std::vector<Polynomial1D> d;
    d.reserve(pieces_.size());
    for (const Polynomial1D& p : pieces_) {
        d.push_back(p.derivative());
    }
    return {breakpoints_, std::move(d)};
}

std::vector<double> merge_breakpoints(std::span<const double> a, std::span<const double> b)
{
    std::vector<double> out(a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double integrate_product(const PiecewisePolynomial& f, const PiecewisePolynomial& g)
{
    const double lo = std::max(f.support_begin(), g.support_begin());
    const double hi = std::min(f.support_end(), g.support_end());
    if (!(lo < hi)) {
        return 0.0;
    }
    const std::vector<double> merged = merge_breakpoints(f.breakpoints(), g.breakpoints());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < merged.size(); ++i) {
        const double a = merged[i];
        const double b = merged[i + 1];
        if (b <= lo || a >= hi) {
            continue;
        }
        const double mid = 0.5 * (a + b);
        const Polynomial1D* pf = f.piece_at(mid);
        const Polynomial1D* pg = g.piece_at(mid);
        if (pf && pg) {
            total += ((*pf) * (*pg)).integrate(a, b);
        }
    }
    return total;
}

} // namespace collage
