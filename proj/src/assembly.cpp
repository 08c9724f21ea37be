#include "collage/assembly.hpp"

#include "collage/errors.hpp"
#include "collage/quadrature.hpp"

#include <string>

namespace collage {

TensorGrams tensor_grams(int m)
{
    if (m < 1) {
        throw DomainError("tensor_grams: m must be positive");
    }
    const Gram1D g = inner_products_1d(max_factor_index(m));
    TensorGrams out{DenseMatrix(m, m), DenseMatrix(m, m)};
    for (int i = 0; i < m; ++i) {
        const auto [p, q] = sigma(i + 1);
        for (int j = 0; j < m; ++j) {
            const auto [pp, qq] = sigma(j + 1);
            const double mx = g.mass(p - 1, pp - 1);
            const double my = g.mass(q - 1, qq - 1);
            out.mass(i, j) = mx * my;
            out.stiff(i, j) = g.stiff(p - 1, pp - 1) * my + mx * g.stiff(q - 1, qq - 1);
        }
    }
    return out;
}

SaddleSystem assemble_forms(const TensorGrams& grams, const FormCoefficients& coeffs)
{
    const auto m = static_cast<int>(grams.mass.rows());
    SaddleSystem s;
    s.m = m;
    s.a = coeffs.c2 * grams.mass;
    s.b = -coeffs.c1 * grams.stiff;
    s.c = -coeffs.c3 * grams.mass;
    s.load_x = Vector::Zero(m);
    s.load_y = Vector::Zero(m);
    return s;
}

SaddleSystem assemble_forms(int m, const FormCoefficients& coeffs)
{
    return assemble_forms(tensor_grams(m), coeffs);
}

LoadVectors assemble_loads(int m, const TensorPolynomial& f, int npoints)
{
    LoadVectors loads{Vector::Zero(m), Vector::Zero(m)};
    if (f.terms().empty()) {
        return loads;
    }
    for (int i = 0; i < m; ++i) {
        const BasisFunction2D g(i + 1);
        const auto bx = g.x_factor().shape().breakpoints();
        const auto by = g.y_factor().shape().breakpoints();
        loads.y(i) = -integrate_2d([&](double x, double y) { return f(x, y) * g(x, y); }, bx, by, npoints);
    }
    return loads;
}

BlockSystem build_block(const SaddleSystem& s)
{
    const int m = s.m;
    const auto check = [m](const DenseMatrix& x, const char* name) {
        if (x.rows() != m || x.cols() != m) {
            throw DimensionMismatch(std::string("build_block: block ") + name + " is not m×m");
        }
    };
    check(s.a, "A");
    check(s.b, "B");
    check(s.c, "C");
    if (s.load_x.size() != m || s.load_y.size() != m) {
        throw DimensionMismatch("build_block: load vectors must have length m");
    }
    BlockSystem out{DenseMatrix(2 * m, 2 * m), Vector(2 * m)};
    out.matrix.topLeftCorner(m, m) = s.a;
    out.matrix.topRightCorner(m, m) = s.b.transpose();
    out.matrix.bottomLeftCorner(m, m) = s.b;
    out.matrix.bottomRightCorner(m, m) = s.c;
    out.rhs.head(m) = s.load_x;
    out.rhs.tail(m) = s.load_y;
    return out;
}

SaddleSystem assemble_system(int m, const FormCoefficients& coeffs, const TensorPolynomial& f)
{
    SaddleSystem s = assemble_forms(m, coeffs);
    LoadVectors loads = assemble_loads(m, f);
    s.load_x = std::move(loads.x);
    s.load_y = std::move(loads.y);
    return s;
}

} // namespace collage
