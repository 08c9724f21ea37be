#pragma once

#include "collage/basis.hpp"
#include "collage/linalg.hpp"
#include "collage/polynomials.hpp"

namespace collage {

/// Coefficients of the parametrised biharmonic mixed family
///   a(w,v) = C2 ∫ w v,   b(v,ψ) = −C1 ∫ ∇v·∇ψ,   c(ψ,φ) = −C3 ∫ ψ φ.
/// The direct problem with perturbation δ is (1, 1, δ).
struct FormCoefficients {
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 0.0;

    static FormCoefficients direct(double delta) { return {1.0, 1.0, delta}; }
    friend bool operator==(const FormCoefficients&, const FormCoefficients&) = default;
};

/// 2D Gram matrices of G0_1..G0_m.
struct TensorGrams {
    DenseMatrix mass;  ///< ∫ G0_n G0_n'
    DenseMatrix stiff; ///< ∫ ∇G0_n·∇G0_n' (the H¹₀ inner product)
};

/// Mass2D and Stiff2D from the exact 1D blocks by tensorisation.
TensorGrams tensor_grams(int m);

/// Discrete perturbed mixed system on E_m = F_m = span{G0_1..G0_m}.
/// Matrix entry (i, q) holds the form evaluated at (G0_q, G0_i).
struct SaddleSystem {
    int m = 0;
    DenseMatrix a;
    DenseMatrix b;
    DenseMatrix c;
    Vector load_x;
    Vector load_y;
};

SaddleSystem assemble_forms(int m, const FormCoefficients& coeffs);
SaddleSystem assemble_forms(const TensorGrams& grams, const FormCoefficients& coeffs);

struct LoadVectors {
    Vector x; ///< x*(G0_i) = 0
    Vector y; ///< y*(G0_i) = −∫ f G0_i
};

/// Loads by 6-point Gauss quadrature on panels aligned with each G0_i.
LoadVectors assemble_loads(int m, const TensorPolynomial& f, int npoints = 6);

struct BlockSystem {
    DenseMatrix matrix; ///< [[A, Bᵀ], [B, C]]
    Vector rhs;         ///< (load_x, load_y)
};

BlockSystem build_block(const SaddleSystem& system);

/// Forms plus loads for the problem with load f.
SaddleSystem assemble_system(int m, const FormCoefficients& coeffs, const TensorPolynomial& f);

} // namespace collage
