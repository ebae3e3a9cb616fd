// Matrix functions f(A) = sum c_k A^k evaluated by truncated power series,
// together with their directional (Frechet) derivatives computed two ways:
//
//   frechet_series  - differentiate the series term by term,
//                     sum c_k * sum_i A^i E A^(k-1-i)
//   frechet_block   - apply f to the 2n x 2n matrix [[A, E], [0, A]] and
//                     read the derivative off the top-right block
//
// The two routes are exact polynomial identities once the truncation index
// is fixed, so the block result is computed with the index the series chose
// for A alone. The adjoint of the derivative is the derivative taken at the
// (conjugate-)transposed point.

#pragma once

#include <vector>

#include "matad/matrix.hpp"

namespace matad {

class MatrixFunction {
  public:
    enum class Kind { Exp, Log1p, Sin, Cos, Poly };

    static MatrixFunction exp();
    /// log(I + A); series converges for spectral radius below 1.
    static MatrixFunction log1p();
    static MatrixFunction sin();
    static MatrixFunction cos();
    /// coeffs[k] multiplies A^k.
    static MatrixFunction poly(std::vector<double> coeffs);

    Kind kind() const { return kind_; }
    /// Series coefficient c_k in closed form.
    double coefficient(int k) const;
    /// Convergence radius: infinity except for log1p (radius 1).
    double domain_radius() const { return radius_; }
    /// For Poly, the highest stored power; -1 otherwise.
    int degree() const;
    const char* name() const;

  private:
    MatrixFunction(Kind kind, double radius, std::vector<double> coeffs = {});
    Kind kind_;
    double radius_;
    std::vector<double> coeffs_;
};

struct SeriesResult {
    Mat value;
    /// Number of series terms scanned (highest power included is terms_used-1).
    int terms_used = 0;
    /// Frobenius norm of the last included term relative to the partial sum.
    double truncation_residual = 0.0;
};

/// Hard cap on series length; exceeding it raises DomainViolation.
inline constexpr int kSeriesMaxTerms = 200;
/// A term is negligible below this fraction of the partial sum; the series
/// stops after two consecutive negligible terms (two, so that the zero
/// coefficients of odd/even series do not stop it prematurely).
inline constexpr double kSeriesTermTol = 1e-16;
/// Finite-radius functions refuse inputs whose estimated spectral radius
/// reaches this fraction of the radius.
inline constexpr double kRadiusSafety = 0.95;

/// Truncated series evaluation of f at a square matrix.
SeriesResult apply(const MatrixFunction& f, const Mat& a);

/// Directional derivative of f at A along E, term-by-term route.
Mat frechet_series(const MatrixFunction& f, const Mat& a, const Mat& e);

/// Directional derivative via the block matrix [[A, E], [0, A]]. Verifies
/// the structural identities of the block form (zero bottom-left block and
/// diagonal blocks equal to f(A)) and throws std::logic_error if they fail.
Mat frechet_block(const MatrixFunction& f, const Mat& a, const Mat& e);

/// Adjoint of the derivative under the canonical product: the derivative at
/// A^T (A^H on the complex field) applied to the cotangent.
Mat adjoint_frechet(const MatrixFunction& f, const Mat& a, const Mat& g);

}  // namespace matad
