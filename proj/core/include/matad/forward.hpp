// Forward mode: push (primal, tangent) pairs through the tangent rule of
// each primitive. For an R-linear map the tangent rule is the map itself;
// products follow the two-sided product rule; the remaining nonlinear
// primitives carry their own closed-form rules:
//
//   power k:   sum_{i=0}^{k-1} A^i E A^{k-1-i}
//   inverse:   -A^{-1} E A^{-1}
//   matfunc f: directional derivative via the block form
//
// All rules hold verbatim on the complex field, where the tangent maps are
// linear over the reals (not necessarily over the complex numbers).

#pragma once

#include <span>

#include "matad/ops.hpp"

namespace matad {

/// A point paired with a direction through it.
struct Dual {
    Mat primal;
    Mat tangent;

    Dual(Mat primal_, Mat tangent_);
    static Dual constant(Mat value);  // zero tangent
};

/// Tangent rule for the R-linear kinds: apply the op to primals and to
/// tangents alike.
Dual jvp_linear(const Op& op, std::span<const Dual> inputs);
Dual jvp_linear(const Op& op, const Dual& input);

/// Product rule: d(AB) = E_A B + A E_B.
Dual jvp_matmul(const Dual& a, const Dual& b);

/// Derivative of A -> A^k along E.
Mat jvp_power(const Mat& a, const Mat& e, int k);

/// Derivative of A -> A^{-1} along E; one factorization serves both solves.
Mat jvp_inverse(const Mat& a, const Mat& e);

/// Entrywise primitives (real field): Sigmoid, or SquaredLoss against the
/// target `aux`.
Dual jvp_elementwise(OpKind kind, const Dual& d, const Mat* aux = nullptr);

/// Dispatch to the registered tangent rule of any primitive.
Dual jvp_op(const Op& op, std::span<const Dual> inputs);

/// Push (x, v) through a chain of unary stages left to right; the result is
/// the directional derivative of the composite at x along v.
Mat jvp_chain(std::span<const Op> stages, const Mat& x, const Mat& v);

}  // namespace matad
