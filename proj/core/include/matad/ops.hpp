// Catalog of differentiable primitives. Every OpKind has exactly one primal
// rule (eval_op), one tangent rule (jvp_op, forward.hpp) and one adjoint
// rule (vjp_op, reverse.hpp). An Op value is a kind plus its parameters:
// a power exponent, a scale factor, a series function, or a bound constant
// operand (the fixed X of left/right multiplication, an additive constant,
// or the target of the squared loss).

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matad/matfunc.hpp"
#include "matad/matrix.hpp"

namespace matad {

enum class OpKind {
    MatMul,
    Transpose,
    ConjTranspose,
    Trace,
    Inverse,
    Power,
    MatFunc,
    Add,
    Scale,
    Re,
    Im,
    Sigmoid,
    AddBias,
    SquaredLoss,
};

const char* to_string(OpKind kind);

struct Op {
    enum class BoundSide { None, Left, Right };

    OpKind kind = OpKind::MatMul;
    int exponent = 0;
    double factor = 1.0;
    std::optional<MatrixFunction> fn;
    std::optional<Mat> bound;
    BoundSide bound_side = BoundSide::None;

    /// A * B with both operands live.
    static Op matmul();
    /// A -> X * A for a fixed X.
    static Op left_mul(Mat x);
    /// A -> A * X for a fixed X.
    static Op right_mul(Mat x);
    static Op transpose();
    static Op conj_transpose();
    static Op trace();
    static Op inverse();
    static Op power(int k);
    static Op matfunc(MatrixFunction f);
    /// A + B with both operands live.
    static Op add();
    /// A -> A + C for a fixed C.
    static Op add_const(Mat c);
    static Op scale_by(double c);
    static Op re();
    static Op im();
    static Op sigmoid();
    /// (X, b) -> X + b * ones^T; the bias column broadcasts across columns.
    static Op add_bias();
    /// X -> sum of squared entries of X - Y for the fixed target Y.
    static Op squared_loss(Mat target);

    /// Number of live inputs (1 or 2).
    std::size_t arity() const;
    /// True for the R-linear kinds whose tangent rule is the map itself.
    bool is_linear() const;
    std::string describe() const;
};

/// Primal evaluation; validates shapes and fields.
Mat eval_op(const Op& op, std::span<const Mat> inputs);

}  // namespace matad
