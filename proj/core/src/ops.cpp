#include "matad/ops.hpp"

#include <cmath>

namespace matad {

const char* to_string(OpKind kind) {
    switch (kind) {
        case OpKind::MatMul: return "matmul";
        case OpKind::Transpose: return "transpose";
        case OpKind::ConjTranspose: return "conj_transpose";
        case OpKind::Trace: return "trace";
        case OpKind::Inverse: return "inverse";
        case OpKind::Power: return "power";
        case OpKind::MatFunc: return "matfunc";
        case OpKind::Add: return "add";
        case OpKind::Scale: return "scale";
        case OpKind::Re: return "re";
        case OpKind::Im: return "im";
        case OpKind::Sigmoid: return "sigmoid";
        case OpKind::AddBias: return "add_bias";
        case OpKind::SquaredLoss: return "squared_loss";
    }
    return "?";
}

namespace {
Op make_op(OpKind kind) {
    Op op;
    op.kind = kind;
    return op;
}
}  // namespace

Op Op::matmul() { return make_op(OpKind::MatMul); }

Op Op::left_mul(Mat x) {
    Op op = make_op(OpKind::MatMul);
    op.bound = std::move(x);
    op.bound_side = BoundSide::Left;
    return op;
}

Op Op::right_mul(Mat x) {
    Op op = make_op(OpKind::MatMul);
    op.bound = std::move(x);
    op.bound_side = BoundSide::Right;
    return op;
}

Op Op::transpose() { return make_op(OpKind::Transpose); }
Op Op::conj_transpose() { return make_op(OpKind::ConjTranspose); }
Op Op::trace() { return make_op(OpKind::Trace); }
Op Op::inverse() { return make_op(OpKind::Inverse); }

Op Op::power(int k) {
    if (k < 1) throw FieldError(ErrKind::DomainViolation, "power exponent must be positive");
    Op op = make_op(OpKind::Power);
    op.exponent = k;
    return op;
}

Op Op::matfunc(MatrixFunction f) {
    Op op = make_op(OpKind::MatFunc);
    op.fn = std::move(f);
    return op;
}

Op Op::add() { return make_op(OpKind::Add); }

Op Op::add_const(Mat c) {
    Op op = make_op(OpKind::Add);
    op.bound = std::move(c);
    return op;
}

Op Op::scale_by(double c) {
    Op op = make_op(OpKind::Scale);
    op.factor = c;
    return op;
}

Op Op::re() { return make_op(OpKind::Re); }
Op Op::im() { return make_op(OpKind::Im); }
Op Op::sigmoid() { return make_op(OpKind::Sigmoid); }
Op Op::add_bias() { return make_op(OpKind::AddBias); }

Op Op::squared_loss(Mat target) {
    Op op = make_op(OpKind::SquaredLoss);
    op.bound = std::move(target);
    return op;
}

std::size_t Op::arity() const {
    switch (kind) {
        case OpKind::MatMul:
            return bound_side == BoundSide::None ? 2 : 1;
        case OpKind::Add:
            return bound ? 1 : 2;
        case OpKind::AddBias:
            return 2;
        default:
            return 1;
    }
}

bool Op::is_linear() const {
    switch (kind) {
        case OpKind::Transpose:
        case OpKind::ConjTranspose:
        case OpKind::Trace:
        case OpKind::Re:
        case OpKind::Im:
        case OpKind::Scale:
        case OpKind::AddBias:
            return true;
        case OpKind::MatMul:
            return bound_side != BoundSide::None;  // one-sided product is linear
        case OpKind::Add:
            return true;  // affine with a constant shift still has tangent rule v -> v
        default:
            return false;
    }
}

std::string Op::describe() const {
    std::string s = to_string(kind);
    if (kind == OpKind::MatMul && bound_side == BoundSide::Left) s = "left_mul";
    if (kind == OpKind::MatMul && bound_side == BoundSide::Right) s = "right_mul";
    if (kind == OpKind::Add && bound) s = "add_const";
    if (kind == OpKind::Power) s += "(" + std::to_string(exponent) + ")";
    if (kind == OpKind::MatFunc) s += std::string("(") + fn->name() + ")";
    return s;
}

namespace {

void check_arity(const Op& op, std::span<const Mat> inputs) {
    if (inputs.size() != op.arity())
        throw FieldError(ErrKind::ShapeMismatch,
                         op.describe() + " takes " + std::to_string(op.arity()) + " inputs, got " +
                             std::to_string(inputs.size()));
}

Mat sigmoid_entrywise(const Mat& x) {
    if (x.field() != Field::Real)
        throw FieldError(ErrKind::FieldMismatch, "sigmoid is defined on the real field");
    Mat out(x.rows(), x.cols(), Field::Real);
    for (std::size_t k = 0; k < x.size(); ++k)
        out.data()[k] = 1.0 / (1.0 + std::exp(-x.data()[k].real()));
    return out;
}

}  // namespace

Mat eval_op(const Op& op, std::span<const Mat> inputs) {
    check_arity(op, inputs);
    const Mat& x = inputs[0];
    switch (op.kind) {
        case OpKind::MatMul:
            if (op.bound_side == Op::BoundSide::Left) return matmul(*op.bound, x);
            if (op.bound_side == Op::BoundSide::Right) return matmul(x, *op.bound);
            return matmul(x, inputs[1]);
        case OpKind::Transpose:
            return transpose(x);
        case OpKind::ConjTranspose:
            return conj_transpose(x);
        case OpKind::Trace:
            return Mat::scalar(trace(x), x.field());
        case OpKind::Inverse:
            return inverse(x);
        case OpKind::Power: {
            Mat acc = x;
            for (int i = 1; i < op.exponent; ++i) acc = matmul(acc, x);
            return acc;
        }
        case OpKind::MatFunc:
            return apply(*op.fn, x).value;
        case OpKind::Add:
            return op.bound ? x + *op.bound : x + inputs[1];
        case OpKind::Scale:
            return scale(x, op.factor);
        case OpKind::Re:
            if (x.field() != Field::Complex)
                throw FieldError(ErrKind::FieldMismatch, "re expects a complex-field input");
            return x.real_part();
        case OpKind::Im:
            if (x.field() != Field::Complex)
                throw FieldError(ErrKind::FieldMismatch, "im expects a complex-field input");
            return x.imag_part();
        case OpKind::Sigmoid:
            return sigmoid_entrywise(x);
        case OpKind::AddBias: {
            const Mat& b = inputs[1];
            if (b.cols() != 1 || b.rows() != x.rows())
                throw FieldError(ErrKind::ShapeMismatch, "bias must be a column matching the rows");
            if (b.field() != x.field())
                throw FieldError(ErrKind::FieldMismatch, "bias field differs from input");
            Mat out = x;
            for (std::size_t i = 0; i < x.rows(); ++i)
                for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) += b(i, 0);
            return out;
        }
        case OpKind::SquaredLoss: {
            if (x.field() != Field::Real)
                throw FieldError(ErrKind::FieldMismatch, "squared_loss is defined on the real field");
            const Mat& y = *op.bound;
            if (!x.same_shape(y))
                throw FieldError(ErrKind::ShapeMismatch, "squared_loss target shape mismatch");
            double s = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) {
                double r = x.data()[k].real() - y.data()[k].real();
                s += r * r;
            }
            return Mat::scalar(s);
        }
    }
    throw FieldError(ErrKind::DomainViolation, "unhandled op kind");
}

}  // namespace matad
