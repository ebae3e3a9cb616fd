#include "matad/forward.hpp"

#include <vector>

namespace matad {

Dual::Dual(Mat primal_, Mat tangent_) : primal(std::move(primal_)), tangent(std::move(tangent_)) {
    if (!primal.same_shape(tangent))
        throw FieldError(ErrKind::ShapeMismatch, "dual: primal and tangent shapes differ");
    if (primal.field() != tangent.field())
        throw FieldError(ErrKind::FieldMismatch, "dual: primal and tangent fields differ");
}

Dual Dual::constant(Mat value) {
    Mat zero = Mat::zeros(value.rows(), value.cols(), value.field());
    return Dual(std::move(value), std::move(zero));
}

Dual jvp_linear(const Op& op, std::span<const Dual> inputs) {
    if (!op.is_linear())
        throw FieldError(ErrKind::DomainViolation, op.describe() + " is not a linear kind");
    std::vector<Mat> primals;
    std::vector<Mat> tangents;
    primals.reserve(inputs.size());
    tangents.reserve(inputs.size());
    for (const Dual& d : inputs) {
        primals.push_back(d.primal);
        tangents.push_back(d.tangent);
    }
    Mat primal_out = eval_op(op, primals);
    // The affine shift of add_const acts on the primal only; strip it from
    // the tangent path so the rule stays T(v) = v.
    Op tangent_op = op;
    if (op.kind == OpKind::Add && op.bound) tangent_op = Op::scale_by(1.0);
    Mat tangent_out = eval_op(tangent_op, tangents);
    return Dual(std::move(primal_out), std::move(tangent_out));
}

Dual jvp_linear(const Op& op, const Dual& input) {
    return jvp_linear(op, std::span<const Dual>(&input, 1));
}

Dual jvp_matmul(const Dual& a, const Dual& b) {
    Mat primal = matmul(a.primal, b.primal);
    Mat tangent = matmul(a.tangent, b.primal) + matmul(a.primal, b.tangent);
    return Dual(std::move(primal), std::move(tangent));
}

Mat jvp_power(const Mat& a, const Mat& e, int k) {
    if (k < 1) throw FieldError(ErrKind::DomainViolation, "power exponent must be positive");
    if (!a.is_square()) throw FieldError(ErrKind::ShapeMismatch, "power base must be square");
    if (!a.same_shape(e) || a.field() != e.field())
        throw FieldError(a.same_shape(e) ? ErrKind::FieldMismatch : ErrKind::ShapeMismatch,
                         "direction must match the base point");
    // Cache A^0..A^{k-1} once; each summand is then two products.
    std::vector<Mat> powers;
    powers.reserve(std::size_t(k));
    powers.push_back(Mat::identity(a.rows(), a.field()));
    for (int i = 1; i < k; ++i) powers.push_back(matmul(powers.back(), a));

    Mat sum = Mat::zeros(a.rows(), a.cols(), a.field());
    for (int i = 0; i < k; ++i)
        sum = sum + matmul(matmul(powers[std::size_t(i)], e), powers[std::size_t(k - 1 - i)]);
    return sum;
}

Mat jvp_inverse(const Mat& a, const Mat& e) {
    if (!a.same_shape(e) || a.field() != e.field())
        throw FieldError(a.same_shape(e) ? ErrKind::FieldMismatch : ErrKind::ShapeMismatch,
                         "direction must match the base point");
    Mat a_inv = Lu::factor(a).inverse();
    return -matmul(matmul(a_inv, e), a_inv);
}

Dual jvp_elementwise(OpKind kind, const Dual& d, const Mat* aux) {
    switch (kind) {
        case OpKind::Sigmoid: {
            Mat s = eval_op(Op::sigmoid(), std::span<const Mat>(&d.primal, 1));
            Mat deriv = hadamard(s, Mat::ones(s.rows(), s.cols()) - s);
            return Dual(std::move(s), hadamard(deriv, d.tangent));
        }
        case OpKind::SquaredLoss: {
            if (aux == nullptr)
                throw FieldError(ErrKind::ShapeMismatch, "squared_loss needs a target");
            Op op = Op::squared_loss(*aux);
            Mat primal = eval_op(op, std::span<const Mat>(&d.primal, 1));
            Mat residual = d.primal - *aux;
            double t = 0.0;
            for (std::size_t k = 0; k < residual.size(); ++k)
                t += 2.0 * residual.data()[k].real() * d.tangent.data()[k].real();
            return Dual(std::move(primal), Mat::scalar(t));
        }
        default:
            throw FieldError(ErrKind::DomainViolation, "not an elementwise kind");
    }
}

Dual jvp_op(const Op& op, std::span<const Dual> inputs) {
    if (inputs.size() != op.arity())
        throw FieldError(ErrKind::ShapeMismatch,
                         op.describe() + ": wrong number of dual inputs");
    switch (op.kind) {
        case OpKind::MatMul:
            if (op.bound_side == Op::BoundSide::Left)
                return jvp_matmul(Dual::constant(*op.bound), inputs[0]);
            if (op.bound_side == Op::BoundSide::Right)
                return jvp_matmul(inputs[0], Dual::constant(*op.bound));
            return jvp_matmul(inputs[0], inputs[1]);
        case OpKind::Power:
            return Dual(eval_op(op, std::span<const Mat>(&inputs[0].primal, 1)),
                        jvp_power(inputs[0].primal, inputs[0].tangent, op.exponent));
        case OpKind::Inverse:
            return Dual(inverse(inputs[0].primal),
                        jvp_inverse(inputs[0].primal, inputs[0].tangent));
        case OpKind::MatFunc:
            return Dual(apply(*op.fn, inputs[0].primal).value,
                        frechet_block(*op.fn, inputs[0].primal, inputs[0].tangent));
        case OpKind::Sigmoid:
            return jvp_elementwise(OpKind::Sigmoid, inputs[0]);
        case OpKind::SquaredLoss:
            return jvp_elementwise(OpKind::SquaredLoss, inputs[0], &*op.bound);
        default:
            return jvp_linear(op, inputs);
    }
}

Mat jvp_chain(std::span<const Op> stages, const Mat& x, const Mat& v) {
    Dual d(x, v);
    for (const Op& op : stages) {
        if (op.arity() != 1)
            throw FieldError(ErrKind::ShapeMismatch,
                             "chain stages must be unary; bind constants into the op");
        d = jvp_op(op, std::span<const Dual>(&d, 1));
    }
    return d.tangent;
}

}  // namespace matad
