#include "matad/reverse.hpp"

#include <optional>
#include <utility>

#include "matad/forward.hpp"

namespace matad {

ValueRef Program::push(Op op, std::vector<ValueRef> inputs) {
    steps.push_back(Instruction{std::move(op), std::move(inputs)});
    return ValueRef::node(steps.size() - 1);
}

Tape::Tape(std::vector<Leaf> leaves, std::vector<Node> nodes, ValueRef output)
    : leaves_(std::move(leaves)), nodes_(std::move(nodes)), output_(output) {}

const Mat& Tape::value_of(ValueRef ref) const {
    if (ref.tag == ValueRef::Tag::Leaf) return leaves_.at(ref.index).value;
    return nodes_.at(ref.index).primal;
}

namespace {

void check_refs(const Instruction& inst, std::size_t step_index, std::size_t leaf_count) {
    for (const ValueRef& ref : inst.inputs) {
        if (ref.tag == ValueRef::Tag::Leaf) {
            if (ref.index >= leaf_count)
                throw FieldError(ErrKind::ShapeMismatch, "instruction references a missing leaf");
        } else if (ref.index >= step_index) {
            // Topological order: nodes may only consume earlier results.
            throw FieldError(ErrKind::ShapeMismatch,
                             "instruction references a later or current node");
        }
    }
}

std::vector<Mat> gather_inputs(const Instruction& inst,
                               const std::vector<Leaf>& leaves,
                               const std::vector<Mat>& primals) {
    std::vector<Mat> ins;
    ins.reserve(inst.inputs.size());
    for (const ValueRef& ref : inst.inputs)
        ins.push_back(ref.tag == ValueRef::Tag::Leaf ? leaves[ref.index].value
                                                     : primals[ref.index]);
    return ins;
}

}  // namespace

Tape record(const Program& program, std::vector<Leaf> leaves) {
    if (leaves.empty()) throw FieldError(ErrKind::ShapeMismatch, "a tape needs at least one leaf");

    std::vector<Node> nodes;
    std::vector<Mat> primals;
    nodes.reserve(program.steps.size());
    primals.reserve(program.steps.size());

    for (std::size_t i = 0; i < program.steps.size(); ++i) {
        const Instruction& inst = program.steps[i];
        check_refs(inst, i, leaves.size());
        std::vector<Mat> ins = gather_inputs(inst, leaves, primals);
        Mat primal = eval_op(inst.op, ins);

        std::vector<Mat> saved;
        if (inst.op.kind == OpKind::SquaredLoss) saved.push_back(ins[0] - *inst.op.bound);
        // Inverse and Sigmoid need exactly their own primal, already stored.

        primals.push_back(primal);
        nodes.push_back(Node{i, inst.op, inst.inputs, std::move(primal), std::move(saved)});
    }

    ValueRef output =
        program.steps.empty() ? ValueRef::leaf(0) : ValueRef::node(program.steps.size() - 1);
    const Mat& out = output.tag == ValueRef::Tag::Leaf ? leaves[output.index].value
                                                       : nodes[output.index].primal;
    if (out.rows() != 1 || out.cols() != 1)
        throw FieldError(ErrKind::ShapeMismatch, "tape output must be a 1x1 scalar");
    if (out.field() != Field::Real)
        throw FieldError(ErrKind::FieldMismatch,
                         "tape output must be real; end complex programs with re or im");
    return Tape(std::move(leaves), std::move(nodes), output);
}

Mat evaluate(const Program& program, std::span<const Mat> leaf_values) {
    if (leaf_values.empty())
        throw FieldError(ErrKind::ShapeMismatch, "evaluation needs at least one leaf");
    std::vector<Mat> primals;
    primals.reserve(program.steps.size());
    for (std::size_t i = 0; i < program.steps.size(); ++i) {
        const Instruction& inst = program.steps[i];
        check_refs(inst, i, leaf_values.size());
        std::vector<Mat> ins;
        ins.reserve(inst.inputs.size());
        for (const ValueRef& ref : inst.inputs)
            ins.push_back(ref.tag == ValueRef::Tag::Leaf ? leaf_values[ref.index]
                                                         : primals[ref.index]);
        primals.push_back(eval_op(inst.op, ins));
    }
    return program.steps.empty() ? leaf_values[0] : primals.back();
}

namespace {

/// conj_transpose on the complex field, plain transpose on the real field;
/// adjoints swap a product side and conjugate on the way.
Mat adj_t(const Mat& m) { return conj_transpose(m); }

}  // namespace

std::vector<Mat> vjp_op(const Op& op, std::span<const Mat> inputs, const Mat& cotangent,
                        std::span<const Mat> saved) {
    if (inputs.size() != op.arity())
        throw FieldError(ErrKind::ShapeMismatch, op.describe() + ": wrong number of inputs");
    const Mat& x = inputs[0];
    const Mat& g = cotangent;
    switch (op.kind) {
        case OpKind::MatMul: {
            if (op.bound_side == Op::BoundSide::Left) return {matmul(adj_t(*op.bound), g)};
            if (op.bound_side == Op::BoundSide::Right) return {matmul(g, adj_t(*op.bound))};
            const Mat& b = inputs[1];
            return {matmul(g, adj_t(b)), matmul(adj_t(x), g)};
        }
        case OpKind::Transpose:
            return {transpose(g)};
        case OpKind::ConjTranspose:
            return {conj_transpose(g)};
        case OpKind::Trace: {
            if (g.rows() != 1 || g.cols() != 1)
                throw FieldError(ErrKind::ShapeMismatch, "trace cotangent must be 1x1");
            Mat out = Mat::identity(x.rows(), x.field());
            if (x.field() == Field::Complex) return {cscale(out, g(0, 0))};
            return {scale(out, g(0, 0).real())};
        }
        case OpKind::Inverse: {
            // -A^{-H} G A^{-H}; the recorded primal is A^{-1} itself.
            Mat inv_h = saved.empty() ? adj_t(Lu::factor(x).inverse()) : adj_t(saved[0]);
            return {-matmul(matmul(inv_h, g), inv_h)};
        }
        case OpKind::Power:
            // Adjoint of the power rule: same sum taken at the transposed point.
            return {jvp_power(adj_t(x), g, op.exponent)};
        case OpKind::MatFunc:
            return {adjoint_frechet(*op.fn, x, g)};
        case OpKind::Add:
            if (op.bound) return {g};
            return {g, g};
        case OpKind::Scale:
            return {scale(g, op.factor)};
        case OpKind::Re:
            // Embed the real cotangent as the real part of a complex one.
            return {complex_from(g, Mat::zeros(g.rows(), g.cols()))};
        case OpKind::Im:
            return {complex_from(Mat::zeros(g.rows(), g.cols()), g)};
        case OpKind::Sigmoid: {
            Mat s = saved.empty() ? eval_op(Op::sigmoid(), std::span<const Mat>(&x, 1)) : saved[0];
            return {hadamard(hadamard(s, Mat::ones(s.rows(), s.cols()) - s), g)};
        }
        case OpKind::AddBias: {
            // Bias receives the column sums of the cotangent.
            Mat col = matmul(g, Mat::ones(g.cols(), 1, g.field()));
            return {g, std::move(col)};
        }
        case OpKind::SquaredLoss: {
            if (g.rows() != 1 || g.cols() != 1)
                throw FieldError(ErrKind::ShapeMismatch, "squared_loss cotangent must be 1x1");
            Mat residual = saved.empty() ? x - *op.bound : saved[0];
            return {scale(residual, 2.0 * g(0, 0).real())};
        }
    }
    throw FieldError(ErrKind::DomainViolation, "unhandled op kind");
}

std::vector<Mat> vjp(const Tape& tape, const Node& node, const Mat& cotangent) {
    std::vector<Mat> ins;
    ins.reserve(node.inputs.size());
    for (const ValueRef& ref : node.inputs) ins.push_back(tape.value_of(ref));
    std::span<const Mat> saved(node.saved);
    if (node.op.kind == OpKind::Inverse || node.op.kind == OpKind::Sigmoid)
        saved = std::span<const Mat>(&node.primal, 1);
    return vjp_op(node.op, ins, cotangent, saved);
}

const Mat& GradientReport::for_leaf(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return gradients[i];
    throw FieldError(ErrKind::ShapeMismatch, "no gradient recorded for leaf '" + name + "'");
}

GradientReport backprop(const Tape& tape) {
    const Mat& out = tape.output_value();
    if (out.rows() != 1 || out.cols() != 1 || out.field() != Field::Real)
        throw FieldError(ErrKind::ShapeMismatch, "backprop needs a real scalar output");

    std::vector<std::optional<Mat>> node_cot(tape.nodes().size());
    std::vector<std::optional<Mat>> leaf_cot(tape.leaves().size());

    auto accumulate = [&](ValueRef ref, Mat contribution) {
        auto& slot = ref.tag == ValueRef::Tag::Leaf ? leaf_cot[ref.index] : node_cot[ref.index];
        if (slot) {
            slot = *slot + contribution;
        } else {
            slot = std::move(contribution);
        }
    };

    accumulate(tape.output(), Mat::scalar(1.0));

    for (std::size_t i = tape.nodes().size(); i-- > 0;) {
        const Node& node = tape.nodes()[i];
        if (!node_cot[i]) continue;  // output does not depend on this node
        std::vector<Mat> input_cots = vjp(tape, node, *node_cot[i]);
        for (std::size_t j = 0; j < node.inputs.size(); ++j)
            accumulate(node.inputs[j], std::move(input_cots[j]));
    }

    GradientReport report;
    for (std::size_t i = 0; i < tape.leaves().size(); ++i) {
        const Leaf& leaf = tape.leaves()[i];
        report.names.push_back(leaf.name);
        report.gradients.push_back(leaf_cot[i] ? std::move(*leaf_cot[i])
                                               : Mat::zeros(leaf.value.rows(), leaf.value.cols(),
                                                            leaf.value.field()));
    }
    return report;
}

Mat gradient_in_product(const Mat& g_canonical, const InnerProduct& p) {
    switch (p.kind()) {
        case InnerProduct::Kind::Canonical:
        case InnerProduct::Kind::ComplexCanonical:
            return g_canonical;
        case InnerProduct::Kind::Weighted: {
            if (g_canonical.field() != Field::Real)
                throw FieldError(ErrKind::FieldMismatch, "weighted gradients are real-field only");
            if (p.weight().rows() != g_canonical.rows())
                throw FieldError(ErrKind::ShapeMismatch, "weight does not match gradient shape");
            return p.weight_factor().solve(g_canonical);
        }
    }
    return g_canonical;
}

Mat adjoint_weighted_left_mul(const Mat& x, const Mat& g, const Mat& h) {
    if (x.field() != Field::Real || g.field() != Field::Real)
        throw FieldError(ErrKind::FieldMismatch, "weighted adjoints are real-field only");
    Cholesky chol = Cholesky::factor(h);
    if (!x.is_square() || x.rows() != h.rows() || x.cols() != g.rows())
        throw FieldError(ErrKind::ShapeMismatch, "adjoint_weighted_left_mul shape mismatch");
    // L_X^* = L_{H^{-1} X^T H} under <.,.>_H.
    return chol.solve(matmul(transpose(x), matmul(h, g)));
}

}  // namespace matad
