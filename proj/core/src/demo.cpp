#include "matad/demo.hpp"

#include <cmath>

namespace matad {

FFNParams FFNParams::seeded(std::span<const std::size_t> widths, std::uint64_t seed) {
    if (widths.size() < 2)
        throw FieldError(ErrKind::ShapeMismatch, "a network needs an input and an output width");
    FFNParams params;
    std::uint64_t s = seed;
    for (std::size_t l = 1; l < widths.size(); ++l) {
        double gain = 1.0 / std::sqrt(double(widths[l - 1]));
        Mat w = scale(random_mat(widths[l], widths[l - 1], Field::Real, ++s), gain);
        Mat b = scale(random_mat(widths[l], 1, Field::Real, ++s), gain);
        params.layers.push_back(Layer{std::move(w), std::move(b)});
    }
    return params;
}

std::vector<std::size_t> FFNParams::widths() const {
    std::vector<std::size_t> w;
    w.push_back(layers.front().weight.cols());
    for (const Layer& layer : layers) w.push_back(layer.weight.rows());
    return w;
}

Batch Batch::seeded(std::size_t in_dim, std::size_t out_dim, std::size_t samples,
                    std::uint64_t seed) {
    return Batch{random_mat(in_dim, samples, Field::Real, seed * 2 + 1),
                 random_mat(out_dim, samples, Field::Real, seed * 2 + 2)};
}

namespace {

Mat sigmoid(const Mat& x) {
    Mat out(x.rows(), x.cols(), Field::Real);
    for (std::size_t k = 0; k < x.size(); ++k)
        out.data()[k] = 1.0 / (1.0 + std::exp(-x.data()[k].real()));
    return out;
}

Mat add_bias(const Mat& x, const Mat& b) {
    Mat out = x;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) += b(i, 0);
    return out;
}

struct ForwardTrace {
    std::vector<Mat> activations;  // activations[0] is the input batch
};

ForwardTrace forward(const FFNParams& params, const Batch& batch) {
    if (batch.inputs.cols() != batch.targets.cols())
        throw FieldError(ErrKind::ShapeMismatch, "inputs and targets need matching sample counts");
    ForwardTrace trace;
    trace.activations.push_back(batch.inputs);
    for (const FFNParams::Layer& layer : params.layers) {
        Mat z = add_bias(matmul(layer.weight, trace.activations.back()), layer.bias);
        trace.activations.push_back(sigmoid(z));
    }
    if (!trace.activations.back().same_shape(batch.targets))
        throw FieldError(ErrKind::ShapeMismatch, "network output does not match target shape");
    return trace;
}

/// Backward pass from a completed forward trace; also hands out the
/// per-layer pre-activation cotangents (the u of the rank-one story).
FFNGradients backward(const FFNParams& params, const Batch& batch, const ForwardTrace& trace,
                      std::vector<Mat>* deltas_out = nullptr) {
    const double r = double(batch.size());
    const std::size_t depth = params.layers.size();
    FFNGradients grads;
    grads.weight.resize(depth, Mat::scalar(0.0));
    grads.bias.resize(depth, Mat::scalar(0.0));
    if (deltas_out) deltas_out->assign(depth, Mat::scalar(0.0));

    Mat g = scale(trace.activations[depth] - batch.targets, 2.0 / r);
    for (std::size_t l = depth; l-- > 0;) {
        const Mat& act = trace.activations[l + 1];
        Mat delta = hadamard(hadamard(act, Mat::ones(act.rows(), act.cols()) - act), g);
        grads.weight[l] = matmul(delta, transpose(trace.activations[l]));
        grads.bias[l] = matmul(delta, Mat::ones(delta.cols(), 1));
        if (l > 0) g = matmul(transpose(params.layers[l].weight), delta);
        if (deltas_out) (*deltas_out)[l] = std::move(delta);
    }
    return grads;
}

}  // namespace

double ffn_loss(const FFNParams& params, const Batch& batch) {
    ForwardTrace trace = forward(params, batch);
    Mat residual = trace.activations.back() - batch.targets;
    double s = 0.0;
    for (const Scalar& v : residual.data()) s += v.real() * v.real();
    return s / double(batch.size());
}

FFNGradients ffn_backward_manual(const FFNParams& params, const Batch& batch) {
    ForwardTrace trace = forward(params, batch);
    return backward(params, batch, trace);
}

Program ffn_program(const FFNParams& params, const Batch& batch) {
    Program program;
    ValueRef h = ValueRef::leaf(0);
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        ValueRef z = l == 0
                         ? program.push(Op::right_mul(batch.inputs), {ValueRef::leaf(0)})
                         : program.push(Op::matmul(), {ValueRef::leaf(2 * l), h});
        z = program.push(Op::add_bias(), {z, ValueRef::leaf(2 * l + 1)});
        h = program.push(Op::sigmoid(), {z});
    }
    program.push(Op::squared_loss(batch.targets), {h});
    if (batch.size() > 1)
        program.push(Op::scale_by(1.0 / double(batch.size())),
                     {ValueRef::node(program.steps.size() - 1)});
    return program;
}

std::vector<Leaf> ffn_leaves(const FFNParams& params) {
    std::vector<Leaf> leaves;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        leaves.push_back(Leaf{"A" + std::to_string(l + 1), params.layers[l].weight});
        leaves.push_back(Leaf{"b" + std::to_string(l + 1), params.layers[l].bias});
    }
    return leaves;
}

double ffn_gd_step(FFNParams& params, const Batch& batch, double learning_rate) {
    double loss = ffn_loss(params, batch);
    FFNGradients grads = ffn_backward_manual(params, batch);
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        params.layers[l].weight = params.layers[l].weight - scale(grads.weight[l], learning_rate);
        params.layers[l].bias = params.layers[l].bias - scale(grads.bias[l], learning_rate);
    }
    return loss;
}

CheckReport rank1_check(const FFNParams& params, const Batch& single_sample) {
    if (single_sample.size() != 1)
        throw FieldError(ErrKind::ShapeMismatch, "rank-one check needs a batch of exactly one");

    Tape tape = record(ffn_program(params, single_sample), ffn_leaves(params));
    GradientReport grads = backprop(tape);

    ForwardTrace trace = forward(params, single_sample);
    std::vector<Mat> deltas;
    backward(params, single_sample, trace, &deltas);

    CheckReport report;
    report.name = "rank1";
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        const Mat& g = grads.for_leaf("A" + std::to_string(l + 1));
        int rank = numerical_rank(g, 1e-10);
        report.add_case(CheckCase{"rank A" + std::to_string(l + 1),
                                  std::abs(double(rank) - 1.0), 0.0, rank == 1});

        // u v^T with u the pre-activation cotangent and v the input activation.
        Mat outer = matmul(deltas[l], transpose(trace.activations[l]));
        double rel = frobenius_norm(g - outer) / std::max(frobenius_norm(g), 1e-300);
        report.add_case(CheckCase{"factorization A" + std::to_string(l + 1),
                                  frobenius_norm(g - outer), rel, rel <= 1e-12});
    }
    return report;
}

CheckReport batched_gradient_decomposition(const FFNParams& params, const Batch& batch) {
    if (batch.size() < 2)
        throw FieldError(ErrKind::ShapeMismatch, "decomposition check needs at least two samples");
    FFNGradients whole = ffn_backward_manual(params, batch);

    const std::size_t r = batch.size();
    FFNGradients mean;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        mean.weight.push_back(Mat::zeros(whole.weight[l].rows(), whole.weight[l].cols()));
        mean.bias.push_back(Mat::zeros(whole.bias[l].rows(), whole.bias[l].cols()));
    }
    for (std::size_t s = 0; s < r; ++s) {
        Mat x(batch.inputs.rows(), 1, Field::Real);
        Mat y(batch.targets.rows(), 1, Field::Real);
        for (std::size_t i = 0; i < x.rows(); ++i) x(i, 0) = batch.inputs(i, s);
        for (std::size_t i = 0; i < y.rows(); ++i) y(i, 0) = batch.targets(i, s);
        FFNGradients one = ffn_backward_manual(params, Batch{std::move(x), std::move(y)});
        for (std::size_t l = 0; l < params.layers.size(); ++l) {
            mean.weight[l] = mean.weight[l] + scale(one.weight[l], 1.0 / double(r));
            mean.bias[l] = mean.bias[l] + scale(one.bias[l], 1.0 / double(r));
        }
    }

    CheckReport report;
    report.name = "batch-decomposition";
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        auto add = [&](const char* tag, const Mat& a, const Mat& b) {
            double abs_err = frobenius_norm(a - b);
            double rel = abs_err / std::max(frobenius_norm(a), 1e-300);
            report.add_case(CheckCase{std::string(tag) + std::to_string(l + 1), abs_err, rel,
                                      rel <= 1e-12 || abs_err <= 1e-15});
        };
        add("A", whole.weight[l], mean.weight[l]);
        add("b", whole.bias[l], mean.bias[l]);
    }
    return report;
}

}  // namespace matad
