// Reference feed-forward network: sigmoid layers with a squared loss,
// batches as trailing columns, and the mean over samples as the total loss
// (a batch of one makes the mean a plain sum). Ships a hand-written
// backward pass next to the tape program for the same network, the rank-one
// structure check of single-sample weight gradients, and the batched
// gradient decomposition check.

#pragma once

#include <cstdint>
#include <span>

#include "matad/gradcheck.hpp"
#include "matad/reverse.hpp"

namespace matad {

struct FFNParams {
    struct Layer {
        Mat weight;  // widths[l] x widths[l-1]
        Mat bias;    // widths[l] x 1
    };
    std::vector<Layer> layers;

    /// Deterministic initialization: entries uniform in [-1, 1) scaled by
    /// 1/sqrt(fan-in), from the library PRNG.
    static FFNParams seeded(std::span<const std::size_t> widths, std::uint64_t seed);

    std::vector<std::size_t> widths() const;
    std::size_t depth() const { return layers.size(); }
};

struct Batch {
    Mat inputs;   // in x r, one sample per column
    Mat targets;  // out x r

    static Batch seeded(std::size_t in_dim, std::size_t out_dim, std::size_t samples,
                        std::uint64_t seed);
    std::size_t size() const { return inputs.cols(); }
};

/// Mean over samples of the summed squared output error.
double ffn_loss(const FFNParams& params, const Batch& batch);

struct FFNGradients {
    std::vector<Mat> weight;
    std::vector<Mat> bias;
};

/// Hand-written reverse pass storing its own intermediates; no tape.
FFNGradients ffn_backward_manual(const FFNParams& params, const Batch& batch);

/// The same network as a recorded program. Leaves are A1, b1, A2, b2, ...;
/// inputs and targets are constants bound into the ops. A batch of one
/// records layer ops plus the squared loss only; larger batches append the
/// 1/r mean scaling.
Program ffn_program(const FFNParams& params, const Batch& batch);
std::vector<Leaf> ffn_leaves(const FFNParams& params);

/// One full-batch gradient-descent step in place; returns the loss at the
/// point before the step.
double ffn_gd_step(FFNParams& params, const Batch& batch, double learning_rate);

/// Single-sample check: every weight gradient has numerical rank one and
/// equals the outer product of the pre-activation cotangent with the layer
/// input activation.
CheckReport rank1_check(const FFNParams& params, const Batch& single_sample);

/// Gradient of the mean loss equals the mean of per-sample gradients.
CheckReport batched_gradient_decomposition(const FFNParams& params, const Batch& batch);

}  // namespace matad
