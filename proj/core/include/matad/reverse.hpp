// Reverse mode: record a program as a tape of primitive applications with
// their primals and saved contexts, then pull the unit cotangent of the
// scalar output back through the adjoint rule of each node. Cotangents
// meeting at a shared input accumulate by addition. The gradients returned
// are representers under the canonical product; gradient_in_product maps a
// canonical gradient to its representer under another inner product by one
// SPD solve.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "matad/inner_product.hpp"
#include "matad/ops.hpp"

namespace matad {

/// Reference to a value on the tape: either a named leaf or the result of
/// an earlier instruction.
struct ValueRef {
    enum class Tag { Leaf, Node };
    Tag tag;
    std::size_t index;

    static ValueRef leaf(std::size_t i) { return {Tag::Leaf, i}; }
    static ValueRef node(std::size_t i) { return {Tag::Node, i}; }
};

struct Instruction {
    Op op;
    std::vector<ValueRef> inputs;
};

/// A straight-line program over named leaves. The value of the program is
/// the result of its last instruction (or leaf 0 when it has none).
struct Program {
    std::vector<Instruction> steps;

    /// Appends an instruction and returns a reference to its result.
    ValueRef push(Op op, std::vector<ValueRef> inputs);
};

struct Leaf {
    std::string name;
    Mat value;
};

/// One recorded primitive application: sequential id, the op, references to
/// its inputs, the computed primal, and op-specific saved context (the
/// inverse for Inverse nodes, the residual for SquaredLoss; primals that
/// are themselves the needed context, like the sigmoid output, are not
/// duplicated).
struct Node {
    std::size_t id;
    Op op;
    std::vector<ValueRef> inputs;
    Mat primal;
    std::vector<Mat> saved;
};

class Tape {
  public:
    Tape(std::vector<Leaf> leaves, std::vector<Node> nodes, ValueRef output);

    const std::vector<Leaf>& leaves() const { return leaves_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    ValueRef output() const { return output_; }
    const Mat& value_of(ValueRef ref) const;
    const Mat& output_value() const { return value_of(output_); }

  private:
    std::vector<Leaf> leaves_;
    std::vector<Node> nodes_;
    ValueRef output_;
};

/// Evaluates the program's primals and saves per-node context. The output
/// must be a 1x1 real-field value.
Tape record(const Program& program, std::vector<Leaf> leaves);

/// Primal-only evaluation, used by finite differencing.
Mat evaluate(const Program& program, std::span<const Mat> leaf_values);

/// Adjoint rule of one primitive under the canonical product of its own
/// field: per live input, the cotangent pulled back through the op
/// linearized at `inputs`. `saved` may carry the recorded context; when
/// empty it is recomputed.
std::vector<Mat> vjp_op(const Op& op, std::span<const Mat> inputs, const Mat& cotangent,
                        std::span<const Mat> saved = {});

/// Adjoint rule applied at a recorded node.
std::vector<Mat> vjp(const Tape& tape, const Node& node, const Mat& cotangent);

struct GradientReport {
    std::vector<std::string> names;
    std::vector<Mat> gradients;
    InnerProduct::Kind product = InnerProduct::Kind::Canonical;

    const Mat& for_leaf(const std::string& name) const;
};

/// Seeds the scalar output with cotangent 1 and sweeps the tape in reverse,
/// accumulating cotangents at shared inputs; returns the canonical-product
/// gradient of every leaf.
GradientReport backprop(const Tape& tape);

/// Representer change: the gradient under Weighted(H) is H^{-1} times the
/// canonical gradient; canonical kinds return the input unchanged.
Mat gradient_in_product(const Mat& g_canonical, const InnerProduct& p);

/// Adjoint of A -> X A under the H-weighted product: H^{-1} X^T H G.
Mat adjoint_weighted_left_mul(const Mat& x, const Mat& g, const Mat& h);

}  // namespace matad
