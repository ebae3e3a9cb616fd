#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "matad/forward.hpp"
#include "matad/gradcheck.hpp"
#include "matad/reverse.hpp"

using namespace matad;

namespace {

double max_abs_diff(const Mat& a, const Mat& b) { return max_abs_entry(a - b); }

}  // namespace

TEST_CASE("record: empty program and a single-op trace") {
    Tape leaf_only = record(Program{}, {Leaf{"x", Mat::scalar(3.5)}});
    CHECK(leaf_only.nodes().empty());
    CHECK(leaf_only.output_value()(0, 0).real() == 3.5);

    Program tr;
    tr.push(Op::trace(), {ValueRef::leaf(0)});
    Tape tape = record(tr, {Leaf{"A", random_mat(3, 3, Field::Real, 1)}});
    CHECK(tape.nodes().size() == 1);
}

TEST_CASE("record rejects non-scalar and non-real outputs") {
    Program id;  // no steps, leaf is the output
    CHECK_THROWS_AS(record(id, {Leaf{"A", random_mat(2, 2, Field::Real, 2)}}), FieldError);

    Program tr;
    tr.push(Op::trace(), {ValueRef::leaf(0)});
    try {
        record(tr, {Leaf{"A", random_mat(2, 2, Field::Complex, 3)}});
        CHECK(false);
    } catch (const FieldError& e) {
        CHECK(e.kind() == ErrKind::FieldMismatch);  // complex trace needs re/im
    }
}

TEST_CASE("record rejects forward references") {
    Program bad;
    bad.steps.push_back(Instruction{Op::trace(), {ValueRef::node(5)}});
    CHECK_THROWS_AS(record(bad, {Leaf{"A", Mat::scalar(1.0)}}), FieldError);
}

TEST_CASE("vjp rules: trace, right multiplication, power identity, complex left multiplication") {
    Mat a = random_mat(4, 4, Field::Real, 5);

    std::vector<Mat> trace_cots =
        vjp_op(Op::trace(), std::span<const Mat>(&a, 1), Mat::scalar(1.0));
    CHECK(max_abs_diff(trace_cots[0], Mat::identity(4)) == 0.0);

    Mat x = random_mat(4, 3, Field::Real, 6);
    Mat input = random_mat(2, 4, Field::Real, 7);
    Mat b = random_mat(2, 3, Field::Real, 8);
    std::vector<Mat> right_cots =
        vjp_op(Op::right_mul(x), std::span<const Mat>(&input, 1), b);
    CHECK(max_abs_diff(right_cots[0], matmul(b, transpose(x))) == 0.0);

    Mat g = random_mat(4, 4, Field::Real, 9);
    std::vector<Mat> pow_cots = vjp_op(Op::power(1), std::span<const Mat>(&a, 1), g);
    CHECK(max_abs_diff(pow_cots[0], g) == 0.0);

    Mat xc = random_mat(3, 3, Field::Complex, 10);
    Mat ac = random_mat(3, 2, Field::Complex, 11);
    Mat ec = random_mat(3, 2, Field::Complex, 12);
    std::vector<Mat> left_cots = vjp_op(Op::left_mul(xc), std::span<const Mat>(&ac, 1), ec);
    CHECK(max_abs_diff(left_cots[0], matmul(conj_transpose(xc), ec)) == 0.0);
}

TEST_CASE("backprop: linear functional, trace, complex real part") {
    // f(x) = g^T x has gradient g everywhere.
    Mat g = random_mat(5, 1, Field::Real, 13);
    Mat x = random_mat(5, 1, Field::Real, 14);
    Program p;
    p.push(Op::left_mul(transpose(g)), {ValueRef::leaf(0)});
    GradientReport grads = backprop(record(p, {Leaf{"x", x}}));
    CHECK(max_abs_diff(grads.for_leaf("x"), g) == 0.0);

    // f(A) = tr(A) has gradient I.
    Program tr;
    tr.push(Op::trace(), {ValueRef::leaf(0)});
    GradientReport tr_grads = backprop(record(tr, {Leaf{"A", random_mat(4, 4, Field::Real, 15)}}));
    CHECK(max_abs_diff(tr_grads.for_leaf("A"), Mat::identity(4)) == 0.0);

    // f(x) = Re(g^T x) over complex x has gradient conj(g).
    Mat gc = random_mat(4, 1, Field::Complex, 16);
    Mat xc = random_mat(4, 1, Field::Complex, 17);
    Program pc;
    ValueRef prod = pc.push(Op::left_mul(transpose(gc)), {ValueRef::leaf(0)});
    pc.push(Op::re(), {prod});
    GradientReport cg = backprop(record(pc, {Leaf{"x", xc}}));
    Mat conj_g = conj_transpose(transpose(gc));
    CHECK(max_abs_diff(cg.for_leaf("x"), conj_g) < 1e-15);
}

TEST_CASE("backprop accumulates cotangents at shared inputs") {
    // f(A) = tr(A A): the gradient is 2 A^T.
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Mat a = random_mat(4, 4, Field::Real, seed + 20);
        Program p;
        ValueRef prod = p.push(Op::matmul(), {ValueRef::leaf(0), ValueRef::leaf(0)});
        p.push(Op::trace(), {prod});
        GradientReport grads = backprop(record(p, {Leaf{"A", a}}));
        CHECK(max_abs_diff(grads.for_leaf("A"), scale(transpose(a), 2.0)) < 1e-14);

        // Cross-checked against entrywise finite differences.
        CheckReport fd = gradcheck(p, {Leaf{"A", a}});
        CHECK(fd.pass);
    }
}

TEST_CASE("unused leaves receive zero gradients") {
    Program p;
    p.push(Op::trace(), {ValueRef::leaf(0)});
    GradientReport grads = backprop(record(
        p, {Leaf{"A", random_mat(2, 2, Field::Real, 30)}, Leaf{"B", random_mat(3, 1, Field::Real, 31)}}));
    CHECK(frobenius_norm(grads.for_leaf("B")) == 0.0);
    CHECK(grads.for_leaf("B").rows() == 3);
}

TEST_CASE("adjoint reversal: composed tape equals manual adjoint composition") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Mat x1 = random_mat(3, 3, Field::Real, seed + 40);
        Mat x2 = random_mat(3, 3, Field::Real, seed + 50);
        Mat a = random_mat(3, 3, Field::Real, seed + 60);

        Program p;
        ValueRef s1 = p.push(Op::left_mul(x1), {ValueRef::leaf(0)});
        ValueRef s2 = p.push(Op::right_mul(x2), {s1});
        p.push(Op::trace(), {s2});
        GradientReport grads = backprop(record(p, {Leaf{"A", a}}));

        // (T o S)^* = S^* o T^*: pull I back through right_mul then left_mul.
        Mat manual = matmul(Mat::identity(3), transpose(x2));
        manual = matmul(transpose(x1), manual);
        CHECK(max_abs_diff(grads.for_leaf("A"), manual) < 1e-14);
    }
}

TEST_CASE("adjoint is linear in the cotangent") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Mat a = random_well_conditioned(3, Field::Real, seed);
        Mat g1 = random_mat(3, 3, Field::Real, seed + 70);
        Mat g2 = random_mat(3, 3, Field::Real, seed + 80);
        const double c = 2.75;
        for (const Op& op : {Op::inverse(), Op::power(3), Op::transpose()}) {
            std::vector<Mat> lhs =
                vjp_op(op, std::span<const Mat>(&a, 1), scale(g1, c) + g2);
            std::vector<Mat> r1 = vjp_op(op, std::span<const Mat>(&a, 1), g1);
            std::vector<Mat> r2 = vjp_op(op, std::span<const Mat>(&a, 1), g2);
            CHECK(frobenius_norm(lhs[0] - (scale(r1[0], c) + r2[0])) <=
                  1e-12 * (1.0 + frobenius_norm(lhs[0])));
        }
    }
}

TEST_CASE("gradient_in_product: canonical identity, diagonal weight, defining identity") {
    Mat g = random_mat(4, 1, Field::Real, 90);
    CHECK(max_abs_diff(gradient_in_product(g, InnerProduct::canonical()), g) == 0.0);

    InnerProduct half = InnerProduct::weighted(scale(Mat::identity(4), 2.0));
    CHECK(max_abs_diff(gradient_in_product(g, half), scale(g, 0.5)) < 1e-15);

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Mat h = random_spd(4, seed + 100);
        InnerProduct p = InnerProduct::weighted(h);
        Mat gc = random_mat(4, 1, Field::Real, seed + 110);
        Mat gw = gradient_in_product(gc, p);
        Mat v = random_mat(4, 1, Field::Real, seed + 120);
        // <grad_H, v>_H must reproduce the canonical pairing <g, v>.
        CHECK(std::abs(inner(gw, v, p) - inner(gc, v)) < 1e-10);
    }
}

TEST_CASE("weighted adjoint of left multiplication") {
    Mat x = random_mat(3, 3, Field::Real, 130);
    Mat g = random_mat(3, 2, Field::Real, 131);

    // H = I reduces to the canonical adjoint X^T G.
    CHECK(max_abs_diff(adjoint_weighted_left_mul(x, g, Mat::identity(3)),
                       matmul(transpose(x), g)) < 1e-14);

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Mat h = random_spd(3, seed + 140);
        InnerProduct p = InnerProduct::weighted(h);
        Mat xs = random_mat(3, 3, Field::Real, seed + 150);
        Mat a = random_mat(3, 2, Field::Real, seed + 160);
        Mat b = random_mat(3, 2, Field::Real, seed + 170);
        double lhs = inner(b, matmul(xs, a), p);
        double rhs = inner(adjoint_weighted_left_mul(xs, b, h), a, p);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)));

        // Right multiplication keeps its canonical adjoint under the weight.
        Mat ar = random_mat(3, 3, Field::Real, seed + 180);
        Mat br = random_mat(3, 3, Field::Real, seed + 190);
        double wl = inner(br, matmul(ar, xs), p);
        double wr = inner(matmul(br, transpose(xs)), ar, p);
        CHECK(std::abs(wl - wr) <= 1e-10 * (1.0 + std::abs(wl)));
    }
}

TEST_CASE("tangent values ignore the product choice while representers move by the weight") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Mat a = random_mat(3, 3, Field::Real, seed + 200);
        Mat v = random_mat(3, 3, Field::Real, seed + 210);
        Program p;
        ValueRef prod = p.push(Op::matmul(), {ValueRef::leaf(0), ValueRef::leaf(0)});
        p.push(Op::trace(), {prod});
        GradientReport grads = backprop(record(p, {Leaf{"A", a}}));
        Mat g = grads.for_leaf("A");

        Mat h = random_spd(3, seed + 220);
        InnerProduct weighted = InnerProduct::weighted(h);
        Mat gw = gradient_in_product(g, weighted);

        // Same differential value through either representer.
        std::vector<Op> stages{Op::power(2), Op::trace()};
        double df = jvp_chain(stages, a, v)(0, 0).real();
        CHECK(std::abs(inner(g, v) - df) < 1e-11);
        CHECK(std::abs(inner(gw, v, weighted) - df) < 1e-10);
        // And the representer moved by exactly H^{-1}.
        CHECK(max_abs_diff(matmul(h, gw), g) < 1e-10);
    }
}

TEST_CASE("backprop gradients match finite differences on matfunc composites") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        Mat a = random_spectral_scaled(4, Field::Real, seed + 230, 0.4);
        Program p;
        ValueRef fx = p.push(Op::matfunc(MatrixFunction::exp()), {ValueRef::leaf(0)});
        p.push(Op::trace(), {fx});
        FDConfig cfg;
        cfg.atol = 1e-6;
        CheckReport report = gradcheck(p, {Leaf{"A", a}}, cfg);
        CHECK(report.pass);
    }
}

TEST_CASE("saved context is reused: inverse node backprop works after factoring") {
    Mat a = random_well_conditioned(4, Field::Real, 240);
    Program p;
    ValueRef inv = p.push(Op::inverse(), {ValueRef::leaf(0)});
    p.push(Op::trace(), {inv});
    Tape tape = record(p, {Leaf{"A", a}});
    GradientReport grads = backprop(tape);
    // d tr(A^{-1}) = -A^{-T} A^{-T} (cotangent I pulled through the inverse).
    Mat ainv_t = transpose(inverse(a));
    CHECK(max_abs_diff(grads.for_leaf("A"), -matmul(ainv_t, ainv_t)) < 1e-12);
}
