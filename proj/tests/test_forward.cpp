#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "matad/forward.hpp"
#include "matad/gradcheck.hpp"

using namespace matad;

namespace {

double max_abs_diff(const Mat& a, const Mat& b) { return max_abs_entry(a - b); }

Dual dual_pair(const Mat& x, const Mat& v) { return Dual(x, v); }

}  // namespace

TEST_CASE("dual construction enforces matching shape and field") {
    Mat x = random_mat(2, 3, Field::Real, 1);
    CHECK_THROWS_AS(Dual(x, random_mat(3, 2, Field::Real, 2)), FieldError);
    CHECK_THROWS_AS(Dual(x, random_mat(2, 3, Field::Complex, 3)), FieldError);
    Dual c = Dual::constant(x);
    CHECK(frobenius_norm(c.tangent) == 0.0);
}

TEST_CASE("linear rule: trace, one-sided products, im") {
    Mat a = random_mat(3, 3, Field::Real, 4);
    Mat e = random_mat(3, 3, Field::Real, 5);
    Dual d = jvp_linear(Op::trace(), dual_pair(a, e));
    CHECK(d.tangent(0, 0).real() == doctest::Approx(trace(e).real()).epsilon(1e-15));

    // Right multiplication by a constant: the tangent is E X.
    Mat x = random_mat(3, 2, Field::Real, 6);
    Dual r = jvp_linear(Op::right_mul(x), dual_pair(a, e));
    CHECK(max_abs_diff(r.tangent, matmul(e, x)) == 0.0);

    Mat z = random_mat(4, 1, Field::Complex, 7);
    Mat v = random_mat(4, 1, Field::Complex, 8);
    Dual im = jvp_linear(Op::im(), dual_pair(z, v));
    CHECK(max_abs_diff(im.tangent, v.imag_part()) == 0.0);
}

TEST_CASE("jvp_linear rejects nonlinear kinds") {
    Mat a = random_mat(2, 2, Field::Real, 9);
    CHECK_THROWS_AS(jvp_linear(Op::inverse(), dual_pair(a, a)), FieldError);
}

TEST_CASE("product rule degenerates correctly") {
    Mat a = random_mat(3, 4, Field::Real, 10);
    Mat b = random_mat(4, 2, Field::Real, 11);
    Mat ea = random_mat(3, 4, Field::Real, 12);
    Mat eb = random_mat(4, 2, Field::Real, 13);

    Dual both_zero = jvp_matmul(Dual::constant(a), Dual::constant(b));
    CHECK(frobenius_norm(both_zero.tangent) == 0.0);

    Dual left_only = jvp_matmul(dual_pair(a, ea), Dual::constant(b));
    CHECK(max_abs_diff(left_only.tangent, matmul(ea, b)) == 0.0);

    Dual full = jvp_matmul(dual_pair(a, ea), dual_pair(b, eb));
    CHECK(max_abs_diff(full.tangent, matmul(ea, b) + matmul(a, eb)) < 1e-15);
}

TEST_CASE("product rule against finite differences") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Mat a = random_mat(4, 4, Field::Real, seed);
        Mat b = random_mat(4, 4, Field::Real, seed + 60);
        Mat ea = random_mat(4, 4, Field::Real, seed + 120);
        Mat eb = random_mat(4, 4, Field::Real, seed + 180);
        // Perturb both factors along one shared parameter t.
        FDConfig cfg;
        double h = cfg.step_for(a);
        Mat plus = matmul(a + scale(ea, h), b + scale(eb, h));
        Mat minus = matmul(a - scale(ea, h), b - scale(eb, h));
        Mat fd = scale(plus - minus, 1.0 / (2.0 * h));
        Mat exact = jvp_matmul(dual_pair(a, ea), dual_pair(b, eb)).tangent;
        CHECK(frobenius_norm(fd - exact) < 1e-8);
    }
}

TEST_CASE("leibniz decomposition of the product rule") {
    Mat a = random_mat(3, 3, Field::Real, 20);
    Mat b = random_mat(3, 3, Field::Real, 21);
    Mat ea = random_mat(3, 3, Field::Real, 22);
    Mat eb = random_mat(3, 3, Field::Real, 23);
    Mat combined = jvp_matmul(dual_pair(a, ea), dual_pair(b, eb)).tangent;
    Mat part_a = jvp_linear(Op::right_mul(b), dual_pair(a, ea)).tangent;
    Mat part_b = jvp_linear(Op::left_mul(a), dual_pair(b, eb)).tangent;
    CHECK(max_abs_diff(combined, part_a + part_b) < 1e-15);
}

TEST_CASE("power rule: base cases and finite differences") {
    Mat a = random_mat(3, 3, Field::Real, 30);
    Mat e = random_mat(3, 3, Field::Real, 31);

    CHECK(max_abs_diff(jvp_power(a, e, 1), e) == 0.0);
    CHECK(max_abs_diff(jvp_power(a, e, 2), matmul(e, a) + matmul(a, e)) < 1e-15);

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Mat base = random_mat(3, 3, Field::Real, seed + 300);
        Mat dir = random_mat(3, 3, Field::Real, seed + 400);
        Mat fd = directional_fd(
            [](const Mat& x) {
                return eval_op(Op::power(4), std::span<const Mat>(&x, 1));
            },
            base, dir);
        CHECK(frobenius_norm(fd - jvp_power(base, dir, 4)) < 1e-7);
    }
}

TEST_CASE("inverse rule: identity point, 1x1 case, finite differences") {
    Mat e = random_mat(3, 3, Field::Real, 40);
    CHECK(max_abs_diff(jvp_inverse(Mat::identity(3), e), -e) < 1e-15);

    Mat two = Mat::scalar(2.0);
    Mat one = Mat::scalar(1.0);
    CHECK(jvp_inverse(two, one)(0, 0).real() == doctest::Approx(-0.25));

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Mat a = random_well_conditioned(5, Field::Real, seed);
        Mat dir = random_mat(5, 5, Field::Real, seed + 500);
        Mat fd = directional_fd([](const Mat& x) { return inverse(x); }, a, dir);
        CHECK(frobenius_norm(fd - jvp_inverse(a, dir)) < 1e-6);
    }
}

TEST_CASE("inverse rule propagates singularity") {
    Mat zero = Mat::zeros(2, 2);
    CHECK_THROWS_AS(jvp_inverse(zero, zero), FieldError);
}

TEST_CASE("sigmoid and squared loss rules") {
    Mat zero = Mat::scalar(0.0);
    Dual s = jvp_elementwise(OpKind::Sigmoid, dual_pair(zero, Mat::scalar(1.0)));
    CHECK(s.primal(0, 0).real() == doctest::Approx(0.5));
    CHECK(s.tangent(0, 0).real() == doctest::Approx(0.25));

    Mat x = random_mat(4, 1, Field::Real, 50);
    Dual same = jvp_elementwise(OpKind::SquaredLoss, dual_pair(x, random_mat(4, 1, Field::Real, 51)), &x);
    CHECK(same.primal(0, 0).real() == 0.0);
    CHECK(same.tangent(0, 0).real() == 0.0);

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Mat p = random_mat(8, 1, Field::Real, seed + 600);
        Mat v = random_mat(8, 1, Field::Real, seed + 700);
        Mat y = random_mat(8, 1, Field::Real, seed + 800);

        Mat fd_sig = directional_fd(
            [](const Mat& t) { return eval_op(Op::sigmoid(), std::span<const Mat>(&t, 1)); }, p, v);
        Mat exact_sig = jvp_elementwise(OpKind::Sigmoid, dual_pair(p, v)).tangent;
        CHECK(frobenius_norm(fd_sig - exact_sig) < 1e-8);

        Op loss = Op::squared_loss(y);
        Mat fd_loss = directional_fd(
            [&](const Mat& t) { return eval_op(loss, std::span<const Mat>(&t, 1)); }, p, v);
        Mat exact_loss = jvp_elementwise(OpKind::SquaredLoss, dual_pair(p, v), &y).tangent;
        CHECK(std::abs(fd_loss(0, 0).real() - exact_loss(0, 0).real()) < 1e-8);
    }
}

TEST_CASE("elementwise rules are real-field only") {
    Mat z = random_mat(2, 2, Field::Complex, 60);
    CHECK_THROWS_AS(jvp_elementwise(OpKind::Sigmoid, dual_pair(z, z)), FieldError);
}

TEST_CASE("chains: single stage, trace of inverse at identity, random pipelines") {
    Mat a = random_mat(3, 3, Field::Real, 70);
    Mat e = random_mat(3, 3, Field::Real, 71);

    std::vector<Op> single{Op::trace()};
    CHECK(jvp_chain(single, a, e)(0, 0).real() == doctest::Approx(trace(e).real()));

    // d(tr . inverse) at the identity along E is -tr(E).
    std::vector<Op> trace_inv{Op::inverse(), Op::trace()};
    CHECK(jvp_chain(trace_inv, Mat::identity(3), e)(0, 0).real() ==
          doctest::Approx(-trace(e).real()).epsilon(1e-12));

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Mat x = random_well_conditioned(4, Field::Real, seed);
        Mat v = random_mat(4, 4, Field::Real, seed + 900);
        Mat c = random_mat(4, 4, Field::Real, seed + 950);
        std::vector<Op> stages{Op::inverse(), Op::left_mul(c), Op::trace()};
        Mat fd = directional_fd(
            [&](const Mat& t) {
                Mat cur = t;
                for (const Op& op : stages) cur = eval_op(op, std::span<const Mat>(&cur, 1));
                return cur;
            },
            x, v);
        CHECK(std::abs(fd(0, 0).real() - jvp_chain(stages, x, v)(0, 0).real()) < 1e-6);
    }
}

TEST_CASE("chain of two stages equals nested single rules") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Mat x = random_mat(3, 3, Field::Real, seed + 1000);
        Mat v = random_mat(3, 3, Field::Real, seed + 1100);
        std::vector<Op> stages{Op::power(2), Op::trace()};
        Mat chained = jvp_chain(stages, x, v);

        Dual d(x, v);
        d = jvp_op(stages[0], std::span<const Dual>(&d, 1));
        d = jvp_op(stages[1], std::span<const Dual>(&d, 1));
        CHECK(max_abs_diff(chained, d.tangent) == 0.0);
    }
}

TEST_CASE("every tangent rule is R-linear in the tangent") {
    auto check_linear = [](const Op& op, const Mat& x, std::uint64_t seed) {
        Mat v = random_mat(x.rows(), x.cols(), x.field(), seed + 1);
        Mat w = random_mat(x.rows(), x.cols(), x.field(), seed + 2);
        const double a = -1.7;
        Dual combo = jvp_op(op, std::vector<Dual>{Dual(x, scale(v, a) + w)});
        Dual jv = jvp_op(op, std::vector<Dual>{Dual(x, v)});
        Dual jw = jvp_op(op, std::vector<Dual>{Dual(x, w)});
        Mat expect = scale(jv.tangent, a) + jw.tangent;
        CHECK(frobenius_norm(combo.tangent - expect) <=
              1e-12 * (1.0 + frobenius_norm(expect)));
    };

    for (Field field : {Field::Real, Field::Complex}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            Mat square = random_well_conditioned(3, field, seed);
            check_linear(Op::transpose(), square, seed * 7);
            check_linear(Op::conj_transpose(), square, seed * 7 + 100);
            check_linear(Op::trace(), square, seed * 7 + 200);
            check_linear(Op::inverse(), square, seed * 7 + 300);
            check_linear(Op::power(3), square, seed * 7 + 400);
            check_linear(Op::matfunc(MatrixFunction::exp()),
                         random_spectral_scaled(3, field, seed, 0.4), seed * 7 + 500);
            check_linear(Op::left_mul(random_mat(3, 3, field, seed + 3000)), square,
                         seed * 7 + 600);
            if (field == Field::Complex) {
                check_linear(Op::re(), square, seed * 7 + 700);
                check_linear(Op::im(), square, seed * 7 + 800);
            } else {
                check_linear(Op::sigmoid(), square, seed * 7 + 900);
            }
        }
    }
}

TEST_CASE("im is R-linear but not C-linear") {
    Mat x = random_mat(3, 1, Field::Complex, 81);
    Mat v = random_mat(3, 1, Field::Complex, 82);
    const Scalar i_unit(0.0, 1.0);

    Dual d_iv = jvp_op(Op::im(), std::vector<Dual>{Dual(x, cscale(v, i_unit))});
    Dual d_v = jvp_op(Op::im(), std::vector<Dual>{Dual(x, v)});
    // J(iv) lands in the real field; i * J(v) does not even stay real.
    Mat jv_complex = d_v.tangent.as_complex();
    Mat diff = d_iv.tangent.as_complex() - cscale(jv_complex, i_unit);
    CHECK(frobenius_norm(diff) > 1e-3);
}
