#include "matad/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "matad/forward.hpp"
#include "matad/matio.hpp"

namespace matad {

double FDConfig::step_for(const Mat& x) const {
    if (step > 0.0) return step;
    return std::cbrt(2.220446049250313e-16) * (1.0 + frobenius_norm(x));
}

void CheckReport::add(std::string label, double abs_error, double rel_error,
                      const FDConfig& cfg) {
    CheckCase c{std::move(label), abs_error, rel_error,
                abs_error <= cfg.atol || rel_error <= cfg.rtol};
    add_case(std::move(c));
}

void CheckReport::add_case(CheckCase c) {
    max_abs_error = std::max(max_abs_error, c.abs_error);
    max_rel_error = std::max(max_rel_error, c.rel_error);
    pass = pass && c.pass;
    cases.push_back(std::move(c));
}

void CheckReport::merge(const CheckReport& other) {
    for (const CheckCase& c : other.cases) add_case(c);
}

Mat directional_fd(const std::function<Mat(const Mat&)>& f, const Mat& x, const Mat& v,
                   const FDConfig& cfg) {
    double h = cfg.step_for(x);
    Mat plus = f(x + scale(v, h));
    Mat minus = f(x - scale(v, h));
    return scale(plus - minus, 1.0 / (2.0 * h));
}

namespace {

/// Product of each side's own space: the supplied P where it applies (real
/// operands of matching weight dimension), the field's canonical product
/// otherwise.
double side_inner(const InnerProduct& p, const Mat& a, const Mat& b) {
    if (p.kind() == InnerProduct::Kind::Weighted && a.field() == Field::Real &&
        p.weight().rows() == a.rows())
        return inner(a, b, p);
    return dot(a, b);
}

}  // namespace

CheckReport dot_test(const Op& op, std::span<const Mat> inputs, std::span<const Mat> tangents,
                     const Mat& cotangent, const InnerProduct& p, double tol) {
    if (inputs.size() != tangents.size())
        throw FieldError(ErrKind::ShapeMismatch, "dot_test: one tangent per input");

    std::vector<Dual> duals;
    duals.reserve(inputs.size());
    for (std::size_t i = 0; i < inputs.size(); ++i) duals.emplace_back(inputs[i], tangents[i]);
    Dual out = jvp_op(op, duals);
    double lhs = side_inner(p, cotangent, out.tangent);

    std::vector<Mat> pulled = vjp_op(op, inputs, cotangent);
    double rhs = 0.0;
    for (std::size_t i = 0; i < inputs.size(); ++i) rhs += side_inner(p, pulled[i], tangents[i]);

    double abs_error = std::abs(lhs - rhs);
    double rel_error = abs_error / (1.0 + std::abs(lhs));
    CheckReport report;
    report.name = "dot-test";
    CheckCase c{op.describe(), abs_error, rel_error, abs_error <= tol * (1.0 + std::abs(lhs))};
    report.add_case(std::move(c));
    return report;
}

CheckReport dot_test(const Op& op, const Mat& x, const Mat& v, const Mat& w,
                     const InnerProduct& p, double tol) {
    return dot_test(op, std::span<const Mat>(&x, 1), std::span<const Mat>(&v, 1), w, p, tol);
}

Mat random_well_conditioned(std::size_t n, Field field, std::uint64_t seed) {
    Mat a = random_mat(n, n, field, seed);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += double(n + 1);
    return a;
}

Mat random_spd(std::size_t n, std::uint64_t seed) {
    Mat r = random_mat(n, n, Field::Real, seed);
    Mat h = matmul(transpose(r), r);
    for (std::size_t i = 0; i < n; ++i) h(i, i) += 0.5;
    return h;
}

Mat random_spectral_scaled(std::size_t n, Field field, std::uint64_t seed, double target) {
    Mat a = random_mat(n, n, field, seed);
    double est = spectral_radius_estimate(a);
    if (est <= 1e-12) return a;
    return scale(a, target / est);
}

namespace {

struct SuiteCase {
    Op op;
    std::vector<Mat> inputs;
    std::vector<Mat> tangents;
    Mat cotangent;
    std::string label;
};

/// Builds one random instance of every primitive defined over `field`.
std::vector<SuiteCase> suite_cases(Field field, std::size_t n, std::uint64_t seed) {
    std::vector<SuiteCase> cases;
    std::uint64_t s = seed;
    auto next = [&]() { return s += 0x51ED2701; };
    auto rnd = [&](std::size_t r, std::size_t c) { return random_mat(r, c, field, next()); };
    const std::size_t m = n + 1;
    const std::size_t p = n >= 2 ? n - 1 : 1;

    auto push = [&](Op op, std::vector<Mat> ins, Mat cot) {
        std::vector<Mat> tans;
        tans.reserve(ins.size());
        for (const Mat& in : ins) tans.push_back(random_mat(in.rows(), in.cols(), field, next()));
        std::string label = std::string(op.describe()) +
                            (field == Field::Real ? " R " : " C ") + std::to_string(n);
        cases.push_back(SuiteCase{std::move(op), std::move(ins), std::move(tans), std::move(cot),
                                  std::move(label)});
    };

    push(Op::matmul(), {rnd(n, m), rnd(m, p)}, rnd(n, p));
    push(Op::left_mul(rnd(n, n)), {rnd(n, m)}, rnd(n, m));
    push(Op::right_mul(rnd(m, m)), {rnd(n, m)}, rnd(n, m));
    push(Op::transpose(), {rnd(n, m)}, rnd(m, n));
    push(Op::conj_transpose(), {rnd(n, m)}, rnd(m, n));
    push(Op::trace(), {rnd(n, n)}, rnd(1, 1));
    push(Op::inverse(), {random_well_conditioned(n, field, next())}, rnd(n, n));
    push(Op::power(3), {rnd(n, n)}, rnd(n, n));
    push(Op::matfunc(MatrixFunction::exp()),
         {random_spectral_scaled(n, field, next(), 0.4)}, rnd(n, n));
    push(Op::matfunc(MatrixFunction::log1p()),
         {random_spectral_scaled(n, field, next(), 0.4)}, rnd(n, n));
    push(Op::add(), {rnd(n, m), rnd(n, m)}, rnd(n, m));
    push(Op::add_const(rnd(n, m)), {rnd(n, m)}, rnd(n, m));
    push(Op::scale_by(-1.7), {rnd(n, m)}, rnd(n, m));
    push(Op::add_bias(), {rnd(n, m), rnd(n, 1)}, rnd(n, m));
    if (field == Field::Complex) {
        // Outputs of re/im land in the real field.
        push(Op::re(), {rnd(n, m)}, random_mat(n, m, Field::Real, next()));
        push(Op::im(), {rnd(n, m)}, random_mat(n, m, Field::Real, next()));
    } else {
        push(Op::sigmoid(), {rnd(n, m)}, rnd(n, m));
        push(Op::squared_loss(rnd(n, m)), {rnd(n, m)}, rnd(1, 1));
    }
    return cases;
}

}  // namespace

CheckReport dot_test_suite(std::span<const std::uint64_t> seeds,
                           std::span<const std::size_t> sizes, double tol) {
    CheckReport report;
    report.name = "dot-test";
    for (Field field : {Field::Real, Field::Complex}) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            std::size_t n = sizes[i % sizes.size()];
            std::uint64_t mixed = seeds[i] * 1000003 + (field == Field::Real ? 0 : 1);
            for (SuiteCase& sc : suite_cases(field, n, mixed)) {
                CheckReport one = dot_test(sc.op, sc.inputs, sc.tangents, sc.cotangent,
                                           InnerProduct::canonical(), tol);
                one.cases.front().label = sc.label + " seed" + std::to_string(seeds[i]);
                report.merge(one);
            }
        }
    }
    return report;
}

CheckReport gradcheck(const Program& program, const std::vector<Leaf>& leaves,
                      const FDConfig& cfg) {
    Tape tape = record(program, leaves);
    GradientReport grads = backprop(tape);

    std::vector<Mat> values;
    values.reserve(leaves.size());
    for (const Leaf& leaf : leaves) values.push_back(leaf.value);

    auto loss_at = [&](std::size_t leaf_idx, std::size_t i, std::size_t j, Scalar delta) {
        Mat saved = values[leaf_idx];
        values[leaf_idx](i, j) += delta;
        double out = evaluate(program, values)(0, 0).real();
        values[leaf_idx] = std::move(saved);
        return out;
    };

    CheckReport report;
    report.name = "gradcheck";
    for (std::size_t l = 0; l < leaves.size(); ++l) {
        const Mat& x = leaves[l].value;
        const Mat& g = grads.gradients[l];
        double h = cfg.step_for(x);
        double abs_err = 0.0, rel_err = 0.0;
        bool leaf_pass = true;
        // The atol/rtol band applies entrywise; the case records the worst
        // errors but passes only if every entry was inside the band.
        auto compare = [&](double analytic, double fd) {
            double a = std::abs(analytic - fd);
            double r = a / std::max({std::abs(analytic), std::abs(fd), 1e-300});
            abs_err = std::max(abs_err, a);
            rel_err = std::max(rel_err, r);
            leaf_pass = leaf_pass && (a <= cfg.atol || r <= cfg.rtol);
        };
        for (std::size_t i = 0; i < x.rows(); ++i) {
            for (std::size_t j = 0; j < x.cols(); ++j) {
                double fd_re =
                    (loss_at(l, i, j, Scalar(h, 0)) - loss_at(l, i, j, Scalar(-h, 0))) / (2 * h);
                compare(g(i, j).real(), fd_re);
                if (x.field() == Field::Complex) {
                    double fd_im = (loss_at(l, i, j, Scalar(0, h)) -
                                    loss_at(l, i, j, Scalar(0, -h))) /
                                   (2 * h);
                    compare(g(i, j).imag(), fd_im);
                }
            }
        }
        report.add_case(CheckCase{"leaf " + leaves[l].name, abs_err, rel_err, leaf_pass});
    }
    return report;
}

int numerical_rank(const Mat& m, double rel_tol) {
    if (m.field() != Field::Real)
        throw FieldError(ErrKind::FieldMismatch, "numerical_rank expects a real matrix");
    Mat a = m.rows() >= m.cols() ? m : transpose(m);
    const std::size_t rows = a.rows(), cols = a.cols();

    // One-sided Jacobi: rotate column pairs until all are orthogonal; the
    // singular values are then the column norms.
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t q = 1; q < cols; ++q) {
            for (std::size_t pcol = 0; pcol < q; ++pcol) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < rows; ++i) {
                    double vp = a(i, pcol).real(), vq = a(i, q).real();
                    alpha += vp * vp;
                    beta += vq * vq;
                    gamma += vp * vq;
                }
                if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
                rotated = true;
                double zeta = (beta - alpha) / (2.0 * gamma);
                double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (std::size_t i = 0; i < rows; ++i) {
                    double vp = a(i, pcol).real(), vq = a(i, q).real();
                    a(i, pcol) = c * vp - s * vq;
                    a(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(cols, 0.0);
    double sigma_max = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows; ++i) s += a(i, j).real() * a(i, j).real();
        sigma[j] = std::sqrt(s);
        sigma_max = std::max(sigma_max, sigma[j]);
    }
    if (sigma_max == 0.0) return 0;
    int rank = 0;
    for (double s : sigma)
        if (s > rel_tol * sigma_max) ++rank;
    return rank;
}

namespace {

const char* bool_word(bool b, bool machine) { return machine ? (b ? "true" : "false") : (b ? "yes" : "no"); }

std::string render(const CheckReport& report, bool machine) {
    std::ostringstream out;
    if (machine) out << "schema: 1\n";
    out << "report: " << report.name << '\n';
    out << "pass: " << bool_word(report.pass, machine) << '\n';
    out << "max_abs_error: " << format_double(report.max_abs_error) << '\n';
    out << "max_rel_error: " << format_double(report.max_rel_error) << '\n';
    out << "cases: " << report.cases.size() << '\n';
    for (const CheckCase& c : report.cases) {
        if (machine) {
            out << "case: " << c.label << " abs=" << format_double(c.abs_error)
                << " rel=" << format_double(c.rel_error) << " pass=" << bool_word(c.pass, true)
                << '\n';
        } else {
            out << "  " << c.label << ": abs=" << format_double(c.abs_error)
                << " rel=" << format_double(c.rel_error) << (c.pass ? "" : "  FAIL") << '\n';
        }
    }
    return out.str();
}

}  // namespace

std::string to_text(const CheckReport& report) { return render(report, false); }

std::string to_machine(const CheckReport& report) { return render(report, true); }

}  // namespace matad
