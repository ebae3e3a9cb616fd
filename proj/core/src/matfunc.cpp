#include "matad/matfunc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace matad {

MatrixFunction::MatrixFunction(Kind kind, double radius, std::vector<double> coeffs)
    : kind_(kind), radius_(radius), coeffs_(std::move(coeffs)) {}

MatrixFunction MatrixFunction::exp() {
    return MatrixFunction(Kind::Exp, std::numeric_limits<double>::infinity());
}

MatrixFunction MatrixFunction::log1p() { return MatrixFunction(Kind::Log1p, 1.0); }

MatrixFunction MatrixFunction::sin() {
    return MatrixFunction(Kind::Sin, std::numeric_limits<double>::infinity());
}

MatrixFunction MatrixFunction::cos() {
    return MatrixFunction(Kind::Cos, std::numeric_limits<double>::infinity());
}

MatrixFunction MatrixFunction::poly(std::vector<double> coeffs) {
    return MatrixFunction(Kind::Poly, std::numeric_limits<double>::infinity(), std::move(coeffs));
}

double MatrixFunction::coefficient(int k) const {
    switch (kind_) {
        case Kind::Exp: {
            double c = 1.0;
            for (int i = 2; i <= k; ++i) c /= double(i);
            return c;  // 1/k!
        }
        case Kind::Log1p:
            // log(I + A) = A - A^2/2 + A^3/3 - ...
            if (k == 0) return 0.0;
            return (k % 2 == 1 ? 1.0 : -1.0) / double(k);
        case Kind::Sin: {
            if (k % 2 == 0) return 0.0;
            int j = (k - 1) / 2;  // c_{2j+1} = (-1)^j / (2j+1)!
            double c = 1.0;
            for (int i = 2; i <= k; ++i) c /= double(i);
            return (j % 2 == 0 ? c : -c);
        }
        case Kind::Cos: {
            if (k % 2 == 1) return 0.0;
            int j = k / 2;  // c_{2j} = (-1)^j / (2j)!
            double c = 1.0;
            for (int i = 2; i <= k; ++i) c /= double(i);
            return (j % 2 == 0 ? c : -c);
        }
        case Kind::Poly:
            return k < int(coeffs_.size()) ? coeffs_[std::size_t(k)] : 0.0;
    }
    return 0.0;
}

int MatrixFunction::degree() const {
    if (kind_ != Kind::Poly) return -1;
    for (std::size_t k = coeffs_.size(); k-- > 0;)
        if (coeffs_[k] != 0.0) return int(k);
    return 0;
}

const char* MatrixFunction::name() const {
    switch (kind_) {
        case Kind::Exp: return "exp";
        case Kind::Log1p: return "log1p";
        case Kind::Sin: return "sin";
        case Kind::Cos: return "cos";
        case Kind::Poly: return "poly";
    }
    return "?";
}

namespace {

void check_domain(const MatrixFunction& f, const Mat& a) {
    if (!a.is_square())
        throw FieldError(ErrKind::ShapeMismatch, "matrix functions need a square argument");
    double radius = f.domain_radius();
    if (std::isinf(radius)) return;
    double est = spectral_radius_estimate(a);
    if (est >= kRadiusSafety * radius)
        throw FieldError(ErrKind::DomainViolation,
                         std::string(f.name()) + ": estimated spectral radius " +
                             std::to_string(est) + " is outside the series domain");
}

/// Runs the truncated series on `a` and reports the number of terms it took.
/// The stopping rule only arms once a nonzero coefficient has been seen, so
/// leading zero coefficients (log1p, sin, high-degree monomials) cannot
/// produce a spurious empty sum.
SeriesResult run_series(const MatrixFunction& f, const Mat& a) {
    const std::size_t n = a.rows();
    Mat sum = Mat::zeros(n, n, a.field());
    Mat power = Mat::identity(n, a.field());

    const bool is_poly = f.kind() == MatrixFunction::Kind::Poly;
    int small_streak = 0;
    bool coeff_seen = false;
    double last_term_norm = 0.0;
    for (int k = 0; k < kSeriesMaxTerms; ++k) {
        double c = f.coefficient(k);
        if (c != 0.0) {
            coeff_seen = true;
            sum = sum + scale(power, c);
        }
        last_term_norm = std::abs(c) * frobenius_norm(power);
        double sum_norm = frobenius_norm(sum);
        if (coeff_seen && last_term_norm <= kSeriesTermTol * sum_norm) {
            ++small_streak;
        } else {
            small_streak = 0;
        }
        // Polynomials have a known last term; everything else stops on the
        // two-small-terms rule.
        bool done = is_poly ? k >= f.degree() : small_streak >= 2;
        if (done) {
            double rel = sum_norm > 0.0 ? last_term_norm / sum_norm : 0.0;
            return SeriesResult{std::move(sum), k + 1, rel};
        }
        power = matmul(power, a);
    }
    throw FieldError(ErrKind::DomainViolation,
                     std::string(f.name()) + ": series did not converge within " +
                         std::to_string(kSeriesMaxTerms) + " terms");
}

}  // namespace

SeriesResult apply(const MatrixFunction& f, const Mat& a) {
    check_domain(f, a);
    return run_series(f, a);
}

Mat frechet_series(const MatrixFunction& f, const Mat& a, const Mat& e) {
    check_domain(f, a);
    if (!a.same_shape(e) || a.field() != e.field())
        throw FieldError(a.same_shape(e) ? ErrKind::FieldMismatch : ErrKind::ShapeMismatch,
                         "direction must match the base point");
    const int terms = run_series(f, a).terms_used;
    const std::size_t n = a.rows();

    // d_k = sum_{i=0}^{k-1} A^i E A^{k-1-i}; d_{k+1} = A d_k + E A^k.
    Mat deriv = Mat::zeros(n, n, a.field());
    Mat d = Mat::zeros(n, n, a.field());
    Mat power = Mat::identity(n, a.field());
    for (int k = 0; k < terms; ++k) {
        double c = f.coefficient(k);
        if (k > 0 && c != 0.0) deriv = deriv + scale(d, c);
        d = matmul(a, d) + matmul(e, power);
        power = matmul(power, a);
    }
    return deriv;
}

Mat frechet_block(const MatrixFunction& f, const Mat& a, const Mat& e) {
    check_domain(f, a);
    if (!a.same_shape(e) || a.field() != e.field())
        throw FieldError(a.same_shape(e) ? ErrKind::FieldMismatch : ErrKind::ShapeMismatch,
                         "direction must match the base point");
    SeriesResult base = run_series(f, a);
    const std::size_t n = a.rows();

    Mat block(2 * n, 2 * n, a.field());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            block(i, j) = a(i, j);
            block(i, n + j) = e(i, j);
            block(n + i, n + j) = a(i, j);
        }
    }

    // Same truncation index the series chose for A alone.
    Mat sum = Mat::zeros(2 * n, 2 * n, a.field());
    Mat power = Mat::identity(2 * n, a.field());
    for (int k = 0; k < base.terms_used; ++k) {
        double c = f.coefficient(k);
        if (c != 0.0) sum = sum + scale(power, c);
        if (k + 1 < base.terms_used) power = matmul(power, block);
    }

    Mat top_right(n, n, a.field());
    Mat diag_err(n, n, a.field());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            top_right(i, j) = sum(i, n + j);
            if (sum(n + i, j) != Scalar(0.0, 0.0))
                throw std::logic_error("block derivative: bottom-left block is not exactly zero");
            diag_err(i, j) = sum(i, j) - base.value(i, j);
        }
    }
    double value_scale = 1.0 + frobenius_norm(base.value);
    if (frobenius_norm(diag_err) > 1e-12 * value_scale)
        throw std::logic_error("block derivative: top-left block drifted from f(A)");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) diag_err(i, j) = sum(n + i, n + j) - base.value(i, j);
    if (frobenius_norm(diag_err) > 1e-12 * value_scale)
        throw std::logic_error("block derivative: bottom-right block drifted from f(A)");

    return top_right;
}

Mat adjoint_frechet(const MatrixFunction& f, const Mat& a, const Mat& g) {
    return frechet_block(f, conj_transpose(a), g);
}

}  // namespace matad
