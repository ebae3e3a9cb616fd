#include "matad/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace matad {

const char* to_string(ErrKind kind) {
    switch (kind) {
        case ErrKind::ShapeMismatch: return "ShapeMismatch";
        case ErrKind::FieldMismatch: return "FieldMismatch";
        case ErrKind::Singular: return "Singular";
        case ErrKind::NotSPD: return "NotSPD";
        case ErrKind::DomainViolation: return "DomainViolation";
        case ErrKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

FieldError::FieldError(ErrKind kind, std::string detail)
    : kind_(kind), detail_(std::move(detail)) {
    message_ = std::string(to_string(kind_)) + ": " + detail_;
}

namespace {

void require(bool cond, ErrKind kind, const std::string& detail) {
    if (!cond) throw FieldError(kind, detail);
}

void require_same_field(const Mat& a, const Mat& b, const char* where) {
    require(a.field() == b.field(), ErrKind::FieldMismatch,
            std::string(where) + ": operands live over different fields");
}

void require_same_shape(const Mat& a, const Mat& b, const char* where) {
    require(a.same_shape(b), ErrKind::ShapeMismatch,
            std::string(where) + ": " + std::to_string(a.rows()) + "x" +
                std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                std::to_string(b.cols()));
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols, Field field)
    : rows_(rows), cols_(cols), field_(field), data_(rows * cols, Scalar(0.0, 0.0)) {
    require(rows_ > 0 && cols_ > 0, ErrKind::ShapeMismatch, "matrix dimensions must be positive");
}

Mat::Mat(std::size_t rows, std::size_t cols, Field field, std::vector<Scalar> data)
    : rows_(rows), cols_(cols), field_(field), data_(std::move(data)) {
    require(rows_ > 0 && cols_ > 0, ErrKind::ShapeMismatch, "matrix dimensions must be positive");
    require(data_.size() == rows_ * cols_, ErrKind::ShapeMismatch,
            "data length does not match rows*cols");
    validate();
}

void Mat::validate() const {
    for (const Scalar& s : data_) {
        require(std::isfinite(s.real()) && std::isfinite(s.imag()), ErrKind::DomainViolation,
                "matrix entries must be finite");
        if (field_ == Field::Real) {
            require(s.imag() == 0.0, ErrKind::FieldMismatch,
                    "real-field matrix has a nonzero imaginary part");
        }
    }
}

Mat Mat::zeros(std::size_t rows, std::size_t cols, Field field) {
    return Mat(rows, cols, field);
}

Mat Mat::ones(std::size_t rows, std::size_t cols, Field field) {
    Mat m(rows, cols, field);
    for (Scalar& v : m.data()) v = 1.0;
    return m;
}

Mat Mat::identity(std::size_t n, Field field) {
    Mat m(n, n, field);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::scalar(double v) {
    Mat m(1, 1, Field::Real);
    m(0, 0) = v;
    return m;
}

Mat Mat::scalar(Scalar v, Field field) {
    Mat m(1, 1, field);
    require(field == Field::Complex || v.imag() == 0.0, ErrKind::FieldMismatch,
            "complex scalar under the real field");
    m(0, 0) = v;
    return m;
}

Mat Mat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    std::size_t r = rows.size();
    std::size_t c = rows.begin()->size();
    Mat m(r, c, Field::Real);
    std::size_t i = 0;
    for (const auto& row : rows) {
        require(row.size() == c, ErrKind::ShapeMismatch, "ragged row list");
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Mat Mat::from_rows(std::initializer_list<std::initializer_list<Scalar>> rows) {
    std::size_t r = rows.size();
    std::size_t c = rows.begin()->size();
    Mat m(r, c, Field::Complex);
    std::size_t i = 0;
    for (const auto& row : rows) {
        require(row.size() == c, ErrKind::ShapeMismatch, "ragged row list");
        std::size_t j = 0;
        for (Scalar v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Mat Mat::diag(std::initializer_list<double> entries) {
    Mat m(entries.size(), entries.size(), Field::Real);
    std::size_t i = 0;
    for (double v : entries) {
        m(i, i) = v;
        ++i;
    }
    return m;
}

Mat Mat::real_part() const {
    Mat out(rows_, cols_, Field::Real);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data()[k] = data_[k].real();
    return out;
}

Mat Mat::imag_part() const {
    Mat out(rows_, cols_, Field::Real);
    for (std::size_t k = 0; k < data_.size(); ++k) out.data()[k] = data_[k].imag();
    return out;
}

Mat Mat::as_complex() const {
    Mat out(rows_, cols_, Field::Complex);
    out.data() = data_;
    return out;
}

Mat complex_from(const Mat& re, const Mat& im) {
    require_same_shape(re, im, "complex_from");
    require(re.field() == Field::Real && im.field() == Field::Real, ErrKind::FieldMismatch,
            "complex_from expects two real-field parts");
    Mat out(re.rows(), re.cols(), Field::Complex);
    for (std::size_t k = 0; k < out.size(); ++k)
        out.data()[k] = Scalar(re.data()[k].real(), im.data()[k].real());
    return out;
}

Mat operator+(const Mat& a, const Mat& b) {
    require_same_shape(a, b, "add");
    require_same_field(a, b, "add");
    Mat out(a.rows(), a.cols(), a.field());
    for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] = a.data()[k] + b.data()[k];
    return out;
}

Mat operator-(const Mat& a, const Mat& b) {
    require_same_shape(a, b, "sub");
    require_same_field(a, b, "sub");
    Mat out(a.rows(), a.cols(), a.field());
    for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] = a.data()[k] - b.data()[k];
    return out;
}

Mat operator-(const Mat& a) { return scale(a, -1.0); }

Mat scale(const Mat& a, double c) {
    Mat out(a.rows(), a.cols(), a.field());
    for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] = a.data()[k] * c;
    return out;
}

Mat cscale(const Mat& a, Scalar c) {
    require(a.field() == Field::Complex, ErrKind::FieldMismatch,
            "cscale requires a complex-field matrix");
    Mat out(a.rows(), a.cols(), Field::Complex);
    for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] = a.data()[k] * c;
    return out;
}

Mat hadamard(const Mat& a, const Mat& b) {
    require_same_shape(a, b, "hadamard");
    require_same_field(a, b, "hadamard");
    Mat out(a.rows(), a.cols(), a.field());
    for (std::size_t k = 0; k < out.size(); ++k) out.data()[k] = a.data()[k] * b.data()[k];
    return out;
}

Mat matmul(const Mat& a, const Mat& b) {
    require(a.cols() == b.rows(), ErrKind::ShapeMismatch,
            "matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    require_same_field(a, b, "matmul");
    Mat out(a.rows(), b.cols(), a.field());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t l = 0; l < a.cols(); ++l) {
            Scalar ail = a(i, l);
            if (ail == Scalar(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += ail * b(l, j);
        }
    }
    return out;
}

Mat transpose(const Mat& a) {
    Mat out(a.cols(), a.rows(), a.field());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Mat conj_transpose(const Mat& a) {
    Mat out(a.cols(), a.rows(), a.field());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
    return out;
}

Scalar trace(const Mat& a) {
    require(a.is_square(), ErrKind::ShapeMismatch, "trace requires a square matrix");
    Scalar t(0.0, 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

double frobenius_norm(const Mat& a) {
    double s = 0.0;
    for (const Scalar& v : a.data()) s += std::norm(v);
    return std::sqrt(s);
}

double max_abs_entry(const Mat& a) {
    double m = 0.0;
    for (const Scalar& v : a.data()) m = std::max(m, std::abs(v));
    return m;
}

double spectral_radius_estimate(const Mat& a, int iters) {
    require(a.is_square(), ErrKind::ShapeMismatch, "spectral_radius_estimate requires square input");
    const std::size_t n = a.rows();
    // Fixed start vector with distinct components so it is not orthogonal to
    // the dominant eigenvector for generic inputs.
    Mat v(n, 1, a.field());
    for (std::size_t i = 0; i < n; ++i) v(i, 0) = 1.0 / double(i + 1);
    double nv = frobenius_norm(v);
    for (std::size_t i = 0; i < n; ++i) v(i, 0) /= nv;

    std::vector<double> log_ratios;
    log_ratios.reserve(std::size_t(iters));
    for (int k = 0; k < iters; ++k) {
        Mat w = matmul(a, v);
        double nw = frobenius_norm(w);
        if (nw == 0.0) return 0.0;  // iterate annihilated; radius estimate 0
        log_ratios.push_back(std::log(nw));
        for (std::size_t i = 0; i < n; ++i) w(i, 0) /= nw;
        v = std::move(w);
    }
    // Geometric mean of the later step ratios; early steps carry the
    // transient of the start vector.
    std::size_t half = log_ratios.size() / 2;
    double acc = 0.0;
    for (std::size_t k = half; k < log_ratios.size(); ++k) acc += log_ratios[k];
    double rho = std::exp(acc / double(log_ratios.size() - half));
    return 1.1 * rho;
}

namespace detail {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double splitmix64_unit(std::uint64_t& state) {
    return double(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace detail

Mat random_mat(std::size_t rows, std::size_t cols, Field field, std::uint64_t seed) {
    Mat out(rows, cols, field);
    std::uint64_t state = seed;
    for (std::size_t k = 0; k < out.size(); ++k) {
        double re = detail::splitmix64_unit(state);
        double im = field == Field::Complex ? detail::splitmix64_unit(state) : 0.0;
        out.data()[k] = Scalar(re, im);
    }
    return out;
}

Lu::Lu(Mat lu, std::vector<std::size_t> perm) : lu_(std::move(lu)), perm_(std::move(perm)) {}

Lu Lu::factor(const Mat& a) {
    require(a.is_square(), ErrKind::ShapeMismatch, "LU factorization requires a square matrix");
    const std::size_t n = a.rows();
    const double scale = max_abs_entry(a);
    require(scale > 0.0, ErrKind::Singular, "zero matrix is singular");
    const double threshold = 1e-12 * scale;

    Mat lu = a;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot_row = k;
        double best = std::abs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            double mag = std::abs(lu(i, k));
            if (mag > best) {
                best = mag;
                pivot_row = i;
            }
        }
        require(best >= threshold, ErrKind::Singular,
                "pivot magnitude below 1e-12 of the matrix scale");
        if (pivot_row != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(pivot_row, j));
            std::swap(perm[k], perm[pivot_row]);
        }
        Scalar pivot = lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            Scalar m = lu(i, k) / pivot;
            lu(i, k) = m;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= m * lu(k, j);
        }
    }
    return Lu(std::move(lu), std::move(perm));
}

Mat Lu::solve(const Mat& b) const {
    const std::size_t n = lu_.rows();
    require(b.rows() == n, ErrKind::ShapeMismatch, "LU solve: right-hand side rows mismatch");
    require(b.field() == lu_.field(), ErrKind::FieldMismatch, "LU solve: field mismatch");
    Mat x(n, b.cols(), b.field());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        // Forward substitution with the permuted rows (L has unit diagonal).
        std::vector<Scalar> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            Scalar s = b(perm_[i], c);
            for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
            y[i] = s;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            Scalar s = y[ii];
            for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * x(j, c);
            x(ii, c) = s / lu_(ii, ii);
        }
    }
    return x;
}

Mat Lu::inverse() const { return solve(Mat::identity(lu_.rows(), lu_.field())); }

Mat inverse(const Mat& a) { return Lu::factor(a).inverse(); }

Cholesky::Cholesky(Mat l) : l_(std::move(l)) {}

Cholesky Cholesky::factor(const Mat& h) {
    require(h.field() == Field::Real, ErrKind::FieldMismatch,
            "Cholesky is defined here for real matrices");
    require(h.is_square(), ErrKind::ShapeMismatch, "Cholesky requires a square matrix");
    const std::size_t n = h.rows();
    const double scale = max_abs_entry(h);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            require(std::abs(h(i, j) - h(j, i)) <= 1e-12 * (scale > 0 ? scale : 1.0),
                    ErrKind::NotSPD, "matrix is not symmetric");

    Mat l(n, n, Field::Real);
    for (std::size_t j = 0; j < n; ++j) {
        double d = h(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k).real() * l(j, k).real();
        require(d > 0.0, ErrKind::NotSPD, "nonpositive pivot in Cholesky");
        double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = h(i, j).real();
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k).real() * l(j, k).real();
            l(i, j) = s / ljj;
        }
    }
    return Cholesky(std::move(l));
}

Mat Cholesky::solve(const Mat& b) const {
    const std::size_t n = l_.rows();
    require(b.rows() == n, ErrKind::ShapeMismatch, "Cholesky solve: right-hand side rows mismatch");
    require(b.field() == Field::Real, ErrKind::FieldMismatch,
            "Cholesky solve: right-hand side must be real");
    Mat x(n, b.cols(), Field::Real);
    for (std::size_t c = 0; c < b.cols(); ++c) {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = b(i, c).real();
            for (std::size_t j = 0; j < i; ++j) s -= l_(i, j).real() * y[j];
            y[i] = s / l_(i, i).real();
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = y[ii];
            for (std::size_t j = ii + 1; j < n; ++j) s -= l_(j, ii).real() * x(j, c).real();
            x(ii, c) = s / l_(ii, ii).real();
        }
    }
    return x;
}

Mat solve_spd(const Mat& h, const Mat& b) { return Cholesky::factor(h).solve(b); }

}  // namespace matad
