// Dense real/complex matrix value type and the linear-algebra primitives
// the rest of the library is built on: products, transposes, trace, LU
// inverse, Cholesky solves, norms, a power-iteration spectral radius
// estimate, and a reproducible seeded matrix generator.
//
// A Mat is immutable in spirit: operations are pure functions returning new
// values, so matrices can be shared freely between threads.

#pragma once

#include <cassert>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <string>
#include <vector>

namespace matad {

/// Entry type. The real field is a tag on Mat, not a separate type; real
/// matrices simply keep every imaginary part at exactly zero.
using Scalar = std::complex<double>;

enum class Field { Real, Complex };

enum class ErrKind {
    ShapeMismatch,
    FieldMismatch,
    Singular,
    NotSPD,
    DomainViolation,
    ParseError,
};

const char* to_string(ErrKind kind);

/// Error thrown by every fallible operation in the library. Each failure
/// mode maps to exactly one ErrKind so callers (and the CLI) can dispatch
/// on it.
class FieldError : public std::exception {
  public:
    FieldError(ErrKind kind, std::string detail);

    ErrKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }
    const char* what() const noexcept override { return message_.c_str(); }

  private:
    ErrKind kind_;
    std::string detail_;
    std::string message_;
};

/// Dense row-major matrix over double-precision real or complex scalars.
class Mat {
  public:
    Mat(std::size_t rows, std::size_t cols, Field field);
    Mat(std::size_t rows, std::size_t cols, Field field, std::vector<Scalar> data);

    static Mat zeros(std::size_t rows, std::size_t cols, Field field = Field::Real);
    static Mat ones(std::size_t rows, std::size_t cols, Field field = Field::Real);
    static Mat identity(std::size_t n, Field field = Field::Real);
    /// 1x1 real matrix holding v; scalar results live in this shape.
    static Mat scalar(double v);
    static Mat scalar(Scalar v, Field field);
    /// Row-major construction from nested lists, e.g. Mat::from_rows({{1,2},{3,4}}).
    static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Mat from_rows(std::initializer_list<std::initializer_list<Scalar>> rows);
    static Mat diag(std::initializer_list<double> entries);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    Field field() const { return field_; }
    bool is_square() const { return rows_ == cols_; }
    bool same_shape(const Mat& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    Scalar operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    Scalar& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    const std::vector<Scalar>& data() const { return data_; }
    std::vector<Scalar>& data() { return data_; }

    /// Real part as a Real-field matrix.
    Mat real_part() const;
    /// Imaginary part as a Real-field matrix.
    Mat imag_part() const;
    /// Same entries, Complex field tag.
    Mat as_complex() const;

  private:
    std::size_t rows_;
    std::size_t cols_;
    Field field_;
    std::vector<Scalar> data_;

    void validate() const;
};

/// re + i*im from two Real-field matrices of the same shape.
Mat complex_from(const Mat& re, const Mat& im);

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator-(const Mat& a);

/// Scaling by a real factor preserves the field.
Mat scale(const Mat& a, double c);
/// Scaling by a complex factor; requires the Complex field.
Mat cscale(const Mat& a, Scalar c);
/// Entrywise product; shapes and fields must match.
Mat hadamard(const Mat& a, const Mat& b);

Mat matmul(const Mat& a, const Mat& b);
Mat transpose(const Mat& a);
Mat conj_transpose(const Mat& a);
Scalar trace(const Mat& a);
Mat inverse(const Mat& a);

double frobenius_norm(const Mat& a);
double max_abs_entry(const Mat& a);

/// Conservative spectral-radius estimate: geometric mean of step norms of a
/// power iteration from a fixed deterministic start vector, reported with a
/// 1.1x safety factor. Exact decay to zero (e.g. nilpotent input) returns 0.
double spectral_radius_estimate(const Mat& a, int iters = 100);

/// Reproducible random matrix with entries uniform in [-1, 1). The PRNG is
/// splitmix64 (fixed algorithm, independent of the platform); complex
/// entries draw the real component first, row-major order.
Mat random_mat(std::size_t rows, std::size_t cols, Field field, std::uint64_t seed);

/// LU factorization with partial pivoting. A pivot of magnitude below
/// 1e-12 times the largest input magnitude is treated as singular.
class Lu {
  public:
    static Lu factor(const Mat& a);
    /// Solves A X = B column by column.
    Mat solve(const Mat& b) const;
    Mat inverse() const;
    std::size_t dim() const { return lu_.rows(); }

  private:
    explicit Lu(Mat lu, std::vector<std::size_t> perm);
    Mat lu_;
    std::vector<std::size_t> perm_;
};

/// Cholesky factorization H = L L^T of a real symmetric positive-definite
/// matrix; failure of the decomposition is the library's SPD test.
class Cholesky {
  public:
    static Cholesky factor(const Mat& h);
    /// Solves H X = B.
    Mat solve(const Mat& b) const;
    const Mat& lower() const { return l_; }

  private:
    explicit Cholesky(Mat l);
    Mat l_;
};

/// Solves H X = B for SPD H via Cholesky.
Mat solve_spd(const Mat& h, const Mat& b);

namespace detail {
/// splitmix64 step; the documented PRNG behind random_mat.
std::uint64_t splitmix64(std::uint64_t& state);
/// Next draw mapped to [-1, 1).
double splitmix64_unit(std::uint64_t& state);
}  // namespace detail

}  // namespace matad
