// Independent verification harness: central finite differences for
// directional derivatives, the adjoint-identity dot test pairing every
// primitive's tangent and adjoint rules, full gradient checks of recorded
// programs against entrywise differences, and a numerical rank via
// one-sided Jacobi. Reports are plain data and serialize to a stable
// key: value text form.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "matad/inner_product.hpp"
#include "matad/ops.hpp"
#include "matad/reverse.hpp"

namespace matad {

struct FDConfig {
    /// Central-difference step; 0 selects cbrt(eps) * (1 + |x|_F) per point.
    double step = 0.0;
    double atol = 0.01;
    double rtol = 1e-4;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    double step_for(const Mat& x) const;
};

struct CheckCase {
    std::string label;
    double abs_error = 0.0;
    double rel_error = 0.0;
    bool pass = true;
};

struct CheckReport {
    std::string name;
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
    bool pass = true;
    std::vector<CheckCase> cases;

    /// Records a case; passes when the absolute error is within atol or the
    /// relative error is within rtol.
    void add(std::string label, double abs_error, double rel_error, const FDConfig& cfg);
    void add_case(CheckCase c);
    void merge(const CheckReport& other);
};

/// (f(x + h v) - f(x - h v)) / (2h), entrywise. On the complex field the
/// perturbation runs along the complex direction v; probing v and iv
/// together covers both real degrees of freedom.
Mat directional_fd(const std::function<Mat(const Mat&)>& f, const Mat& x, const Mat& v,
                   const FDConfig& cfg = {});

/// Adjoint identity <w, JVP(x, v)> = sum_i <VJP_i(x, w), v_i> for one
/// primitive, with the canonical product of each side's own field; a
/// Weighted product may be supplied for real input spaces. Passes when
/// |lhs - rhs| <= tol * (1 + |lhs|).
CheckReport dot_test(const Op& op, std::span<const Mat> inputs, std::span<const Mat> tangents,
                     const Mat& cotangent, const InnerProduct& p = InnerProduct::canonical(),
                     double tol = 1e-10);

/// Convenience form for unary primitives.
CheckReport dot_test(const Op& op, const Mat& x, const Mat& v, const Mat& w,
                     const InnerProduct& p = InnerProduct::canonical(), double tol = 1e-10);

/// The full primitive adjoint suite: every op kind, both fields where the
/// kind is defined, one random instance per listed seed with the sizes
/// cycled. Case order follows the seed list.
CheckReport dot_test_suite(std::span<const std::uint64_t> seeds,
                           std::span<const std::size_t> sizes, double tol = 1e-10);

/// Backprop gradients of a recorded program versus entrywise central
/// differences along every coordinate direction of every leaf (and the
/// imaginary coordinate directions of complex leaves).
CheckReport gradcheck(const Program& program, const std::vector<Leaf>& leaves,
                      const FDConfig& cfg = {});

/// Count of singular values above rel_tol times the largest one, via
/// one-sided Jacobi on the columns. Real field.
int numerical_rank(const Mat& m, double rel_tol = 1e-10);

/// Seeded instance generators used by the suites (and usable in tests):
/// entries in [-1, 1); well-conditioned adds (1 + n) to the diagonal; SPD is
/// R^T R plus half the identity; spectral scaling rescales so the estimated
/// radius lands at `target`.
Mat random_well_conditioned(std::size_t n, Field field, std::uint64_t seed);
Mat random_spd(std::size_t n, std::uint64_t seed);
Mat random_spectral_scaled(std::size_t n, Field field, std::uint64_t seed, double target);

/// Human-readable key: value rendering.
std::string to_text(const CheckReport& report);
/// Machine rendering with a pinned `schema: 1` header; byte-stable for a
/// fixed report.
std::string to_machine(const CheckReport& report);

}  // namespace matad
