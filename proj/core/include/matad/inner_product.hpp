// Inner products on matrix spaces: the canonical product tr(A^T B), the
// H-weighted product tr(A^T H B) for SPD H, and the canonical real product
// Re tr(A^H B) on complex matrices. Gradients are representers with respect
// to one of these, so the choice is threaded through the reverse mode.

#pragma once

#include <memory>

#include "matad/matrix.hpp"

namespace matad {

class InnerProduct {
  public:
    enum class Kind { Canonical, Weighted, ComplexCanonical };

    static InnerProduct canonical();
    static InnerProduct complex_canonical();
    /// Weighted product by SPD H; SPD is verified here by Cholesky, so a
    /// Weighted value always carries a usable factorization.
    static InnerProduct weighted(Mat h);

    Kind kind() const { return kind_; }
    const Mat& weight() const;
    const Cholesky& weight_factor() const;

  private:
    InnerProduct(Kind kind, std::shared_ptr<const Mat> h, std::shared_ptr<const Cholesky> chol)
        : kind_(kind), h_(std::move(h)), chol_(std::move(chol)) {}

    Kind kind_;
    std::shared_ptr<const Mat> h_;
    std::shared_ptr<const Cholesky> chol_;
};

/// <A, B> under P; always a real number.
/// Canonical requires the Real field, ComplexCanonical the Complex field,
/// and Weighted(H) real operands whose row count matches H.
double inner(const Mat& a, const Mat& b, const InnerProduct& p = InnerProduct::canonical());

/// Field-dispatching canonical pairing: tr(A^T B) on the real field,
/// Re tr(A^H B) on the complex field. Used wherever "the" canonical product
/// of the operands' own space is meant.
double dot(const Mat& a, const Mat& b);

}  // namespace matad
