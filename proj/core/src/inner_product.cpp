#include "matad/inner_product.hpp"

namespace matad {

InnerProduct InnerProduct::canonical() {
    return InnerProduct(Kind::Canonical, nullptr, nullptr);
}

InnerProduct InnerProduct::complex_canonical() {
    return InnerProduct(Kind::ComplexCanonical, nullptr, nullptr);
}

InnerProduct InnerProduct::weighted(Mat h) {
    auto chol = std::make_shared<const Cholesky>(Cholesky::factor(h));
    return InnerProduct(Kind::Weighted, std::make_shared<const Mat>(std::move(h)), chol);
}

const Mat& InnerProduct::weight() const {
    if (kind_ != Kind::Weighted) throw FieldError(ErrKind::NotSPD, "inner product carries no weight");
    return *h_;
}

const Cholesky& InnerProduct::weight_factor() const {
    if (kind_ != Kind::Weighted) throw FieldError(ErrKind::NotSPD, "inner product carries no weight");
    return *chol_;
}

double inner(const Mat& a, const Mat& b, const InnerProduct& p) {
    if (!a.same_shape(b)) throw FieldError(ErrKind::ShapeMismatch, "inner: operand shapes differ");
    if (a.field() != b.field()) throw FieldError(ErrKind::FieldMismatch, "inner: operand fields differ");

    switch (p.kind()) {
        case InnerProduct::Kind::Canonical: {
            if (a.field() != Field::Real)
                throw FieldError(ErrKind::FieldMismatch,
                                 "canonical product is for the real field; use complex_canonical");
            double s = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k)
                s += a.data()[k].real() * b.data()[k].real();
            return s;
        }
        case InnerProduct::Kind::ComplexCanonical: {
            if (a.field() != Field::Complex)
                throw FieldError(ErrKind::FieldMismatch,
                                 "complex_canonical product expects complex operands");
            double s = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k)
                s += (std::conj(a.data()[k]) * b.data()[k]).real();
            return s;
        }
        case InnerProduct::Kind::Weighted: {
            if (a.field() != Field::Real)
                throw FieldError(ErrKind::FieldMismatch, "weighted products are real-field only");
            const Mat& h = p.weight();
            if (h.rows() != a.rows())
                throw FieldError(ErrKind::ShapeMismatch, "weight dimension does not match operands");
            Mat hb = matmul(h, b);
            double s = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k)
                s += a.data()[k].real() * hb.data()[k].real();
            return s;
        }
    }
    return 0.0;
}

double dot(const Mat& a, const Mat& b) {
    if (!a.same_shape(b)) throw FieldError(ErrKind::ShapeMismatch, "dot: operand shapes differ");
    if (a.field() != b.field()) throw FieldError(ErrKind::FieldMismatch, "dot: operand fields differ");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (std::conj(a.data()[k]) * b.data()[k]).real();
    return s;
}

}  // namespace matad
