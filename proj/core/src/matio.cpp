#include "matad/matio.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace matad {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_mat(std::ostream& out, const Mat& m) {
    out << m.rows() << ' ' << m.cols() << ' ' << (m.field() == Field::Real ? 'R' : 'C') << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            Scalar v = m(i, j);
            if (m.field() == Field::Real) {
                out << format_double(v.real());
            } else {
                out << format_double(v.real()) << ',' << format_double(v.imag());
            }
        }
        out << '\n';
    }
}

namespace {

double parse_double(const std::string& tok) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw FieldError(ErrKind::ParseError, "bad numeric entry '" + tok + "'");
    }
    if (used != tok.size())
        throw FieldError(ErrKind::ParseError, "trailing characters in entry '" + tok + "'");
    return v;
}

Scalar parse_entry(const std::string& tok, Field field) {
    auto comma = tok.find(',');
    if (field == Field::Real) {
        if (comma != std::string::npos)
            throw FieldError(ErrKind::ParseError, "complex entry in a real-field matrix");
        return Scalar(parse_double(tok), 0.0);
    }
    if (comma == std::string::npos)
        throw FieldError(ErrKind::ParseError, "complex entry must be written re,im");
    return Scalar(parse_double(tok.substr(0, comma)), parse_double(tok.substr(comma + 1)));
}

}  // namespace

Mat read_mat(std::istream& in) {
    long long rows = 0, cols = 0;
    std::string field_tag;
    if (!(in >> rows >> cols >> field_tag))
        throw FieldError(ErrKind::ParseError, "missing or malformed header line");
    if (rows <= 0 || cols <= 0)
        throw FieldError(ErrKind::ParseError, "matrix dimensions must be positive");
    Field field;
    if (field_tag == "R") {
        field = Field::Real;
    } else if (field_tag == "C") {
        field = Field::Complex;
    } else {
        throw FieldError(ErrKind::ParseError, "field must be R or C, got '" + field_tag + "'");
    }

    std::vector<Scalar> data;
    data.reserve(std::size_t(rows * cols));
    for (long long k = 0; k < rows * cols; ++k) {
        std::string tok;
        if (!(in >> tok)) throw FieldError(ErrKind::ParseError, "not enough entries");
        data.push_back(parse_entry(tok, field));
    }
    try {
        return Mat(std::size_t(rows), std::size_t(cols), field, std::move(data));
    } catch (const FieldError& e) {
        throw FieldError(ErrKind::ParseError, e.detail());
    }
}

void write_mat_file(const std::string& path, const Mat& m) {
    std::ofstream out(path);
    if (!out) throw FieldError(ErrKind::ParseError, "cannot open '" + path + "' for writing");
    write_mat(out, m);
}

Mat read_mat_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FieldError(ErrKind::ParseError, "cannot open '" + path + "'");
    return read_mat(in);
}

}  // namespace matad
