#include "qgtlab/numkit/matrix.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace qgtlab {

ComplexMat::ComplexMat(std::size_t dim, std::initializer_list<cplx> rowMajor)
    : dim_(dim), data_(rowMajor) {
    if (data_.size() != dim * dim) {
        throw std::invalid_argument("ComplexMat: initializer size does not match dim*dim");
    }
}

ComplexMat ComplexMat::identity(std::size_t dim) {
    ComplexMat m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMat ComplexMat::diagonal(std::span<const double> d) {
    ComplexMat m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

ComplexMat ComplexMat::diagonal(std::span<const cplx> d) {
    ComplexMat m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

ComplexMat ComplexMat::adjoint() const {
    ComplexMat r(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
}

cplx ComplexMat::trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

CVec ComplexMat::column(std::size_t c) const {
    CVec v(dim_);
    for (std::size_t r = 0; r < dim_; ++r) v[r] = (*this)(r, c);
    return v;
}

void ComplexMat::set_column(std::size_t c, std::span<const cplx> v) {
    assert(v.size() == dim_);
    for (std::size_t r = 0; r < dim_; ++r) (*this)(r, c) = v[r];
}

ComplexMat& ComplexMat::operator+=(const ComplexMat& o) {
    assert(o.dim_ == dim_);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

ComplexMat& ComplexMat::operator-=(const ComplexMat& o) {
    assert(o.dim_ == dim_);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

ComplexMat& ComplexMat::operator*=(cplx s) {
    for (auto& x : data_) x *= s;
    return *this;
}

bool ComplexMat::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

ComplexMat operator+(ComplexMat a, const ComplexMat& b) { return a += b; }
ComplexMat operator-(ComplexMat a, const ComplexMat& b) { return a -= b; }
ComplexMat operator*(ComplexMat a, cplx s) { return a *= s; }
ComplexMat operator*(cplx s, ComplexMat a) { return a *= s; }

ComplexMat operator*(const ComplexMat& a, const ComplexMat& b) {
    assert(a.dim() == b.dim());
    const std::size_t n = a.dim();
    ComplexMat r(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx{}) continue;
            for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
        }
    }
    return r;
}

CVec operator*(const ComplexMat& a, std::span<const cplx> v) {
    assert(v.size() == a.dim());
    const std::size_t n = a.dim();
    CVec r(n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += a(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

double max_norm(const ComplexMat& a) {
    double m = 0.0;
    for (const auto& z : a.raw()) m = std::max(m, std::abs(z));
    return m;
}

double inf_norm(const ComplexMat& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < a.dim(); ++j) row += std::abs(a(i, j));
        m = std::max(m, row);
    }
    return m;
}

double max_norm(std::span<const cplx> v) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
}

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
    assert(a.size() == b.size());
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm2(std::span<const cplx> v) { return std::sqrt(std::real(dot(v, v))); }

double hermiticity_defect(const ComplexMat& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = i; j < a.dim(); ++j)
            m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
    return m;
}

ComplexMat hermitian_part(const ComplexMat& a) {
    ComplexMat r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            r(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    return r;
}

}  // namespace qgtlab
