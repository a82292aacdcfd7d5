#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qgtlab {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Convert an ordinary frequency in MHz to angular frequency in rad/us.
/// This is the only place the 2*pi factor enters.
constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz; }
constexpr double angular_to_mhz(double w) { return w / kTwoPi; }

/// Dense square complex matrix, row-major.
class ComplexMat {
public:
    ComplexMat() = default;
    explicit ComplexMat(std::size_t dim) : dim_(dim), data_(dim * dim) {}
    ComplexMat(std::size_t dim, std::initializer_list<cplx> rowMajor);

    static ComplexMat identity(std::size_t dim);
    static ComplexMat diagonal(std::span<const double> d);
    static ComplexMat diagonal(std::span<const cplx> d);

    std::size_t dim() const { return dim_; }
    bool empty() const { return dim_ == 0; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

    std::span<cplx> raw() { return data_; }
    std::span<const cplx> raw() const { return data_; }

    ComplexMat adjoint() const;
    cplx trace() const;

    /// Column c as a vector.
    CVec column(std::size_t c) const;
    void set_column(std::size_t c, std::span<const cplx> v);

    ComplexMat& operator+=(const ComplexMat& o);
    ComplexMat& operator-=(const ComplexMat& o);
    ComplexMat& operator*=(cplx s);

    bool all_finite() const;

private:
    std::size_t dim_ = 0;
    std::vector<cplx> data_;
};

ComplexMat operator+(ComplexMat a, const ComplexMat& b);
ComplexMat operator-(ComplexMat a, const ComplexMat& b);
ComplexMat operator*(ComplexMat a, cplx s);
ComplexMat operator*(cplx s, ComplexMat a);
ComplexMat operator*(const ComplexMat& a, const ComplexMat& b);
CVec operator*(const ComplexMat& a, std::span<const cplx> v);

/// Largest absolute entry.
double max_norm(const ComplexMat& a);
/// Maximum absolute row sum.
double inf_norm(const ComplexMat& a);
double max_norm(std::span<const cplx> v);

cplx dot(std::span<const cplx> a, std::span<const cplx> b);  // a^dagger b
double norm2(std::span<const cplx> v);

/// ||A - A^dagger|| in max-norm.
double hermiticity_defect(const ComplexMat& a);
/// (A + A^dagger) / 2
ComplexMat hermitian_part(const ComplexMat& a);

}  // namespace qgtlab
