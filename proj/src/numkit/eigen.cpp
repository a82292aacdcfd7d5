#include "qgtlab/numkit/eigen.hpp"

#include "qgtlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qgtlab {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const ComplexMat& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

double frobenius(const ComplexMat& a) {
    double s = 0.0;
    for (const auto& z : a.raw()) s += std::norm(z);
    return std::sqrt(s);
}

// Zero a(p,q) with the unitary U = D P, where D = diag(1, e^{-i alpha}) makes
// the pivot real and P is the classic real Jacobi rotation.
void rotate(ComplexMat& a, ComplexMat& v, std::size_t p, std::size_t q) {
    const cplx apq = a(p, q);
    const double r = std::abs(apq);
    const cplx phase = apq / r;  // e^{i alpha}
    const double app = a(p, p).real();
    const double aqq = a(q, q).real();

    const double theta = (aqq - app) / (2.0 * r);
    double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    if (theta < 0.0) t = -t;
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    const cplx upp = c;
    const cplx upq = s;
    const cplx uqp = -s * std::conj(phase);
    const cplx uqq = c * std::conj(phase);

    const std::size_t n = a.dim();
    for (std::size_t k = 0; k < n; ++k) {
        const cplx akp = a(k, p);
        const cplx akq = a(k, q);
        a(k, p) = akp * upp + akq * uqp;
        a(k, q) = akp * upq + akq * uqq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const cplx apk = a(p, k);
        const cplx aqk = a(q, k);
        a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
        a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = a(p, p).real();
    a(q, q) = a(q, q).real();

    for (std::size_t k = 0; k < n; ++k) {
        const cplx vkp = v(k, p);
        const cplx vkq = v(k, q);
        v(k, p) = vkp * upp + vkq * uqp;
        v(k, q) = vkp * upq + vkq * uqq;
    }
}

std::size_t dominant_index(const ComplexMat& v, std::size_t col) {
    double best = 0.0;
    for (std::size_t r = 0; r < v.dim(); ++r) best = std::max(best, std::abs(v(r, col)));
    // First component within roundoff of the maximum, so near-ties resolve
    // towards the lower index deterministically.
    for (std::size_t r = 0; r < v.dim(); ++r)
        if (std::abs(v(r, col)) >= best * (1.0 - 1e-9)) return r;
    return 0;
}

}  // namespace

std::size_t SpectralDecomp::group_of(std::size_t i) const {
    for (std::size_t g = 0; g < groups.size(); ++g)
        if (std::find(groups[g].begin(), groups[g].end(), i) != groups[g].end()) return g;
    throw InvalidArgument("eigen index out of range");
}

std::vector<CVec> SpectralDecomp::group_vectors(std::size_t g) const {
    std::vector<CVec> out;
    for (std::size_t i : groups.at(g)) out.push_back(vectors.column(i));
    return out;
}

double default_deg_tol(const ComplexMat& h) { return 1e-6 * inf_norm(h); }

SpectralDecomp eigh(const ComplexMat& h, double degTol) {
    const std::size_t n = h.dim();
    if (n == 0) throw InvalidMatrix("empty matrix");
    if (!h.all_finite()) throw InvalidMatrix("non-finite entry");
    const double scale = inf_norm(h);
    if (hermiticity_defect(h) > 1e-9 * std::max(scale, 1e-300)) {
        throw InvalidMatrix("matrix is not Hermitian");
    }
    if (degTol < 0.0) degTol = default_deg_tol(h);

    ComplexMat a = hermitian_part(h);
    ComplexMat v = ComplexMat::identity(n);
    const double fro = frobenius(a);

    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const double off = off_diagonal_norm(a);
        if (off <= 1e-15 * fro || off == 0.0) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag == 0.0) continue;
                if (mag < 1e-18 * fro) {
                    a(p, q) = 0.0;
                    a(q, p) = 0.0;
                    continue;
                }
                rotate(a, v, p, q);
            }
        }
    }
    if (!converged && off_diagonal_norm(a) > 1e-13 * fro) {
        throw NumericalFailure("Jacobi sweeps did not converge");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    SpectralDecomp out;
    out.degTol = degTol;
    out.values.resize(n);
    out.vectors = ComplexMat(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        out.vectors.set_column(k, v.column(order[k]));
    }

    std::vector<std::size_t> current{0};
    for (std::size_t k = 1; k < n; ++k) {
        if (out.values[k] - out.values[k - 1] <= degTol) {
            current.push_back(k);
        } else {
            out.groups.push_back(current);
            current = {k};
        }
    }
    out.groups.push_back(current);

    // Canonical gauge inside each group.
    for (const auto& grp : out.groups) {
        std::vector<std::pair<std::size_t, CVec>> cols;
        for (std::size_t k : grp) {
            CVec col = out.vectors.column(k);
            ComplexMat tmp(n);
            tmp.set_column(0, col);
            const std::size_t dom = dominant_index(tmp, 0);
            const cplx lead = col[dom];
            const cplx fix = std::conj(lead) / std::abs(lead);
            for (auto& z : col) z *= fix;
            col[dom] = std::abs(col[dom]);
            cols.emplace_back(dom, std::move(col));
        }
        std::stable_sort(cols.begin(), cols.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        for (std::size_t m = 0; m < grp.size(); ++m) out.vectors.set_column(grp[m], cols[m].second);
    }
    return out;
}

ComplexMat propagator(const ComplexMat& h, double dt) {
    if (!std::isfinite(dt)) throw InvalidArgument("propagator: non-finite dt");
    const auto s = eigh(h);
    const std::size_t n = h.dim();
    ComplexMat u(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx ph = std::polar(1.0, -s.values[k] * dt);
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vik = s.vectors(i, k) * ph;
            for (std::size_t j = 0; j < n; ++j) u(i, j) += vik * std::conj(s.vectors(j, k));
        }
    }
    return u;
}

ComplexMat reconstruct(const SpectralDecomp& s) {
    const std::size_t n = s.dim();
    ComplexMat r(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i) {
            const cplx vik = s.vectors(i, k) * s.values[k];
            for (std::size_t j = 0; j < n; ++j) r(i, j) += vik * std::conj(s.vectors(j, k));
        }
    return r;
}

}  // namespace qgtlab
