#include "qgtlab/qgt.hpp"

#include "qgtlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qgtlab {

namespace {

struct LevelView {
    SpectralDecomp spec;
    std::size_t level;
    double energy;
};

LevelView resolve_level(const ParamHamiltonian& model, const ParamPoint& pt, const QGTOptions& opts) {
    const ComplexMat h = model(pt);
    LevelView v{eigh(h, opts.degTol), opts.level, 0.0};
    if (opts.level >= v.spec.groups.size()) {
        throw DegeneracyCollision("level " + std::to_string(opts.level) + " does not exist at this point");
    }
    const auto& grp = v.spec.groups[opts.level];
    if (grp.size() == v.spec.dim() && v.spec.dim() > 1) {
        throw DegeneracyCollision("all levels coincide at this point");
    }
    for (std::size_t k : grp) v.energy += v.spec.values[k];
    v.energy /= static_cast<double>(grp.size());

    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < v.spec.dim(); ++k) {
        if (std::find(grp.begin(), grp.end(), k) != grp.end()) continue;
        gap = std::min(gap, std::abs(v.spec.values[k] - v.energy));
    }
    const double tol = v.spec.degTol;
    if (gap < 1e3 * tol) throw DegeneracyCollision("level is not separated from the rest of the spectrum");
    return v;
}

MetricCurvature split(const ComplexMat& q) {
    const ComplexMat qd = q.adjoint();
    ComplexMat g = q + qd;
    g *= 0.5;
    ComplexMat f = q - qd;
    f *= cplx{0.0, 1.0};
    return {std::move(g), std::move(f)};
}

QGTBlock finish(std::string mu, std::string nu, std::size_t level, ComplexMat q, std::vector<CVec> basis) {
    QGTBlock b;
    b.mu = std::move(mu);
    b.nu = std::move(nu);
    b.level = level;
    b.n = basis.size();
    auto mc = split(q);
    b.Q = std::move(q);
    b.g = std::move(mc.g);
    b.F = std::move(mc.F);
    b.basis = std::move(basis);
    return b;
}

// Inverse square root of a Hermitian positive-definite matrix; also reports
// its smallest eigenvalue.
ComplexMat inv_sqrt(const ComplexMat& a, double& minEig) {
    const auto s = eigh(a, 0.0);
    minEig = s.values.front();
    const std::size_t n = a.dim();
    ComplexMat r(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = 1.0 / std::sqrt(std::max(s.values[k], 1e-300));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) r(i, j) += s.vectors(i, k) * w * std::conj(s.vectors(j, k));
    }
    return r;
}

// Columns of `moved` recombined to best match `ref` (polar factor of the overlap).
std::vector<CVec> align(const std::vector<CVec>& moved, const std::vector<CVec>& ref) {
    const std::size_t n = ref.size();
    if (moved.size() != n) throw DegeneracyCollision("degeneracy changes within one finite-difference step");
    ComplexMat m(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) m(a, b) = dot(moved[a], ref[b]);

    double minEig = 0.0;
    const ComplexMat w = m * inv_sqrt(m.adjoint() * m, minEig);
    if (std::sqrt(std::max(minEig, 0.0)) < 0.9) {
        throw GaugeAlignmentFailure("eigenvector overlap below 0.9 across the step");
    }

    const std::size_t dim = ref.front().size();
    std::vector<CVec> out(n, CVec(dim));
    for (std::size_t b = 0; b < n; ++b)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t i = 0; i < dim; ++i) out[b][i] += moved[a][i] * w(a, b);
    return out;
}

std::vector<CVec> derivative(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& param,
                             const std::vector<CVec>& ref, const QGTOptions& opts) {
    auto shifted = [&](double offset) {
        ParamPoint q = pt;
        q[param] += offset;
        const auto s = eigh(model(q), opts.degTol);
        if (opts.level >= s.groups.size()) throw DegeneracyCollision("level vanishes across the step");
        return align(s.group_vectors(opts.level), ref);
    };
    const auto plus = shifted(opts.step);
    const auto minus = shifted(-opts.step);
    std::vector<CVec> d(ref.size(), CVec(ref.front().size()));
    for (std::size_t a = 0; a < ref.size(); ++a)
        for (std::size_t i = 0; i < d[a].size(); ++i) d[a][i] = (plus[a][i] - minus[a][i]) / (2.0 * opts.step);
    return d;
}

}  // namespace

QGTBlock qgt_sum_over_states(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& mu,
                             const std::string& nu, const QGTOptions& opts) {
    const auto lv = resolve_level(model, pt, opts);
    const auto& grp = lv.spec.groups[lv.level];

    std::vector<CVec> basis = opts.basis ? *opts.basis : lv.spec.group_vectors(lv.level);
    if (basis.size() != grp.size()) throw InvalidArgument("explicit basis has the wrong size");

    const ComplexMat dmu = partial(model, pt, mu);
    const ComplexMat dnu = partial(model, pt, nu);

    const std::size_t n = basis.size();
    std::vector<CVec> dmuI, dnuJ;
    for (const auto& v : basis) {
        dmuI.push_back(dmu * v);
        dnuJ.push_back(dnu * v);
    }

    ComplexMat q(n);
    for (std::size_t m = 0; m < lv.spec.dim(); ++m) {
        if (std::find(grp.begin(), grp.end(), m) != grp.end()) continue;
        const CVec em = lv.spec.vectors.column(m);
        const double de = lv.energy - lv.spec.values[m];
        const double w = 1.0 / (de * de);
        std::vector<cplx> left(n), right(n);
        for (std::size_t i = 0; i < n; ++i) {
            left[i] = std::conj(dot(em, dmuI[i]));  // <i|d_mu H|m>
            right[i] = dot(em, dnuJ[i]);            // <m|d_nu H|j>
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) q(i, j) += w * left[i] * right[j];
    }
    return finish(mu, nu, lv.level, std::move(q), std::move(basis));
}

QGTBlock qgt_finite_difference(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& mu,
                               const std::string& nu, const QGTOptions& opts) {
    if (!model.has_param(mu)) throw UnknownParam(mu);
    if (!model.has_param(nu)) throw UnknownParam(nu);
    const auto lv = resolve_level(model, pt, opts);
    std::vector<CVec> basis = lv.spec.group_vectors(lv.level);

    const auto dmu = derivative(model, pt, mu, basis, opts);
    const auto dnu = mu == nu ? dmu : derivative(model, pt, nu, basis, opts);

    // (1 - P) applied to the nu-derivatives.
    std::vector<CVec> projected = dnu;
    for (auto& d : projected) {
        for (const auto& v : basis) {
            const cplx c = dot(v, d);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] -= c * v[i];
        }
    }

    const std::size_t n = basis.size();
    ComplexMat q(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) = dot(dmu[i], projected[j]);
    return finish(mu, nu, lv.level, std::move(q), std::move(basis));
}

MetricCurvature metric_and_curvature(const ComplexMat& q) { return split(q); }

}  // namespace qgtlab
