#include "qgtlab/topology.hpp"

#include "qgtlab/errors.hpp"
#include "qgtlab/numkit/eigen.hpp"
#include "qgtlab/qgt.hpp"

#include <cmath>

namespace qgtlab {

namespace {

void check_block(int block) {
    if (block != 1 && block != 2) throw InvalidArgument("block must be 1 or 2");
}

double theta_node(std::size_t i, std::size_t nTheta) {
    return kPi * static_cast<double>(i) / static_cast<double>(nTheta - 1);
}

// Trapezoid over the theta nodes of a phi-independent profile; the phi
// integral cancels the 1 / 2 pi.
double profile_integral(std::span<const double> f) {
    const std::size_t n = f.size();
    const double h = kPi / static_cast<double>(n - 1);
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < n; ++i) s += f[i];
    return s * h;
}

}  // namespace

std::string to_string(ChernMethod m) {
    switch (m) {
        case ChernMethod::CurvatureIntegral: return "curvature-integral";
        case ChernMethod::LatticePlaquette: return "lattice-plaquette";
        case ChernMethod::MetricSignBorrowed: return "metric-sign-borrowed";
    }
    return "unknown";
}

ChernResult chern_integral(const CurvatureSampler& F, std::size_t nTheta, std::size_t nPhi, int block) {
    check_block(block);
    if (nTheta < 11) throw InvalidArgument("nTheta must be at least 11");
    if (nPhi < 4) throw InvalidArgument("nPhi must be at least 4");
    const double hTheta = kPi / static_cast<double>(nTheta - 1);
    const double hPhi = kTwoPi / static_cast<double>(nPhi);
    double sum = 0.0;
    for (std::size_t i = 0; i < nTheta; ++i) {
        const double w = (i == 0 || i + 1 == nTheta) ? 0.5 : 1.0;
        const double th = theta_node(i, nTheta);
        for (std::size_t k = 0; k < nPhi; ++k) {
            const double v = F(th, hPhi * static_cast<double>(k));
            if (!std::isfinite(v)) throw InvalidSample("non-finite curvature sample");
            sum += w * v;
        }
    }
    return {sum * hTheta * hPhi / kTwoPi, ChernMethod::CurvatureIntegral, nTheta, nPhi, block};
}

CurvatureSampler tabulated_sampler(std::vector<double> values) {
    if (values.size() < 2) throw InvalidArgument("tabulated sampler needs at least two nodes");
    return [v = std::move(values)](double theta, double) {
        const double pos = theta / kPi * static_cast<double>(v.size() - 1);
        const double idx = std::round(pos);
        if (std::abs(pos - idx) > 1e-9 || idx < 0.0 || idx > static_cast<double>(v.size() - 1))
            throw InvalidSample("theta is not a tabulated node");
        return v[static_cast<std::size_t>(idx)];
    };
}

CurvatureSampler diamond_curvature(int block, double omega0) {
    check_block(block);
    return [model = diamond_model(omega0), block](double theta, double phi) {
        QGTOptions o;
        o.level = kDiamondPreparedLevel;
        const QGTBlock q = qgt_sum_over_states(model, {{"theta", theta}, {"phi", phi}}, "theta", "phi", o);
        const auto j = static_cast<std::size_t>(block - 1);
        return kSphereOrientation * q.F(j, j).real();
    };
}

ChernResult chern_lattice(const ParamHamiltonian& blockModel, std::size_t nGrid, int block, std::size_t band) {
    check_block(block);
    if (nGrid < 4) throw InvalidArgument("nGrid must be at least 4");
    if (blockModel.param_names().size() != 2) throw InvalidArgument("lattice Chern needs a two-parameter model");
    if (band >= blockModel.dim()) throw InvalidArgument("band index out of range");
    const std::string& px = blockModel.param_names()[0];
    const std::string& py = blockModel.param_names()[1];
    const double h = kTwoPi / static_cast<double>(nGrid);

    std::vector<CVec> u(nGrid * nGrid);
    for (std::size_t a = 0; a < nGrid; ++a) {
        for (std::size_t b = 0; b < nGrid; ++b) {
            const ParamPoint pt{{px, -kPi + h * static_cast<double>(a)}, {py, -kPi + h * static_cast<double>(b)}};
            const SpectralDecomp s = eigh(blockModel(pt));
            if (band > 0 && s.values[band] - s.values[band - 1] <= 1e-6) throw GaplessModel("band gap closes");
            if (band + 1 < s.dim() && s.values[band + 1] - s.values[band] <= 1e-6) throw GaplessModel("band gap closes");
            if (s.dim() == 2 && std::min(std::abs(s.values[0]), std::abs(s.values[1])) <= 1e-6)
                throw GaplessModel("min |E| below 1e-6");
            CVec v(s.dim());
            for (std::size_t r = 0; r < s.dim(); ++r) v[r] = s.vectors(r, band);
            u[a * nGrid + b] = std::move(v);
        }
    }
    auto link = [&](std::size_t a0, std::size_t b0, std::size_t a1, std::size_t b1) {
        const cplx z = dot(u[a0 * nGrid + b0], u[a1 * nGrid + b1]);
        if (std::abs(z) < 1e-12) throw NumericalFailure("vanishing link variable; refine the grid");
        return z / std::abs(z);
    };
    double flux = 0.0;
    for (std::size_t a = 0; a < nGrid; ++a) {
        const std::size_t an = (a + 1) % nGrid;
        for (std::size_t b = 0; b < nGrid; ++b) {
            const std::size_t bn = (b + 1) % nGrid;
            // Traversed ky first so the sum equals (1/2pi) int F^{kx ky}, F = i (Q - Q^dagger).
            const cplx w = link(a, b, a, bn) * link(a, bn, an, bn) * std::conj(link(an, b, an, bn)) *
                           std::conj(link(a, b, an, b));
            flux += std::arg(w);
        }
    }
    const double c = flux / kTwoPi;
    const double r = std::round(c);
    if (std::abs(c - r) > 1e-6) throw NumericalFailure("plaquette sum is not an integer");
    return {r == 0.0 ? 0.0 : r, ChernMethod::LatticePlaquette, nGrid, nGrid, block};
}

double detg_curvature_residual(std::span<const GeometrySample> samples) {
    double worst = 0.0;
    for (const auto& s : samples) {
        if (!std::isfinite(s.gtt) || !std::isfinite(s.gpp) || !std::isfinite(s.gtp) || !std::isfinite(s.F))
            throw InvalidSample("non-finite geometry sample");
        double det = s.gtt * s.gpp - s.gtp * s.gtp;
        if (det < -1e-10) throw MetricInconsistent("negative metric determinant");
        det = std::max(det, 0.0);
        worst = std::max(worst, std::abs(std::sqrt(det) - 0.5 * std::abs(s.F)));
    }
    return worst;
}

ChernResult chern_from_metric(std::span<const GeometrySample> samples, std::size_t nPhi, int block) {
    check_block(block);
    const std::size_t n = samples.size();
    if (n < 11) throw InvalidArgument("need at least 11 theta nodes");
    if (nPhi < 4) throw InvalidArgument("nPhi must be at least 4");
    const std::size_t mid = (n - 1) / 2;
    const double sign = samples[mid].F >= 0.0 ? 1.0 : -1.0;
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = samples[i];
        double det = s.gtt * s.gpp - s.gtp * s.gtp;
        if (!std::isfinite(det)) throw InvalidSample("non-finite metric sample");
        if (det < -1e-10) throw MetricInconsistent("negative metric determinant");
        f[i] = sign * 2.0 * std::sqrt(std::max(det, 0.0));
    }
    return {profile_integral(f), ChernMethod::MetricSignBorrowed, n, nPhi, block};
}

SpinChern spin_chern(double Cplus, double Cminus) { return {(Cplus - Cminus) / 2.0, Cplus + Cminus}; }

}  // namespace qgtlab
