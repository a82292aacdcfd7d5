#pragma once

#include "qgtlab/models.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qgtlab {

enum class ChernMethod { CurvatureIntegral, LatticePlaquette, MetricSignBorrowed };

std::string to_string(ChernMethod m);

struct ChernResult {
    double value = 0.0;
    ChernMethod method = ChernMethod::CurvatureIntegral;
    std::size_t gridTheta = 0;
    std::size_t gridPhi = 0;
    int block = 1;
};

/// Surface orientation of the (theta, phi) chart: oriented curvature is
/// kSphereOrientation * F^{theta phi}, which makes block 1 of the diamond
/// model carry C = +1.
inline constexpr double kSphereOrientation = -1.0;

/// (theta, phi) -> oriented curvature.
using CurvatureSampler = std::function<double(double theta, double phi)>;

/// (1 / 2 pi) * integral of F over theta in [0, pi], phi in [0, 2 pi) by the
/// trapezoidal rule: nTheta nodes including both poles, nPhi periodic nodes.
/// Throws InvalidArgument when nTheta < 11 or nPhi < 4 and InvalidSample on
/// non-finite samples.
ChernResult chern_integral(const CurvatureSampler& F, std::size_t nTheta, std::size_t nPhi, int block = 1);

/// Sampler over tabulated, phi-independent values at theta_i = i pi / (n - 1).
/// Throws InvalidSample when asked for a theta off that grid.
CurvatureSampler tabulated_sampler(std::vector<double> values);

/// Oriented analytic curvature of state `block` (1 or 2) of the prepared
/// diamond level, from the sum-over-states tensor.
CurvatureSampler diamond_curvature(int block, double omega0 = 1.0);

/// Chern number of band `band` (0 = lowest) of a gapped two-parameter model
/// over the torus kx, ky in [-pi, pi), in the convention of (1 / 2 pi) times the
/// integral of F^{kx ky}, from products of normalised link
/// variables around every plaquette of an nGrid x nGrid mesh. The result is
/// rounded to the nearest integer after checking it lies within 1e-6 of it.
/// Throws GaplessModel when the band touches a neighbour (gap <= 1e-6), or
/// for a 2x2 model when min |E| <= 1e-6.
ChernResult chern_lattice(const ParamHamiltonian& blockModel, std::size_t nGrid, int block = 1,
                          std::size_t band = 0);

/// Diagonal-element metric and oriented curvature at one (theta, phi) point.
struct GeometrySample {
    double gtt = 0.0;
    double gpp = 0.0;
    double gtp = 0.0;
    double F = 0.0;
};

/// max_i |sqrt(det g_i) - |F_i| / 2|, det g = gtt gpp - gtp^2. Slightly
/// negative determinants (>= -1e-10) count as zero; lower ones throw
/// MetricInconsistent.
double detg_curvature_residual(std::span<const GeometrySample> samples);

/// Chern number from metric data alone on the uniform theta grid of
/// chern_integral (phi-independent): |F| = 2 sqrt(det g), with the sign copied
/// from the sample's curvature at the node closest to theta = pi / 2.
ChernResult chern_from_metric(std::span<const GeometrySample> samples, std::size_t nPhi, int block = 1);

struct SpinChern {
    double scn = 0.0;    // (C+ - C-) / 2
    double z2sum = 0.0;  // C+ + C-
};

SpinChern spin_chern(double Cplus, double Cminus);

}  // namespace qgtlab
