#pragma once

#include "qgtlab/models.hpp"
#include "qgtlab/numkit/eigen.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qgtlab {

/// Non-Abelian quantum geometric tensor of one degenerate level for one
/// parameter pair, together with its metric and curvature parts:
///   Q_ij = <d_mu psi_i | (1 - P) | d_nu psi_j>
///   g    = (Q + Q^dagger) / 2
///   F    = i (Q - Q^dagger)
/// Matrix entries refer to `basis` (the level's eigenvectors at the point).
struct QGTBlock {
    std::string mu, nu;
    std::size_t level = 0;
    std::size_t n = 0;
    ComplexMat Q, g, F;
    std::vector<CVec> basis;
};

struct QGTOptions {
    /// Spectral group whose geometry is computed; 0 is the ground level.
    std::size_t level = 0;
    /// Degeneracy tolerance; negative selects the eigh default.
    double degTol = -1.0;
    /// Finite-difference step (oracle only).
    double step = 1e-4;
    /// Optional explicit orthonormal basis of the level (sum-over-states only);
    /// used to check covariance under intra-level rotations.
    std::optional<std::vector<CVec>> basis;
};

/// Q through the spectral sum
///   Q_ij = sum_{m outside level} <i|d_mu H|m><m|d_nu H|j> / (E_level - E_m)^2.
/// Throws DegeneracyCollision when the level is closer than 1e3 * degTol to
/// any other eigenvalue.
QGTBlock qgt_sum_over_states(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& mu,
                             const std::string& nu, const QGTOptions& opts = {});

/// Q by central differences of the level's eigenvectors, after aligning the
/// displaced bases to the basis at pt with the maximal-overlap unitary.
/// Throws GaugeAlignmentFailure if a singular value of the overlap drops
/// below 0.9.
QGTBlock qgt_finite_difference(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& mu,
                               const std::string& nu, const QGTOptions& opts = {});

struct MetricCurvature {
    ComplexMat g;
    ComplexMat F;
};

MetricCurvature metric_and_curvature(const ComplexMat& q);

}  // namespace qgtlab
