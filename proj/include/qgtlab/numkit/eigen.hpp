#pragma once

#include "qgtlab/numkit/matrix.hpp"

#include <vector>

namespace qgtlab {

/// Sorted spectrum of a Hermitian matrix.
///
/// Eigenvectors are the columns of `vectors`. Indices whose eigenvalues lie
/// within `degTol` of a neighbour share a group; groups are contiguous runs
/// of the ascending spectrum, listed lowest first.
///
/// Inside a group the basis is canonicalised so that repeated calls on the
/// same matrix agree: columns are ordered by the index of their
/// largest-magnitude component, and that component is made real positive.
struct SpectralDecomp {
    std::vector<double> values;
    ComplexMat vectors;
    std::vector<std::vector<std::size_t>> groups;
    double degTol = 0.0;

    std::size_t dim() const { return values.size(); }
    /// Index into `groups` of the group holding eigenvalue index i.
    std::size_t group_of(std::size_t i) const;
    /// Columns of one group, in order.
    std::vector<CVec> group_vectors(std::size_t g) const;
};

/// Default degeneracy tolerance: 1e-6 * ||H||_inf (roundoff only).
double default_deg_tol(const ComplexMat& h);

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
/// Pass degTol < 0 for the default tolerance.
/// Throws InvalidMatrix for non-finite or non-Hermitian input and
/// NumericalFailure if the sweeps do not converge.
SpectralDecomp eigh(const ComplexMat& h, double degTol = -1.0);

/// exp(-i H dt) for Hermitian H.
ComplexMat propagator(const ComplexMat& h, double dt);

/// Rebuild V diag(E) V^dagger.
ComplexMat reconstruct(const SpectralDecomp& s);

}  // namespace qgtlab
