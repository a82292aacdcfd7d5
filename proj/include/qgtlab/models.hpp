#pragma once

#include "qgtlab/numkit/matrix.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace qgtlab {

/// Named real coordinates; angles and momenta in radians.
using ParamPoint = std::map<std::string, double>;

/// A Hermitian matrix-valued function of named real parameters, with
/// optional analytic partial derivatives. Immutable once built.
class ParamHamiltonian {
public:
    using Eval = std::function<ComplexMat(const ParamPoint&)>;

    ParamHamiltonian(std::string name, std::size_t dim, std::vector<std::string> paramNames, Eval eval);

    /// Register the analytic derivative with respect to `param`.
    ParamHamiltonian& with_partial(const std::string& param, Eval d);

    const std::string& name() const { return name_; }
    std::size_t dim() const { return dim_; }
    const std::vector<std::string>& param_names() const { return paramNames_; }
    bool has_param(const std::string& p) const;
    bool has_analytic_partial(const std::string& p) const { return partials_.contains(p); }

    /// Evaluate H(pt). Every registered parameter must be present in pt.
    ComplexMat operator()(const ParamPoint& pt) const;
    /// Registered analytic partial; throws UnknownParam if none.
    ComplexMat analytic_partial(const ParamPoint& pt, const std::string& param) const;

private:
    void check_point(const ParamPoint& pt) const;

    std::string name_;
    std::size_t dim_;
    std::vector<std::string> paramNames_;
    Eval eval_;
    std::map<std::string, Eval> partials_;
};

/// dH/d(mu) at pt: the analytic partial when registered, otherwise a
/// fourth-order central difference (h = 1e-4) cross-checked at h/2.
ComplexMat partial(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& mu);

/// Fourth-order central difference, always (ignores analytic partials).
ComplexMat finite_difference_partial(const ParamHamiltonian& model, const ParamPoint& pt,
                                     const std::string& mu, double h = 1e-4);

// ---------------------------------------------------------------------------
// BHZ model (rows/columns in the order of the displayed 4x4 matrix).

struct BHZParams {
    double Hxy = 1.0;  // rad/us
    double Hz = 1.0;
    double M = 2.0;
    double Bg = 0.0;
};

struct BField {
    double x = 0.0, y = 0.0, z = 0.0;
};

BField bhz_fields(double kx, double ky, const BHZParams& p);
ComplexMat bhz_hamiltonian(double kx, double ky, const BHZParams& p);
/// Parameters "kx", "ky"; analytic partials registered.
ParamHamiltonian bhz_model(const BHZParams& p);

// ---------------------------------------------------------------------------
// Diamond (two-fold degenerate, four-level) model.
//
// Basis order: |0001>, |0010>, |0100>, |1000>.
//   diagonal  Omega0 cos(theta) * (+1, -1, +1, -1)
//   <0010|H|0001> =  Omega0 sin(theta) e^{+i phi}
//   <1000|H|0100> = -Omega0 sin(theta) e^{-i phi}

struct DiamondParams {
    double Omega0 = 1.0;  // rad/us, > 0
    double theta = 0.0;   // [0, pi]
    double phi = 0.0;     // [0, 2 pi)
};

ComplexMat diamond_hamiltonian(const DiamondParams& p);
/// Parameters "theta", "phi" at fixed Omega0; analytic partials registered.
ParamHamiltonian diamond_model(double omega0);

/// Degenerate level of the diamond model holding |0001> and |0100> at
/// theta = 0 (energy +Omega0). This is the manifold the measurement protocol
/// prepares; its spectral group index is 1.
inline constexpr std::size_t kDiamondPreparedLevel = 1;

// ---------------------------------------------------------------------------
// Block extraction (two-level blocks of a 4x4 Hamiltonian).

struct Pairing {
    std::array<std::size_t, 2> first;
    std::array<std::size_t, 2> second;
};

/// Diamond blocks: {|0001>,|0010>} and {|0100>,|1000>}.
inline constexpr Pairing kDiamondPairing{{0, 1}, {2, 3}};
/// BHZ blocks (time-reversal partners): rows {1,3} and {2,4}.
inline constexpr Pairing kBhzPairing{{0, 2}, {1, 3}};

struct BlockPair {
    ComplexMat block1;
    ComplexMat block2;
};

/// Split H into its two 2x2 blocks. Throws NotBlockDecomposable when the
/// coupling between the index pairs exceeds 1e-10 * ||H||.
BlockPair ms_blocks(const ComplexMat& h, const Pairing& pairing);
/// Inverse of ms_blocks.
ComplexMat assemble_blocks(const BlockPair& blocks, const Pairing& pairing);

/// 2x2 model for one BHZ block (1 or 2) over (kx, ky). Requires Bg = 0.
ParamHamiltonian bhz_block_model(const BHZParams& p, int block);

}  // namespace qgtlab
