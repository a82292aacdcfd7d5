#pragma once

#include "qgtlab/models.hpp"
#include "qgtlab/numkit/fit.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qgtlab {

enum class DriveMode { OneParam, TwoParam };

/// Weak periodic drive of one or two model parameters. All rates in rad/us.
///
/// Detuning convention: Delta is the sigma_z coefficient of the rotating-frame
/// two-level problem, Delta = (E_gap - omega) / 2, so the Rabi rate reads
/// Omega = sqrt(A^2 Q + Delta^2). Positive Delta drives below the gap.
struct DriveSpec {
    DriveMode mode = DriveMode::OneParam;
    std::string mu;
    std::string nu;  // two-param only
    double A = 0.0;
    double omega = 0.0;
    double phiMu = 0.0;
    double phiNu = 0.0;
    double Delta = 0.0;
    /// Trace length in us; <= 0 selects six expected Rabi periods.
    double duration = 0.0;
    std::size_t samples = 512;

    /// Throws InvalidArgument when A <= 0, omega <= 0, A/omega > 0.3,
    /// samples < 64 or a two-param drive has no nu.
    void validate() const;
};

using TimeHamiltonian = std::function<ComplexMat(double)>;

/// t -> H0(pt) + (2A/omega) [cos(omega t + phiMu) dH/dmu (+ cos(omega t + phiNu) dH/dnu)].
TimeHamiltonian drive_hamiltonian(const ParamHamiltonian& model, const ParamPoint& pt, const DriveSpec& spec);

struct Trajectory {
    std::vector<double> times;
    std::vector<CVec> states;
    double step = 0.0;
    double maxNormDrift = 0.0;
};

/// Integrates i d/dt psi = H(t) psi with piecewise-constant midpoint
/// propagators of step <= dt. `samples` evenly spaced records including both
/// end points (0: record every step). Throws IntegrationUnstable when the
/// norm drifts by more than 1e-6.
Trajectory evolve(const TimeHamiltonian& h, const CVec& psi0, double duration, double dt, std::size_t samples = 0);

/// Largest frequency scale of a drive in ordinary units (MHz): ||H0|| plus the
/// drive bound and the carrier, over 2 pi.
double max_frequency_scale(const ParamHamiltonian& model, const ParamPoint& pt, const DriveSpec& spec);

struct RabiTrace {
    std::vector<double> times;
    std::vector<double> popGround;   // prepared state
    std::vector<double> popExcited;  // its partner inside the same block
    int blockIndex = 1;
    std::size_t stateIndex = 1;
    double driveOmega = 0.0;
    double dt = 0.0;
    double maxNormDrift = 0.0;
};

struct RabiOptions {
    /// Degenerate level the state is prepared in.
    std::size_t level = 0;
    Pairing pairing = kDiamondPairing;
    double leakageTol = 1e-3;
    double noiseSigma = 0.0;
    std::uint64_t seed = 0;
    /// Step bound as a fraction of 1 / nu_max.
    double stepFraction = 0.01;
};

/// Prepares basis state j (1-based) of the chosen level, checks it lives in
/// `blockIndex`, sets omega = E_gap - 2 Delta for that block and records the
/// populations of the prepared state and its in-block partner.
/// Throws BlockLeakage when 1 - (popGround + popExcited) exceeds the tolerance.
RabiTrace rabi_experiment(const ParamHamiltonian& model, const ParamPoint& pt, const DriveSpec& spec, int blockIndex,
                          std::size_t j, const RabiOptions& opts = {});

struct RabiFit {
    FitResult fit;
    /// Half the fitted population angular frequency.
    double rabiOmega = 0.0;
};

RabiFit fit_rabi(const RabiTrace& trace);

/// Q = (Omega^2 - Delta^2) / A^2; slightly negative values (>= -1e-3) clamp
/// to zero, anything lower throws InconsistentFit.
double invert_rabi(double omegaFit, double A, double Delta);

struct CrossTerms {
    double ReQ = 0.0;
    double ImQ = 0.0;
    double g = 0.0;  // = ReQ
    double F = 0.0;  // = -2 ImQ
};

/// From the two-parameter rates at dphi = 0 and dphi = pi/2.
CrossTerms extract_cross_terms(double S0, double Shalfpi, double Qmumu, double Qnunu);

/// Tone-phase sign relating the nominal dphi to the physical one: -1 when the
/// prepared state lies above its partner (emission-side coupling), else +1.
int phase_orientation(const ParamHamiltonian& model, const ParamPoint& pt, int blockIndex, std::size_t j,
                      const RabiOptions& opts);

/// Rate S(dphi) = Qmm + Qnn + e^{-i dphi} Qmn + e^{i dphi} Qnm expected from
/// the analytic tensor for state j of the level.
double expected_rate(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& mu, const std::string& nu,
                     double dphi, std::size_t j, std::size_t level);

struct DrivenQGT {
    std::size_t j = 1;
    int block = 1;
    double Qmumu = 0.0, Qnunu = 0.0;
    double S0 = 0.0, Shalfpi = 0.0;
    CrossTerms cross;
    std::vector<RabiTrace> traces;  // mu, nu, dphi=0, dphi=+pi/2, dphi=-pi/2
    std::vector<double> rates;       // fitted rabiOmega per trace, NaN if no oscillation
    std::vector<double> amplitudes;  // fitted population amplitude, 0 if no oscillation
};

/// Full extraction of the diagonal (jj) elements of Q^{mumu}, Q^{nunu} and
/// Q^{munu} from five weak-drive experiments at amplitude A and detuning Delta.
DrivenQGT measure_qgt(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& mu,
                      const std::string& nu, double A, double Delta, int blockIndex, std::size_t j,
                      const RabiOptions& opts = {});

}  // namespace qgtlab
