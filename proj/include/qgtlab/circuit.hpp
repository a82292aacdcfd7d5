#pragma once

#include "qgtlab/numkit/fit.hpp"
#include "qgtlab/numkit/matrix.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace qgtlab {

/// Four coupled transmons on a ring. Qubits are numbered 1..4; kets are
/// written |q1 q2 q3 q4>, so |0001> has qubit 4 excited. All rates in rad/us.
struct CircuitSpec {
    std::array<double, 4> omegaQ{};
    std::array<double, 4> alpha{};
    /// Keys "12", "23", "34", "41".
    std::map<std::string, double> J;
    int levels = 2;

    /// Throws InvalidArgument for bad levels, unknown coupling keys or
    /// non-finite values.
    void validate() const;
    /// J_kl for qubits k, l (either order); 0 when absent.
    double coupling(int k, int l) const;
};

/// Representative (non-device) operating point: 4800/4900/5000/5100 MHz,
/// anharmonicity -250 MHz, all J = 5 MHz, two levels.
CircuitSpec default_circuit();

struct Tone {
    double amp = 0.0;    // omega^T, rad/us
    double freq = 0.0;   // 2 pi f, rad/us
    double phase = 0.0;  // beta, rad
};

struct QubitModulation {
    int qubit = 1;
    double meanFreq = 0.0;  // rad/us
    std::vector<Tone> tones;  // at most two
};

/// omega_m(t) = meanFreq + sum_i amp_i cos(freq_i t + phase_i) for every listed
/// qubit; unlisted qubits sit at CircuitSpec::omegaQ.
struct ModulationSpec {
    std::vector<QubitModulation> qubits;

    void validate() const;
    const QubitModulation* find(int qubit) const;
    double mean_frequency(const CircuitSpec& cs, int qubit) const;
    double frequency(const CircuitSpec& cs, int qubit, double t) const;
};

/// Index of |n1 n2 n3 n4> in the truncated Fock basis (qubit 4 fastest).
std::size_t fock_index(const std::array<int, 4>& n, int levels);

/// Lab-frame H_s(t): sum_k omega_k(t) n_k + (alpha_k/2) n_k(n_k - 1)
/// + sum_<kl> J_kl (a_k + a_k^dag)(a_l + a_l^dag), truncated to `levels` per mode.
ComplexMat circuit_hamiltonian(const CircuitSpec& cs, const ModulationSpec& ms, double t);

/// Projection onto (|0001>, |0010>, |0100>, |1000>).
ComplexMat single_excitation_block(const ComplexMat& h, const CircuitSpec& cs);

/// Single-excitation Hamiltonian in the frame rotating at every qubit's mean
/// frequency; terms that change the excitation number are dropped. Diagonal:
/// modulation offsets; off-diagonal: J_kl e^{i (wbar_k - wbar_l) t}. Basis as
/// in single_excitation_block.
ComplexMat rotating_frame_hamiltonian(const CircuitSpec& cs, const ModulationSpec& ms, double t);

/// |J * J1(ampOverFreq)|
double effective_coupling(double J, double ampOverFreq);

struct CalibrationOptions {
    /// Search the tone frequency for the slowest (resonant) exchange.
    bool resonanceSearch = true;
    /// Time step bound as a fraction of 1 / nu_max.
    double stepFraction = 0.01;
    std::size_t samples = 512;
    /// Exchange traces with a smaller fitted amplitude count as no oscillation.
    double minAmplitude = 0.1;
};

struct CalibrationResult {
    double measured = 0.0;  // rad/us
    double toneFreq = 0.0;  // rad/us, after the resonance search
    FitResult fit;
};

/// Drives the exchange of pair "kl" (one qubit of the pair carries a single
/// tone), starting from the modulated qubit excited, and returns half the
/// fitted population angular frequency. duration <= 0 selects six expected
/// periods. Throws NoOscillation when no exchange is visible.
CalibrationResult calibrate_effective(const CircuitSpec& cs, const ModulationSpec& ms, const std::string& pair,
                                      double duration = 0.0, const CalibrationOptions& opts = {});

/// Operating point for the coupling-law check: default circuit with only the
/// given pair coupled, and a single tone on its lower qubit at the pair
/// detuning with amplitude ampOverFreq * freq.
struct BesselPoint {
    CircuitSpec cs;
    ModulationSpec ms;
};
BesselPoint bessel_operating_point(const std::string& pair, double ampOverFreq, double phase = 0.0);

// ---------------------------------------------------------------------------
// Emergence of the diamond Hamiltonian.
//
// Block 1 = {|0001>, |0010>}: qubit 3 modulated, exchanging with qubit 4 via J34.
// Block 2 = {|0100>, |1000>}: qubit 1 modulated, exchanging with qubit 2 via J12.
// Tones sit 2 Delta below the pair detunings; phases beta3 = phi and
// beta1 = pi - phi reproduce the +-phi couplings of the diamond model.

struct DiamondCircuitTarget {
    double Omega = 0.0;   // |J J1(x)|
    double Omega0 = 0.0;  // sqrt(Omega^2 + Delta^2)
    double theta = 0.0;   // atan2(Omega, Delta)
};

/// Circuit with J23 = J41 = 0 (otherwise the default grid makes pair 23
/// resonant with the same tones).
CircuitSpec diamond_circuit();
ModulationSpec diamond_modulation(const CircuitSpec& cs, double ampOverFreq, double Delta, double phi);
DiamondCircuitTarget diamond_target(const CircuitSpec& cs, double ampOverFreq, double Delta);

/// Generator H with U = exp(-i H T), eigenphases taken in (-pi, pi].
ComplexMat unitary_generator(const ComplexMat& u, double T);

struct EffectiveGenerator {
    ComplexMat H;   // 4x4, diamond basis order
    double T = 0.0;
    std::size_t cycles = 0;
};

/// Propagates the rotating-frame single-excitation system over a whole number
/// of tone periods (chosen so the generator phases stay below pi unless
/// `cycles` is given), removes the modulation and detuning frames and returns
/// the stroboscopic generator averaged over `startPhases` start times within
/// one tone period.
EffectiveGenerator diamond_effective_generator(const CircuitSpec& cs, const ModulationSpec& ms, double Delta,
                                               std::size_t cycles = 0, double stepFraction = 0.005,
                                               std::size_t startPhases = 8);

}  // namespace qgtlab
