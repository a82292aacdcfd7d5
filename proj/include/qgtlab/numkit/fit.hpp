#pragma once

#include <span>

namespace qgtlab {

/// P(t) ~= offset + amplitude * cos(omega * t + phase)
struct FitResult {
    double omega = 0.0;      // rad/us
    double amplitude = 0.0;  // >= 0
    double offset = 0.0;
    double phase = 0.0;      // (-pi, pi]
    double residualRMS = 0.0;
    int iterations = 0;
};

struct FitOptions {
    int maxIterations = 200;
    double relTol = 1e-10;
    /// Spectral peak must exceed this multiple of the median magnitude.
    double peakToFloor = 5.0;
};

/// Single-tone fit of a uniformly sampled trace: zero-padded (4x) FFT peak
/// for the seed, then damped Gauss-Newton refinement of all four parameters.
///
/// Throws InvalidTrace for fewer than 32 samples, non-uniform spacing or
/// non-finite data; NoOscillation when no tone stands above the spectral
/// floor or the tone completes fewer than two periods in the window.
FitResult fit_oscillation(std::span<const double> times, std::span<const double> values,
                          const FitOptions& opts = {});

}  // namespace qgtlab
