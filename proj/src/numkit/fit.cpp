#include "qgtlab/numkit/fit.hpp"

#include "qgtlab/errors.hpp"
#include "qgtlab/numkit/matrix.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <vector>

namespace qgtlab {

namespace {

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

// Solve the n x n system in place (partial pivoting). Returns nullopt when singular.
template <std::size_t N>
std::optional<std::array<double, N>> solve(std::array<double, N * N> a, std::array<double, N> b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::abs(a[r * N + col]) > std::abs(a[piv * N + col])) piv = r;
        if (std::abs(a[piv * N + col]) < 1e-300) return std::nullopt;
        if (piv != col) {
            for (std::size_t c = 0; c < N; ++c) std::swap(a[col * N + c], a[piv * N + c]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = a[r * N + col] / a[col * N + col];
            for (std::size_t c = col; c < N; ++c) a[r * N + c] -= f * a[col * N + c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (std::size_t i = N; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < N; ++c) s -= a[i * N + c] * x[c];
        x[i] = s / a[i * N + i];
    }
    return x;
}

// Peak frequency (cycles per unit tau) of the zero-padded spectrum.
double spectral_seed(std::span<const double> centred, double dtau, double peakToFloor) {
    const std::size_t n = centred.size();
    const std::size_t padded = 4 * n;
    const std::size_t bins = padded / 2 + 1;

    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * padded)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
    std::fill_n(in.get(), padded, 0.0);
    std::copy(centred.begin(), centred.end(), in.get());

    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(padded), in.get(), out.get(), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);

    std::vector<double> mag(bins);
    for (std::size_t k = 0; k < bins; ++k) mag[k] = std::hypot(out.get()[k][0], out.get()[k][1]);

    std::size_t peak = 1;
    for (std::size_t k = 1; k < bins; ++k)
        if (mag[k] > mag[peak]) peak = k;

    std::vector<double> rest(mag.begin() + 1, mag.end());
    std::nth_element(rest.begin(), rest.begin() + rest.size() / 2, rest.end());
    const double floor = rest[rest.size() / 2];
    if (!(mag[peak] > peakToFloor * floor)) throw NoOscillation("no spectral peak above the noise floor");

    double shift = 0.0;
    if (peak > 0 && peak + 1 < bins) {
        const double a = mag[peak - 1], b = mag[peak], c = mag[peak + 1];
        const double den = a - 2.0 * b + c;
        if (den != 0.0) shift = std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
    }
    return (static_cast<double>(peak) + shift) / (static_cast<double>(padded) * dtau);
}

struct Params {
    double offset, amp, omega, phase;
};

double cost(std::span<const double> tau, std::span<const double> y, const Params& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const double r = y[i] - (p.offset + p.amp * std::cos(p.omega * tau[i] + p.phase));
        s += r * r;
    }
    return s;
}

}  // namespace

FitResult fit_oscillation(std::span<const double> times, std::span<const double> values,
                          const FitOptions& opts) {
    const std::size_t n = times.size();
    if (n != values.size()) throw InvalidTrace("times and values differ in length");
    if (n < 32) throw InvalidTrace("need at least 32 samples");
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(times[i]) || !std::isfinite(values[i])) throw InvalidTrace("non-finite sample");

    const double t0 = times.front();
    const double span = times.back() - t0;
    if (!(span > 0.0)) throw InvalidTrace("times must increase");
    const double step = span / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(times[i] - (t0 + step * static_cast<double>(i))) > 1e-6 * step) {
            throw InvalidTrace("samples are not uniformly spaced");
        }
    }

    // Work on tau in [0, 1] so the fit is independent of the time unit.
    std::vector<double> tau(n);
    for (std::size_t i = 0; i < n; ++i) tau[i] = static_cast<double>(i) / static_cast<double>(n - 1);
    const double dtau = 1.0 / static_cast<double>(n - 1);

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> centred(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        centred[i] = values[i] - mean;
        var += centred[i] * centred[i];
    }
    if (std::sqrt(var / static_cast<double>(n)) < 1e-9) throw NoOscillation("trace is constant");

    const double w0 = kTwoPi * spectral_seed(centred, dtau, opts.peakToFloor);

    // Linear seed for offset and quadratures at fixed frequency.
    std::array<double, 9> ata{};
    std::array<double, 3> atb{};
    for (std::size_t i = 0; i < n; ++i) {
        const std::array<double, 3> row{1.0, std::cos(w0 * tau[i]), std::sin(w0 * tau[i])};
        for (std::size_t r = 0; r < 3; ++r) {
            atb[r] += row[r] * values[i];
            for (std::size_t c = 0; c < 3; ++c) ata[r * 3 + c] += row[r] * row[c];
        }
    }
    const auto lin = solve<3>(ata, atb);
    if (!lin) throw NoOscillation("degenerate linear seed");
    Params p{(*lin)[0], std::hypot((*lin)[1], (*lin)[2]), w0, std::atan2(-(*lin)[2], (*lin)[1])};

    double c = cost(tau, values, p);
    double lambda = 1e-3;
    int it = 0;
    bool converged = false;
    for (; it < opts.maxIterations && !converged; ++it) {
        std::array<double, 16> jtj{};
        std::array<double, 4> jtr{};
        for (std::size_t i = 0; i < n; ++i) {
            const double arg = p.omega * tau[i] + p.phase;
            const double cs = std::cos(arg), sn = std::sin(arg);
            const double r = values[i] - (p.offset + p.amp * cs);
            const std::array<double, 4> jac{1.0, cs, -p.amp * tau[i] * sn, -p.amp * sn};
            for (std::size_t a = 0; a < 4; ++a) {
                jtr[a] += jac[a] * r;
                for (std::size_t b = 0; b < 4; ++b) jtj[a * 4 + b] += jac[a] * jac[b];
            }
        }

        bool accepted = false;
        double relStep = 0.0;
        for (int tries = 0; tries < 30 && !accepted; ++tries) {
            auto damped = jtj;
            for (std::size_t a = 0; a < 4; ++a) damped[a * 4 + a] *= (1.0 + lambda);
            const auto delta = solve<4>(damped, jtr);
            if (!delta) {
                lambda *= 10.0;
                continue;
            }
            const Params trial{p.offset + (*delta)[0], p.amp + (*delta)[1], p.omega + (*delta)[2],
                               p.phase + (*delta)[3]};
            const double ct = cost(tau, values, trial);
            if (ct <= c) {
                relStep = std::abs((*delta)[2]) / std::max(std::abs(p.omega), 1e-300);
                const double relCost = (c - ct) / std::max(c, 1e-300);
                p = trial;
                c = ct;
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
                converged = relStep <= opts.relTol && relCost <= opts.relTol;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) break;
    }

    if (p.amp < 0.0) {
        p.amp = -p.amp;
        p.phase += kPi;
    }
    if (p.omega < 0.0) {
        p.omega = -p.omega;
        p.phase = -p.phase;
    }

    FitResult out;
    out.omega = p.omega / span;
    out.amplitude = p.amp;
    out.offset = p.offset;
    // Back from tau to the caller's clock.
    out.phase = std::remainder(p.phase - out.omega * t0, kTwoPi);
    out.residualRMS = std::sqrt(c / static_cast<double>(n));
    out.iterations = it;

    if (p.omega / kTwoPi < 2.0) throw NoOscillation("fewer than two periods in the window");
    if (out.amplitude < 3.0 * out.residualRMS) {
        throw NoOscillation("fitted amplitude below residual level");
    }
    return out;
}

}  // namespace qgtlab
