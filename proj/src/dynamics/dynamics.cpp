#include "qgtlab/dynamics.hpp"

#include "qgtlab/errors.hpp"
#include "qgtlab/numkit/eigen.hpp"
#include "qgtlab/qgt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qgtlab {

void DriveSpec::validate() const {
    if (!(A > 0.0) || !std::isfinite(A)) throw InvalidArgument("drive amplitude must be positive");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidArgument("drive frequency must be positive");
    if (A / omega > 0.3) throw InvalidArgument("A/omega exceeds the weak-drive bound 0.3");
    if (samples < 64) throw InvalidArgument("at least 64 samples required");
    if (mu.empty()) throw InvalidArgument("drive parameter mu missing");
    if (mode == DriveMode::TwoParam && nu.empty()) throw InvalidArgument("two-parameter drive needs nu");
}

TimeHamiltonian drive_hamiltonian(const ParamHamiltonian& model, const ParamPoint& pt, const DriveSpec& spec) {
    const ComplexMat h0 = model(pt);
    const ComplexMat dmu = partial(model, pt, spec.mu);
    const bool two = spec.mode == DriveMode::TwoParam;
    const ComplexMat dnu = two ? partial(model, pt, spec.nu) : ComplexMat(h0.dim());
    const double k = 2.0 * spec.A / spec.omega;
    return [=, w = spec.omega, pm = spec.phiMu, pn = spec.phiNu](double t) {
        ComplexMat h = h0;
        const double cm = std::cos(w * t + pm);
        if (cm != 0.0) h += dmu * (k * cm);
        if (two) {
            const double cn = std::cos(w * t + pn);
            if (cn != 0.0) h += dnu * (k * cn);
        }
        return h;
    };
}

Trajectory evolve(const TimeHamiltonian& h, const CVec& psi0, double duration, double dt, std::size_t samples) {
    if (!(duration > 0.0) || !std::isfinite(duration)) throw InvalidArgument("duration must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive");
    if (samples == 1) throw InvalidArgument("need at least two samples");
    if (std::abs(norm2(psi0) - 1.0) > 1e-9) throw InvalidArgument("initial state is not normalised");

    std::size_t intervals = 0, substeps = 0;
    if (samples == 0) {
        intervals = static_cast<std::size_t>(std::ceil(duration / dt));
        substeps = 1;
    } else {
        intervals = samples - 1;
        substeps = static_cast<std::size_t>(std::ceil(duration / static_cast<double>(intervals) / dt));
    }
    const double step = duration / static_cast<double>(intervals * substeps);

    Trajectory out;
    out.step = step;
    out.times.reserve(intervals + 1);
    out.states.reserve(intervals + 1);
    out.times.push_back(0.0);
    out.states.push_back(psi0);

    CVec psi = psi0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < intervals; ++i) {
        for (std::size_t s = 0; s < substeps; ++s, ++n) {
            const double tmid = (static_cast<double>(n) + 0.5) * step;
            psi = propagator(h(tmid), step) * std::span<const cplx>(psi);
        }
        const double drift = std::abs(norm2(psi) - 1.0);
        out.maxNormDrift = std::max(out.maxNormDrift, drift);
        if (!(drift <= 1e-6)) throw IntegrationUnstable("norm drift " + std::to_string(drift));
        out.times.push_back(static_cast<double>(n) * step);
        out.states.push_back(psi);
    }
    return out;
}

double max_frequency_scale(const ParamHamiltonian& model, const ParamPoint& pt, const DriveSpec& spec) {
    double scale = inf_norm(model(pt));
    const double k = 2.0 * spec.A / spec.omega;
    scale += k * inf_norm(partial(model, pt, spec.mu));
    if (spec.mode == DriveMode::TwoParam) scale += k * inf_norm(partial(model, pt, spec.nu));
    return (scale + spec.omega) / kTwoPi;
}

namespace {

struct Prepared {
    CVec state;
    CVec partner;
    double energy = 0.0;
    double partnerEnergy = 0.0;
};

Prepared prepare(const ParamHamiltonian& model, const ParamPoint& pt, int blockIndex, std::size_t j,
                 const RabiOptions& opts) {
    if (blockIndex != 1 && blockIndex != 2) throw InvalidArgument("block index must be 1 or 2");
    const ComplexMat h0 = model(pt);
    const BlockPair blocks = ms_blocks(h0, opts.pairing);
    const auto& idx = blockIndex == 1 ? opts.pairing.first : opts.pairing.second;
    const ComplexMat& hb = blockIndex == 1 ? blocks.block1 : blocks.block2;

    const auto spec = eigh(h0);
    if (opts.level >= spec.groups.size()) throw InvalidArgument("level does not exist");
    const auto vecs = spec.group_vectors(opts.level);
    if (j < 1 || j > vecs.size()) throw InvalidArgument("state index out of range for the level");

    Prepared p;
    p.state = vecs[j - 1];
    const double inBlock = std::norm(p.state[idx[0]]) + std::norm(p.state[idx[1]]);
    if (inBlock < 1.0 - 1e-9) {
        throw InvalidArgument("state " + std::to_string(j) + " is not contained in block " +
                              std::to_string(blockIndex));
    }
    const auto& grp = spec.groups[opts.level];
    p.energy = spec.values[grp.front()];

    const auto sb = eigh(hb, 0.0);
    const std::size_t other = std::abs(sb.values[0] - p.energy) < std::abs(sb.values[1] - p.energy) ? 1 : 0;
    p.partnerEnergy = sb.values[other];
    p.partner.assign(h0.dim(), 0.0);
    p.partner[idx[0]] = sb.vectors(0, other);
    p.partner[idx[1]] = sb.vectors(1, other);
    return p;
}

}  // namespace

int phase_orientation(const ParamHamiltonian& model, const ParamPoint& pt, int blockIndex, std::size_t j,
                      const RabiOptions& opts) {
    const auto p = prepare(model, pt, blockIndex, j, opts);
    return p.partnerEnergy < p.energy ? -1 : 1;
}

double expected_rate(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& mu, const std::string& nu,
                     double dphi, std::size_t j, std::size_t level) {
    QGTOptions o;
    o.level = level;
    const auto mm = qgt_sum_over_states(model, pt, mu, mu, o);
    if (j < 1 || j > mm.n) throw InvalidArgument("state index out of range for the level");
    const std::size_t i = j - 1;
    if (nu.empty()) return std::real(mm.Q(i, i));
    const auto nn = qgt_sum_over_states(model, pt, nu, nu, o);
    const auto mn = qgt_sum_over_states(model, pt, mu, nu, o);
    return std::real(mm.Q(i, i)) + std::real(nn.Q(i, i)) + 2.0 * std::real(std::polar(1.0, -dphi) * mn.Q(i, i));
}

RabiTrace rabi_experiment(const ParamHamiltonian& model, const ParamPoint& pt, const DriveSpec& spec, int blockIndex,
                          std::size_t j, const RabiOptions& opts) {
    const auto prep = prepare(model, pt, blockIndex, j, opts);
    const double gap = std::abs(prep.energy - prep.partnerEnergy);

    DriveSpec drive = spec;
    drive.omega = gap - 2.0 * spec.Delta;
    drive.validate();

    if (!(drive.duration > 0.0)) {
        const int s = prep.partnerEnergy < prep.energy ? -1 : 1;
        const bool two = drive.mode == DriveMode::TwoParam;
        const double S = expected_rate(model, pt, drive.mu, two ? drive.nu : std::string{},
                                       s * (drive.phiNu - drive.phiMu), j, opts.level);
        const double c = drive.A * std::sqrt(std::max(S, 0.01)) * gap / drive.omega;
        const double rate = std::sqrt(c * c + drive.Delta * drive.Delta);
        drive.duration = 6.0 * kPi / rate;
    }

    const double dt = std::min(opts.stepFraction / max_frequency_scale(model, pt, drive), drive.duration / 1000.0);
    const auto traj = evolve(drive_hamiltonian(model, pt, drive), prep.state, drive.duration, dt, drive.samples);

    RabiTrace tr;
    tr.times = traj.times;
    tr.blockIndex = blockIndex;
    tr.stateIndex = j;
    tr.driveOmega = drive.omega;
    tr.dt = traj.step;
    tr.maxNormDrift = traj.maxNormDrift;
    tr.popGround.reserve(traj.states.size());
    tr.popExcited.reserve(traj.states.size());
    for (const auto& psi : traj.states) {
        const double pg = std::norm(dot(prep.state, psi));
        const double pe = std::norm(dot(prep.partner, psi));
        if (1.0 - (pg + pe) > opts.leakageTol) {
            throw BlockLeakage("population left the block: " + std::to_string(1.0 - pg - pe));
        }
        tr.popGround.push_back(pg);
        tr.popExcited.push_back(pe);
    }

    if (opts.noiseSigma > 0.0) {
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> noise(0.0, opts.noiseSigma);
        for (std::size_t i = 0; i < tr.times.size(); ++i) {
            tr.popGround[i] += noise(rng);
            tr.popExcited[i] += noise(rng);
        }
    }
    return tr;
}

RabiFit fit_rabi(const RabiTrace& trace) {
    RabiFit r;
    r.fit = fit_oscillation(trace.times, trace.popExcited);
    r.rabiOmega = 0.5 * r.fit.omega;
    return r;
}

double invert_rabi(double omegaFit, double A, double Delta) {
    if (!(A > 0.0) || !std::isfinite(A)) throw InvalidArgument("drive amplitude must be positive");
    if (!std::isfinite(omegaFit) || !std::isfinite(Delta)) throw InvalidArgument("non-finite rate or detuning");
    const double q = (omegaFit * omegaFit - Delta * Delta) / (A * A);
    if (q < -1e-3) throw InconsistentFit("fitted rate below the detuning");
    return std::max(q, 0.0);
}

CrossTerms extract_cross_terms(double S0, double Shalfpi, double Qmumu, double Qnunu) {
    CrossTerms c;
    c.ReQ = 0.5 * (S0 - Qmumu - Qnunu);
    c.ImQ = 0.5 * (Shalfpi - Qmumu - Qnunu);
    c.g = c.ReQ;
    c.F = -2.0 * c.ImQ;
    return c;
}

DrivenQGT measure_qgt(const ParamHamiltonian& model, const ParamPoint& pt, const std::string& mu,
                      const std::string& nu, double A, double Delta, int blockIndex, std::size_t j,
                      const RabiOptions& opts) {
    const int s = phase_orientation(model, pt, blockIndex, j, opts);
    DrivenQGT out;
    out.j = j;
    out.block = blockIndex;

    // Returns the fitted rabiOmega; a flat trace at zero detuning is a zero rate.
    auto run = [&](DriveMode mode, const std::string& a, const std::string& b, double dphi, std::uint64_t salt) {
        DriveSpec d;
        d.mode = mode;
        d.mu = a;
        d.nu = b;
        d.A = A;
        d.omega = 1.0;
        d.Delta = Delta;
        d.phiMu = 0.0;
        d.phiNu = s * dphi;
        RabiOptions o = opts;
        o.seed = opts.seed + salt;
        out.traces.push_back(rabi_experiment(model, pt, d, blockIndex, j, o));
        double rate = std::numeric_limits<double>::quiet_NaN();
        double amp = 0.0;
        try {
            const auto f = fit_rabi(out.traces.back());
            // Counter-rotating ripple alone never reaches this amplitude.
            if (f.fit.amplitude >= 0.02) {
                rate = f.rabiOmega;
                amp = f.fit.amplitude;
            }
        } catch (const NoOscillation&) {
        }
        out.rates.push_back(rate);
        out.amplitudes.push_back(amp);
        if (std::isnan(rate)) {
            if (Delta != 0.0) throw NoOscillation("detuned trace shows no oscillation");
            return 0.0;
        }
        return rate;
    };

    out.Qmumu = invert_rabi(run(DriveMode::OneParam, mu, "", 0.0, 1), A, Delta);
    out.Qnunu = invert_rabi(run(DriveMode::OneParam, nu, "", 0.0, 2), A, Delta);
    out.S0 = invert_rabi(run(DriveMode::TwoParam, mu, nu, 0.0, 3), A, Delta);
    const double sp = invert_rabi(run(DriveMode::TwoParam, mu, nu, 0.5 * kPi, 4), A, Delta);
    const double sm = invert_rabi(run(DriveMode::TwoParam, mu, nu, -0.5 * kPi, 5), A, Delta);
    // S(+pi/2) + S(-pi/2) = 2 (Qmm + Qnn). The brighter trace (larger fitted
    // amplitude) is the well-conditioned one; the other is nearly dark and
    // distorted by counter-rotating shifts.
    out.Shalfpi = out.amplitudes[3] >= out.amplitudes[4] ? sp : 2.0 * (out.Qmumu + out.Qnunu) - sm;
    out.cross = extract_cross_terms(out.S0, out.Shalfpi, out.Qmumu, out.Qnunu);
    return out;
}

}  // namespace qgtlab
