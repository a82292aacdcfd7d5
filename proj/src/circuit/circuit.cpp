#include "qgtlab/circuit.hpp"

#include "qgtlab/dynamics.hpp"
#include "qgtlab/errors.hpp"
#include "qgtlab/numkit/eigen.hpp"
#include "qgtlab/numkit/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace qgtlab {

namespace {

constexpr std::array<std::pair<int, int>, 4> kRing{{{1, 2}, {2, 3}, {3, 4}, {4, 1}}};

// Single-excitation basis position of qubit q: |0001> is qubit 4 at position 0.
std::size_t se_position(int qubit) { return static_cast<std::size_t>(4 - qubit); }
int se_qubit(std::size_t pos) { return 4 - static_cast<int>(pos); }

std::string pair_key(int k, int l) { return std::to_string(k) + std::to_string(l); }

std::pair<int, int> parse_pair(const std::string& pair) {
    for (const auto& [k, l] : kRing) {
        if (pair == pair_key(k, l) || pair == pair_key(l, k)) return {k, l};
    }
    throw InvalidArgument("unknown qubit pair '" + pair + "'");
}

std::array<int, 4> decode(std::size_t idx, int levels) {
    std::array<int, 4> n{};
    const auto L = static_cast<std::size_t>(levels);
    for (int q = 3; q >= 0; --q) {
        n[static_cast<std::size_t>(q)] = static_cast<int>(idx % L);
        idx /= L;
    }
    return n;
}

double max_offset(const ModulationSpec& ms) {
    double s = 0.0;
    for (const auto& q : ms.qubits)
        for (const auto& t : q.tones) s += std::abs(t.amp);
    return s;
}

double max_scale(const CircuitSpec& cs, const ModulationSpec& ms) {
    double spread = 0.0, j = 0.0;
    for (int k = 1; k <= 4; ++k)
        for (int l = 1; l <= 4; ++l)
            spread = std::max(spread, std::abs(ms.mean_frequency(cs, k) - ms.mean_frequency(cs, l)));
    for (const auto& [key, v] : cs.J) j = std::max(j, std::abs(v));
    return (spread + max_offset(ms) + 2.0 * j) / kTwoPi;
}

}  // namespace

void CircuitSpec::validate() const {
    if (levels != 2 && levels != 3) throw InvalidArgument("levels must be 2 or 3");
    for (std::size_t k = 0; k < 4; ++k) {
        if (!std::isfinite(omegaQ[k]) || !std::isfinite(alpha[k])) throw InvalidArgument("non-finite qubit parameter");
    }
    for (const auto& [key, v] : J) {
        bool known = false;
        for (const auto& [k, l] : kRing) known = known || key == pair_key(k, l);
        if (!known) throw InvalidArgument("unknown coupling key '" + key + "'");
        if (!std::isfinite(v)) throw InvalidArgument("non-finite coupling");
    }
}

double CircuitSpec::coupling(int k, int l) const {
    for (const auto& key : {pair_key(k, l), pair_key(l, k)}) {
        const auto it = J.find(key);
        if (it != J.end()) return it->second;
    }
    return 0.0;
}

CircuitSpec default_circuit() {
    CircuitSpec cs;
    cs.omegaQ = {mhz_to_angular(4800.0), mhz_to_angular(4900.0), mhz_to_angular(5000.0), mhz_to_angular(5100.0)};
    cs.alpha.fill(mhz_to_angular(-250.0));
    for (const auto& [k, l] : kRing) cs.J[pair_key(k, l)] = mhz_to_angular(5.0);
    cs.levels = 2;
    return cs;
}

void ModulationSpec::validate() const {
    std::set<int> seen;
    for (const auto& q : qubits) {
        if (q.qubit < 1 || q.qubit > 4) throw InvalidArgument("modulated qubit index must be 1..4");
        if (!seen.insert(q.qubit).second) throw InvalidArgument("qubit modulated twice");
        if (q.tones.size() > 2) throw InvalidArgument("at most two tones per qubit");
        if (!std::isfinite(q.meanFreq)) throw InvalidArgument("non-finite mean frequency");
        for (const auto& t : q.tones) {
            if (!std::isfinite(t.amp) || !std::isfinite(t.freq) || !std::isfinite(t.phase)) {
                throw InvalidArgument("non-finite tone parameter");
            }
        }
    }
}

const QubitModulation* ModulationSpec::find(int qubit) const {
    for (const auto& q : qubits)
        if (q.qubit == qubit) return &q;
    return nullptr;
}

double ModulationSpec::mean_frequency(const CircuitSpec& cs, int qubit) const {
    const auto* q = find(qubit);
    return q ? q->meanFreq : cs.omegaQ[static_cast<std::size_t>(qubit - 1)];
}

double ModulationSpec::frequency(const CircuitSpec& cs, int qubit, double t) const {
    const auto* q = find(qubit);
    if (!q) return cs.omegaQ[static_cast<std::size_t>(qubit - 1)];
    double w = q->meanFreq;
    for (const auto& tone : q->tones) w += tone.amp * std::cos(tone.freq * t + tone.phase);
    return w;
}

std::size_t fock_index(const std::array<int, 4>& n, int levels) {
    std::size_t idx = 0;
    for (int v : n) {
        if (v < 0 || v >= levels) throw InvalidArgument("occupation outside the truncation");
        idx = idx * static_cast<std::size_t>(levels) + static_cast<std::size_t>(v);
    }
    return idx;
}

ComplexMat circuit_hamiltonian(const CircuitSpec& cs, const ModulationSpec& ms, double t) {
    cs.validate();
    ms.validate();
    const int L = cs.levels;
    const std::size_t dim = static_cast<std::size_t>(L * L * L * L);
    ComplexMat h(dim);

    std::array<double, 4> w{};
    for (int q = 1; q <= 4; ++q) w[static_cast<std::size_t>(q - 1)] = ms.frequency(cs, q, t);

    for (std::size_t i = 0; i < dim; ++i) {
        const auto n = decode(i, L);
        double e = 0.0;
        for (std::size_t q = 0; q < 4; ++q) e += w[q] * n[q] + 0.5 * cs.alpha[q] * n[q] * (n[q] - 1);
        h(i, i) += e;

        // J (a_k + a_k^dag)(a_l + a_l^dag) acting on |n>.
        for (const auto& [k, l] : kRing) {
            const double J = cs.coupling(k, l);
            if (J == 0.0) continue;
            const auto qk = static_cast<std::size_t>(k - 1), ql = static_cast<std::size_t>(l - 1);
            for (int dk : {-1, 1}) {
                for (int dl : {-1, 1}) {
                    auto m = n;
                    m[qk] += dk;
                    m[ql] += dl;
                    if (m[qk] < 0 || m[qk] >= L || m[ql] < 0 || m[ql] >= L) continue;
                    const double ak = std::sqrt(static_cast<double>(dk > 0 ? n[qk] + 1 : n[qk]));
                    const double al = std::sqrt(static_cast<double>(dl > 0 ? n[ql] + 1 : n[ql]));
                    h(fock_index(m, L), i) += J * ak * al;
                }
            }
        }
    }
    return h;
}

ComplexMat single_excitation_block(const ComplexMat& h, const CircuitSpec& cs) {
    const int L = cs.levels;
    const std::size_t expected = static_cast<std::size_t>(L * L * L * L);
    if (h.dim() != expected) throw InvalidArgument("Hamiltonian dimension does not match the truncation");
    std::array<std::size_t, 4> idx{};
    for (std::size_t p = 0; p < 4; ++p) {
        std::array<int, 4> n{};
        n[static_cast<std::size_t>(se_qubit(p) - 1)] = 1;
        idx[p] = fock_index(n, L);
    }
    ComplexMat b(4);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) b(r, c) = h(idx[r], idx[c]);
    return b;
}

ComplexMat rotating_frame_hamiltonian(const CircuitSpec& cs, const ModulationSpec& ms, double t) {
    ComplexMat h(4);
    std::array<double, 4> mean{};
    for (std::size_t p = 0; p < 4; ++p) {
        const int q = se_qubit(p);
        mean[p] = ms.mean_frequency(cs, q);
        h(p, p) = ms.frequency(cs, q, t) - mean[p];
    }
    for (const auto& [k, l] : kRing) {
        const double J = cs.coupling(k, l);
        if (J == 0.0) continue;
        const std::size_t pk = se_position(k), pl = se_position(l);
        const cplx v = J * std::polar(1.0, (mean[pk] - mean[pl]) * t);
        h(pk, pl) = v;
        h(pl, pk) = std::conj(v);
    }
    return h;
}

double effective_coupling(double J, double ampOverFreq) {
    if (!(ampOverFreq >= 0.0)) throw InvalidArgument("ampOverFreq must be non-negative");
    return std::abs(J * bessel_j1(ampOverFreq));
}

CalibrationResult calibrate_effective(const CircuitSpec& cs, const ModulationSpec& ms, const std::string& pair,
                                      double duration, const CalibrationOptions& opts) {
    cs.validate();
    ms.validate();
    const auto [k, l] = parse_pair(pair);
    const auto* mk = ms.find(k);
    const auto* ml = ms.find(l);
    const bool kMod = mk && !mk->tones.empty();
    const bool lMod = ml && !ml->tones.empty();
    if (kMod == lMod) throw InvalidArgument("exactly one qubit of the pair must carry the tone");
    const QubitModulation& mod = kMod ? *mk : *ml;
    if (mod.tones.size() != 1) throw InvalidArgument("calibration expects a single tone");
    const int partner = kMod ? l : k;

    const double J = cs.coupling(k, l);
    const Tone tone = mod.tones.front();
    const double x = tone.freq != 0.0 ? std::abs(tone.amp / tone.freq) : 0.0;
    const double predicted = effective_coupling(J, x);
    if (!(duration > 0.0)) {
        const double floor = std::max({predicted, 0.05 * std::abs(J), mhz_to_angular(0.05)});
        duration = 6.0 * kPi / floor;
    }

    CVec psi0(4, 0.0);
    psi0[se_position(mod.qubit)] = 1.0;
    const std::size_t target = se_position(partner);

    auto run = [&](double freq) {
        ModulationSpec m = ms;
        for (auto& q : m.qubits)
            if (q.qubit == mod.qubit) q.tones.front().freq = freq;
        const double dt = std::min(opts.stepFraction / max_scale(cs, m), duration / 1000.0);
        const auto traj = evolve([&](double t) { return rotating_frame_hamiltonian(cs, m, t); }, psi0, duration, dt,
                                 opts.samples);
        std::vector<double> pop(traj.states.size());
        for (std::size_t i = 0; i < pop.size(); ++i) pop[i] = std::norm(traj.states[i][target]);
        return fit_oscillation(traj.times, pop);
    };
    auto rate = [&](double freq) {
        try {
            return run(freq).omega;
        } catch (const NoOscillation&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    double best = tone.freq;
    if (opts.resonanceSearch && predicted > 0.0) {
        // Golden-section search for the slowest exchange (the chevron centre).
        const double half = std::max(0.5 * std::abs(J), 4.0 * predicted);
        const double tol = 0.05 * predicted;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        double a = tone.freq - half, b = tone.freq + half;
        double c = b - g * (b - a), d = a + g * (b - a);
        double fc = rate(c), fd = rate(d);
        while (b - a > tol) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = rate(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = rate(d);
            }
        }
        best = 0.5 * (a + b);
    }

    CalibrationResult r;
    r.toneFreq = best;
    r.fit = run(best);
    if (r.fit.amplitude < opts.minAmplitude) {
        throw NoOscillation("no exchange between qubits " + std::to_string(k) + " and " + std::to_string(l));
    }
    r.measured = 0.5 * r.fit.omega;
    return r;
}

BesselPoint bessel_operating_point(const std::string& pair, double ampOverFreq, double phase) {
    const auto [k, l] = parse_pair(pair);
    BesselPoint p;
    p.cs = default_circuit();
    for (auto& [key, v] : p.cs.J)
        if (key != pair_key(k, l)) v = 0.0;
    const auto ik = static_cast<std::size_t>(k - 1), il = static_cast<std::size_t>(l - 1);
    const int lower = p.cs.omegaQ[ik] < p.cs.omegaQ[il] ? k : l;
    const double freq = std::abs(p.cs.omegaQ[ik] - p.cs.omegaQ[il]);
    QubitModulation m;
    m.qubit = lower;
    m.meanFreq = p.cs.omegaQ[static_cast<std::size_t>(lower - 1)];
    m.tones.push_back({ampOverFreq * freq, freq, phase});
    p.ms.qubits.push_back(m);
    return p;
}

CircuitSpec diamond_circuit() {
    CircuitSpec cs = default_circuit();
    cs.J["23"] = 0.0;
    cs.J["41"] = 0.0;
    return cs;
}

ModulationSpec diamond_modulation(const CircuitSpec& cs, double ampOverFreq, double Delta, double phi) {
    ModulationSpec ms;
    auto add = [&](int mod, int partner, double beta) {
        const double freq = (cs.omegaQ[static_cast<std::size_t>(partner - 1)] -
                             cs.omegaQ[static_cast<std::size_t>(mod - 1)]) -
                            2.0 * Delta;
        if (!(freq > 0.0)) throw InvalidArgument("partner must sit above the modulated qubit by more than 2 Delta");
        QubitModulation m;
        m.qubit = mod;
        m.meanFreq = cs.omegaQ[static_cast<std::size_t>(mod - 1)];
        m.tones.push_back({ampOverFreq * freq, freq, beta});
        ms.qubits.push_back(m);
    };
    add(1, 2, kPi - phi);
    add(3, 4, phi);
    return ms;
}

DiamondCircuitTarget diamond_target(const CircuitSpec& cs, double ampOverFreq, double Delta) {
    DiamondCircuitTarget t;
    t.Omega = effective_coupling(cs.coupling(3, 4), ampOverFreq);
    t.Omega0 = std::hypot(t.Omega, Delta);
    t.theta = std::atan2(t.Omega, Delta);
    return t;
}

ComplexMat unitary_generator(const ComplexMat& u, double T) {
    if (!(T > 0.0)) throw InvalidArgument("period must be positive");
    const std::size_t n = u.dim();
    const ComplexMat ud = u.adjoint();
    const ComplexMat c = 0.5 * (u + ud);
    const ComplexMat s = cplx(0.0, -0.5) * (u - ud);
    const auto sc = eigh(c, 1e-6);

    ComplexMat h(n);
    for (std::size_t g = 0; g < sc.groups.size(); ++g) {
        const auto vg = sc.group_vectors(g);
        const std::size_t m = vg.size();
        ComplexMat sub(m);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) sub(a, b) = dot(vg[a], s * std::span<const cplx>(vg[b]));
        const auto ss = eigh(hermitian_part(sub), 0.0);
        for (std::size_t col = 0; col < m; ++col) {
            CVec v(n, 0.0);
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t i = 0; i < n; ++i) v[i] += vg[a][i] * ss.vectors(a, col);
            const cplx lambda = dot(v, u * std::span<const cplx>(v));
            const double e = -std::arg(lambda) / T;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) h(i, j) += e * v[i] * std::conj(v[j]);
        }
    }
    return hermitian_part(h);
}

EffectiveGenerator diamond_effective_generator(const CircuitSpec& cs, const ModulationSpec& ms, double Delta,
                                               std::size_t cycles, double stepFraction,
                                               std::size_t startPhases) {
    if (startPhases == 0) throw InvalidArgument("need at least one start phase");
    cs.validate();
    ms.validate();
    const auto* m1 = ms.find(1);
    const auto* m3 = ms.find(3);
    if (!m1 || !m3 || m1->tones.size() != 1 || m3->tones.size() != 1) {
        throw InvalidArgument("diamond scheme needs one tone on qubit 1 and one on qubit 3");
    }
    const double wt = m3->tones.front().freq;
    if (std::abs(m1->tones.front().freq - wt) > 1e-9 * wt) throw InvalidArgument("the two tones must share a frequency");
    const double period = kTwoPi / wt;

    if (cycles == 0) {
        const double x = std::abs(m3->tones.front().amp / wt);
        const double omega0 = std::hypot(effective_coupling(cs.coupling(3, 4), x), Delta);
        cycles = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(0.75 * kPi / (omega0 * period))));
    }
    const double T = period * static_cast<double>(cycles);

    const std::size_t steps = static_cast<std::size_t>(std::ceil(T / (stepFraction / max_scale(cs, ms))));
    const double dt = T / static_cast<double>(steps);

    // The stroboscopic generator depends on the start time through the
    // micromotion kick; averaging over start times within one tone period
    // cancels it to first order.
    ComplexMat h(4);
    for (std::size_t k = 0; k < startPhases; ++k) {
        const double t0 = period * static_cast<double>(k) / static_cast<double>(startPhases);
        ComplexMat u = ComplexMat::identity(4);
        for (std::size_t i = 0; i < steps; ++i) {
            u = propagator(rotating_frame_hamiltonian(cs, ms, t0 + (static_cast<double>(i) + 0.5) * dt), dt) * u;
        }
        // Modulation frame (periodic, equal at t0 and t0 + T) and detuning frame.
        std::vector<cplx> f(4, 1.0), r0(4), r1(4);
        for (std::size_t p = 0; p < 4; ++p) {
            if (const auto* q = ms.find(se_qubit(p))) {
                double phase = 0.0;
                for (const auto& tone : q->tones) phase += tone.amp / tone.freq * std::sin(tone.freq * t0 + tone.phase);
                f[p] = std::polar(1.0, -phase);
            }
            const double eps = (p % 2 == 0) ? Delta : -Delta;
            r0[p] = std::polar(1.0, eps * t0);
            r1[p] = std::polar(1.0, eps * (t0 + T));
        }
        const ComplexMat F = ComplexMat::diagonal(std::span<const cplx>(f));
        const ComplexMat R0 = ComplexMat::diagonal(std::span<const cplx>(r0));
        const ComplexMat R1 = ComplexMat::diagonal(std::span<const cplx>(r1));
        h += unitary_generator(R1.adjoint() * F.adjoint() * u * F * R0, T);
    }
    h *= 1.0 / static_cast<double>(startPhases);

    EffectiveGenerator out;
    out.H = h;
    out.T = T;
    out.cycles = cycles;
    return out;
}

}  // namespace qgtlab
