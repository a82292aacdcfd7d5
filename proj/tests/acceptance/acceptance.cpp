// Acceptance suite: one PASS/FAIL line per criterion, followed by indented
// detail lines. Exit status is non-zero when any criterion fails.

#include "qgtlab/circuit.hpp"
#include "qgtlab/cli/commands.hpp"
#include "qgtlab/cli/config.hpp"
#include "qgtlab/dynamics.hpp"
#include "qgtlab/errors.hpp"
#include "qgtlab/models.hpp"
#include "qgtlab/numkit/eigen.hpp"
#include "qgtlab/qgt.hpp"
#include "qgtlab/topology.hpp"
#include "test_util.hpp"

#include <fmt/format.h>

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace qgtlab;
using namespace qgtlab::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::vector<std::string> details;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Bound within max(rel * |ref|, floor).
bool within(double value, double ref, double rel, double floor) {
    return std::abs(value - ref) <= std::max(rel * std::abs(ref), floor);
}

QGTOptions level_opts(std::size_t level) {
    QGTOptions o;
    o.level = level;
    return o;
}

// ---------------------------------------------------------------------------
// Shared driven data: theta_i = i pi / 10, i = 0..10, phi = 0, both blocks.

struct DrivenPoint {
    double theta = 0.0;
    std::array<DrivenQGT, 2> blocks;
};

constexpr double kDrivenOmega0Mhz = 6.5;  // omega = 2 Omega0 = 13 MHz
constexpr double kDrivenAMhz = 3.0;
constexpr std::size_t kDrivenNodes = 11;

std::vector<DrivenPoint> driven_data() {
    static std::vector<DrivenPoint> data = [] {
        const auto dm = diamond_model(mhz_to_angular(kDrivenOmega0Mhz));
        RabiOptions o;
        o.level = kDiamondPreparedLevel;
        std::vector<DrivenPoint> out;
        for (std::size_t i = 0; i < kDrivenNodes; ++i) {
            DrivenPoint p;
            p.theta = kPi * static_cast<double>(i) / static_cast<double>(kDrivenNodes - 1);
            const ParamPoint pt{{"theta", p.theta}, {"phi", 0.0}};
            for (int b : {1, 2})
                p.blocks[static_cast<std::size_t>(b - 1)] =
                    measure_qgt(dm, pt, "theta", "phi", mhz_to_angular(kDrivenAMhz), 0.0, b,
                                static_cast<std::size_t>(b), o);
            out.push_back(std::move(p));
        }
        return out;
    }();
    return data;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    const auto t0 = Clock::now();
    const auto dm = diamond_model(1.0);
    double worst = 0.0;
    for (int k = 1; k <= 9; ++k) {
        const double th = 0.1 * k * kPi, s = std::sin(th);
        for (double phi : {0.0, 1.3}) {
            const ParamPoint pt{{"theta", th}, {"phi", phi}};
            const auto o = level_opts(kDiamondPreparedLevel);
            const ComplexMat tt = qgt_sum_over_states(dm, pt, "theta", "theta", o).Q;
            const ComplexMat pp = qgt_sum_over_states(dm, pt, "phi", "phi", o).Q;
            const ComplexMat tp = qgt_sum_over_states(dm, pt, "theta", "phi", o).Q;
            const ComplexMat I = ComplexMat::identity(2);
            const std::vector<cplx> d{cplx(0, 0.25 * s), cplx(0, -0.25 * s)};
            worst = std::max({worst, max_norm(tt - 0.25 * I), max_norm(pp - (0.25 * s * s) * I),
                              max_norm(tp - ComplexMat::diagonal(std::span<const cplx>(d)))});
        }
    }
    const double t = seconds_since(t0);
    return {worst <= 1e-8 && t < 1.0, {fmt::format("max-norm error {:.2e} (bound 1e-8), runtime {:.3f} s (bound 1 s)", worst, t)}};
}

Outcome criterion2() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> th(0.05 * kPi, 0.95 * kPi), ang(-kPi, kPi);
    struct Case {
        std::string name;
        ParamHamiltonian model;
        std::vector<std::size_t> levels;
        bool sphere;
    };
    BHZParams b0, b1;
    b1.Bg = 0.1;
    const std::vector<Case> cases{{"diamond", diamond_model(1.0), {0, 1}, true},
                                  {"bhz Bg=0", bhz_model(b0), {0}, false},
                                  {"bhz Bg=0.1", bhz_model(b1), {0}, false}};
    Outcome out;
    out.pass = true;
    for (const auto& c : cases) {
        double worst = 0.0;
        for (int n = 0; n < 50; ++n) {
            const ParamPoint pt = c.sphere ? ParamPoint{{"theta", th(rng)}, {"phi", ang(rng)}}
                                           : ParamPoint{{"kx", ang(rng)}, {"ky", ang(rng)}};
            const auto& names = c.model.param_names();
            for (std::size_t lv : c.levels) {
                const auto o = level_opts(lv);
                for (const auto& [mu, nu] : std::vector<std::pair<std::string, std::string>>{
                         {names[0], names[0]}, {names[1], names[1]}, {names[0], names[1]}}) {
                    const auto a = qgt_sum_over_states(c.model, pt, mu, nu, o);
                    const auto f = qgt_finite_difference(c.model, pt, mu, nu, o);
                    worst = std::max(worst, max_norm(a.Q - f.Q));
                }
            }
        }
        out.pass = out.pass && worst <= 1e-6;
        out.details.push_back(fmt::format("{}: max |Q_fd - Q_sos| = {:.2e} over 50 points (bound 1e-6)", c.name, worst));
    }
    const double t = seconds_since(t0);
    out.pass = out.pass && t < 10.0;
    out.details.push_back(fmt::format("runtime {:.2f} s (bound 10 s)", t));
    return out;
}

Outcome criterion3() {
    const auto t0 = Clock::now();
    const auto& data = driven_data();
    const auto dm = diamond_model(mhz_to_angular(kDrivenOmega0Mhz));
    Outcome out;
    out.pass = true;
    std::array<double, 4> worst{};
    const std::array<const char*, 4> names{"g_tt", "g_pp", "g_tp", "F_tp"};
    for (const auto& p : data) {
        if (p.theta < 0.1 * kPi - 1e-9 || p.theta > 0.9 * kPi + 1e-9) continue;
        const ParamPoint pt{{"theta", p.theta}, {"phi", 0.0}};
        const auto o = level_opts(kDiamondPreparedLevel);
        const auto tt = qgt_sum_over_states(dm, pt, "theta", "theta", o);
        const auto pp = qgt_sum_over_states(dm, pt, "phi", "phi", o);
        const auto tp = qgt_sum_over_states(dm, pt, "theta", "phi", o);
        for (std::size_t b = 0; b < 2; ++b) {
            const auto& r = p.blocks[b];
            const std::array<double, 4> ext{r.Qmumu, r.Qnunu, r.cross.g, r.cross.F};
            const std::array<double, 4> ana{tt.g(b, b).real(), pp.g(b, b).real(), tp.g(b, b).real(),
                                            tp.F(b, b).real()};
            for (std::size_t k = 0; k < 4; ++k) {
                const double e = std::abs(ext[k] - ana[k]) / std::max(std::abs(ana[k]), 0.2);
                worst[k] = std::max(worst[k], e);
                if (!within(ext[k], ana[k], 0.05, 0.01)) out.pass = false;
            }
        }
    }
    for (std::size_t k = 0; k < 4; ++k)
        out.details.push_back(fmt::format("{}: max error / max(|analytic|, 0.2) = {:.4f} (bound 0.05)",
                                          names[k], worst[k]));
    out.details.push_back(fmt::format("A/omega = 3/13, theta = 0.1pi..0.9pi, both blocks; runtime {:.1f} s (bound 300 s)",
                                      seconds_since(t0)));
    out.pass = out.pass && seconds_since(t0) < 300.0;
    return out;
}

Outcome criterion4() {
    const auto t0 = Clock::now();
    const auto dm = diamond_model(mhz_to_angular(50.0));
    const ParamPoint pt{{"theta", 0.5 * kPi}, {"phi", 0.0}};
    RabiOptions o;
    o.level = kDiamondPreparedLevel;
    const double Q = qgt_sum_over_states(dm, pt, "theta", "theta", level_opts(kDiamondPreparedLevel)).Q(0, 0).real();
    auto rate = [&](double aMhz, double dMhz, int block) {
        DriveSpec d;
        d.mu = "theta";
        d.A = mhz_to_angular(aMhz);
        d.omega = 1.0;
        d.Delta = mhz_to_angular(dMhz);
        return angular_to_mhz(fit_rabi(rabi_experiment(dm, pt, d, block, static_cast<std::size_t>(block), o)).rabiOmega);
    };
    Outcome out;
    out.pass = true;
    for (int block : {1, 2}) {
        // Least-squares slope through the origin.
        double sxy = 0.0, sxx = 0.0, worstLin = 0.0;
        std::vector<std::pair<double, double>> pts;
        for (double a : {1.0, 2.0, 3.0, 4.0}) pts.emplace_back(a, rate(a, 0.0, block));
        for (const auto& [a, w] : pts) sxy += a * w, sxx += a * a;
        const double slope = sxy / sxx;
        for (const auto& [a, w] : pts) worstLin = std::max(worstLin, std::abs(w - slope * a) / (slope * a));
        const double slopeErr = std::abs(slope - std::sqrt(Q)) / std::sqrt(Q);
        double worstHyp = 0.0;
        for (double dl : {-5.0, -2.5, -1.0, 0.0, 1.0, 2.5, 5.0}) {
            const double expected = std::sqrt(9.0 * Q + dl * dl);
            worstHyp = std::max(worstHyp, std::abs(rate(3.0, dl, block) - expected) / expected);
        }
        out.pass = out.pass && slopeErr <= 0.03 && worstLin <= 0.03 && worstHyp <= 0.03;
        out.details.push_back(fmt::format(
            "block {}: slope {:.4f} vs sqrt(Q) = {:.4f} (err {:.2e}), linearity {:.2e}, hyperbola max err {:.2e} (bounds 3%)",
            block, slope, std::sqrt(Q), slopeErr, worstLin, worstHyp));
    }
    out.details.push_back(fmt::format("Omega0/2pi = 50 MHz, theta = pi/2, mu = theta; runtime {:.1f} s", seconds_since(t0)));
    return out;
}

Outcome criterion5() {
    const auto t0 = Clock::now();
    const auto& data = driven_data();
    std::vector<double> fp, fm;
    for (const auto& p : data) {
        fp.push_back(kSphereOrientation * p.blocks[0].cross.F);
        fm.push_back(kSphereOrientation * p.blocks[1].cross.F);
    }
    const double dp = chern_integral(tabulated_sampler(fp), kDrivenNodes, 4, 1).value;
    const double dm = chern_integral(tabulated_sampler(fm), kDrivenNodes, 4, 2).value;
    const double ap = chern_integral(diamond_curvature(1), 101, 4, 1).value;
    const double am = chern_integral(diamond_curvature(2), 101, 4, 2).value;
    const auto sd = spin_chern(dp, dm), sa = spin_chern(ap, am);
    const bool pass = std::abs(dp - 1.0) <= 0.05 && std::abs(dm + 1.0) <= 0.05 && std::abs(sd.scn - 1.0) <= 0.05 &&
                      std::abs(sd.z2sum) <= 0.05 && std::abs(ap - 1.0) <= 1e-3 && std::abs(am + 1.0) <= 1e-3 &&
                      std::abs(sa.scn - 1.0) <= 1e-3 && std::abs(sa.z2sum) <= 1e-3;
    return {pass,
            {fmt::format("driven (nTheta = 11): C+ = {:.4f}, C- = {:.4f}, spin Chern = {:.4f}, C+ + C- = {:.2e} (bounds 0.05)",
                         dp, dm, sd.scn, sd.z2sum),
             fmt::format("analytic (nTheta = 101): C+ = {:.6f}, C- = {:.6f}, spin Chern = {:.6f} (bound 1e-3)", ap, am,
                         sa.scn),
             fmt::format("runtime {:.2f} s (driven data shared with criterion 3)", seconds_since(t0))}};
}

Outcome criterion6() {
    const auto& data = driven_data();
    const auto dm = diamond_model(1.0);
    std::vector<GeometrySample> analytic, driven;
    for (const auto& p : data) {
        const ParamPoint pt{{"theta", p.theta}, {"phi", 0.0}};
        const auto o = level_opts(kDiamondPreparedLevel);
        const auto tt = qgt_sum_over_states(dm, pt, "theta", "theta", o);
        const auto pp = qgt_sum_over_states(dm, pt, "phi", "phi", o);
        const auto tp = qgt_sum_over_states(dm, pt, "theta", "phi", o);
        for (std::size_t b = 0; b < 2; ++b) {
            analytic.push_back({tt.g(b, b).real(), pp.g(b, b).real(), tp.g(b, b).real(), tp.F(b, b).real()});
            const auto& r = p.blocks[b];
            driven.push_back({r.Qmumu, r.Qnunu, r.cross.g, r.cross.F});
        }
    }
    Outcome out;
    try {
        const double ra = detg_curvature_residual(analytic);
        const double rd = detg_curvature_residual(driven);
        out.pass = ra <= 1e-10 && rd <= 0.05;
        out.details.push_back(fmt::format("analytic residual {:.2e} (bound 1e-10), driven residual {:.2e} (bound 0.05), "
                                          "theta = 0..pi in 11 nodes, both blocks", ra, rd));
    } catch (const MetricInconsistent& e) {
        out.pass = false;
        out.details.push_back(e.what());
    }
    return out;
}

Outcome criterion7() {
    const auto t0 = Clock::now();
    Outcome out;
    out.pass = true;
    for (double x : {0.25, 0.5, 1.0, 1.5}) {
        const auto p = bessel_operating_point("12", x);
        const double predicted = effective_coupling(p.cs.J.at("12"), x);
        double measured = std::nan("");
        try {
            measured = calibrate_effective(p.cs, p.ms, "12").measured;
        } catch (const Error& e) {
            out.details.push_back(fmt::format("x = {}: {}", x, e.what()));
        }
        const double rel = (measured - predicted) / predicted;
        out.pass = out.pass && std::abs(rel) <= 0.05;
        out.details.push_back(fmt::format("ampOverFreq {:.2f}: measured {:.4f} MHz, |J J1| = {:.4f} MHz, rel err {:+.2e}", x,
                                          angular_to_mhz(measured), angular_to_mhz(predicted), rel));
    }
    const double t = seconds_since(t0);
    out.pass = out.pass && t < 120.0;
    out.details.push_back(fmt::format("pair 12, J = 5 MHz, tone at the 100 MHz pair detuning; runtime {:.1f} s (bound 120 s)", t));
    return out;
}

Outcome criterion8() {
    Outcome out;
    out.pass = true;
    for (double M : {2.0, -1.0, 10.0}) {
        BHZParams p;
        p.M = M;
        std::vector<std::pair<double, double>> v;
        for (std::size_t n : {32, 64, 128})
            v.emplace_back(chern_lattice(bhz_block_model(p, 1), n, 1).value, chern_lattice(bhz_block_model(p, 2), n, 2).value);
        const bool stable = v[0] == v[1] && v[1] == v[2];
        const bool expected = M == 2.0 ? (std::abs(v[0].first) == 1.0 && v[0].second == -v[0].first)
                                       : (v[0].first == 0.0 && v[0].second == 0.0);
        out.pass = out.pass && stable && expected;
        out.details.push_back(fmt::format("M = {}: (C1, C2) = ({}, {}) at nGrid 32/64/128, stable = {}", M, v[0].first,
                                          v[0].second, stable));
    }
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion9() {
    const auto t0 = Clock::now();
    Outcome out;
    out.pass = true;
    std::mt19937_64 rng(99);

    // numkit: propagator unitarity and eigendecomposition.
    double unit = 0.0, recon = 0.0;
    for (int k = 0; k < 200; ++k) {
        const ComplexMat h = random_hermitian(4 + static_cast<std::size_t>(k % 5), rng);
        unit = std::max(unit, unitarity_defect(propagator(h, 0.7)));
        recon = std::max(recon, max_norm(reconstruct(eigh(h)) - h) / inf_norm(h));
    }
    // models and circuit: Hermiticity.
    double herm = 0.0;
    std::uniform_real_distribution<double> u(-kPi, kPi);
    BHZParams bp;
    bp.Bg = 0.3;
    const auto bhz = bhz_model(bp);
    const auto dm = diamond_model(1.0);
    const auto op = bessel_operating_point("12", 1.0);
    for (int k = 0; k < 200; ++k) {
        herm = std::max(herm, hermiticity_defect(dm({{"theta", u(rng)}, {"phi", u(rng)}})));
        herm = std::max(herm, hermiticity_defect(bhz({{"kx", u(rng)}, {"ky", u(rng)}})));
        herm = std::max(herm, hermiticity_defect(circuit_hamiltonian(op.cs, op.ms, std::abs(u(rng)))));
    }
    const bool numOk = unit <= 1e-12 && recon <= 1e-12 && herm == 0.0;
    out.pass = out.pass && numOk;
    out.details.push_back(fmt::format("numkit/models: unitarity {:.1e}, eigh reconstruction {:.1e}, Hermiticity {:.1e}", unit,
                                      recon, herm));

    // dynamics: norm drift and in-block population over every driven trace.
    double drift = 0.0, pop = 0.0;
    std::size_t traces = 0;
    for (const auto& p : driven_data())
        for (const auto& b : p.blocks)
            for (const auto& tr : b.traces) {
                ++traces;
                drift = std::max(drift, tr.maxNormDrift);
                for (std::size_t i = 0; i < tr.times.size(); ++i)
                    pop = std::max(pop, 1.0 - (tr.popGround[i] + tr.popExcited[i]));
            }
    const bool dynOk = drift <= 1e-8 && pop <= 1e-6;
    out.pass = out.pass && dynOk;
    out.details.push_back(fmt::format("dynamics: max norm drift {:.1e} (bound 1e-8), max block leakage {:.1e} over {} traces",
                                      drift, pop, traces));

    // qgt: covariance under rotations of the degenerate basis.
    double cov = 0.0, inv = 0.0;
    for (int k = 0; k < 50; ++k) {
        const ParamPoint pt{{"theta", 0.1 + 2.9 * (k + 0.5) / 50.0}, {"phi", u(rng)}};
        const auto o = level_opts(kDiamondPreparedLevel);
        const auto ref = qgt_sum_over_states(dm, pt, "theta", "phi", o);
        const ComplexMat w = random_unitary2(rng);
        std::vector<CVec> rotated(2, CVec(4));
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t i = 0; i < 4; ++i) rotated[b][i] += ref.basis[a][i] * w(a, b);
        QGTOptions ro = o;
        ro.basis = rotated;
        const auto q = qgt_sum_over_states(dm, pt, "theta", "phi", ro);
        cov = std::max(cov, max_norm(q.Q - w.adjoint() * ref.Q * w));
        inv = std::max(inv, std::abs(q.F.trace() - ref.F.trace()) + std::abs(q.g.trace() - ref.g.trace()));
    }
    const bool qgtOk = cov <= 1e-12 && inv <= 1e-12;
    out.pass = out.pass && qgtOk;
    out.details.push_back(fmt::format("qgt: covariance defect {:.1e}, trace invariance {:.1e} (bounds 1e-12)", cov, inv));

    // cli: identical config and seed give byte-identical files.
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qgtlab_acceptance";
    fs::remove_all(dir);
    const auto cfg = cli::parse_config(
        "grid:\n  theta_pi: [0.3, 0.5]\ndrive:\n  mu: theta\n  nu: phi\nnoise:\n  sigma: 0.02\n  seed: 42\n");
    const auto ra = cli::cmd_drive(cfg, dir / "a");
    cli::cmd_drive(cfg, dir / "b");
    bool same = !ra.files.empty();
    for (const auto& f : ra.files) same = same && slurp(dir / "a" / f) == slurp(dir / "b" / f);
    fs::remove_all(dir);
    out.pass = out.pass && same;
    out.details.push_back(fmt::format("cli: {} files byte-identical across reruns with noise seed 42: {}", ra.files.size(), same));

    const double t = seconds_since(t0);
    out.pass = out.pass && t < 300.0;
    out.details.push_back(fmt::format("runtime {:.1f} s (bound 300 s)", t));
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"closed-form QGT of the diamond model", criterion1},
        {"finite-difference vs sum-over-states oracle", criterion2},
        {"driven extraction of g and F", criterion3},
        {"Rabi frequency vs amplitude and detuning", criterion4},
        {"Chern numbers, spin Chern and Z2 sum", criterion5},
        {"metric-curvature determinant relation", criterion6},
        {"Bessel coupling law on the full circuit", criterion7},
        {"lattice Chern oracle for BHZ", criterion8},
        {"property suites", criterion9},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.details.push_back(std::string("exception: ") + e.what());
        }
        if (!o.pass) ++failures;
        fmt::print("{} {}: {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0));
        for (const auto& d : o.details) fmt::print("     {}\n", d);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
