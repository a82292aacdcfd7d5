#include "qgtlab/cli/commands.hpp"

#include "qgtlab/circuit.hpp"
#include "qgtlab/cli/output.hpp"
#include "qgtlab/cli/svg.hpp"
#include "qgtlab/dynamics.hpp"
#include "qgtlab/errors.hpp"
#include "qgtlab/models.hpp"
#include "qgtlab/qgt.hpp"
#include "qgtlab/topology.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace qgtlab::cli {

namespace {

using nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool wants(const RunConfig& c, Format f) { return std::find(c.formats.begin(), c.formats.end(), f) != c.formats.end(); }

double mhz(double w) { return angular_to_mhz(w); }

Cell num_or_empty(double v) { return std::isfinite(v) ? Cell{v} : Cell{}; }

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Collects output files and the shared JSON header.
class Emitter {
public:
    Emitter(const RunConfig& cfg, std::filesystem::path dir, std::string command)
        : cfg_(cfg), dir_(std::move(dir)), command_(std::move(command)) {
        res_.report = json::object();
        res_.report["command"] = command_;
        res_.report["conventions"] = conventions_json();
        res_.report["config"] = cfg.echo;
        res_.report["seed"] = cfg.noise.seed;
    }

    void csv(const std::string& name, const CsvTable& t) {
        if (!wants(cfg_, Format::Csv)) return;
        write_file(dir_, name, t.render());
        res_.files.push_back(name);
    }
    void svg(const std::string& name, const Chart& c) {
        if (!wants(cfg_, Format::Svg)) return;
        write_file(dir_, name, render_svg(c));
        res_.files.push_back(name);
    }
    json& report() { return res_.report; }

    CommandResult finish(int exitCode = kExitOk) {
        res_.exitCode = exitCode;
        if (wants(cfg_, Format::Json)) {
            const std::string name = command_ + ".json";
            res_.files.push_back(name);
            std::sort(res_.files.begin(), res_.files.end());
            res_.report["files"] = res_.files;
            write_file(dir_, name, render_json(res_.report));
        } else {
            std::sort(res_.files.begin(), res_.files.end());
            res_.report["files"] = res_.files;
        }
        return res_;
    }

private:
    const RunConfig& cfg_;
    std::filesystem::path dir_;
    std::string command_;
    CommandResult res_;
};

struct ModelSetup {
    ParamHamiltonian model;
    Pairing pairing;
    std::string c1, c2;  // coordinate names
};

BHZParams bhz_params(const ModelConfig& m) {
    BHZParams p;
    p.Hxy = m.hxy;
    p.Hz = m.hz;
    p.M = m.M;
    p.Bg = m.bg;
    return p;
}

ModelSetup make_model(const RunConfig& c) {
    if (c.model.type == "diamond")
        return {diamond_model(c.model.omega0), kDiamondPairing, "theta", "phi"};
    return {bhz_model(bhz_params(c.model)), kBhzPairing, "kx", "ky"};
}

std::vector<ParamPoint> grid_points(const RunConfig& c, const ModelSetup& m) {
    const auto& a = c.model.type == "diamond" ? c.grid.theta : c.grid.kx;
    const auto& b = c.model.type == "diamond" ? c.grid.phi : c.grid.ky;
    if (a.empty() || b.empty())
        throw ConfigInvalid(fmt::format("grid: no {} / {} values given (empty grid)", m.c1, m.c2));
    std::vector<ParamPoint> pts;
    for (double x : a)
        for (double y : b) pts.push_back({{m.c1, x}, {m.c2, y}});
    return pts;
}

// 1 or 2 when the vector lies in that block, 0 when it mixes them.
int block_of(const CVec& v, const Pairing& p) {
    const double w1 = std::norm(v[p.first[0]]) + std::norm(v[p.first[1]]);
    const double w2 = std::norm(v[p.second[0]]) + std::norm(v[p.second[1]]);
    if (w1 >= 1.0 - 1e-9) return 1;
    if (w2 >= 1.0 - 1e-9) return 2;
    return 0;
}

struct PointGeometry {
    QGTBlock mm, nn, mn;
};

PointGeometry geometry(const ModelSetup& m, const ParamPoint& pt, std::size_t level, const std::string& mu,
                       const std::string& nu) {
    QGTOptions o;
    o.level = level;
    return {qgt_sum_over_states(m.model, pt, mu, mu, o), qgt_sum_over_states(m.model, pt, nu, nu, o),
            qgt_sum_over_states(m.model, pt, mu, nu, o)};
}

std::size_t state_in_block(const QGTBlock& q, const Pairing& p, int block) {
    for (std::size_t j = 0; j < q.n; ++j)
        if (block_of(q.basis[j], p) == block) return j + 1;
    throw NumericalFailure(fmt::format("no state of level {} lies in block {}", q.level, block));
}

std::string short_name(const std::string& p) {
    if (p == "theta") return "t";
    if (p == "phi") return "p";
    if (p == "kx") return "x";
    if (p == "ky") return "y";
    return p;
}

}  // namespace

// ---------------------------------------------------------------------------

CommandResult cmd_analytic(const RunConfig& cfg, const std::filesystem::path& outDir) {
    const ModelSetup m = make_model(cfg);
    const auto pts = grid_points(cfg, m);
    Emitter em(cfg, outDir, "analytic");
    const std::string a = short_name(m.c1), b = short_name(m.c2);
    CsvTable t({m.c1, m.c2, "block", "j", "g_" + a + a, "g_" + b + b, "g_" + a + b, "F_" + a + b});

    const std::size_t nB = cfg.model.type == "diamond" ? cfg.grid.phi.size() : cfg.grid.ky.size();
    std::vector<Series> series;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& pt = pts[i];
        const PointGeometry g = geometry(m, pt, cfg.model.level, m.c1, m.c2);
        if (series.empty()) {
            for (std::size_t j = 0; j < g.mm.n; ++j)
                for (const auto& name : {"g_" + a + a, "g_" + b + b, "F_" + a + b})
                    series.push_back({fmt::format("{} j={}", name, j + 1), {}, {}, false});
        }
        for (std::size_t j = 0; j < g.mm.n; ++j) {
            const int blk = block_of(g.mm.basis[j], m.pairing);
            const double gaa = g.mm.g(j, j).real(), gbb = g.nn.g(j, j).real(), gab = g.mn.g(j, j).real();
            const double fab = g.mn.F(j, j).real();
            t.add_row({pt.at(m.c1), pt.at(m.c2), blk ? Cell{static_cast<long long>(blk)} : Cell{},
                       static_cast<long long>(j + 1), gaa, gbb, gab, fab});
            if (i % nB == 0) {
                const double vals[3] = {gaa, gbb, fab};
                for (std::size_t k = 0; k < 3; ++k) {
                    series[3 * j + k].x.push_back(pt.at(m.c1));
                    series[3 * j + k].y.push_back(vals[k]);
                }
            }
        }
    }
    em.csv("analytic.csv", t);
    em.svg("analytic.svg", {fmt::format("Quantum geometry vs {} (first {} value)", m.c1, m.c2), m.c1 + " (rad)",
                            "dimensionless", series});
    em.report()["model"] = cfg.model.type;
    em.report()["level"] = cfg.model.level;
    em.report()["points"] = pts.size();
    em.report()["rows"] = t.rows();
    return em.finish();
}

// ---------------------------------------------------------------------------

CommandResult cmd_drive(const RunConfig& cfg, const std::filesystem::path& outDir) {
    const ModelSetup m = make_model(cfg);
    const auto pts = grid_points(cfg, m);
    const auto& d = cfg.drive;
    if (!m.model.has_param(d.mu)) throw ConfigInvalid("drive.mu: unknown parameter '" + d.mu + "'");
    if (!d.nu.empty() && !m.model.has_param(d.nu)) throw ConfigInvalid("drive.nu: unknown parameter '" + d.nu + "'");
    if (d.nu == d.mu) throw ConfigInvalid("drive.nu must differ from drive.mu");
    const bool two = !d.nu.empty();

    Emitter em(cfg, outDir, "drive");
    RabiOptions base;
    base.level = cfg.model.level;
    base.pairing = m.pairing;
    base.noiseSigma = cfg.noise.sigma;
    base.stepFraction = d.stepFraction;

    CsvTable traces({"experiment", "trace", "t_us", "pop_prepared", "pop_partner"});
    CsvTable rates({"experiment", "a_mhz", "delta_mhz", m.c1, m.c2, "block", "j", "trace", "drive_mhz",
                    "omega_fit_mhz", "amplitude", "omega_expected_mhz", "rel_error", "status"});
    const std::string a = short_name(d.mu), b = two ? short_name(d.nu) : "";
    CsvTable qtab({"experiment", "a_mhz", "delta_mhz", m.c1, m.c2, "block", "j", "component", "extracted", "analytic",
                   "abs_error", "rel_error"});

    std::map<std::string, double> worstRel, worstAbs;
    long long exp = 0;
    std::uint64_t seed = cfg.noise.seed;
    std::vector<Series> traceSeries;
    // Plot data for the first drive setting along the first coordinate.
    std::map<std::string, Series> plot;
    auto plot_add = [&](const std::string& key, bool markers, double x, double y) {
        auto& s = plot[key];
        s.label = key;
        s.markers = markers;
        s.x.push_back(x);
        s.y.push_back(y);
    };

    auto add_traces = [&](long long e, const std::vector<RabiTrace>& trs, const std::vector<std::string>& labels) {
        for (std::size_t k = 0; k < trs.size(); ++k) {
            const auto& tr = trs[k];
            for (std::size_t i = 0; i < tr.times.size(); ++i)
                traces.add_row({e, labels[k], tr.times[i], tr.popGround[i], tr.popExcited[i]});
            if (e == 0) {
                Series s{labels[k] + " prepared", tr.times, tr.popGround, false};
                traceSeries.push_back(std::move(s));
            }
        }
    };

    for (std::size_t ia = 0; ia < d.A.size(); ++ia) {
        for (std::size_t id = 0; id < d.Delta.size(); ++id) {
            const double A = d.A[ia], Delta = d.Delta[id];
            const bool firstSetting = ia == 0 && id == 0;
            for (std::size_t ip = 0; ip < pts.size(); ++ip) {
                const auto& pt = pts[ip];
                const bool onPlotLine = firstSetting && pt.at(m.c2) == pts.front().at(m.c2);
                const PointGeometry g = geometry(m, pt, cfg.model.level, d.mu, two ? d.nu : d.mu);
                for (int blk : d.blocks) {
                    const std::size_t j = state_in_block(g.mm, m.pairing, blk);
                    const std::size_t jj = j - 1;
                    RabiOptions o = base;
                    o.seed = seed;
                    seed += 16;
                    const std::vector<Cell> key{exp, mhz(A), mhz(Delta), pt.at(m.c1), pt.at(m.c2),
                                                static_cast<long long>(blk), static_cast<long long>(j)};
                    auto row = [&](std::vector<Cell> extra) {
                        std::vector<Cell> r = key;
                        r.insert(r.end(), extra.begin(), extra.end());
                        return r;
                    };
                    auto qrow = [&](const std::string& comp, double ext, double ana) {
                        const double ae = std::abs(ext - ana);
                        const double re = ana != 0.0 ? ae / std::abs(ana) : kNaN;
                        qtab.add_row(row({comp, num_or_empty(ext), ana, num_or_empty(ae), num_or_empty(re)}));
                        // Pass/fail measure: relative error with a 0.01 absolute floor.
                        const double scaled = ae / std::max(std::abs(ana), 0.2);
                        worstRel[comp] = std::max(worstRel[comp], std::isfinite(scaled) ? scaled : 1e300);
                        worstAbs[comp] = std::max(worstAbs[comp], std::isfinite(ae) ? ae : 1e300);
                        if (onPlotLine) {
                            plot_add(fmt::format("{} block {}", comp, blk), true, pt.at(m.c1), ext);
                            if (blk == d.blocks.front()) plot_add(comp + " analytic", false, pt.at(m.c1), ana);
                        }
                    };

                    if (!two) {
                        DriveSpec spec;
                        spec.mode = DriveMode::OneParam;
                        spec.mu = d.mu;
                        spec.A = A;
                        spec.omega = 1.0;
                        spec.Delta = Delta;
                        spec.duration = d.duration;
                        spec.samples = d.samples;
                        const RabiTrace tr = rabi_experiment(m.model, pt, spec, blk, j, o);
                        const double Q = g.mm.Q(jj, jj).real();
                        const double expected = std::sqrt(A * A * Q + Delta * Delta);
                        double fitted = kNaN, amp = kNaN, qext = kNaN;
                        std::string status = "ok";
                        try {
                            const RabiFit f = fit_rabi(tr);
                            fitted = f.rabiOmega;
                            amp = f.fit.amplitude;
                            qext = invert_rabi(fitted, A, Delta);
                        } catch (const NoOscillation&) {
                            status = "no-oscillation";
                        } catch (const InconsistentFit&) {
                            status = "inconsistent-fit";
                        }
                        const double rel = std::isfinite(fitted) && expected > 0 ? (fitted - expected) / expected : kNaN;
                        rates.add_row(row({d.mu, mhz(tr.driveOmega), num_or_empty(mhz(fitted)), num_or_empty(amp),
                                           mhz(expected), num_or_empty(rel), status}));
                        add_traces(exp, {tr}, {d.mu});
                        qrow("g_" + a + a, qext, Q);
                        const bool sweepA = d.A.size() > 1, sweepD = d.Delta.size() > 1;
                        if (ip == 0 && ((sweepA && id == 0) || (!sweepA && sweepD && ia == 0))) {
                            const double x = sweepA ? mhz(A) : mhz(Delta);
                            plot_add(fmt::format("fitted block {}", blk), true, x, mhz(fitted));
                            if (blk == d.blocks.front()) plot_add("sqrt(A^2 Q + Delta^2)", false, x, mhz(expected));
                        }
                    } else {
                        const DrivenQGT r = measure_qgt(m.model, pt, d.mu, d.nu, A, Delta, blk, j, o);
                        const std::vector<std::string> labels{d.mu, d.nu, "dphi=0", "dphi=+pi/2", "dphi=-pi/2"};
                        const double dphis[5] = {0.0, 0.0, 0.0, 0.5 * kPi, -0.5 * kPi};
                        for (std::size_t k = 0; k < r.traces.size(); ++k) {
                            const double S = k == 0 ? g.mm.Q(jj, jj).real()
                                             : k == 1
                                                 ? g.nn.Q(jj, jj).real()
                                                 : expected_rate(m.model, pt, d.mu, d.nu, dphis[k], j, cfg.model.level);
                            const double expected = std::sqrt(A * A * std::max(S, 0.0) + Delta * Delta);
                            const double fitted = r.rates[k];
                            const double rel =
                                std::isfinite(fitted) && expected > 0 ? (fitted - expected) / expected : kNaN;
                            rates.add_row(row({labels[k], mhz(r.traces[k].driveOmega), num_or_empty(mhz(fitted)),
                                               r.amplitudes[k], mhz(expected), num_or_empty(rel),
                                               std::isfinite(fitted) ? "ok" : "no-oscillation"}));
                        }
                        add_traces(exp, r.traces, labels);
                        qrow("g_" + a + a, r.Qmumu, g.mm.g(jj, jj).real());
                        qrow("g_" + b + b, r.Qnunu, g.nn.g(jj, jj).real());
                        qrow("g_" + a + b, r.cross.g, g.mn.g(jj, jj).real());
                        qrow("F_" + a + b, r.cross.F, g.mn.F(jj, jj).real());
                    }
                    ++exp;
                }
            }
        }
    }

    em.csv("drive_traces.csv", traces);
    em.csv("drive_rates.csv", rates);
    em.csv("drive_qgt.csv", qtab);
    em.svg("drive_traces.svg", {"Rabi traces, first experiment", "t (us)", "population", traceSeries});
    auto pick = [&](auto pred) {
        std::vector<Series> out;
        for (const auto& [k, s] : plot)
            if (pred(k)) out.push_back(s);
        return out;
    };
    if (two) {
        em.svg("drive_metric.svg", {"Extracted quantum metric", m.c1 + " (rad)", "g",
                                    pick([](const std::string& k) { return k.rfind("g_", 0) == 0; })});
        em.svg("drive_curvature.svg", {"Extracted Berry curvature", m.c1 + " (rad)", "F",
                                       pick([](const std::string& k) { return k.rfind("F_", 0) == 0; })});
    } else {
        const bool sweepA = d.A.size() > 1, sweepD = d.Delta.size() > 1;
        if (sweepA || sweepD) {
            em.svg("drive_rates.svg", {"Rabi frequency", sweepA ? "A (MHz)" : "Delta (MHz)", "Omega (MHz)",
                                       pick([](const std::string& k) { return k.rfind("g_", 0) != 0; })});
        } else {
            em.svg("drive_metric.svg", {"Extracted quantum metric", m.c1 + " (rad)", "g",
                                        pick([](const std::string& k) { return k.rfind("g_", 0) == 0; })});
        }
    }
    json worst = json::object();
    for (const auto& [k, v] : worstRel) worst[k] = {{"max_scaled_error", v}, {"max_abs_error", worstAbs[k]}};
    em.report()["model"] = cfg.model.type;
    em.report()["mode"] = two ? "two-parameter" : "one-parameter";
    em.report()["experiments"] = exp;
    em.report()["errors"] = worst;
    em.report()["error_measure"] = "abs_error / max(|analytic|, 0.2), i.e. relative with a 0.01 absolute floor at 5%";
    return em.finish();
}

// ---------------------------------------------------------------------------

CommandResult cmd_chern(const RunConfig& cfg, const std::filesystem::path& outDir) {
    const auto& c = cfg.chern;
    Emitter em(cfg, outDir, "chern");
    json& rep = em.report();
    double cplus = 0.0, cminus = 0.0;
    std::string method;
    json grid = json::object();

    if (c.source == "lattice") {
        if (cfg.model.type != "bhz") throw ConfigInvalid("chern.source lattice requires model.type bhz");
        const BHZParams p = bhz_params(cfg.model);
        if (p.Bg != 0.0) throw ConfigInvalid("chern.source lattice requires model.bg_mhz = 0 (two-level blocks)");
        CsvTable t({"block", "n_grid", "chern"});
        json perGrid = json::array();
        std::optional<std::pair<double, double>> first;
        bool stable = true;
        for (std::size_t n : c.nGrid) {
            const double c1 = chern_lattice(bhz_block_model(p, 1), n, 1).value;
            const double c2 = chern_lattice(bhz_block_model(p, 2), n, 2).value;
            t.add_row({1LL, static_cast<long long>(n), c1});
            t.add_row({2LL, static_cast<long long>(n), c2});
            perGrid.push_back({{"n_grid", n}, {"Cplus", c1}, {"Cminus", c2}});
            if (!first) first = {c1, c2};
            else stable = stable && first->first == c1 && first->second == c2;
        }
        cplus = first->first;
        cminus = first->second;
        method = to_string(ChernMethod::LatticePlaquette);
        grid["n_grid"] = c.nGrid;
        rep["per_grid"] = perGrid;
        rep["stable_under_refinement"] = stable;
        em.csv("chern.csv", t);
    } else {
        if (cfg.model.type != "diamond") throw ConfigInvalid("chern.source " + c.source + " requires model.type diamond");
        const std::size_t n = c.nTheta;
        std::vector<double> thetas(n);
        for (std::size_t i = 0; i < n; ++i) thetas[i] = kPi * static_cast<double>(i) / static_cast<double>(n - 1);
        std::array<std::vector<double>, 2> F;
        std::array<std::vector<GeometrySample>, 2> geo;
        const ModelSetup m = make_model(cfg);
        QGTOptions qo;
        qo.level = cfg.model.level;
        std::uint64_t seed = cfg.noise.seed;
        for (std::size_t i = 0; i < n; ++i) {
            const ParamPoint pt{{"theta", thetas[i]}, {"phi", 0.0}};
            const PointGeometry g = geometry(m, pt, cfg.model.level, "theta", "phi");
            for (int blk : {1, 2}) {
                const std::size_t j = state_in_block(g.mm, m.pairing, blk);
                const auto b = static_cast<std::size_t>(blk - 1);
                if (c.source == "analytic") {
                    const std::size_t jj = j - 1;
                    geo[b].push_back({g.mm.g(jj, jj).real(), g.nn.g(jj, jj).real(), g.mn.g(jj, jj).real(),
                                      kSphereOrientation * g.mn.F(jj, jj).real()});
                } else {
                    RabiOptions o;
                    o.level = cfg.model.level;
                    o.pairing = m.pairing;
                    o.noiseSigma = cfg.noise.sigma;
                    o.seed = seed;
                    o.stepFraction = cfg.drive.stepFraction;
                    seed += 16;
                    const DrivenQGT r =
                        measure_qgt(m.model, pt, "theta", "phi", cfg.drive.A.front(), cfg.drive.Delta.front(), blk, j, o);
                    geo[b].push_back({r.Qmumu, r.Qnunu, r.cross.g, kSphereOrientation * r.cross.F});
                }
                F[b].push_back(geo[b].back().F);
            }
        }
        if (c.source == "analytic") {
            cplus = chern_integral(diamond_curvature(1, cfg.model.omega0), n, c.nPhi, 1).value;
            cminus = chern_integral(diamond_curvature(2, cfg.model.omega0), n, c.nPhi, 2).value;
        } else {
            cplus = chern_integral(tabulated_sampler(F[0]), n, c.nPhi, 1).value;
            cminus = chern_integral(tabulated_sampler(F[1]), n, c.nPhi, 2).value;
            rep["drive"] = {{"a_mhz", mhz(cfg.drive.A.front())}, {"delta_mhz", mhz(cfg.drive.Delta.front())}};
        }
        method = to_string(ChernMethod::CurvatureIntegral);
        grid["n_theta"] = n;
        grid["n_phi"] = c.nPhi;
        // Auxiliary metric-only estimate; inconsistent metric data is reported, not fatal.
        try {
            const double mp = chern_from_metric(geo[0], c.nPhi, 1).value;
            const double mm = chern_from_metric(geo[1], c.nPhi, 2).value;
            const auto ms = spin_chern(mp, mm);
            rep["metric"] = {{"Cplus", mp},
                             {"Cminus", mm},
                             {"spinChern", ms.scn},
                             {"z2sum", ms.z2sum},
                             {"method", to_string(ChernMethod::MetricSignBorrowed)},
                             {"detg_residual_block1", detg_curvature_residual(geo[0])},
                             {"detg_residual_block2", detg_curvature_residual(geo[1])}};
        } catch (const MetricInconsistent& e) {
            rep["metric"] = {{"method", to_string(ChernMethod::MetricSignBorrowed)}, {"error", e.what()}};
        }
        rep["source"] = c.source;

        CsvTable t({"theta", "F_oriented_block1", "F_oriented_block2", "g_tt_block1", "g_pp_block1", "g_tp_block1",
                    "g_tt_block2", "g_pp_block2", "g_tp_block2"});
        for (std::size_t i = 0; i < n; ++i)
            t.add_row({thetas[i], F[0][i], F[1][i], geo[0][i].gtt, geo[0][i].gpp, geo[0][i].gtp, geo[1][i].gtt,
                       geo[1][i].gpp, geo[1][i].gtp});
        em.csv("chern.csv", t);
        std::vector<double> ideal(n);
        for (std::size_t i = 0; i < n; ++i) ideal[i] = 0.5 * std::sin(thetas[i]);
        std::vector<double> idealNeg(ideal);
        for (double& v : idealNeg) v = -v;
        em.svg("chern.svg", {"Oriented Berry curvature", "theta (rad)", "F",
                             {{"block 1", thetas, F[0], c.source == "driven"},
                              {"block 2", thetas, F[1], c.source == "driven"},
                              {"+sin(theta)/2", thetas, ideal, false},
                              {"-sin(theta)/2", thetas, idealNeg, false}}});
    }

    const auto s = spin_chern(cplus, cminus);
    const bool pass = std::abs(s.z2sum) <= c.z2Bound;
    rep["Cplus"] = cplus;
    rep["Cminus"] = cminus;
    rep["spinChern"] = s.scn;
    rep["z2sum"] = s.z2sum;
    rep["z2_bound"] = c.z2Bound;
    rep["z2_within_bound"] = pass;
    rep["method"] = method;
    rep["grid"] = grid;
    rep["model"] = cfg.model.type;
    return em.finish(pass ? kExitOk : kExitZ2Bound);
}

// ---------------------------------------------------------------------------

CommandResult cmd_circuit(const RunConfig& cfg, const std::filesystem::path& outDir) {
    const auto& cc = cfg.circuit;
    Emitter em(cfg, outDir, "circuit");
    CalibrationOptions co;
    co.resonanceSearch = cc.resonanceSearch;

    CsvTable t({"amp_over_freq", "predicted_mhz", "measured_mhz", "rel_error", "tone_mhz", "status"});
    Series measured{"full-circuit calibration", {}, {}, true};
    json rows = json::array();
    double worst = 0.0;
    for (double x : cc.ampOverFreq) {
        BesselPoint p = bessel_operating_point(cc.pair, x, cc.tonePhase);
        for (auto& [k, v] : p.cs.J)
            if (v != 0.0) v = cc.J;
        const double predicted = effective_coupling(cc.J, x);
        double meas = kNaN, tone = kNaN, rel = kNaN;
        std::string status = "ok";
        try {
            const auto r = calibrate_effective(p.cs, p.ms, cc.pair, 0.0, co);
            meas = r.measured;
            tone = r.toneFreq;
            if (predicted > 0.0) rel = (meas - predicted) / predicted;
        } catch (const NoOscillation&) {
            status = "no-oscillation";
        }
        if (std::isfinite(rel)) worst = std::max(worst, std::abs(rel));
        t.add_row({x, mhz(predicted), num_or_empty(mhz(meas)), num_or_empty(rel), num_or_empty(mhz(tone)), status});
        rows.push_back({{"amp_over_freq", x},
                        {"predicted_mhz", mhz(predicted)},
                        {"measured_mhz", num_or_null(mhz(meas))},
                        {"rel_error", num_or_null(rel)},
                        {"status", status}});
        measured.x.push_back(x);
        measured.y.push_back(mhz(meas));
    }
    em.csv("circuit.csv", t);

    double xmax = 2.0;
    for (double x : cc.ampOverFreq) xmax = std::max(xmax, x);
    Series curve{"|J J1(x)|", {}, {}, false};
    for (int i = 0; i <= 200; ++i) {
        const double x = xmax * i / 200.0;
        curve.x.push_back(x);
        curve.y.push_back(mhz(effective_coupling(cc.J, x)));
    }
    em.svg("circuit.svg", {"Effective coupling vs modulation depth", "amplitude / frequency", "coupling (MHz)",
                           {curve, measured}});

    json& rep = em.report();
    rep["pair"] = cc.pair;
    rep["j_mhz"] = mhz(cc.J);
    rep["calibration"] = rows;
    rep["max_abs_rel_error"] = worst;

    if (!cc.emergenceDelta.empty()) {
        CircuitSpec cs = diamond_circuit();
        cs.J["12"] = cc.J;
        cs.J["34"] = cc.J;
        CsvTable e({"amp_over_freq", "delta_mhz", "phi", "omega0_mhz", "theta", "max_abs_error_mhz", "rel_error"});
        json erows = json::array();
        double eworst = 0.0;
        for (double Delta : cc.emergenceDelta) {
            for (double phi : cc.emergencePhi) {
                const auto ms = diamond_modulation(cs, cc.emergenceAmpOverFreq, Delta, phi);
                const auto gen = diamond_effective_generator(cs, ms, Delta);
                const auto tgt = diamond_target(cs, cc.emergenceAmpOverFreq, Delta);
                const double err = max_norm(gen.H - diamond_hamiltonian({tgt.Omega0, tgt.theta, phi}));
                const double rel = err / tgt.Omega0;
                eworst = std::max(eworst, rel);
                e.add_row({cc.emergenceAmpOverFreq, mhz(Delta), phi, mhz(tgt.Omega0), tgt.theta, mhz(err), rel});
                erows.push_back({{"delta_mhz", mhz(Delta)}, {"phi", phi}, {"rel_error", rel}});
            }
        }
        em.csv("circuit_emergence.csv", e);
        rep["emergence"] = {{"amp_over_freq", cc.emergenceAmpOverFreq}, {"rows", erows}, {"max_rel_error", eworst}};
    }
    return em.finish();
}

}  // namespace qgtlab::cli
