#include "qgtlab/errors.hpp"
#include "qgtlab/models.hpp"
#include "qgtlab/qgt.hpp"
#include "qgtlab/topology.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace qgtlab;

namespace {

// Midpoint quadrature of (1 / 2 pi) * integral of F^{kx ky} over the Brillouin zone.
double bz_curvature_integral(const ParamHamiltonian& m, std::size_t n, std::size_t band) {
    const double h = kTwoPi / static_cast<double>(n);
    double s = 0.0;
    QGTOptions o;
    o.level = band;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            const ParamPoint pt{{"kx", -kPi + h * (a + 0.5)}, {"ky", -kPi + h * (b + 0.5)}};
            s += qgt_sum_over_states(m, pt, "kx", "ky", o).F(0, 0).real();
        }
    return s * h * h / kTwoPi;
}

}  // namespace

TEST_CASE("chern_integral: analytic diamond curvature") {
    const double cp = chern_integral(diamond_curvature(1), 101, 4, 1).value;
    const double cm = chern_integral(diamond_curvature(2), 101, 4, 2).value;
    CHECK(std::abs(cp - 1.0) <= 1e-3);
    CHECK(std::abs(cm + 1.0) <= 1e-3);
    // Closed-form integrand.
    auto f = [](double th, double) { return 0.5 * std::sin(th); };
    CHECK(std::abs(chern_integral(f, 101, 4).value - 1.0) <= 1e-3);
    CHECK(std::abs(chern_integral([&](double t, double p) { return -f(t, p); }, 101, 4).value + 1.0) <= 1e-3);
    CHECK(chern_integral([](double, double) { return 0.0; }, 11, 4).value == 0.0);
    const auto r = chern_integral(f, 21, 8, 2);
    CHECK(r.method == ChernMethod::CurvatureIntegral);
    CHECK(r.gridTheta == 21);
    CHECK(r.gridPhi == 8);
    CHECK(r.block == 2);
}

TEST_CASE("chern_integral: sampler matches the closed form") {
    const auto s = diamond_curvature(1, 2.0);
    for (double th : {0.1, 0.7, 1.5, 2.9}) CHECK(s(th, 0.4) == doctest::Approx(0.5 * std::sin(th)).epsilon(1e-9));
    const auto s2 = diamond_curvature(2);
    CHECK(s2(1.0, 0.0) == doctest::Approx(-0.5 * std::sin(1.0)).epsilon(1e-9));
}

TEST_CASE("chern_integral: second-order convergence") {
    auto f = [](double th, double) { return 0.5 * std::sin(th); };
    const double e26 = std::abs(chern_integral(f, 26, 4).value - 1.0);
    const double e101 = std::abs(chern_integral(f, 101, 4).value - 1.0);
    const double order = std::log(e26 / e101) / std::log(100.0 / 25.0);
    CHECK(order >= 1.9);
}

TEST_CASE("chern_integral: error paths") {
    auto f = [](double, double) { return 0.0; };
    CHECK_THROWS_AS(chern_integral(f, 10, 4), InvalidArgument);
    CHECK_THROWS_AS(chern_integral(f, 11, 3), InvalidArgument);
    CHECK_THROWS_AS(chern_integral(f, 11, 4, 3), InvalidArgument);
    CHECK_THROWS_AS(chern_integral([](double, double) { return std::numeric_limits<double>::quiet_NaN(); }, 11, 4),
                    InvalidSample);
}

TEST_CASE("tabulated_sampler") {
    std::vector<double> v(11);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * std::sin(kPi * i / 10.0);
    const auto s = tabulated_sampler(v);
    CHECK(s(0.3 * kPi, 1.0) == v[3]);
    CHECK_THROWS_AS(s(0.33 * kPi, 0.0), InvalidSample);
    // Same nodes as the closed form.
    CHECK(chern_integral(s, 11, 4).value ==
          doctest::Approx(chern_integral([](double t, double) { return 0.5 * std::sin(t); }, 11, 4).value));
    CHECK_THROWS_AS(chern_integral(s, 21, 4), InvalidSample);
}

TEST_CASE("chern_lattice: BHZ blocks") {
    for (std::size_t n : {32, 64, 128}) {
        BHZParams p;
        p.M = 2.0;
        const double c1 = chern_lattice(bhz_block_model(p, 1), n, 1).value;
        const double c2 = chern_lattice(bhz_block_model(p, 2), n, 2).value;
        CAPTURE(n);
        CHECK(std::abs(c1) == 1.0);
        CHECK(c1 + c2 == 0.0);
        for (double M : {-1.0, 10.0}) {
            p.M = M;
            CHECK(chern_lattice(bhz_block_model(p, 1), n, 1).value == 0.0);
            CHECK(chern_lattice(bhz_block_model(p, 2), n, 2).value == 0.0);
        }
    }
    const auto r = chern_lattice(bhz_block_model({}, 1), 32, 1);
    CHECK(r.method == ChernMethod::LatticePlaquette);
    CHECK(r.gridTheta == 32);
}

TEST_CASE("chern_lattice: agrees with the curvature quadrature of the tensor") {
    for (double M : {2.0, 1.0, 3.0, -1.0}) {
        BHZParams p;
        p.M = M;
        for (int b : {1, 2}) {
            const auto m = bhz_block_model(p, b);
            const double quad = bz_curvature_integral(m, 60, 0);
            const double lat = chern_lattice(m, 32, b).value;
            CAPTURE(M);
            CAPTURE(b);
            CHECK(std::abs(quad - lat) < 0.02);
        }
    }
}

TEST_CASE("chern_lattice: cross-method agreement with the sphere chart") {
    BHZParams p;
    const double c1 = chern_lattice(bhz_block_model(p, 1), 64, 1).value;
    const double c2 = chern_lattice(bhz_block_model(p, 2), 64, 2).value;
    const double s1 = chern_integral(diamond_curvature(1), 101, 4).value;
    const double s2 = chern_integral(diamond_curvature(2), 101, 4).value;
    CHECK(std::abs(std::abs(c1) - std::abs(s1)) < 1e-3);
    CHECK(c1 * c2 < 0.0);
    CHECK(s1 * s2 < 0.0);
}

TEST_CASE("chern_lattice: gap closing and bad input") {
    BHZParams p;
    p.M = 0.0;  // Dirac point at k = 0, which lies on every even grid
    CHECK_THROWS_AS(chern_lattice(bhz_block_model(p, 1), 32, 1), GaplessModel);
    CHECK_THROWS_AS(chern_lattice(bhz_block_model({}, 1), 2, 1), InvalidArgument);
    CHECK_THROWS_AS(chern_lattice(diamond_model(1.0), 32, 1, 9), InvalidArgument);
}

TEST_CASE("detg_curvature_residual") {
    std::vector<GeometrySample> analytic;
    for (int k = 0; k <= 100; ++k) {
        const double th = kPi * k / 100.0, s = std::sin(th);
        analytic.push_back({0.25, 0.25 * s * s, 0.0, 0.5 * s});
    }
    CHECK(detg_curvature_residual(analytic) <= 1e-10);

    // From the tensor itself.
    const auto m = diamond_model(1.0);
    QGTOptions o;
    o.level = kDiamondPreparedLevel;
    std::vector<GeometrySample> fromTensor;
    for (int k = 1; k <= 9; ++k) {
        const double th = 0.1 * k * kPi;
        const ParamPoint pt{{"theta", th}, {"phi", 0.3}};
        const auto tt = qgt_sum_over_states(m, pt, "theta", "theta", o);
        const auto pp = qgt_sum_over_states(m, pt, "phi", "phi", o);
        const auto tp = qgt_sum_over_states(m, pt, "theta", "phi", o);
        for (std::size_t j : {0u, 1u})
            fromTensor.push_back({tt.g(j, j).real(), pp.g(j, j).real(), tp.g(j, j).real(), tp.F(j, j).real()});
    }
    CHECK(detg_curvature_residual(fromTensor) <= 1e-10);

    const std::vector<GeometrySample> half{{0.25, 0.25, 0.0, 0.5}};
    CHECK(detg_curvature_residual(half) == 0.0);
    const std::vector<GeometrySample> off{{0.25, 0.25, 0.0, 0.6}};
    CHECK(detg_curvature_residual(off) == doctest::Approx(0.05));
    const std::vector<GeometrySample> bad{{0.1, 0.1, 0.2, 0.0}};
    CHECK_THROWS_AS(detg_curvature_residual(bad), MetricInconsistent);
    const std::vector<GeometrySample> tiny{{0.0, 0.0, 1e-6, 0.0}};
    CHECK(detg_curvature_residual(tiny) == 0.0);
}

TEST_CASE("chern_from_metric: sign borrowed from the curvature") {
    for (double sg : {1.0, -1.0}) {
        std::vector<GeometrySample> v;
        for (int k = 0; k <= 100; ++k) {
            const double th = kPi * k / 100.0, s = std::sin(th);
            v.push_back({0.25, 0.25 * s * s, 0.0, sg * 0.5 * s});
        }
        const auto r = chern_from_metric(v, 4);
        CHECK(r.value == doctest::Approx(sg).epsilon(1e-3));
        CHECK(r.method == ChernMethod::MetricSignBorrowed);
    }
    CHECK_THROWS_AS(chern_from_metric(std::vector<GeometrySample>(5), 4), InvalidArgument);
}

TEST_CASE("spin_chern") {
    auto a = spin_chern(1.0, -1.0);
    CHECK(a.scn == 1.0);
    CHECK(a.z2sum == 0.0);
    auto b = spin_chern(1.019, -1.003);
    CHECK(b.scn == doctest::Approx(1.011));
    CHECK(b.z2sum == doctest::Approx(0.016));
    auto c = spin_chern(0.0, 0.0);
    CHECK(c.scn == 0.0);
    CHECK(c.z2sum == 0.0);
}

TEST_CASE("method names") {
    CHECK(to_string(ChernMethod::CurvatureIntegral) == "curvature-integral");
    CHECK(to_string(ChernMethod::LatticePlaquette) == "lattice-plaquette");
    CHECK(to_string(ChernMethod::MetricSignBorrowed) == "metric-sign-borrowed");
}
