#include "qgtlab/errors.hpp"
#include "qgtlab/numkit/eigen.hpp"
#include "qgtlab/numkit/fit.hpp"
#include "qgtlab/numkit/special.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <limits>
#include <random>
#include <vector>

using namespace qgtlab;
using namespace qgtlab::testing;

TEST_CASE("eigh: diagonal input sorts and groups") {
    const std::vector<double> d{1.0, -1.0, 1.0, -1.0};
    const auto s = eigh(ComplexMat::diagonal(std::span<const double>(d)));
    CHECK(s.values == std::vector<double>{-1.0, -1.0, 1.0, 1.0});
    REQUIRE(s.groups.size() == 2);
    CHECK(s.groups[0].size() == 2);
    CHECK(s.groups[1].size() == 2);
}

TEST_CASE("eigh: Pauli x") {
    const ComplexMat sx(2, {0.0, 1.0, 1.0, 0.0});
    const auto s = eigh(sx);
    CHECK(s.values[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(s.values[1] == doctest::Approx(1.0).epsilon(1e-14));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(s.vectors(0, 0) - r) < 1e-14);
    CHECK(std::abs(s.vectors(1, 0) + r) < 1e-14);
    CHECK(std::abs(s.vectors(0, 1) - r) < 1e-14);
    CHECK(std::abs(s.vectors(1, 1) - r) < 1e-14);
}

TEST_CASE("eigh: 2x2 blocks with eigenvalues +-Omega0") {
    // Two antidiagonal blocks [[0, 1], [1, 0]] and [[0, -1], [-1, 0]].
    const ComplexMat h(4, {0.0, 1.0, 0.0, 0.0,  //
                           1.0, 0.0, 0.0, 0.0,  //
                           0.0, 0.0, 0.0, -1.0, //
                           0.0, 0.0, -1.0, 0.0});
    const auto s = eigh(h);
    CHECK(s.values[0] == doctest::Approx(-1.0));
    CHECK(s.values[1] == doctest::Approx(-1.0));
    CHECK(s.values[2] == doctest::Approx(1.0));
    CHECK(s.values[3] == doctest::Approx(1.0));
    CHECK(s.groups.size() == 2);
}

TEST_CASE("eigh: error paths") {
    ComplexMat bad(2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(eigh(bad), InvalidMatrix);
    const ComplexMat nonHerm(2, {0.0, 1.0, 0.0, 0.0});
    CHECK_THROWS_AS(eigh(nonHerm), InvalidMatrix);
    CHECK_THROWS_AS(eigh(ComplexMat{}), InvalidMatrix);
}

TEST_CASE("eigh: reconstruction and orthonormality on random Hermitian matrices") {
    std::mt19937_64 rng(20240611);
    std::uniform_int_distribution<std::size_t> dims(2, 8);
    double worstRecon = 0.0, worstOrtho = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = dims(rng);
        const ComplexMat h = random_hermitian(n, rng);
        const auto s = eigh(h);
        const double scale = inf_norm(h);
        worstRecon = std::max(worstRecon, max_norm(reconstruct(s) - h) / scale);
        worstOrtho = std::max(worstOrtho, unitarity_defect(s.vectors));
        const ComplexMat d = s.vectors.adjoint() * h * s.vectors;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) REQUIRE(std::abs(d(i, j)) <= 1e-10 * scale);
        for (std::size_t k = 1; k < n; ++k) REQUIRE(s.values[k] >= s.values[k - 1]);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                const bool same = s.group_of(a) == s.group_of(b);
                REQUIRE(same == (std::abs(s.values[a] - s.values[b]) <= s.degTol));
            }
    }
    CHECK(worstRecon <= 1e-10);
    CHECK(worstOrtho <= 1e-12);
}

TEST_CASE("propagator: closed forms and unitarity") {
    CHECK(max_norm(propagator(ComplexMat(3), 0.7) - ComplexMat::identity(3)) == 0.0);

    const ComplexMat hz(2, {kPi / 2.0, 0.0, 0.0, -kPi / 2.0});
    const ComplexMat u = propagator(hz, 1.0);
    CHECK(std::abs(u(0, 0) - std::polar(1.0, -kPi / 2.0)) < 1e-14);
    CHECK(std::abs(u(1, 1) - std::polar(1.0, kPi / 2.0)) < 1e-14);
    CHECK(std::abs(u(0, 1)) < 1e-15);

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        const ComplexMat h = random_hermitian(2 + trial % 7, rng);
        const double dt = 10.0 * frac(rng) / inf_norm(h);
        REQUIRE(unitarity_defect(propagator(h, dt)) <= 1e-10);
    }
    CHECK_THROWS_AS(propagator(hz, std::numeric_limits<double>::infinity()), InvalidArgument);
}

TEST_CASE("bessel_j1: frozen values from the power series") {
    CHECK(bessel_j1(0.0) == 0.0);
    // Frozen from bessel_series(1, x) in test_util.hpp.
    CHECK(bessel_series(1, 1.0) == doctest::Approx(0.4400505857).epsilon(1e-10));
    CHECK(bessel_series(1, 0.1) == doctest::Approx(0.0499375260).epsilon(1e-9));
    CHECK(std::abs(bessel_j1(1.0) - 0.4400505857449335) < 1e-10);
    CHECK(std::abs(bessel_j1(0.1) - 0.0499375260163197) < 1e-10);
    CHECK(bessel_j1(-1.0) == doctest::Approx(-bessel_j1(1.0)));
    CHECK_THROWS_AS(bessel_j1(50.5), DomainError);
    CHECK_NOTHROW(bessel_j1(50.0));
}

TEST_CASE("bessel_j1: series agreement and d/dx[x J1] = x J0 on [0, 10]") {
    const double h = 1e-5;
    for (int i = 0; i < 100; ++i) {
        const double x = 0.05 + 9.9 * i / 99.0;
        REQUIRE(std::abs(bessel_j1(x) - bessel_series(1, x)) <= 1e-10);
        const double lhs = ((x + h) * bessel_j1(x + h) - (x - h) * bessel_j1(x - h)) / (2.0 * h);
        REQUIRE(std::abs(lhs - x * bessel_series(0, x)) <= 1e-8);
    }
}

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return t;
}

}  // namespace

TEST_CASE("fit_oscillation: exact cosine") {
    const double w = mhz_to_angular(1.5);
    const auto t = linspace(0.0, 2.0, 256);
    std::vector<double> p(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) p[i] = 0.5 - 0.5 * std::cos(w * t[i]);
    const auto r = fit_oscillation(t, p);
    CHECK(std::abs(r.omega / w - 1.0) < 1e-3);
    CHECK(r.amplitude == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(r.offset == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(std::abs(std::abs(r.phase) - kPi) < 1e-6);
    CHECK(r.residualRMS < 1e-8);
}

TEST_CASE("fit_oscillation: seeded Gaussian noise") {
    const double w = mhz_to_angular(1.5);
    const auto t = linspace(0.0, 2.0, 256);
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> noise(0.0, 0.02);
    std::vector<double> p(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) p[i] = 0.5 - 0.5 * std::cos(w * t[i]) + noise(rng);
    const auto r = fit_oscillation(t, p);
    CHECK(std::abs(r.omega / w - 1.0) < 1e-2);
    CHECK(r.residualRMS == doctest::Approx(0.02).epsilon(0.2));
}

TEST_CASE("fit_oscillation: error paths") {
    const auto t = linspace(0.0, 2.0, 128);
    std::vector<double> flat(t.size(), 0.3);
    CHECK_THROWS_AS(fit_oscillation(t, flat), NoOscillation);

    auto skewed = t;
    skewed[10] += 1e-3;
    std::vector<double> p(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) p[i] = std::cos(10.0 * t[i]);
    CHECK_THROWS_AS(fit_oscillation(skewed, p), InvalidTrace);

    const auto shortT = linspace(0.0, 1.0, 16);
    CHECK_THROWS_AS(fit_oscillation(shortT, std::vector<double>(16, 0.0)), InvalidTrace);

    // Less than two periods in the window.
    std::vector<double> slow(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) slow[i] = std::cos(kTwoPi * 0.6 * t[i]);
    CHECK_THROWS_AS(fit_oscillation(t, slow), NoOscillation);
}

TEST_CASE("fit_oscillation: rescaling time rescales omega") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> freq(6.0, 20.0), ph(-3.0, 3.0), scale(0.01, 100.0);
    std::normal_distribution<double> noise(0.0, 0.01);
    for (int trial = 0; trial < 50; ++trial) {
        const double w = freq(rng), phi = ph(rng), c = scale(rng);
        const auto t = linspace(0.0, 3.0, 300);
        std::vector<double> p(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) p[i] = 0.4 + 0.3 * std::cos(w * t[i] + phi) + noise(rng);
        std::vector<double> ts(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) ts[i] = c * t[i];
        const auto a = fit_oscillation(t, p);
        const auto b = fit_oscillation(ts, p);
        REQUIRE(std::abs(b.omega * c / a.omega - 1.0) < 1e-9);
    }
}
