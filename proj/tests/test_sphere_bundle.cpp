#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hopfdirac/linalg.hpp"
#include "hopfdirac/sphere_bundle.hpp"

using namespace hopfdirac;
using namespace hopfdirac::bundle;

TEST_CASE("flux_and_constants") {
    auto fc3 = flux_and_constants(FieldProfile::constant(3.0));
    CHECK(fc3.total_flux == doctest::Approx(1.5));
    CHECK(fc3.c == 0.5);
    CHECK(fc3.m == 1);

    auto fc0 = flux_and_constants(FieldProfile::constant(0.0));
    CHECK(fc0.total_flux == 0.0);
    CHECK(fc0.c == 0.0);
    CHECK(fc0.m == 0);

    // g(theta) = 3 + cos(theta): the cosine integrates to zero against sin
    std::vector<double> th, val;
    for (int i = 0; i <= 400; ++i) {
        double t = pi * static_cast<double>(i) / 400.0;
        th.push_back(t);
        val.push_back(3.0 + std::cos(t));
    }
    auto fcc = flux_and_constants(FieldProfile::sampled(th, val));
    // exact quadrature oracle: (1/4) int (3 + cos) sin = 3/2; the interpolant
    // reproduces cos to its own accuracy, then the half-integer snap lands
    CHECK(fcc.total_flux == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(fcc.c == 0.5);
    CHECK(fcc.m == 1);
}

TEST_CASE("fractional_split") {
    auto [c1, m1] = fractional_split(1.5);
    CHECK(c1 == 0.5);
    CHECK(m1 == 1);
    auto [c2, m2] = fractional_split(-0.5);
    CHECK(c2 == 0.5);
    CHECK(m2 == -1);
    auto [c3, m3] = fractional_split(2.0);
    CHECK(c3 == 0.0);
    CHECK(m3 == 2);
}

TEST_CASE("reduced_flux_density") {
    auto g3 = FieldProfile::constant(3.0);
    auto fc = flux_and_constants(g3);
    auto r0 = reduced_flux_density(g3, 0, fc);
    CHECK(r0.eval(1.0) == doctest::Approx(2.0));
    CHECK(flux_and_constants(r0).total_flux == doctest::Approx(1.0));
    auto r1 = reduced_flux_density(g3, 1, fc);
    CHECK(r1.eval(0.3) == doctest::Approx(0.0));
    CHECK(std::abs(flux_and_constants(r1).total_flux) <= 1e-12);

    auto g0 = FieldProfile::constant(0.0);
    auto fc0 = flux_and_constants(g0);
    auto rm2 = reduced_flux_density(g0, -2, fc0);
    CHECK(rm2.eval(2.0) == doctest::Approx(4.0));
    CHECK(flux_and_constants(rm2).total_flux == doctest::Approx(2.0));
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(FieldProfile::sampled({0.0, 0.5, 0.4, pi}, {1, 2, 3, 4}), ValidationError);
    CHECK_THROWS_AS(FieldProfile::sampled({0.1, pi}, {1, 2}), ValidationError);
    CHECK_THROWS_AS(FieldProfile::constant(std::nan("")), ValidationError);
}

TEST_CASE("build_gauge constant field closed form") {
    auto g = FieldProfile::constant(2.0);  // flux 1
    auto gauge = build_gauge(g, 1);
    // h = g log(4 + r^2), dh exact
    for (double r : {0.01, 0.5, 1.0, 7.0, 300.0}) {
        CHECK(gauge.h(r) == doctest::Approx(2.0 * std::log(4.0 + r * r)).epsilon(1e-12));
        CHECK(gauge.dh(r) == doctest::Approx(4.0 * r / (4.0 + r * r)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(build_gauge(g, 2), FluxMismatch);
}

TEST_CASE("build_gauge sampled profile matches the constant closed form") {
    // a sampled table of the constant 2 exercises the quadrature path
    std::vector<double> th, val;
    for (int i = 0; i <= 256; ++i) {
        th.push_back(pi * static_cast<double>(i) / 256.0);
        val.push_back(2.0);
    }
    auto gauge = build_gauge(FieldProfile::sampled(th, val), 1, 2048);
    for (double r : {1e-4, 0.03, 1.0, 2.0, 55.0, 1e4}) {
        CHECK(gauge.h(r) == doctest::Approx(2.0 * std::log(4.0 + r * r)).epsilon(1e-8));
        CHECK(gauge.dh(r) == doctest::Approx(4.0 * r / (4.0 + r * r)).epsilon(1e-9));
    }
}

TEST_CASE("ring gauge closed form and zero field") {
    auto zero = build_gauge(FieldProfile::constant(0.0), 0);
    CHECK(zero.h(3.0) == 0.0);
    CHECK(std::abs(zero.a_plus(cplx(1.0, 2.0))) == 0.0);
    CHECK(std::abs(zero.a_minus(cplx(0.3, -0.7))) == 0.0);

    auto ring = ring_gauge(2, 0.5);
    double Phi = 2.0 * pi * 2.0;
    for (double r : {0.1, 0.4, 0.8, 10.0})
        CHECK(ring.h(r) ==
              doctest::Approx((2.0 * Phi / pi) * std::log(std::max(r, 0.5))).epsilon(1e-13));
}

TEST_CASE("asymptotic slope h ~ 4 n log r") {
    auto g = FieldProfile::constant(6.0);  // n = 3
    auto gauge = build_gauge(g, 3);
    double c3 = gauge.h(1e3) - 12.0 * std::log(1e3);
    double c4 = gauge.h(1e4) - 12.0 * std::log(1e4);
    CHECK(std::abs(c3 - c4) <= 1e-4);
}

TEST_CASE("chart_flux_check returns 2 pi n") {
    auto uniform = build_gauge(FieldProfile::constant(2.0), 1);
    CHECK(chart_flux_check(uniform) == doctest::Approx(2.0 * pi).epsilon(1e-9));

    auto zero = build_gauge(FieldProfile::constant(0.0), 0);
    CHECK(std::abs(chart_flux_check(zero)) <= 1e-12);

    auto ring = ring_gauge(-3, 0.5);
    CHECK(chart_flux_check(ring) == doctest::Approx(-6.0 * pi).epsilon(1e-9));

    for (long n : {-2L, 1L, 4L}) {
        auto g = build_gauge(FieldProfile::constant(2.0 * static_cast<double>(n)), n);
        CHECK(std::abs(chart_flux_check(g) - 2.0 * pi * static_cast<double>(n)) <= 1e-8);
    }
}

TEST_CASE("a_minus is bounded near the origin and the transition relation holds") {
    auto gauge = build_gauge(FieldProfile::constant(4.0), 2);
    // no spurious singularity of a_- near z = 0
    for (double r : {1e-4, 3e-4, 1e-3, 1e-2}) {
        cplx z = std::polar(r, 0.7);
        CHECK(std::abs(gauge.a_minus(z)) <= 10.0);
    }
    // transition relation on |z| = 2 holds by construction
    for (int k = 0; k < 16; ++k) {
        cplx z = 2.0 * std::polar(1.0, 2.0 * pi * k / 16.0);
        cplx lhs = gauge.a_minus(z);
        cplx rhs = 4.0 / (std::conj(z) * std::conj(z)) * gauge.a_plus(-4.0 / z) +
                   iunit * 1.0 / std::conj(z);
        CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
}

TEST_CASE("Stokes consistency: FD curl of a reproduces the density") {
    auto gauge = build_gauge(FieldProfile::constant(2.0), 1);
    // curl a = (d alpha) density b(r) at sample points, via finite differences
    auto curl_at = [&](cplx z) {
        const double e = 1e-5;
        auto ax = [&](cplx w) { return std::real(gauge.a_plus(w) + std::conj(gauge.a_plus(w))); };
        // alpha = a dzbar + conj dz = 2 Re a dx + 2 Im a dy  with a = ax + i ay
        auto comp = [&](cplx w) {
            cplx a = gauge.a_plus(w);
            return std::array<double, 2>{2.0 * std::real(a), 2.0 * std::imag(a)};
        };
        (void)ax;
        double day_dx = (comp(z + e)[1] - comp(z - e)[1]) / (2.0 * e);
        double dax_dy = (comp(z + e * iunit)[0] - comp(z - e * iunit)[0]) / (2.0 * e);
        return day_dx - dax_dy;
    };
    for (double r : {0.3, 1.0, 1.7}) {
        cplx z = std::polar(r, 0.3);
        CHECK(curl_at(z) == doctest::Approx(gauge.density(r)).epsilon(1e-5));
    }
    // disc integrals of the density over both charts sum to 2 pi n
    auto disc = [&](auto density) {
        std::vector<double> rr, ff;
        for (int i = 0; i <= 4096; ++i) {
            double r = 1e-6 * std::pow(2.0 / 1e-6, static_cast<double>(i) / 4096.0);
            rr.push_back(r);
            ff.push_back(density(r) * 2.0 * pi * r);
        }
        return lin::simpson_log(rr, ff).first;
    };
    double plus = disc([&](double r) { return gauge.density(r); });
    // minus-chart density via the pullback r -> 4/r
    double minus = disc([&](double r) { return gauge.density(4.0 / r) * 16.0 / (r * r * r * r); });
    CHECK(plus + minus == doctest::Approx(2.0 * pi).epsilon(1e-6));
}
