#include <doctest.h>

#include <cmath>
#include <random>

#include "tunnelion/core.hpp"
#include "tunnelion/specfun.hpp"

using namespace tunnelion;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("Airy values at the origin") {
    const AiryValues v = airy(0.0);
    CHECK(v.ai.real() == doctest::Approx(0.355028053887817239).epsilon(1e-15));
    CHECK(v.aip.real() == doctest::Approx(-0.258819403792806798).epsilon(1e-15));
    CHECK(v.bi.real() == doctest::Approx(0.614926627446000736).epsilon(1e-15));
    CHECK(v.bip.real() == doctest::Approx(0.448288357353826357).epsilon(1e-15));
}

TEST_CASE("Airy Wronskian over random complex arguments") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> r(0.0, 30.0), th(-kPi, kPi);
    double worst = 0.0;
    for (int i = 0; i < 400; ++i) {
        const cplx z = std::polar(r(rng), th(rng));
        if (std::abs(std::real(2.0 / 3.0 * std::pow(z, 1.5))) > 600.0) continue;
        const AiryValues v = airy(z);
        const cplx w = v.ai * v.bip - v.aip * v.bi;
        // Normalize by the size of the products so large |Bi| is not penalized.
        const double scale = std::max(1.0, std::abs(v.ai * v.bip) + std::abs(v.aip * v.bi)) / (1.0 / kPi);
        worst = std::max(worst, std::abs(w - 1.0 / kPi) * kPi / scale);
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("Airy satisfies w'' = z w") {
    for (cplx z : {cplx(1.3, 0.4), cplx(-5.0, 2.0), cplx(9.0, -1.0), cplx(-20.0, 0.0)}) {
        const double h = 1e-4;
        const cplx d2 = (airy_ai(z + h) - 2.0 * airy_ai(z) + airy_ai(z - h)) / (h * h);
        CHECK(std::abs(d2 - z * airy_ai(z)) <= 1e-5 * std::max(1.0, std::abs(z * airy_ai(z))));
    }
}

TEST_CASE("log gamma and reciprocal gamma") {
    for (double x : {0.5, 1.0, 2.5, 10.0, 170.5}) CHECK(log_gamma(x).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
    CHECK(std::abs(rgamma(0.0)) == 0.0);
    CHECK(std::abs(rgamma(-3.0)) == 0.0);
    CHECK(rgamma(5.0).real() == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
    // Reflection |Gamma(1/2 + i y)|^2 = pi / cosh(pi y)
    for (double y : {0.3, 2.0, 15.0}) {
        const double lhs = 2.0 * log_gamma(cplx(0.5, y)).real();
        CHECK(lhs == doctest::Approx(std::log(kPi / std::cosh(kPi * y))).epsilon(1e-12));
    }
}

TEST_CASE("D_n reduces to Hermite functions") {
    for (cplx z : {cplx(0.7, 0.0), cplx(-2.0, 1.0), cplx(3.5, -0.5)}) {
        const cplx g = std::exp(-z * z / 4.0);
        CHECK(rel(pcf_d(0.0, z), g) < 1e-12);
        CHECK(rel(pcf_d(1.0, z), z * g) < 1e-12);
        CHECK(rel(pcf_d(2.0, z), (z * z - 1.0) * g) < 1e-10);
    }
}

TEST_CASE("D_a reference values") {
    // 30-digit reference evaluations
    CHECK(rel(pcf_d({12.0, -3.0}, {6.0, 6.0}), {-2.8574926760610664588e11, -2.5381577388172966830e12}) < 1e-9);
    CHECK(rel(pcf_d({12.0, -3.0}, {1.0, 1.0}), {1.1995080635e6, -1.0804038173e7}) < 1e-9);
    CHECK(rel(pcf_d({14.0, -3.0}, {6.0, 6.0}), {2.0796488625626096998e14, 3.7773286093080761231e13}) < 1e-9);
    CHECK(rel(pcf_d({12.0, -3.0}, {0.0, 6.0}), {7.7336014301e15, 1.7060409330e15}) < 1e-9);
    CHECK(rel(pcf_d(12.0, {0.0, 6.0}), 7.59911034330232417e13) < 1e-9);
    CHECK(rel(pcf_d({-0.5, 40.0}, {3.0, -2.0}), {2.2309998420457836e10, 1.1511413554435188e11}) < 1e-9);
    CHECK(rel(pcf_d(-30.5, {8.0, 1.0}), {1.5406571040690247e-37, -8.7592399244278706e-38}) < 1e-9);
}

TEST_CASE("D_a recurrence over random complex order and argument") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ar(-40.0, 40.0), ai(-20.0, 20.0), zr(0.0, 25.0), th(-kPi, kPi);
    double worst = 0.0;
    int flagged = 0;
    for (int i = 0; i < 200; ++i) {
        const cplx a(ar(rng), ai(rng));
        const cplx z = std::polar(zr(rng), th(rng));
        const PcfScaled m = pcf_d_scaled(a - 1.0, z), c0 = pcf_d_scaled(a, z), p = pcf_d_scaled(a + 1.0, z);
        if (m.degraded || c0.degraded || p.degraded) {
            ++flagged;
            continue;
        }
        const double ref = c0.log_scale;
        const cplx dm = m.d * std::exp(m.log_scale - ref), dc = c0.d, dp = p.d * std::exp(p.log_scale - ref);
        const double scale = std::abs(dp) + std::abs(z * dc) + std::abs(a * dm);
        worst = std::max(worst, std::abs(dp - z * dc + a * dm) / scale);
    }
    CHECK(worst <= 1e-8);
    CHECK(flagged <= 20);
}

TEST_CASE("D_a derivative identity D' = z D / 2 - D_{a+1}") {
    for (cplx a : {cplx(0.3, 0.0), cplx(-2.5, 1.0), cplx(12.0, -3.0)}) {
        for (cplx z : {cplx(1.0, 0.5), cplx(-3.0, 0.2), cplx(6.0, 6.0)}) {
            const PcfValue v = pcf_d_full(a, z);
            CHECK(rel(v.dp, 0.5 * z * v.d - pcf_d(a + 1.0, z)) < 1e-9);
        }
    }
}

TEST_CASE("the two D backends agree") {
    for (cplx a : {cplx(-0.5, 5.0), cplx(3.0, -8.0), cplx(-20.0, 1.0)}) {
        for (cplx z : {cplx(2.0, 1.0), cplx(-4.0, 3.0), cplx(7.0, -2.0)}) {
            const PcfCrossCheck cc = pcf_d_crosscheck(a, z);
            CHECK(cc.rel_diff <= 1e-8);
        }
    }
}

TEST_CASE("scaled D matches the unscaled value") {
    const cplx a(-3.3, 2.0), z(5.0, -1.5);
    const PcfScaled s = pcf_d_scaled(a, z);
    CHECK(rel(s.d * std::exp(s.log_scale), pcf_d(a, z)) < 1e-12);
}

TEST_CASE("root finder is idempotent") {
    auto f = [](cplx z) { return z * z * z - 2.0 * z + 2.0; };
    const ComplexSaddle r = find_complex_root(f, cplx(0.5, 0.8), 1e-14);
    CHECK(std::abs(f(r.root)) < 1e-12);
    const ComplexSaddle again = find_complex_root(f, r.root, 1e-14);
    CHECK(std::abs(again.root - r.root) < 1e-13);
    CHECK(again.iterations <= 1);
}

TEST_CASE("root finder on a transcendental equation") {
    auto f = [](cplx z) { return std::exp(z) - 2.0; };
    const ComplexSaddle r = find_complex_root(f, cplx(3.0, 2.0), 1e-14);
    CHECK(std::abs(std::exp(r.root) - 2.0) < 1e-12);
}
