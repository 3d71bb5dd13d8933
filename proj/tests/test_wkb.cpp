#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <thread>

#include "tunnelion/errors.hpp"
#include "tunnelion/wkb.hpp"

using namespace tunnelion;

namespace {

constexpr double kKappa = 90.0;

BarrierModel coulomb(double ratio, double c = kSpeedOfLight) {
    const PhysParams p = PhysParams::from_ratio(kKappa, ratio, 0.05, IpMode::nonrelativistic, Tier::NonRel, c);
    return BarrierModel::tunnel_ionization(p, Shape::Coulomb1D);
}

}  // namespace

TEST_CASE("closed-form exponents") {
    SUBCASE("square") {
        const double V0 = 10.0, a = 0.7, eps = 4.0;
        CHECK(tunneling_exponent(BarrierModel::square(V0, a), eps, 0.0, 0.0, Tier::NonRel) ==
              doctest::Approx(2.0 * a * std::sqrt(2.0 * (V0 - eps))).epsilon(1e-10));
    }
    SUBCASE("linear") {
        const double V0 = 10.0, F = 3.0, eps = 4.0;
        CHECK(tunneling_exponent(BarrierModel::linear(V0, F), eps, 0.0, 0.0, Tier::NonRel) ==
              doctest::Approx(4.0 * std::sqrt(2.0) / 3.0 * std::pow(V0 - eps, 1.5) / F).epsilon(1e-9));
    }
    SUBCASE("zero range, nonrelativistic") {
        const PhysParams p = PhysParams::from_ratio(kKappa, 1.0 / 30.0, 0.05);
        const BarrierModel b = BarrierModel::tunnel_ionization(p, Shape::ZeroRange);
        CHECK(tunneling_exponent(b, -0.5 * kKappa * kKappa, 0.0, 0.0, Tier::NonRel) ==
              doctest::Approx(2.0 * std::pow(kKappa, 3) / (3.0 * p.E0)).epsilon(1e-9));
    }
}

TEST_CASE("transverse momentum only increases the exponent") {
    const BarrierModel b = coulomb(1.0 / 30.0);
    const double eps = -0.5 * kKappa * kKappa;
    const double e0 = tunneling_exponent(b, eps, 0.0, 0.0, Tier::NonRel);
    CHECK(tunneling_exponent(b, eps, 5.0, 0.0, Tier::NonRel) > e0);
    CHECK(tunneling_exponent(b, eps, 0.0, -5.0, Tier::NonRel) > e0);
}

TEST_CASE("magnetic scan: bounded, single peak, shifted forward") {
    const BarrierModel b = coulomb(1.0 / 30.0);
    const double eps = -0.5 * kKappa * kKappa, Ip = 0.5 * kKappa * kKappa;
    const TunnelingAmplitudeGrid g =
        momentum_scan(b, eps, Tier::MagneticDipole, MomentumAxis::exit, default_scan_range(Ip, kSpeedOfLight));
    REQUIRE(g.values.size() == 201);
    for (double v : g.values) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
    }
    CHECK_FALSE(g.multiple_maxima);
    CHECK_FALSE(g.peak_at_edge);
    CHECK(g.peak_axis > 0.0);
    const TurningPoints tp = turning_points(b, eps, 0.0, g.peak_p_z, Tier::MagneticDipole);
    CHECK(g.peak_axis == doctest::Approx(b.q_z(g.peak_p_z, tp.xe)).epsilon(0.01));
}

TEST_CASE("nonrelativistic scan peaks at zero momentum") {
    const BarrierModel b = coulomb(1.0 / 30.0);
    const double eps = -0.5 * kKappa * kKappa, Ip = 0.5 * kKappa * kKappa;
    const TunnelingAmplitudeGrid g =
        momentum_scan(b, eps, Tier::NonRel, MomentumAxis::exit, default_scan_range(Ip, kSpeedOfLight));
    CHECK(std::abs(g.peak_axis) <= 1e-6 * Ip / kSpeedOfLight);
    CHECK(*std::max_element(g.values.begin(), g.values.end()) == doctest::Approx(1.0));
}

TEST_CASE("magnetic corrections vanish for large c") {
    const double c = 100.0 * kSpeedOfLight;
    const BarrierModel b = coulomb(1.0 / 30.0, c);
    const double eps = -0.5 * kKappa * kKappa;
    const double nr = tunneling_exponent(b, eps, 0.0, 0.0, Tier::NonRel);
    for (Tier t : {Tier::MagneticDipole, Tier::MagneticDipolePlusKinetic}) {
        CAPTURE(to_string(t));
        CHECK(std::abs(tunneling_exponent(b, eps, 0.0, 0.0, t) / nr - 1.0) <= 1e-4);
    }
}

TEST_CASE("shift curve: zero range stays at Ip/(3c)") {
    const double ratios[] = {1.0 / 40.0, 1.0 / 20.0};
    const auto zr = exit_shift_curve(Shape::ZeroRange, kKappa, ratios, Tier::MagneticDipole);
    const double target = 0.5 * kKappa * kKappa / (3.0 * kSpeedOfLight);
    for (const ShiftPoint& s : zr) CHECK(s.q_exit == doctest::Approx(target).epsilon(0.02));
}

TEST_CASE("concurrent scans are deterministic") {
    const BarrierModel b = coulomb(1.0 / 25.0);
    const double eps = -0.5 * kKappa * kKappa, Ip = 0.5 * kKappa * kKappa;
    const ScanRange r = default_scan_range(Ip, kSpeedOfLight, 101);
    TunnelingAmplitudeGrid g1, g2;
    std::thread t1([&] { g1 = momentum_scan(b, eps, Tier::MagneticDipole, MomentumAxis::exit, r); });
    std::thread t2([&] { g2 = momentum_scan(b, eps, Tier::MagneticDipole, MomentumAxis::exit, r); });
    t1.join();
    t2.join();
    CHECK(g1.values == g2.values);
    CHECK(g1.axis == g2.axis);
}

TEST_CASE("scan arguments are validated") {
    const BarrierModel b = coulomb(1.0 / 30.0);
    CHECK_THROWS_AS(momentum_scan(b, -4050.0, Tier::NonRel, MomentumAxis::exit, {1.0, 0.0, 11}), DomainError);
    CHECK_THROWS_AS(momentum_scan(b, -4050.0, Tier::NonRel, MomentumAxis::exit, {0.0, 1.0, 2}), DomainError);
}
