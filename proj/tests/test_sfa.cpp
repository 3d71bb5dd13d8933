#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"
#include "tunnelion/sfa.hpp"

using namespace tunnelion;

namespace {

constexpr double kKappa = 90.0;

PhysParams rel_params(double c = kSpeedOfLight) {
    return PhysParams::from_ratio(kKappa, 1.0 / 30.0, 10.0, IpMode::relativistic, Tier::NonRel, c);
}

}  // namespace

TEST_CASE("nonrelativistic density is even in p_y and p_z") {
    const PhysParams p = PhysParams::from_ratio(kKappa, 1.0 / 30.0, 10.0);
    for (double px : {0.0, 300.0}) {
        const double a = momentum_wavefunction({px, 4.0, 7.0}, p, SfaTier::NonRel).log_density;
        CHECK(momentum_wavefunction({px, -4.0, 7.0}, p, SfaTier::NonRel).log_density == doctest::Approx(a));
        CHECK(momentum_wavefunction({px, 4.0, -7.0}, p, SfaTier::NonRel).log_density == doctest::Approx(a));
    }
}

TEST_CASE("relativistic density is even in p_y only") {
    const PhysParams p = rel_params();
    const double a = momentum_wavefunction({0.0, 4.0, 7.0}, p, SfaTier::Relativistic).log_density;
    CHECK(momentum_wavefunction({0.0, -4.0, 7.0}, p, SfaTier::Relativistic).log_density ==
          doctest::Approx(a).epsilon(1e-12));
    CHECK(momentum_wavefunction({0.0, 4.0, -7.0}, p, SfaTier::Relativistic).log_density < a);
}

TEST_CASE("saddle solves the stationarity condition") {
    const PhysParams p = rel_params();
    for (SfaTier tier : {SfaTier::NonRel, SfaTier::Relativistic}) {
        for (double px : {-400.0, 0.0, 250.0}) {
            const ComplexSaddle s = saddle_time({px, 0.0, 10.0}, p, tier);
            CHECK(s.residual <= 1e-10);
            CHECK(s.root.imag() > 0.0);
        }
    }
}

TEST_CASE("peak sits on the closed-form ridge") {
    const PhysParams p = rel_params();
    const double px_max = 0.2 * p.E0 / p.omega;
    for (double f : {-1.0, 0.0, 0.6}) {
        const double px = f * px_max;
        CHECK(argmax_p_z(px, p, SfaTier::Relativistic, MapWeight::exponent) ==
              doctest::Approx(ridge_formula(px, p)).epsilon(0.01));
    }
}

TEST_CASE("forward shift vanishes in the nonrelativistic limit") {
    const double shift = argmax_p_z(0.0, rel_params(), SfaTier::Relativistic, MapWeight::exponent);
    const double limit = argmax_p_z(0.0, rel_params(100.0 * kSpeedOfLight), SfaTier::Relativistic,
                                    MapWeight::exponent);
    CHECK(shift > 0.0);
    CHECK(std::abs(limit) <= 0.02 * shift);
    CHECK(std::abs(argmax_p_z(0.0, rel_params(), SfaTier::NonRel, MapWeight::exponent)) <= 1e-3 * shift);
}

TEST_CASE("maps are normalized") {
    const PhysParams p = rel_params();
    const std::vector<double> px = linspace(-300.0, 300.0, 5);
    const std::vector<double> pz = linspace(-5.0, 25.0, 31);
    const MomentumMap m = detector_map(p, SfaTier::Relativistic, px, pz, MapWeight::exponent);
    REQUIRE(m.density.size() == px.size() * pz.size());
    CHECK(*std::max_element(m.density.begin(), m.density.end()) == doctest::Approx(1.0));
    for (double d : m.density) CHECK(d >= 0.0);
}

TEST_CASE("momentum outside the vector-potential amplitude is rejected") {
    const PhysParams p = rel_params();
    CHECK_THROWS_AS(momentum_wavefunction({1.01 * p.E0 / p.omega, 0.0, 0.0}, p, SfaTier::NonRel), DomainError);
}

TEST_CASE("amplitude forms within a few Keldysh times and then stays put") {
    const PhysParams p = PhysParams::from_ratio(1.0, 1.0 / 30.0, 0.005);
    const double tau_K = 1.0 / p.E0;
    const std::vector<double> t = linspace(-6.0 * tau_K, 6.0 * tau_K, 601);
    const FormationCurve fc = formation_amplitude(0.0, p, t);
    CHECK(fc.plateau_drift < 0.05);
    CHECK(fc.rise_time <= 3.0 * tau_K);
    CHECK(fc.t90 >= fc.t_s_re - 3.0 * tau_K);
    CHECK(std::abs(fc.amplitude.front()) < 0.1 * std::abs(fc.amplitude.back()));
}

TEST_CASE("photon momentum is shared between electron and ion") {
    const PhysParams p = rel_params();
    const MomentumShare s = ion_momentum_share(p, SfaTier::Relativistic);
    const double Ip = ionization_potential(kKappa, p.c, p.ip_mode);
    CHECK(s.electron_z + s.ion_z == doctest::Approx(Ip / p.c).epsilon(1e-9));
    CHECK(s.electron_z > 0.0);
}
