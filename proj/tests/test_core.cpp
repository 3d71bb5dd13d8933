#include <doctest.h>

#include <cmath>

#include "tunnelion/core.hpp"
#include "tunnelion/errors.hpp"

using namespace tunnelion;

TEST_CASE("Keldysh time times the field is kappa") {
    for (double kappa : {0.5, 1.0, 31.6, 90.0}) {
        for (double ratio : {1.0 / 50.0, 1.0 / 30.0, 1.0 / 17.0}) {
            const PhysParams p = PhysParams::from_ratio(kappa, ratio, 0.05);
            CHECK(derive_params(p).tau_K * p.E0 == doctest::Approx(kappa).epsilon(1e-15));
        }
    }
}

TEST_CASE("gamma xi c equals sqrt(2 Ip)") {
    for (IpMode mode : {IpMode::nonrelativistic, IpMode::relativistic}) {
        const PhysParams p = PhysParams::from_ratio(90.0, 1.0 / 30.0, 0.05, mode);
        const DerivedParams d = derive_params(p);
        CHECK(d.gamma * d.xi * p.c == doctest::Approx(std::sqrt(2.0 * d.Ip)).epsilon(1e-13));
    }
}

TEST_CASE("stronger field lowers gamma and raises E0/Ea") {
    double last_gamma = INFINITY, last_ratio = 0.0;
    for (double ratio : {0.01, 0.02, 0.04, 0.08}) {
        const DerivedParams d = derive_params(PhysParams::from_ratio(3.0, ratio, 0.05));
        CHECK(d.gamma < last_gamma);
        CHECK(d.field_ratio > last_ratio);
        last_gamma = d.gamma;
        last_ratio = d.field_ratio;
    }
}

TEST_CASE("atomic field uses the nonrelativistic Ip") {
    const PhysParams p = PhysParams::from_ratio(90.0, 1.0 / 30.0, 0.05, IpMode::relativistic);
    const DerivedParams d = derive_params(p);
    CHECK(d.Ea == doctest::Approx(std::pow(90.0, 3)));
    CHECK(d.Ip_nr == doctest::Approx(4050.0));
    // c^2 (1 - sqrt(1 - kappa^2/c^2)) exceeds kappa^2/2
    CHECK(d.Ip > d.Ip_nr);
    CHECK(d.Ip == doctest::Approx(p.c * p.c * (1.0 - std::sqrt(1.0 - 90.0 * 90.0 / (p.c * p.c)))));
}

TEST_CASE("relativistic Ip tends to kappa^2/2 as c grows") {
    const double nr = ionization_potential(90.0, kSpeedOfLight, IpMode::nonrelativistic);
    const double rel = ionization_potential(90.0, 100.0 * kSpeedOfLight, IpMode::relativistic);
    CHECK(std::abs(rel / nr - 1.0) < 1e-4);
}

TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(PhysParams::from_ratio(-1.0, 0.03, 0.05), DomainError);
    CHECK_THROWS_AS(PhysParams::from_ratio(1.0, 0.0, 0.05), DomainError);
    CHECK_THROWS_AS(PhysParams::from_ratio(1.0, 0.03, std::nan("")), DomainError);
    CHECK_THROWS_AS(PhysParams::from_ratio(200.0, 0.03, 0.05, IpMode::relativistic), DomainError);
    CHECK_NOTHROW(PhysParams::from_ratio(200.0, 0.03, 0.05, IpMode::nonrelativistic));
}

TEST_CASE("tier names round trip") {
    for (Tier t : {Tier::NonRel, Tier::MagneticDipole, Tier::MagneticDipolePlusKinetic, Tier::FullyRelativistic,
                   Tier::KleinGordon})
        CHECK(parse_tier(to_string(t)) == t);
    for (IpMode m : {IpMode::nonrelativistic, IpMode::relativistic}) CHECK(parse_ip_mode(to_string(m)) == m);
    CHECK_THROWS(parse_tier("Dirac"));
    CHECK_FALSE(includes_magnetic_dipole(Tier::NonRel));
    CHECK(includes_magnetic_dipole(Tier::MagneticDipole));
    CHECK(includes_magnetic_dipole(Tier::MagneticDipolePlusKinetic));
}
