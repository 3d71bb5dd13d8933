#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "tunnelion/barrier.hpp"
#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"

using namespace tunnelion;

TEST_CASE("effective potential is the same in length and velocity gauge") {
    const double E0 = 0.05;
    const PotentialPair length{[&](cplx x, cplx) { return E0 * x; }, [](cplx, cplx) { return cplx(0.0); }};
    const PotentialPair velocity{[](cplx, cplx) { return cplx(0.0); },
                                 [&](cplx, cplx t) { return kSpeedOfLight * E0 * t; }};
    auto binding = [](double x) { return -1.0 / std::sqrt(x * x + 2.0); };
    const EffectivePotential v1 = effective_potential(electric_field(length, 0.7), binding);
    const EffectivePotential v2 = effective_potential(electric_field(velocity, 0.7), binding);
    for (double x : linspace(-20.0, 20.0, 81)) CHECK(std::abs(v1(x) - v2(x)) <= 1e-12);
    // Field -E0 x^: charge -1 gains energy toward +x.
    CHECK(v1.field_term(2.0) == doctest::Approx(-E0 * 2.0).epsilon(1e-12));
}

TEST_CASE("kinetic momentum gains E0 a / c across the square barrier") {
    const double a = 0.2, E0 = 500.0, pz = -1.3;
    const BarrierModel b = BarrierModel::square(9000.0, a).with_vector_potential({E0, 0.0, a});
    CHECK(b.q_z(pz, a) - b.q_z(pz, 0.0) == doctest::Approx(E0 * a / kSpeedOfLight).epsilon(1e-14));
    CHECK(b.q_z(pz, -1.0) == doctest::Approx(pz));
    CHECK(b.q_z(pz, 5.0) == doctest::Approx(b.q_z(pz, a)));
    double prev = b.q_z(pz, -0.1);
    for (double x : linspace(-0.1, 0.3, 401)) {
        const double q = b.q_z(pz, x);
        CHECK(std::abs(q - prev) <= E0 * 0.001 / kSpeedOfLight * 1.0001);
        prev = q;
    }
}

TEST_CASE("turning points") {
    SUBCASE("square") {
        const TurningPoints tp = turning_points(BarrierModel::square(10.0, 0.5), 3.0, 0.0, 0.0, Tier::NonRel);
        CHECK(tp.x0 == doctest::Approx(0.0));
        CHECK(tp.xe == doctest::Approx(0.5));
    }
    SUBCASE("linear") {
        const double V0 = 10.0, F = 4.0, eps = 3.0;
        const TurningPoints tp = turning_points(BarrierModel::linear(V0, F), eps, 0.0, 0.0, Tier::NonRel);
        CHECK(tp.x0 == doctest::Approx(0.0));
        CHECK(tp.xe == doctest::Approx((V0 - eps) / F).epsilon(1e-12));
    }
    SUBCASE("coulomb entry lies inside the atom side") {
        const PhysParams p = PhysParams::from_ratio(90.0, 1.0 / 30.0, 0.05);
        const BarrierModel b = BarrierModel::tunnel_ionization(p, Shape::Coulomb1D);
        const TurningPoints tp = turning_points(b, -0.5 * 90.0 * 90.0, 0.0, 0.0, Tier::NonRel);
        CHECK(tp.x0 > 0.0);
        CHECK(tp.xe > tp.x0);
        CHECK(b.potential(tp.xe) == doctest::Approx(-0.5 * 90.0 * 90.0).epsilon(1e-9));
    }
    SUBCASE("no barrier above the top") {
        CHECK_THROWS_AS(turning_points(BarrierModel::square(1.0, 0.5), 2.0, 0.0, 0.0, Tier::NonRel), NoBarrierError);
    }
}

TEST_CASE("magnetic tiers raise the barrier where q_z is nonzero") {
    const PhysParams p = PhysParams::from_ratio(90.0, 1.0 / 30.0, 0.05);
    const BarrierModel b = BarrierModel::tunnel_ionization(p, Shape::ZeroRange);
    const double eps = -0.5 * 90.0 * 90.0, x = 0.1, pz = 0.0;
    const long double nr = px_squared(b, eps, 0.0, pz, x, Tier::NonRel);
    const long double md = px_squared(b, eps, 0.0, pz, x, Tier::MagneticDipole);
    CHECK(md < nr);
    CHECK(longitudinal_momentum(b, eps, 0.0, pz, 0.05, Tier::NonRel).evanescent);
    CHECK_FALSE(longitudinal_momentum(b, eps, 0.0, pz, 1.0, Tier::NonRel).evanescent);
}

TEST_CASE("barrier config round trip") {
    const BarrierModel b = BarrierModel::linear(7.5, 1.25).with_vector_potential({3.0, 0.0, 6.0});
    Config cfg;
    b.write_config(cfg);
    const BarrierModel r = BarrierModel::from_config(cfg, PhysParams{});
    CHECK(r.shape() == Shape::Linear);
    CHECK(r.V0() == 7.5);
    CHECK(r.field() == 1.25);
    REQUIRE(r.vector_potential().has_value());
    CHECK(r.vector_potential()->hi == 6.0);
    for (double x : {-1.0, 0.5, 3.0, 8.0}) CHECK(r.potential(x) == b.potential(x));
}

TEST_CASE("grid csv") {
    const auto path = std::filesystem::temp_directory_path() / "tunnelion_test_grid.csv";
    const std::vector<double> xs = linspace(0.0, 1.0, 5);
    write_grid_csv(path, BarrierModel::square(4.0, 0.5), 1.0, 0.0, 0.0, Tier::NonRel, xs);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,V_eff,eps_x,q_z");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 5);
    std::filesystem::remove(path);
}

TEST_CASE("invalid barriers") {
    CHECK_THROWS_AS(BarrierModel::square(1.0, -0.5), DomainError);
    CHECK_THROWS_AS(BarrierModel::linear(1.0, 0.0), DomainError);
}
