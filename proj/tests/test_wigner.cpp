#include <doctest.h>

#include <cmath>

#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"
#include "tunnelion/wigner.hpp"

using namespace tunnelion;

namespace {

double max_phase_gap(const SteadyState& a, const SteadyState& b) {
    double gap = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) gap = std::max(gap, std::abs(std::arg(a.u_plus[i] / b.u_plus[i])));
    return gap;
}

}  // namespace

TEST_CASE("closed-form and ODE solutions agree") {
    SteadyOptions closed, ode;
    closed.refine_phase = ode.refine_phase = false;
    ode.backend = SteadyBackend::ode;
    const std::vector<double> grid = linspace(-1.0, 6.0, 71);
    for (const BarrierModel& b : {BarrierModel::square(3.0, 1.5), BarrierModel::linear(3.0, 1.0),
                                  BarrierModel::parabolic(3.0, 0.8)}) {
        CAPTURE(to_string(b.shape()));
        const SteadyProblem pr = SteadyProblem::scattering(b, Tier::NonRel);
        const SteadyState c = pr.solve(1.0, 0.0, grid, closed);
        const SteadyState o = pr.solve(1.0, 0.0, grid, ode);
        CHECK(max_phase_gap(c, o) <= 1e-6);
        CHECK(c.matching_residual <= 1e-8);
    }
}

TEST_CASE("unwrapped phase has steps below pi/4") {
    const SteadyProblem pr = SteadyProblem::scattering(BarrierModel::square(3.0, 1.5), Tier::NonRel);
    const std::vector<double> grid = linspace(-10.0, 20.0, 7);
    const SteadyState s = pr.solve(1.0, 0.0, grid);
    REQUIRE(s.phi.size() > grid.size());
    for (std::size_t i = 1; i < s.phi.size(); ++i) CHECK(std::abs(s.phi[i] - s.phi[i - 1]) < kPi / 4.0);
}

TEST_CASE("far-field extrapolation in 1/x") {
    const FarField f = far_field([](double x) { return 2.0 + 3.0 / x; }, 10.0, 1e-12);
    CHECK(f.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.check == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.stable);
    const FarField g = far_field([](double x) { return std::sin(x); }, 10.0, 1e-12);
    CHECK_FALSE(g.stable);
}

TEST_CASE("dropping the growing term leaves the outside solution alone") {
    const SteadyProblem pr = SteadyProblem::scattering(BarrierModel::square(3.0, 4.0), Tier::NonRel);
    const std::vector<double> grid = linspace(-2.0, 6.0, 81);
    SteadyOptions keep, drop;
    keep.refine_phase = drop.refine_phase = false;
    drop.drop_growing = true;
    const SteadyState a = pr.solve(1.0, 0.0, grid, keep);
    const SteadyState b = pr.solve(1.0, 0.0, grid, drop);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] >= 0.0 && grid[i] <= 4.0) continue;
        CHECK(std::abs(a.u[i] - b.u[i]) <= 1e-12 * std::abs(a.u[i]));
    }
}

TEST_CASE("classical clock spends no time inside the barrier") {
    const double a = 2.0;
    const SteadyProblem pr = SteadyProblem::scattering(BarrierModel::square(3.0, a), Tier::NonRel);
    const std::vector<double> grid = linspace(-1.0, 4.0, 51);
    const Trajectory c = classical_trajectory(pr, 1.0, 0.0, grid);
    const double v = std::sqrt(2.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        const double expected = x < 0.0 ? x / v : (x <= a ? 0.0 : (x - a) / v);
        CHECK(c.tau[i] == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("thick square barrier delay approaches 1/sqrt((V0 - eps) eps)") {
    const double V0 = 2.0, eps = 1.0, a = 8.0;
    const SteadyProblem pr = SteadyProblem::scattering(BarrierModel::square(V0, a), Tier::NonRel);
    const ScatteringDelay d = scattering_delay(pr, eps, 0.0, linspace(-1.0, 3.0 * a, 200));
    CHECK(d.delay.stable);
    CHECK(d.delay.value == doctest::Approx(1.0 / std::sqrt((V0 - eps) * eps)).epsilon(0.01));
    CHECK(d.x_exit == doctest::Approx(a));
}

TEST_CASE("regime classifier") {
    const double kappa = 90.0;
    const PhysParams p30 = PhysParams::from_ratio(kappa, 1.0 / 30.0, 0.05);
    const PhysParams p17 = PhysParams::from_ratio(kappa, 1.0 / 17.0, 0.05);
    const RegimeReport r30 = classify_regime(BarrierModel::tunnel_ionization(p30, Shape::Coulomb1D), p30);
    const RegimeReport r17 = classify_regime(BarrierModel::tunnel_ionization(p17, Shape::Coulomb1D), p17);
    CHECK(r30.regime == Regime::deep);
    CHECK(r17.regime == Regime::near_threshold);
    CHECK(r30.scaled_field == doctest::Approx(std::pow(16.0 / 30.0, 5.0 / 3.0)));
    CHECK(r30.criterion < r17.criterion);
}

TEST_CASE("ionization delay is small deep in the tunneling regime") {
    const double kappa = 90.0, Ip = 0.5 * kappa * kappa;
    const TunnelDelay deep =
        tunnelion_delay(PhysParams::from_ratio(kappa, 1.0 / 30.0, 0.05), Shape::Coulomb1D, Tier::NonRel);
    const TunnelDelay near =
        tunnelion_delay(PhysParams::from_ratio(kappa, 1.0 / 17.0, 0.05), Shape::Coulomb1D, Tier::NonRel);
    CHECK(deep.tau_w.stable);
    CHECK(near.tau_w.stable);
    CHECK(deep.approximation == Approximation::linear);
    CHECK(near.approximation == Approximation::quadratic);
    CHECK(std::abs(deep.tau_w.value * Ip) < 1e-2);
    CHECK(near.tau_w.value * Ip > 100.0 * std::abs(deep.tau_w.value * Ip));
    CHECK(deep.x0 < deep.xe);
}

TEST_CASE("scaled delay does not depend on Ip without relativistic corrections") {
    const double ratios[] = {1.0 / 10.0};
    const double kappas[] = {31.6, 63.2};
    const Tier tiers[] = {Tier::NonRel};
    const auto rows = delay_vs_ip_scan(ratios, kappas, tiers);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].tau_w_Ip == doctest::Approx(rows[1].tau_w_Ip).epsilon(1e-3));
}
