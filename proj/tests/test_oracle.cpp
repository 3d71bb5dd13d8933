#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"
#include "tunnelion/oracle.hpp"

using namespace tunnelion;

namespace {

PacketDensity synthetic(std::span<const double> centers, double amplitude) {
    PacketDensity d;
    d.x = linspace(-5.0, 5.0, 201);
    d.t = {0.0};
    for (double x : d.x) {
        double v = 0.0;
        for (double c : centers) v += amplitude * std::exp(-8.0 * (x - c) * (x - c));
        d.density.push_back(v);
    }
    return d;
}

}  // namespace

TEST_CASE("incident packet moves at p0") {
    const SteadyProblem pr = SteadyProblem::scattering(BarrierModel::square(2.0, 1.0), Tier::NonRel);
    const GaussianPacketSpec spec = GaussianPacketSpec::from_energy(1.0, 0.1, -40.0);
    const std::vector<double> t = linspace(0.0, 10.0, 6);
    const std::vector<double> x = linspace(-60.0, -10.0, 501);
    const PacketDensity d = propagate_packet(pr, spec, t, x);
    const PeakTrack track = track_peak(d, -60.0, -10.0);
    REQUIRE(track.samples.size() == t.size());
    const double speed = (track.samples.back().x - track.samples.front().x) / (t.back() - t.front());
    CHECK(speed == doctest::Approx(spec.p0).epsilon(0.005));
    CHECK(track.samples.front().x == doctest::Approx(spec.x0).epsilon(0.01));
    CHECK_FALSE(track.any_multimodal);
}

TEST_CASE("norm is conserved through the collision") {
    const SteadyProblem pr = SteadyProblem::scattering(BarrierModel::square(2.0, 1.0), Tier::NonRel);
    const GaussianPacketSpec spec = GaussianPacketSpec::from_energy(1.0, 0.1, -30.0);
    const std::vector<double> t = linspace(0.0, 40.0, 5);
    const std::vector<double> x = linspace(-120.0, 80.0, 2001);
    const PacketDensity d = propagate_packet(pr, spec, t, x);
    for (double n : d.norm) CHECK(n == doctest::Approx(d.norm.front()).epsilon(0.01));
    CHECK(d.quadrature_change <= 1e-3);
}

TEST_CASE("an opaque barrier transmits nothing") {
    const SteadyProblem pr = SteadyProblem::scattering(BarrierModel::square(50.0, 2.0), Tier::NonRel);
    const GaussianPacketSpec spec = GaussianPacketSpec::from_energy(1.0, 0.1, -30.0);
    const std::vector<double> t = {40.0};
    const std::vector<double> x = linspace(-80.0, 60.0, 1401);
    const PacketDensity d = propagate_packet(pr, spec, t, x);
    double left = 0.0, right = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0.0) left += d.at(0, i);
        if (x[i] > 2.0) right += d.at(0, i);
    }
    CHECK(right < 1e-15 * left);
}

TEST_CASE("peak tracking ignores the overall scale") {
    const double one[] = {0.7};
    const PeakTrack a = track_peak(synthetic(one, 1.0), -5.0, 5.0);
    const PeakTrack b = track_peak(synthetic(one, 4.0), -5.0, 5.0);
    REQUIRE(a.samples.size() == 1);
    CHECK(a.samples[0].x == doctest::Approx(0.7).epsilon(1e-3));
    CHECK(a.samples[0].x == b.samples[0].x);
    CHECK_FALSE(a.samples[0].at_edge);
}

TEST_CASE("two separated peaks are flagged") {
    const double two[] = {-2.0, 2.0};
    const PeakTrack t = track_peak(synthetic(two, 1.0), -5.0, 5.0);
    CHECK(t.any_multimodal);
    CHECK(t.samples[0].maxima.size() == 2);
    const PeakTrack edge = track_peak(synthetic(two, 1.0), -1.0, 1.0);
    CHECK(edge.samples[0].at_edge);
}

TEST_CASE("packet placement is validated") {
    const BarrierModel b = BarrierModel::square(2.0, 1.0);
    CHECK_THROWS_AS(GaussianPacketSpec::from_energy(1.0, 0.05, -2.0).validate(b), DomainError);
    CHECK_THROWS_AS(GaussianPacketSpec::from_energy(3.0, 0.01, -40.0).validate(b), DomainError);
    CHECK_NOTHROW(GaussianPacketSpec::from_energy(1.0, 0.1, -40.0).validate(b));
}

TEST_CASE("Wigner clock arrival") {
    const GaussianPacketSpec spec = GaussianPacketSpec::from_energy(2.0, 0.01, -6.0);
    CHECK(predicted_arrival(0.0, spec) == doctest::Approx(3.0));
    CHECK(predicted_arrival(1.5, spec) == doctest::Approx(4.5));
}
