#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "tunnelion/wigner.hpp"

namespace tunnelion {

// Gaussian packet incident from the left, built from the steady states of a
// scattering problem: psi(x, t) = int dp G(p) e^{-i p x0} u_p(x) e^{-i p^2 t / 2}.
struct GaussianPacketSpec {
    double x0 = -4.0;  // center at t = 0
    double p0 = 1.0;   // central momentum
    double dp = 0.01;  // momentum width (|G|^2 has standard deviation dp)
    double p_z = 0.0;

    // p0 = sqrt(2 eps0), dp = rel_width * p0.
    static GaussianPacketSpec from_energy(double eps0, double rel_width = 0.01, double x0 = -4.0);

    double energy() const { return 0.5 * p0 * p0; }
    // Spatial standard deviation of |psi|^2 at t = 0.
    double width_x() const { return 0.5 / dp; }

    // Throws DomainError if the packet is not below the barrier top or overlaps
    // the barrier at t = 0.
    void validate(const BarrierModel& b) const;
};

struct PacketQuadrature {
    double span = 8.0;         // nodes cover p0 +- span * dp
    std::size_t panels = 64;   // composite Gauss-Legendre panels across the span
    double check_tol = 1e-3;   // allowed density change when the panels are doubled
    bool check = true;
};

struct PacketDensity {
    GaussianPacketSpec spec;
    std::vector<double> x, t;
    std::vector<double> density;  // row-major [i_t][i_x]
    std::vector<double> norm;     // trapezoidal integral of |psi|^2 over x per t
    std::size_t nodes = 0;
    std::size_t core_nodes = 0;   // nodes inside p0 +- 4 dp
    double quadrature_change = 0.0;

    double at(std::size_t it, std::size_t ix) const { return density[it * x.size() + ix]; }
    std::span<const double> row(std::size_t it) const {
        return {density.data() + it * x.size(), x.size()};
    }
};

// Throws ConvergenceError if doubling the nodes changes the density by more
// than check_tol of its maximum.
PacketDensity propagate_packet(const SteadyProblem& pr, const GaussianPacketSpec& spec,
                               std::span<const double> t, std::span<const double> x,
                               const PacketQuadrature& q = {});

struct PeakSample {
    double t = 0.0;
    double x = 0.0;              // refined argmax
    bool at_edge = false;        // maximum on the region boundary
    bool multimodal = false;
    std::vector<double> maxima;  // every local maximum above the threshold
};

struct PeakTrack {
    std::vector<PeakSample> samples;
    // x -> tau with tau = t + x0 / p0, the clock of wigner_trajectory.
    Trajectory trajectory;
    bool any_multimodal = false;
};

// Peak of the density restricted to [lo, hi]. Local maxima below
// rel_threshold of the largest one are ignored by the multimodality test.
PeakTrack track_peak(const PacketDensity& d, double lo, double hi, double rel_threshold = 0.05);

// Columns x, t, density.
void write_density_csv(const std::filesystem::path& path, const PacketDensity& d);

// Time at which the Wigner clock predicts the peak at x: tau(x) - x0 / p0.
double predicted_arrival(double tau, const GaussianPacketSpec& spec);

}  // namespace tunnelion
