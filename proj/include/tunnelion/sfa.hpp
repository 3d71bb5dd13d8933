#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "tunnelion/core.hpp"
#include "tunnelion/specfun.hpp"

namespace tunnelion {

// Zero-range SFA in A = (c E0 / omega) sin(eta) x^, laser propagating along z.
// Nonrelativistic quantities use t (eta = omega t); relativistic ones use eta.

enum class SfaTier { NonRel, Relativistic };

std::string_view to_string(SfaTier t);
SfaTier parse_sfa_tier(std::string_view s);

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

struct CVec3 {
    cplx x, y, z;
};

// Bound-state constants of the tier: kappa^2 and (relativistic) eps0 = c^2 - Ip.
struct SfaConstants {
    double Ip;
    double kappa2;
    double eps0;
};
SfaConstants sfa_constants(const PhysParams& p, SfaTier tier);

// Lambda = omega (eps / c^2 - p_z / c), eps = c sqrt(c^2 + p^2).
double light_cone_frequency(const Vec3& p, const PhysParams& params);

// Saddle time t_s (NonRel) or phase eta_s (Relativistic) with Im > 0, from
// q_x(s) = i sqrt(kappa^2 + q_perp^2). The residual is relative to that root.
ComplexSaddle saddle_time(const Vec3& p, const PhysParams& params, SfaTier tier);

struct MomentumAmplitude {
    Vec3 p;
    cplx amplitude;      // prefactor constant N = 1
    double log_density;  // log |amplitude|^2, finite even where the density underflows
    double exponent;     // amplitude = prefactor * exp(-exponent)
    SfaTier tier;
};

// Throws DomainError when |p_x| >= E0 / omega.
MomentumAmplitude momentum_wavefunction(const Vec3& p, const PhysParams& params, SfaTier tier);

// What a map or a peak search weighs: the full |amplitude|^2, or only its
// exponential factor exp(-2 exponent) (the leading saddle-point order, which the
// closed-form ridge describes).
enum class MapWeight { full, exponent };

std::string_view to_string(MapWeight w);
MapWeight parse_map_weight(std::string_view s);

double log_weight(const MomentumAmplitude& m, MapWeight w);

// Peak position along p_z at fixed p_x by Brent maximization.
double argmax_p_z(double p_x, const PhysParams& params, SfaTier tier,
                  MapWeight weight = MapWeight::full);

// Closed-form ridge p_z(p_x) with the 1/c^2 corrections.
double ridge_formula(double p_x, const PhysParams& params);

struct TrajectoryPoint {
    cplx s;   // time (NonRel) or phase (Relativistic) on the contour
    CVec3 x;  // coordinate
    CVec3 q;  // kinetic momentum
};

struct ComplexTrajectory {
    ComplexSaddle saddle;
    SfaTier tier;
    std::vector<TrajectoryPoint> under_barrier;  // s_s -> Re s_s
    std::vector<TrajectoryPoint> continuum;      // Re s_s -> Re s_s + span
    TrajectoryPoint entry;
    TrajectoryPoint exit;
};

// Contour: vertical segment from the saddle to the real axis, then along it.
ComplexTrajectory complex_trajectory(const Vec3& p, const PhysParams& params, SfaTier tier,
                                     std::size_t samples = 200, double continuum_span = 0.0);

TrajectoryPoint trajectory_point(const Vec3& p, const PhysParams& params, SfaTier tier,
                                 cplx s_s, cplx s);

// Final momentum p' belonging to exit momentum p at exit time t_e (Lambda of p'
// is solved self-consistently).
Vec3 exit_to_final(const Vec3& p_exit, double t_e, const PhysParams& params);

struct ExitState {
    double t_e;  // Re(eta_s) / omega
    Vec3 p_exit;
};

// Exit time from the saddle of p_final and the exit momentum mapping to it.
ExitState backpropagate_to_exit(const Vec3& p_final, const PhysParams& params);

// p_z = Ip/(3c) + omega p_x^2 / (2 c Lambda).
double exit_ridge_relation(double p_x, const PhysParams& params);

struct MomentumMap {
    std::vector<double> p_x;  // detector: p_x; exit: -A(omega t_e)/c
    std::vector<double> t_e;  // exit map only
    std::vector<double> p_z;
    std::vector<double> density;  // row-major [i_x][i_z], normalized to max 1
};

MomentumMap detector_map(const PhysParams& params, SfaTier tier, std::span<const double> p_x,
                         std::span<const double> p_z, MapWeight weight = MapWeight::full);
// Exit-time axis t_e and exit p_z.
MomentumMap exit_map(const PhysParams& params, std::span<const double> t_e,
                     std::span<const double> p_z, MapWeight weight = MapWeight::full);

// Parabolic refinement of the largest map entry along p_z in row i.
double row_peak_p_z(const MomentumMap& m, std::size_t i);

void write_map_csv(const std::filesystem::path& path, const MomentumMap& m);

struct FormationCurve {
    std::vector<double> t;
    std::vector<cplx> amplitude;  // scaled by exp(-i Phi(t_s))
    cplx saddle_phase;            // Phi(t_s)
    double t_s_re, t_s_im;
    double tau_K;
    double rise_time;       // 10% -> 90% of the final |amplitude|
    double t90;             // time at which 90% is first reached
    double plateau_drift;   // max relative variation for t >= Re t_s + 3 tau_K
};

// Amplitude accumulated up to each t of the (sorted) grid, NonRel.
FormationCurve formation_amplitude(double p_x, const PhysParams& params, std::span<const double> t);

struct MomentumShare {
    double electron_z;
    double ion_z;
};

// Photon momentum Ip/c split between the photoelectron peak and the ion.
MomentumShare ion_momentum_share(const PhysParams& params, SfaTier tier,
                                 MapWeight weight = MapWeight::exponent);

}  // namespace tunnelion
