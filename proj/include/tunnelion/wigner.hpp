#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tunnelion/barrier.hpp"
#include "tunnelion/core.hpp"

namespace tunnelion {

using cplx = std::complex<double>;

enum class SteadyBackend { closed_form, ode };

// How the tunnel-ionization barrier is represented around the exit x_e.
enum class Approximation { automatic, linear, quadratic, exact };

enum class Regime { deep, near_threshold, over_barrier };

std::string_view to_string(SteadyBackend b);
std::string_view to_string(Approximation a);
std::string_view to_string(Regime r);
SteadyBackend parse_backend(std::string_view s);
Approximation parse_approximation(std::string_view s);

// ---- stationary x-motion ---------------------------------------------------
//
// Every supported problem reduces to u'' = q(x) u with q piecewise smooth:
//   NonRel, MagneticDipole   q = 2 (V - eps) + q_z(x)^2
//   KleinGordon              q = -(2 W + W^2 / c^2) + p_z^2,  W = eps - V
// On each region q is a polynomial (closed forms: plane waves, Airy, D_nu)
// except for the exact Coulomb barrier, which only the ODE backend handles.

struct Poly4 {
    std::array<double, 5> c{};
    double operator()(double x) const;
    double d1(double x) const;
    double d2(double x) const;
    int degree() const;
};

struct MatchingCoeffs {
    cplx R{0.0, 0.0};   // reflected amplitude (scattering problems)
    cplx T{1.0, 0.0};   // outgoing amplitude
    cplx C1{0.0, 0.0};  // first under-barrier coefficient (decaying to the right)
    cplx C2{0.0, 0.0};  // second under-barrier coefficient (growing to the right)
};

struct SteadyOptions {
    SteadyBackend backend = SteadyBackend::closed_form;
    bool refine_phase = true;   // insert grid points until every phase step is < pi/4
    bool drop_growing = false;  // zero C2 when evaluating inside an evanescent plane-wave region
    double ode_rel_tol = 1e-12;
};

struct SteadyState {
    std::vector<double> x;
    std::vector<cplx> u, du;
    std::vector<cplx> u_plus;  // positive-current component (incident part left of the barrier)
    std::vector<double> phi;   // unwrapped arg u_plus
    double eps = 0.0;
    double p_z = 0.0;
    Tier tier = Tier::NonRel;
    SteadyBackend backend = SteadyBackend::closed_form;
    MatchingCoeffs coeffs;
    double matching_residual = 0.0;  // max relative mismatch of (u, u') at region boundaries
    double k_in = 0.0, k_out = 0.0;  // plane-wave wavenumbers where defined, else 0
};

class SteadyProblem {
public:
    // Plane wave incident from x < 0 on a square, linear or parabolic barrier.
    static SteadyProblem scattering(const BarrierModel& b, Tier tier);

    // Outgoing solution on [x0, inf) for a Coulomb1D or ZeroRange barrier at the
    // nominal energy eps0. The approximation is fixed here (about x_e of eps0).
    static SteadyProblem tunnel_ionization(const BarrierModel& b, double eps0, double p_z, Tier tier,
                                           Approximation approx);

    bool is_scattering() const { return scattering_; }
    Tier tier() const { return tier_; }
    Approximation approximation() const { return approx_; }
    const BarrierModel& barrier() const { return barrier_; }
    // Left end of the grid domain for tunnel ionization (x0), 0 for scattering.
    double entry() const { return entry_; }
    // Exit point at the given energy (outermost zero of q).
    double exit(double eps, double p_z) const;

    // q(x) and the region index containing x.
    double q(double x, double eps, double p_z) const;
    std::size_t region_of(double x) const;
    const std::vector<double>& breakpoints() const { return breaks_; }

    // Local longitudinal velocity (relativistic for Klein-Gordon).
    double velocity(double x, double eps, double p_z) const;
    // Kinetic z momentum divided by the same Lorentz factor as the velocity.
    double z_velocity(double x, double eps, double p_z) const;
    // 1 + W/c^2 for Klein-Gordon, 1 otherwise.
    double lorentz_factor(double x, double eps) const;
    // -(q(x_ref + s) - q(x_ref)) expanded in s (no cancellation near a zero of q).
    double k2_relative(double x_ref, double s, double eps, double p_z) const;

    SteadyState solve(double eps, double p_z, std::span<const double> grid,
                      const SteadyOptions& opts = {}) const;

    // Polynomial form of q on region i, empty for non-polynomial regions.
    std::optional<Poly4> region_poly(std::size_t i, double eps, double p_z) const;

private:
    BarrierModel barrier_;
    Tier tier_ = Tier::NonRel;
    Approximation approx_ = Approximation::exact;
    bool scattering_ = true;
    double entry_ = 0.0;
    std::vector<double> breaks_;
    // Approximated V on [x0, inf) for tunnel ionization (unused when exact_coulomb_).
    Poly4 v_ti_;
    bool exact_coulomb_ = false;

    Poly4 v_poly(std::size_t region) const;
    Poly4 qz_poly(std::size_t region, double p_z) const;
    double region_lo(std::size_t i) const;
    double region_hi(std::size_t i) const;
    double exact_v(double x) const;

    SteadyState solve_closed(double eps, double p_z, std::span<const double> grid,
                             const SteadyOptions& opts) const;
    SteadyState solve_ode(double eps, double p_z, std::span<const double> grid,
                          const SteadyOptions& opts) const;
};

// Free-function form for scattering barriers.
SteadyState solve_steady(const BarrierModel& b, double eps, double p_z, Tier tier,
                         std::span<const double> grid, const SteadyOptions& opts = {});

// ---- trajectories ----------------------------------------------------------

enum class Provenance { wigner, classical, packet_peak };
std::string_view to_string(Provenance p);

struct Trajectory {
    Provenance provenance = Provenance::wigner;
    std::vector<double> x;
    std::vector<double> tau;
    std::vector<double> z;  // empty unless a drift was computed
};

struct DerivativeOptions {
    double rel_step = 1e-4;  // delta eps = rel_step * |eps0|
    double p_step = 0.0;     // delta p_z; 0 selects rel_step * sqrt(2 |eps0|)
    bool richardson = true;
    double tolerance = 0.005;  // allowed relative change when the step is halved
    SteadyOptions steady{.refine_phase = false};
};

// tau(x) = d phi_+ / d eps at eps0 (central differences).
Trajectory wigner_trajectory(const SteadyProblem& pr, double eps0, double p_z,
                             std::span<const double> grid, const DerivativeOptions& opts = {});

// z(x) = -d phi_+ / d p_z at p_z0, fixed eps0. tau is filled as well.
Trajectory wigner_drift(const SteadyProblem& pr, double eps0, double p_z0,
                        std::span<const double> grid, const DerivativeOptions& opts = {});

// Newtonian motion outside the barrier, zero time inside. Scattering: t = 0 at
// x = 0; tunnel ionization: t = 0 at the exit. z from the same clock.
Trajectory classical_trajectory(const SteadyProblem& pr, double eps0, double p_z,
                                std::span<const double> grid);

// ---- delays ----------------------------------------------------------------

struct FarField {
    double x_f = 0.0;          // evaluation point; values also at 2 x_f and 4 x_f
    double value = 0.0;        // extrapolated from (x_f, 2 x_f), linear in 1/x
    double check = 0.0;        // extrapolated from (2 x_f, 4 x_f)
    bool stable = false;       // |value - check| < 1 % of |value| or below the floor
};

// d(x) -> d(inf) by linear extrapolation in 1/x.
FarField far_field(const std::function<double(double)>& d, double x_f, double floor);

struct ScatteringDelay {
    Trajectory wigner, classical;
    double x_exit = 0.0;
    FarField delay;                 // tau - tau_c
    std::optional<FarField> drift;  // z - z_c (only with a vector potential)
};

// Far field = 20 x_exit. The trajectories are sampled on grid.
ScatteringDelay scattering_delay(const SteadyProblem& pr, double eps0, double p_z,
                                 std::span<const double> grid, const DerivativeOptions& opts = {},
                                 bool with_drift = false);

// ---- tunnel ionization ------------------------------------------------------

struct RegimeReport {
    double criterion = 0.0;     // |V''(x_e) / V'(x_e)^{4/3}|
    double scaled_field = 0.0;  // (16 E0/Ea)^{5/3}, (9 E0/Ea)^{5/3} or (E0/Ea)^{2/3}
    Regime regime = Regime::deep;
    bool over_barrier_boundary = false;  // parabolic-coordinate potential at scaled_field >= 1
};

inline constexpr double kDeepThreshold = 0.5;
inline constexpr double kNearThreshold = 1.5;

RegimeReport classify_regime(const BarrierModel& b, const PhysParams& p);

struct TunnelDelayOptions {
    Approximation approximation = Approximation::automatic;
    std::optional<SteadyBackend> backend;  // unset: ode for Klein-Gordon, closed form otherwise
    double far_field_factor = 20.0;                      // x_f = factor * x_e
    std::size_t grid_points = 400;
    DerivativeOptions derivative{};
};

struct TunnelDelay {
    RegimeReport regime;
    Approximation approximation = Approximation::linear;
    SteadyBackend backend = SteadyBackend::closed_form;
    Tier tier = Tier::NonRel;
    double Ip = 0.0;
    double p_z = 0.0;
    double x0 = 0.0, xe = 0.0;
    Trajectory wigner;     // tau_TI(x) = tau(x) - tau(x0)
    Trajectory classical;  // from the exit
    FarField tau_w;        // tau_c - tau_TI
};

// Coulomb1D or ZeroRange with the field of p. The magnetic tier uses the
// canonical p_z of the WKB exit-momentum peak.
TunnelDelay tunnelion_delay(const PhysParams& p, Shape shape, Tier tier,
                            const TunnelDelayOptions& opts = {});

struct DelayScanRow {
    double field_ratio = 0.0;
    double kappa = 0.0;
    double Ip = 0.0;
    Tier tier = Tier::NonRel;
    double tau_w = 0.0;
    double tau_w_Ip = 0.0;
    bool stable = false;
};

// Zero-range model, tau_W * I_p over kappa for each field ratio and tier.
std::vector<DelayScanRow> delay_vs_ip_scan(std::span<const double> ratios,
                                           std::span<const double> kappas,
                                           std::span<const Tier> tiers, double c = kSpeedOfLight,
                                           const TunnelDelayOptions& opts = {});

}  // namespace tunnelion
