#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "tunnelion/config.hpp"
#include "tunnelion/core.hpp"

namespace tunnelion {

// Field vector -E0 x^: the electron (charge -1) gains energy moving toward +x.
//
//   Square          V0 on [0, a]
//   Linear          theta(x) (V0 - F x)
//   Parabolic       theta(x) (V0 - beta x^2)      (beta already includes kappa^4)
//   Coulomb1D       -E0 x - kappa / x,  x > 0
//   ZeroRange       -E0 x,  x >= 0, entry fixed at x = 0
//   ParabolicCoord  -1/(4 zeta) - 1/(8 zeta^2) - E0 zeta / 8,  energy -1/8
enum class Shape { Square, Linear, Parabolic, Coulomb1D, ZeroRange, ParabolicCoord };

std::string_view to_string(Shape s);
Shape parse_shape(std::string_view s);

// A_z(x) = E0 * clamp(x, lo, hi); constant outside [lo, hi].
struct VectorPotentialZ {
    double E0 = 0.0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    long double operator()(long double x) const;
    double slope(double x) const;  // dA_z/dx
};

class BarrierModel {
public:
    static BarrierModel square(double V0, double a);
    static BarrierModel linear(double V0, double F);
    static BarrierModel parabolic(double V0, double beta);
    static BarrierModel coulomb(double kappa, double E0);
    static BarrierModel zero_range(double Ip, double E0);
    static BarrierModel parabolic_coord(double E0);

    // Coulomb1D or ZeroRange for the given parameters, with A_z = E0 x attached.
    static BarrierModel tunnel_ionization(const PhysParams& p, Shape shape);

    BarrierModel with_vector_potential(VectorPotentialZ az) const;
    BarrierModel with_light_speed(double c) const;

    Shape shape() const { return shape_; }
    double V0() const { return V0_; }
    double width() const { return a_; }
    double field() const { return F_; }
    double beta() const { return beta_; }
    double kappa() const { return kappa_; }
    double light_speed() const { return c_; }
    const std::optional<VectorPotentialZ>& vector_potential() const { return az_; }

    // Effective potential energy including the field term.
    double potential(double x) const { return static_cast<double>(potential_ld(x)); }
    long double potential_ld(long double x) const;
    double potential_d1(double x) const;
    double potential_d2(double x) const;

    double a_z(double x) const { return az_ ? static_cast<double>((*az_)(x)) : 0.0; }
    // Kinetic z momentum p_z + A_z(x)/c.
    double q_z(double p_z, double x) const { return p_z + a_z(x) / c_; }

    // Leftmost admissible coordinate (open for Coulomb-type singularities).
    double domain_lo() const;
    bool singular_at_origin() const;
    // Entry point fixed by the model (square, linear, parabolic, zero-range).
    std::optional<double> fixed_entry() const;
    // Coordinates where V or its derivative jumps.
    std::vector<double> breakpoints() const;
    // Length scale used to bound turning-point searches at energy eps.
    double length_scale(double eps) const;

    // Serialization to the flat key=value format (keys prefixed "barrier.").
    void write_config(Config& cfg) const;
    static BarrierModel from_config(const Config& cfg, const PhysParams& p);

private:
    Shape shape_ = Shape::Square;
    double V0_ = 0.0, a_ = 0.0, F_ = 0.0, beta_ = 0.0, kappa_ = 0.0, Ip_ = 0.0;
    double c_ = kSpeedOfLight;
    std::optional<VectorPotentialZ> az_;
};

// ---- gauge-invariant effective potential ----------------------------------

using ScalarField = std::function<double(double)>;

// Scalar and vector potential snapshot, phi(x, t) and A_x(x, t). Complex
// arguments allow exact complex-step differentiation.
struct PotentialPair {
    std::function<std::complex<double>(std::complex<double>, std::complex<double>)> phi;
    std::function<std::complex<double>(std::complex<double>, std::complex<double>)> a_x;
};

// E_x(x) = -d phi/dx - (1/c) dA_x/dt at time t.
ScalarField electric_field(const PotentialPair& pot, double t, double c = kSpeedOfLight);

class EffectivePotential {
public:
    EffectivePotential(ScalarField e_field, ScalarField binding, double origin = 0.0);

    // Line integral of E from the origin to x (energy of charge -1).
    double field_term(double x) const;
    double binding_term(double x) const { return binding_(x); }
    double operator()(double x) const { return field_term(x) + binding_term(x); }

private:
    ScalarField e_field_;
    ScalarField binding_;
    double origin_;
};

EffectivePotential effective_potential(ScalarField e_field, ScalarField binding,
                                       double origin = 0.0);

// ---- tier-dependent longitudinal momentum ----------------------------------

// eps - p_y^2/2 - q_z(x)^2/2; q_z includes A_z only for magnetic tiers.
double position_energy(const BarrierModel& b, double eps, double p_y, double p_z, double x,
                       Tier tier = Tier::MagneticDipole);

// Signed p_x^2 for the tier's dispersion relation (negative under the barrier).
long double px_squared(const BarrierModel& b, long double eps, long double p_y, long double p_z,
                       long double x, Tier tier);

struct LongitudinalMomentum {
    double magnitude;  // |p_x|
    bool evanescent;   // true under the barrier
};

LongitudinalMomentum longitudinal_momentum(const BarrierModel& b, double eps, double p_y,
                                           double p_z, double x, Tier tier);

struct TurningPoints {
    double x0, xe;
};

// Throws NoBarrierError when no classically forbidden region exists.
TurningPoints turning_points(const BarrierModel& b, double eps, double p_y, double p_z, Tier tier);

// Columns x, V_eff, eps_x, q_z.
void write_grid_csv(const std::filesystem::path& path, const BarrierModel& b, double eps,
                    double p_y, double p_z, Tier tier, std::span<const double> xs);

}  // namespace tunnelion
