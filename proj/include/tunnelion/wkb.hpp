#pragma once

#include <cstddef>
#include <vector>

#include "tunnelion/barrier.hpp"
#include "tunnelion/core.hpp"

namespace tunnelion {

// 2 * integral of |p_x| between the turning points; |T|^2 ~ exp(-exponent).
double tunneling_exponent(const BarrierModel& b, double eps, double p_y, double p_z, Tier tier);

enum class MomentumAxis { entry, exit };

struct TunnelingAmplitudeGrid {
    Tier tier = Tier::NonRel;
    MomentumAxis axis_kind = MomentumAxis::exit;
    std::vector<double> p_z;     // canonical momentum samples
    std::vector<double> axis;    // kinetic q_z at entry or exit
    std::vector<double> values;  // exp(-(exponent - nonrelativistic minimum))
    double peak_axis = 0.0;      // parabolic refinement of the discrete maximum
    double peak_p_z = 0.0;
    bool peak_at_edge = false;
    bool multiple_maxima = false;
};

struct ScanRange {
    double p_z_lo, p_z_hi;
    std::size_t points = 201;
};

// Canonical range [-1.2, 0.4] * Ip/c used for the tunnel-ionization barriers.
ScanRange default_scan_range(double Ip, double c, std::size_t points = 201);

TunnelingAmplitudeGrid momentum_scan(const BarrierModel& b, double eps, Tier tier,
                                     MomentumAxis axis, const ScanRange& range);

struct ShiftPoint {
    double field_ratio;  // E0 / Ea
    double q_exit;       // exit kinetic-momentum peak
    double q_entry;      // entry kinetic-momentum peak
};

// Peak exit momentum as a function of E0/Ea for a tunnel-ionization shape.
std::vector<ShiftPoint> exit_shift_curve(Shape shape, double kappa, std::span<const double> ratios,
                                         Tier tier, double c = kSpeedOfLight,
                                         std::size_t points = 201);

}  // namespace tunnelion
