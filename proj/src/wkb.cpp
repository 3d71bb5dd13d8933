#include "tunnelion/wkb.hpp"

#include <algorithm>
#include <cmath>

#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"

namespace tunnelion {

double tunneling_exponent(const BarrierModel& b, double eps, double p_y, double p_z, Tier tier) {
    const TurningPoints tp = turning_points(b, eps, p_y, p_z, tier);
    auto px = [&](double x) {
        const long double p2 = px_squared(b, eps, p_y, p_z, x, tier);
        return p2 < 0.0L ? static_cast<double>(std::sqrt(-p2)) : 0.0;
    };
    if (b.shape() == Shape::Square) return 2.0 * integrate(px, tp.x0, tp.xe, 1e-12);
    return 2.0 * integrate_sqrt_ends(px, tp.x0, tp.xe, 1e-12);
}

ScanRange default_scan_range(double Ip, double c, std::size_t points) {
    return {-1.2 * Ip / c, 0.4 * Ip / c, points};
}

TunnelingAmplitudeGrid momentum_scan(const BarrierModel& b, double eps, Tier tier,
                                     MomentumAxis axis, const ScanRange& range) {
    if (range.points < 3) throw DomainError("momentum_scan: need at least 3 points");
    if (!(range.p_z_hi > range.p_z_lo)) throw DomainError("momentum_scan: empty p_z range");
    TunnelingAmplitudeGrid g;
    g.tier = tier;
    g.axis_kind = axis;
    g.p_z = linspace(range.p_z_lo, range.p_z_hi, range.points);
    const std::size_t n = g.p_z.size();
    g.axis.resize(n);
    std::vector<double> expo(n);
    const double ref = tunneling_exponent(b, eps, 0.0, 0.0, Tier::NonRel);
    parallel_for(n, [&](std::size_t i) {
        const double pz = g.p_z[i];
        const TurningPoints tp = turning_points(b, eps, 0.0, pz, tier);
        const double x = axis == MomentumAxis::entry ? tp.x0 : tp.xe;
        g.axis[i] = includes_magnetic_dipole(tier) ? b.q_z(pz, x) : pz;
        expo[i] = tunneling_exponent(b, eps, 0.0, pz, tier);
    });
    g.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.values[i] = std::exp(-(expo[i] - ref));

    const auto it = std::max_element(g.values.begin(), g.values.end());
    const std::size_t k = static_cast<std::size_t>(it - g.values.begin());
    int maxima = 0;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (g.values[i] > g.values[i - 1] && g.values[i] >= g.values[i + 1]) ++maxima;
    g.multiple_maxima = maxima > 1;
    if (k == 0 || k + 1 == n) {
        g.peak_at_edge = true;
        g.peak_axis = g.axis[k];
        g.peak_p_z = g.p_z[k];
        return g;
    }
    g.peak_axis = parabola_vertex(g.axis[k - 1], g.values[k - 1], g.axis[k], g.values[k],
                                  g.axis[k + 1], g.values[k + 1]);
    g.peak_p_z = parabola_vertex(g.p_z[k - 1], g.values[k - 1], g.p_z[k], g.values[k],
                                 g.p_z[k + 1], g.values[k + 1]);
    return g;
}

std::vector<ShiftPoint> exit_shift_curve(Shape shape, double kappa, std::span<const double> ratios,
                                         Tier tier, double c, std::size_t points) {
    std::vector<ShiftPoint> out;
    out.reserve(ratios.size());
    for (double r : ratios) {
        PhysParams p = PhysParams::from_ratio(kappa, r, 0.05, IpMode::nonrelativistic, tier, c);
        const BarrierModel b = BarrierModel::tunnel_ionization(p, shape);
        const double Ip = 0.5 * kappa * kappa;
        const ScanRange range = default_scan_range(Ip, c, points);
        const auto ex = momentum_scan(b, -Ip, tier, MomentumAxis::exit, range);
        const TurningPoints tp = turning_points(b, -Ip, 0.0, ex.peak_p_z, tier);
        const double q_entry =
            includes_magnetic_dipole(tier) ? b.q_z(ex.peak_p_z, tp.x0) : ex.peak_p_z;
        out.push_back({r, ex.peak_axis, q_entry});
    }
    return out;
}

}  // namespace tunnelion
