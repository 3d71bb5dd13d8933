#include <algorithm>
#include <cmath>

#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"
#include "tunnelion/wigner.hpp"
#include "tunnelion/wkb.hpp"

namespace tunnelion {

namespace {

Approximation resolve(Approximation a, Shape shape, Tier tier, Regime regime) {
    if (shape == Shape::ZeroRange) return Approximation::exact;
    if (a != Approximation::automatic) return a;
    // The magnetic term is quadratic in x, so the magnetic tier always keeps V''.
    if (tier == Tier::MagneticDipole) return Approximation::quadratic;
    return regime == Regime::deep ? Approximation::linear : Approximation::quadratic;
}

}  // namespace

TunnelDelay tunnelion_delay(const PhysParams& p, Shape shape, Tier tier,
                            const TunnelDelayOptions& opts) {
    p.validate();
    if (shape != Shape::Coulomb1D && shape != Shape::ZeroRange)
        throw UnsupportedError("tunnel-ionization delay needs a Coulomb1D or ZeroRange barrier");
    TunnelDelay r;
    r.tier = tier;
    r.Ip = ionization_potential(p.kappa, p.c, p.ip_mode);
    const double eps0 = -r.Ip;
    const BarrierModel b = BarrierModel::tunnel_ionization(p, shape);
    r.regime = classify_regime(b, p);
    if (r.regime.regime == Regime::over_barrier)
        throw NoBarrierError("over-the-barrier regime: no tunnel-ionization delay");
    r.approximation = resolve(opts.approximation, shape, tier, r.regime.regime);
    r.backend = opts.backend.value_or(tier == Tier::KleinGordon ? SteadyBackend::ode
                                                                : SteadyBackend::closed_form);
    if (tier == Tier::MagneticDipole) {
        const TunnelingAmplitudeGrid g = momentum_scan(b, eps0, Tier::MagneticDipole, MomentumAxis::exit,
                                                       default_scan_range(r.Ip, p.c));
        r.p_z = g.peak_p_z;
    }
    const SteadyProblem pr = SteadyProblem::tunnel_ionization(b, eps0, r.p_z, tier, r.approximation);
    r.x0 = pr.entry();
    r.xe = pr.exit(eps0, r.p_z);

    const double x_f = opts.far_field_factor * r.xe;
    std::vector<double> grid = linspace(r.x0, 4.0 * x_f, std::max<std::size_t>(opts.grid_points, 8));
    grid.insert(grid.end(), {r.xe, x_f, 2.0 * x_f});
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    DerivativeOptions d = opts.derivative;
    d.steady.backend = r.backend;
    r.wigner = wigner_trajectory(pr, eps0, r.p_z, grid, d);
    const double t0 = r.wigner.tau.front();
    for (double& t : r.wigner.tau) t -= t0;
    r.classical = classical_trajectory(pr, eps0, r.p_z, grid);

    auto diff = [&](double x) {
        const auto it = std::lower_bound(grid.begin(), grid.end(), x);
        const auto j = static_cast<std::size_t>(it - grid.begin());
        return r.classical.tau[j] - r.wigner.tau[j];
    };
    r.tau_w = far_field(diff, x_f, 1e-3 / r.Ip);
    return r;
}

std::vector<DelayScanRow> delay_vs_ip_scan(std::span<const double> ratios,
                                           std::span<const double> kappas,
                                           std::span<const Tier> tiers, double c,
                                           const TunnelDelayOptions& opts) {
    std::vector<DelayScanRow> rows;
    for (double ratio : ratios)
        for (Tier tier : tiers)
            for (double kappa : kappas) {
                DelayScanRow row;
                row.field_ratio = ratio;
                row.kappa = kappa;
                row.tier = tier;
                rows.push_back(row);
            }
    parallel_for(rows.size(), [&](std::size_t i) {
        DelayScanRow& row = rows[i];
        const PhysParams p =
            PhysParams::from_ratio(row.kappa, row.field_ratio, 0.05, IpMode::nonrelativistic, row.tier, c);
        const TunnelDelay t = tunnelion_delay(p, Shape::ZeroRange, row.tier, opts);
        row.Ip = t.Ip;
        row.tau_w = t.tau_w.value;
        row.tau_w_Ip = t.tau_w.value * t.Ip;
        row.stable = t.tau_w.stable;
    });
    return rows;
}

}  // namespace tunnelion
