#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"
#include "tunnelion/wigner.hpp"

namespace tunnelion {

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::wigner: return "wigner";
        case Provenance::classical: return "classical";
        case Provenance::packet_peak: return "packet-peak";
    }
    return "?";
}

namespace {

// Central difference of the positive-current phase with respect to one
// parameter. solve(sign * step) returns the state at the shifted parameter.
std::vector<double> phase_derivative(const std::function<SteadyState(double)>& solve, double step,
                                     const DerivativeOptions& opts, const char* what) {
    const std::array<double, 4> shifts{step, -step, 0.5 * step, -0.5 * step};
    const std::size_t nsolve = opts.richardson ? 4 : 2;
    std::vector<SteadyState> states(nsolve);
    parallel_for(nsolve, [&](std::size_t i) { states[i] = solve(shifts[i]); });

    auto central = [&](const SteadyState& plus, const SteadyState& minus, double h) {
        std::vector<double> d(plus.u_plus.size());
        for (std::size_t j = 0; j < d.size(); ++j) {
            const double dphi = std::arg(plus.u_plus[j] / minus.u_plus[j]);
            if (!(std::abs(dphi) < kPi / 2.0)) {
                std::ostringstream os;
                os << what << ": phase change " << dphi << " at x = " << plus.x[j]
                   << " exceeds pi/2; reduce the step";
                throw ConvergenceError(os.str());
            }
            d[j] = dphi / (2.0 * h);
        }
        return d;
    };
    std::vector<double> coarse = central(states[0], states[1], step);
    if (!opts.richardson) return coarse;
    std::vector<double> fine = central(states[2], states[3], 0.5 * step);

    double scale = 0.0;
    for (double v : fine) scale = std::max(scale, std::abs(v));
    std::vector<double> out(fine.size());
    for (std::size_t j = 0; j < fine.size(); ++j) {
        const double diff = std::abs(coarse[j] - fine[j]);
        if (diff > opts.tolerance * std::max(std::abs(fine[j]), 1e-3 * scale)) {
            std::ostringstream os;
            os.precision(12);
            os << what << " not converged at x = " << states[0].x[j] << ": step " << step << " gives "
               << coarse[j] << ", half step gives " << fine[j];
            throw ConvergenceError(os.str());
        }
        out[j] = (4.0 * fine[j] - coarse[j]) / 3.0;
    }
    return out;
}

double energy_step(double eps0, const DerivativeOptions& opts) {
    const double h = opts.rel_step * std::abs(eps0);
    if (!(h > 0.0)) throw DomainError("energy step must be positive (eps0 = 0?)");
    return h;
}

}  // namespace

Trajectory wigner_trajectory(const SteadyProblem& pr, double eps0, double p_z,
                             std::span<const double> grid, const DerivativeOptions& opts) {
    const double h = energy_step(eps0, opts);
    Trajectory t;
    t.provenance = Provenance::wigner;
    t.x.assign(grid.begin(), grid.end());
    t.tau = phase_derivative(
        [&](double d) { return pr.solve(eps0 + d, p_z, grid, opts.steady); }, h, opts,
        "energy derivative");
    return t;
}

Trajectory wigner_drift(const SteadyProblem& pr, double eps0, double p_z0,
                        std::span<const double> grid, const DerivativeOptions& opts) {
    const double dp = opts.p_step > 0.0 ? opts.p_step : opts.rel_step * std::sqrt(2.0 * std::abs(eps0));
    Trajectory t = wigner_trajectory(pr, eps0, p_z0, grid, opts);
    std::vector<double> d = phase_derivative(
        [&](double s) { return pr.solve(eps0, p_z0 + s, grid, opts.steady); }, dp, opts,
        "momentum derivative");
    t.z.resize(d.size());
    std::transform(d.begin(), d.end(), t.z.begin(), [](double v) { return -v; });
    return t;
}

Trajectory classical_trajectory(const SteadyProblem& pr, double eps0, double p_z,
                                std::span<const double> grid) {
    Trajectory t;
    t.provenance = Provenance::classical;
    t.x.assign(grid.begin(), grid.end());
    const std::size_t n = grid.size();
    t.tau.assign(n, 0.0);
    t.z.assign(n, 0.0);
    if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("grid must be ascending");

    const double x_exit = pr.exit(eps0, p_z);
    auto inv_v = [&](double x) { return 1.0 / pr.velocity(x, eps0, p_z); };
    auto vz_v = [&](double x) { return pr.z_velocity(x, eps0, p_z) / pr.velocity(x, eps0, p_z); };
    // Next to a smooth turning point k^2 is taken relative to the exit so that
    // the square-root substitution sees no rounding noise.
    const double q_exit = pr.q(std::nextafter(x_exit, 1e300), eps0, p_z);
    const bool smooth_exit = std::abs(q_exit) < 1e-9 * std::abs(pr.q(x_exit + 1e-3 * (1.0 + x_exit), eps0, p_z));
    // Substitution x = x_exit + u^2 with k^2 evaluated from u^2 directly.
    auto near_v = [&](double u) {
        const double x = x_exit + u * u;
        if (!smooth_exit) return pr.velocity(x, eps0, p_z);
        return std::sqrt(std::max(pr.k2_relative(x_exit, u * u, eps0, p_z), 0.0)) /
               pr.lorentz_factor(x, eps0);
    };
    auto inv_v_near = [&](double u) {
        const double v = near_v(u);
        return v > 0.0 ? 2.0 * u / v : 0.0;
    };
    auto vz_v_near = [&](double u) {
        const double v = near_v(u);
        return v > 0.0 ? 2.0 * u * pr.z_velocity(x_exit + u * u, eps0, p_z) / v : 0.0;
    };

    const bool has_z = pr.z_velocity(x_exit, eps0, p_z) != 0.0 ||
                       pr.z_velocity(grid.back(), eps0, p_z) != 0.0;

    double x_prev = x_exit, tau = 0.0, z = 0.0;
    bool first = true;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = grid[j];
        if (pr.is_scattering() && x < pr.entry()) {
            // Free incident motion, t = 0 at the entry.
            const double xm = pr.entry() - 1.0;
            const double v = pr.velocity(xm, eps0, p_z);
            t.tau[j] = (x - pr.entry()) / v;
            t.z[j] = (x - pr.entry()) * pr.z_velocity(xm, eps0, p_z) / v;
            continue;
        }
        if (x <= x_exit) continue;
        if (first) {
            const double um = std::sqrt(x - x_exit);
            tau += integrate(inv_v_near, 0.0, um, 1e-12, 12);
            if (has_z) z += integrate(vz_v_near, 0.0, um, 1e-12, 12);
            first = false;
        } else {
            tau += integrate(inv_v, x_prev, x, 1e-12, 8);
            if (has_z) z += integrate(vz_v, x_prev, x, 1e-12, 8);
        }
        x_prev = x;
        t.tau[j] = tau;
        t.z[j] = z;
    }
    return t;
}

FarField far_field(const std::function<double(double)>& d, double x_f, double floor) {
    FarField f;
    f.x_f = x_f;
    const double v1 = d(x_f), v2 = d(2.0 * x_f), v4 = d(4.0 * x_f);
    f.value = 2.0 * v2 - v1;
    f.check = 2.0 * v4 - v2;
    f.stable = std::abs(f.value - f.check) <= std::max(0.01 * std::abs(f.value), floor);
    return f;
}

namespace {

std::vector<double> with_far_points(std::span<const double> grid, double x_f) {
    std::vector<double> g(grid.begin(), grid.end());
    g.insert(g.end(), {x_f, 2.0 * x_f, 4.0 * x_f});
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

std::function<double(double)> lookup(const std::vector<double>& x, const std::vector<double>& a,
                                     const std::vector<double>& b) {
    return [&x, &a, &b](double xq) {
        const auto it = std::lower_bound(x.begin(), x.end(), xq);
        if (it == x.end() || *it != xq) throw DomainError("far-field point missing from the grid");
        const auto j = static_cast<std::size_t>(it - x.begin());
        return a[j] - b[j];
    };
}

}  // namespace

ScatteringDelay scattering_delay(const SteadyProblem& pr, double eps0, double p_z,
                                 std::span<const double> grid, const DerivativeOptions& opts,
                                 bool with_drift) {
    if (!pr.is_scattering()) throw UnsupportedError("scattering_delay needs a scattering problem");
    ScatteringDelay r;
    r.x_exit = pr.exit(eps0, p_z);
    const double x_f = 20.0 * r.x_exit;
    const std::vector<double> g = with_far_points(grid, x_f);
    r.wigner = with_drift ? wigner_drift(pr, eps0, p_z, g, opts) : wigner_trajectory(pr, eps0, p_z, g, opts);
    r.classical = classical_trajectory(pr, eps0, p_z, g);
    const double floor = 1e-6 * std::abs(r.classical.tau.back());
    r.delay = far_field(lookup(g, r.wigner.tau, r.classical.tau), x_f, floor);
    if (with_drift) r.drift = far_field(lookup(g, r.wigner.z, r.classical.z), x_f, 1e-6 * std::abs(r.classical.z.back()) + 1e-12);
    return r;
}

RegimeReport classify_regime(const BarrierModel& b, const PhysParams& p) {
    RegimeReport r;
    const double ratio = p.E0 / std::pow(p.kappa, 3);
    double eps = -ionization_potential(p.kappa, p.c, p.ip_mode);
    switch (b.shape()) {
        case Shape::Coulomb1D: r.scaled_field = std::pow(16.0 * ratio, 5.0 / 3.0); break;
        case Shape::ParabolicCoord:
            r.scaled_field = std::pow(9.0 * ratio, 5.0 / 3.0);
            r.over_barrier_boundary = r.scaled_field >= 1.0;
            eps = -0.125;
            break;
        case Shape::ZeroRange: r.scaled_field = std::pow(ratio, 2.0 / 3.0); break;
        default: r.scaled_field = std::numeric_limits<double>::quiet_NaN(); break;
    }
    try {
        const TurningPoints tp = turning_points(b, eps, 0.0, 0.0, Tier::NonRel);
        const double v1 = b.potential_d1(tp.xe), v2 = b.potential_d2(tp.xe);
        r.criterion = std::abs(v2 / std::pow(std::abs(v1), 4.0 / 3.0));
    } catch (const NoBarrierError&) {
        r.criterion = std::numeric_limits<double>::quiet_NaN();
        r.regime = Regime::over_barrier;
        return r;
    }
    const double s = std::isnan(r.scaled_field) ? r.criterion : r.scaled_field;
    r.regime = s < kDeepThreshold ? Regime::deep
               : s < kNearThreshold ? Regime::near_threshold
                                    : Regime::over_barrier;
    return r;
}

}  // namespace tunnelion
