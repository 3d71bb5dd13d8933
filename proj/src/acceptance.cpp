#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "tunnelion/acceptance.hpp"
#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"
#include "tunnelion/oracle.hpp"
#include "tunnelion/sfa.hpp"
#include "tunnelion/specfun.hpp"
#include "tunnelion/wigner.hpp"
#include "tunnelion/wkb.hpp"

namespace tunnelion {

namespace {

constexpr double kKappa = 90.0;

struct Outcome {
    bool pass;
    std::string measured;
};

double rel_dev(double a, double b) { return std::abs(a / b - 1.0); }

// 1: exit and entry kinetic-momentum peaks of the Coulomb barrier.
Outcome wkb_coulomb_shift() {
    const auto t0 = std::chrono::steady_clock::now();
    const double ratio[] = {1.0 / 30.0};
    const ShiftPoint s = exit_shift_curve(Shape::Coulomb1D, kKappa, ratio, Tier::MagneticDipole).front();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const double unit = 0.5 * kKappa * kKappa / kSpeedOfLight;
    const double qe = s.q_exit / unit, qi = s.q_entry / unit;
    const bool ok = std::abs(qe - 0.28) <= 0.02 && std::abs(qi + 0.42) <= 0.03 && secs < 10.0;
    return {ok, fmt::format("exit {:.4f} Ip/c (0.28 +- 0.02), entry {:.4f} Ip/c (-0.42 +- 0.03), {:.2f} s", qe, qi,
                            secs)};
}

// 2: zero-range exit peak at Ip/(3c) for every field; Coulomb peak decreasing.
Outcome zero_range_independence() {
    const double ratios[] = {1.0 / 50.0, 1.0 / 30.0, 1.0 / 17.0};
    const auto zr = exit_shift_curve(Shape::ZeroRange, kKappa, ratios, Tier::MagneticDipole);
    const auto co = exit_shift_curve(Shape::Coulomb1D, kKappa, ratios, Tier::MagneticDipole);
    const double target = 0.5 * kKappa * kKappa / (3.0 * kSpeedOfLight);
    double worst = 0.0;
    for (const auto& p : zr) worst = std::max(worst, rel_dev(p.q_exit, target));
    const bool decreasing = co[0].q_exit > co[1].q_exit && co[1].q_exit > co[2].q_exit;
    return {worst <= 0.02 && decreasing,
            fmt::format("zero-range max deviation {:.3f} % (2 %), Coulomb exit {:.4f} > {:.4f} > {:.4f} Ip/(3c): {}",
                        100.0 * worst, co[0].q_exit / target, co[1].q_exit / target, co[2].q_exit / target,
                        decreasing ? "decreasing" : "NOT decreasing")};
}

// 3: relativistic map peak, ridge and exit-backpropagated peak.
Outcome sfa_peak_ridge() {
    const PhysParams p = PhysParams::from_ratio(kKappa, 1.0 / 30.0, 10.0, IpMode::relativistic);
    const double peak = argmax_p_z(0.0, p, SfaTier::Relativistic, MapWeight::exponent);
    const double formula = ridge_formula(0.0, p);
    const double peak_dev = rel_dev(peak, formula);

    double ridge_dev = 0.0;
    const double px_max = 0.2 * p.E0 / p.omega;
    for (double f : {-1.0, -0.5, 0.5, 1.0}) {
        const double px = f * px_max;
        ridge_dev = std::max(ridge_dev, rel_dev(argmax_p_z(px, p, SfaTier::Relativistic, MapWeight::exponent),
                                                ridge_formula(px, p)));
    }

    const double half = 0.5 * formula;
    const std::vector<double> pz = linspace(formula - half, formula + half, 201);
    const double te[] = {0.0};
    const MomentumMap m = exit_map(p, te, pz, MapWeight::exponent);
    const double exit_dev = rel_dev(row_peak_p_z(m, 0), peak);

    const double full = argmax_p_z(0.0, p, SfaTier::Relativistic, MapWeight::full);
    const bool ok = peak_dev <= 0.01 && ridge_dev <= 0.01 && exit_dev <= 0.01;
    return {ok, fmt::format("peak {:.4f} vs {:.4f} ({:.3f} %), ridge max {:.3f} %, exit map {:.3f} %; "
                            "full-density argmax {:.4f}",
                            peak, formula, 100.0 * peak_dev, 100.0 * ridge_dev, 100.0 * exit_dev, full)};
}

// 4: complex-trajectory endpoints.
Outcome sfa_trajectory_endpoints() {
    const PhysParams pn = PhysParams::from_ratio(kKappa, 1.0 / 30.0, 0.05);
    const ComplexTrajectory tn = complex_trajectory({0.0, 0.0, 0.0}, pn, SfaTier::NonRel);
    const double Ip_nr = 0.5 * kKappa * kKappa;
    const double x_dev = rel_dev(tn.exit.x.x.real(), Ip_nr / pn.E0);
    const double qx = std::abs(tn.exit.q.x);

    const PhysParams pr = PhysParams::from_ratio(kKappa, 1.0 / 30.0, 0.05, IpMode::relativistic);
    const double Ip = ionization_potential(kKappa, pr.c, pr.ip_mode);
    const double pz = argmax_p_z(0.0, pr, SfaTier::Relativistic, MapWeight::exponent);
    const ComplexTrajectory tr = complex_trajectory({0.0, 0.0, pz}, pr, SfaTier::Relativistic);
    const double entry_dev = rel_dev(tr.entry.q.z.real(), -2.0 * Ip / (3.0 * pr.c));
    const double exit_dev = rel_dev(tr.exit.q.z.real(), Ip / (3.0 * pr.c));
    const bool ok = x_dev <= 1e-3 && qx <= 1e-6 * kKappa && entry_dev <= 0.02 && exit_dev <= 0.02;
    return {ok, fmt::format("exit x dev {:.2e}, |q_x| {:.2e} (<= {:.1e}), entry q_z dev {:.3f} %, exit q_z dev {:.3f} %",
                            x_dev, qx, 1e-6 * kKappa, 100.0 * entry_dev, 100.0 * exit_dev)};
}

struct SquareSetup {
    double eps0, V0, a, E0;
    BarrierModel plain;
    BarrierModel magnetic;
};

SquareSetup square_setup() {
    const double Ip = ionization_potential(kKappa, kSpeedOfLight, IpMode::relativistic);
    const double a = 14.0 / kKappa, E0 = std::pow(kKappa, 3) / 30.0;
    const BarrierModel plain = BarrierModel::square(2.0 * Ip, a);
    return {Ip, 2.0 * Ip, a, E0, plain, plain.with_vector_potential({E0, 0.0, a})};
}

// 5: square-barrier delay, with and without the magnetic field.
Outcome square_delay() {
    const SquareSetup s = square_setup();
    const double expected = 1.0 / (2.0 * std::sqrt((s.V0 - s.eps0) * s.eps0));
    const std::vector<double> grid = linspace(-1.0, 80.0 * s.a, 400);

    const SteadyProblem plain = SteadyProblem::scattering(s.plain, Tier::NonRel);
    const ScatteringDelay d0 = scattering_delay(plain, s.eps0, 0.0, grid);
    const double dev = rel_dev(d0.delay.value, expected);

    const double pz = -s.E0 * s.a / (2.0 * kSpeedOfLight);
    const SteadyProblem mag = SteadyProblem::scattering(s.magnetic, Tier::MagneticDipole);
    const ScatteringDelay d1 = scattering_delay(mag, s.eps0, pz, grid, {}, true);
    const double b_dev = rel_dev(d1.delay.value, d0.delay.value);
    const double dz = std::abs(d1.drift->value);
    const double dz_tol = 1e-3 * (grid[1] - grid[0]);

    const BarrierModel lin = BarrierModel::linear(s.V0, s.E0);
    const SteadyProblem lp = SteadyProblem::scattering(lin, Tier::NonRel);
    const double x_exit = lp.exit(s.eps0, 0.0);
    const ScatteringDelay dl = scattering_delay(lp, s.eps0, 0.0, linspace(-1.0, 4.0 * x_exit, 200));

    const bool ok = dev <= 0.05 && b_dev <= 0.02 && dz <= dz_tol && d0.delay.stable && d1.delay.stable;
    return {ok, fmt::format("square delay {:.5e} vs {:.5e} ({:.1f} %, limit 5 %); with B {:.5e} ({:.2f} %), "
                            "z-drift {:.1e} (<= {:.1e}); linear barrier {:.5e} ({:.1f} %)",
                            d0.delay.value, expected, 100.0 * dev, d1.delay.value, 100.0 * b_dev, dz, dz_tol,
                            dl.delay.value, 100.0 * rel_dev(dl.delay.value, expected))};
}

struct OracleRun {
    double max_dev = 0.0;
    std::size_t samples = 0;
    bool clean = true;  // no multimodal or edge maxima among the sampled times
};

// Packet peak vs Wigner position on the transmitted close-up (a, a + 1].
OracleRun oracle_run(const SquareSetup& s, double rel_width, double x0, double dx) {
    const SteadyProblem pr = SteadyProblem::scattering(s.plain, Tier::NonRel);
    const GaussianPacketSpec spec = GaussianPacketSpec::from_energy(s.eps0, rel_width, x0);
    const double lo = s.a, hi = s.a + 1.0;

    const std::vector<double> xw = linspace(lo, hi + 0.5, 301);
    const Trajectory w = wigner_trajectory(pr, s.eps0, 0.0, xw);
    const double t_first = predicted_arrival(w.tau.front(), spec);
    const double t_last = predicted_arrival(w.tau[200], spec);

    const auto nx = static_cast<std::size_t>(std::lround((hi + 1.0 - (x0 - 3.0)) / dx)) + 1;
    const std::vector<double> x = linspace(x0 - 3.0, hi + 1.0, nx);
    const std::vector<double> t = linspace(t_first, t_last, 41);
    const PacketDensity d = propagate_packet(pr, spec, t, x);
    const PeakTrack track = track_peak(d, lo, hi + 0.5);

    OracleRun r;
    for (const PeakSample& smp : track.samples) {
        const auto it = std::lower_bound(w.tau.begin(), w.tau.end(), smp.t - predicted_arrival(0.0, spec));
        if (it == w.tau.begin() || it == w.tau.end()) continue;
        const auto j = static_cast<std::size_t>(it - w.tau.begin());
        const double tau = smp.t - predicted_arrival(0.0, spec);
        const double x_w = xw[j - 1] + (tau - w.tau[j - 1]) / (w.tau[j] - w.tau[j - 1]) * (xw[j] - xw[j - 1]);
        if (x_w > hi) continue;
        r.clean = r.clean && !smp.multimodal && !smp.at_edge;
        r.max_dev = std::max(r.max_dev, std::abs(smp.x - x_w));
        ++r.samples;
    }
    return r;
}

// 6: packet-peak trajectory vs Wigner trajectory behind the square barrier.
Outcome oracle_equivalence() {
    const SquareSetup s = square_setup();
    const double dx = 0.01;
    const OracleRun fine = oracle_run(s, 0.005, -8.0, dx);
    const OracleRun coarse = oracle_run(s, 0.01, -4.0, dx);
    const bool ok = fine.samples > 10 && fine.clean && fine.max_dev <= dx;
    return {ok, fmt::format("dp = 0.005 p0: max |x_peak - x_W| {:.4f} over {} times (cell {:.2f}); "
                            "dp = 0.01 p0: {:.4f}",
                            fine.max_dev, fine.samples, dx, coarse.max_dev)};
}

// 7: deep vs near-threshold tunnel-ionization delay, both tiers.
Outcome ionization_dichotomy() {
    struct Case {
        double ratio;
        Tier tier;
    };
    const Case cases[] = {{1.0 / 30.0, Tier::NonRel},
                          {1.0 / 30.0, Tier::MagneticDipole},
                          {1.0 / 17.0, Tier::NonRel},
                          {1.0 / 17.0, Tier::MagneticDipole}};
    bool ok = true;
    std::string m;
    for (const Case& c : cases) {
        const PhysParams p = PhysParams::from_ratio(kKappa, c.ratio, 0.05, IpMode::nonrelativistic, c.tier);
        const TunnelDelay d = tunnelion_delay(p, Shape::Coulomb1D, c.tier);
        const double scaled = d.tau_w.value * d.Ip;
        const bool deep = c.ratio < 0.04;
        const bool pass = deep ? std::abs(scaled) < 0.05 : std::abs(scaled) > 0.1;
        ok = ok && pass && d.tau_w.stable;
        m += fmt::format("{} 1/{:.0f}: tau_W Ip = {:.3e} ({}); ", to_string(c.tier), 1.0 / c.ratio, scaled,
                         to_string(d.approximation));
    }
    const double s30 = std::pow(16.0 / 30.0, 5.0 / 3.0), s17 = std::pow(16.0 / 17.0, 5.0 / 3.0);
    const PhysParams p30 = PhysParams::from_ratio(kKappa, 1.0 / 30.0, 0.05);
    const PhysParams p17 = PhysParams::from_ratio(kKappa, 1.0 / 17.0, 0.05);
    const RegimeReport r30 = classify_regime(BarrierModel::tunnel_ionization(p30, Shape::Coulomb1D), p30);
    const RegimeReport r17 = classify_regime(BarrierModel::tunnel_ionization(p17, Shape::Coulomb1D), p17);
    const bool cls = r30.scaled_field == s30 && r17.scaled_field == s17 && std::abs(s30 - 0.3) <= 0.06 &&
                     std::abs(s17 - 0.9) <= 0.06 && r30.regime == Regime::deep &&
                     r17.regime == Regime::near_threshold;
    ok = ok && cls;
    m += fmt::format("classifier {:.4f} ({}), {:.4f} ({})", r30.scaled_field, to_string(r30.regime),
                     r17.scaled_field, to_string(r17.regime));
    return {ok, m};
}

// 8: tau_W Ip constant in Ip (nonrel), Klein-Gordon deviation growing with Ip.
Outcome scaled_delay_law() {
    const double ratios[] = {1.0 / 17.0, 1.0 / 10.0};
    const double kappas[] = {31.6, 44.7, 63.2, 100.0};
    const Tier tiers[] = {Tier::NonRel, Tier::KleinGordon};
    const auto rows = delay_vs_ip_scan(ratios, kappas, tiers);
    const std::size_t nk = std::size(kappas);

    bool ok = true;
    std::string m;
    for (std::size_t r = 0; r < std::size(ratios); ++r) {
        const auto* nr = &rows[(r * 2) * nk];
        const auto* kg = &rows[(r * 2 + 1) * nk];
        double lo = nr[0].tau_w_Ip, hi = lo, mean = 0.0;
        for (std::size_t i = 0; i < nk; ++i) {
            lo = std::min(lo, nr[i].tau_w_Ip);
            hi = std::max(hi, nr[i].tau_w_Ip);
            mean += nr[i].tau_w_Ip / static_cast<double>(nk);
        }
        const double spread = (hi - lo) / std::abs(mean);
        bool monotone = true;
        double prev = -1.0;
        for (std::size_t i = 0; i < nk; ++i) {
            const double dev = std::abs(kg[i].tau_w_Ip - nr[i].tau_w_Ip);
            monotone = monotone && dev > prev;
            prev = dev;
        }
        ok = ok && spread < 0.15 && monotone;
        m += fmt::format("1/{:.0f}: nonrel spread {:.2e} %, KG deviation {:.2e} -> {:.2e} ({}); ", 1.0 / ratios[r],
                         100.0 * spread, std::abs(kg[0].tau_w_Ip - nr[0].tau_w_Ip), prev,
                         monotone ? "monotone" : "NOT monotone");
    }
    m += fmt::format("Ip {:.0f} .. {:.0f}", rows.front().Ip, rows[nk - 1].Ip);
    return {ok, m};
}

// 9: formation of the ionization amplitude.
Outcome formation_time() {
    const PhysParams p = PhysParams::from_ratio(1.0, 1.0 / 30.0, 0.005);
    const double tau_K = 1.0 / p.E0;
    const std::vector<double> t = linspace(-6.0 * tau_K, 6.0 * tau_K, 601);
    const FormationCurve fc = formation_amplitude(0.0, p, t);
    const double rise_end = (fc.t90 - fc.t_s_re) / tau_K;
    const bool ok = rise_end <= 3.0 && fc.rise_time <= 3.0 * tau_K && fc.plateau_drift < 0.05;
    return {ok, fmt::format("90 % reached {:.2f} tau_K after Re t_s, 10-90 % rise {:.2f} tau_K, plateau drift {:.2f} %",
                            rise_end, fc.rise_time / tau_K, 100.0 * fc.plateau_drift)};
}

double max_phase_gap(const SteadyState& a, const SteadyState& b) {
    double gap = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i) gap = std::max(gap, std::abs(std::arg(a.u_plus[i] / b.u_plus[i])));
    return gap;
}

// 10: identities, gauge invariance, backend equivalence, nonrelativistic limits.
Outcome numerical_hygiene() {
    const auto t0 = std::chrono::steady_clock::now();

    double wronskian = 0.0;
    for (cplx z : {cplx(0.5, 0.3), cplx(-4.0, 1.0), cplx(3.0, -2.0), cplx(-12.0, 0.0)}) {
        const AiryValues v = airy(z);
        wronskian = std::max(wronskian, std::abs((v.ai * v.bip - v.aip * v.bi) * kPi - 1.0));
    }
    double recurrence = 0.0;
    for (auto [a, z] : {std::pair<cplx, cplx>{0.3, {1.5, 0.5}}, {{-0.5, 2.0}, {3.0, -2.0}}, {4.2, {-2.0, 1.0}}}) {
        const cplx dp = pcf_d(a + 1.0, z), d = pcf_d(a, z), dm = pcf_d(a - 1.0, z);
        recurrence = std::max(recurrence, std::abs(dp - z * d + a * dm) / (std::abs(z * d) + std::abs(dp)));
    }

    const double E0 = 0.05;
    const PotentialPair length{[&](cplx x, cplx) { return E0 * x; }, [](cplx, cplx) { return cplx(0.0); }};
    const PotentialPair velocity{[](cplx, cplx) { return cplx(0.0); },
                                 [&](cplx, cplx t) { return kSpeedOfLight * E0 * t; }};
    auto binding = [](double x) { return -1.0 / std::sqrt(x * x + 2.0); };
    const EffectivePotential v1 = effective_potential(electric_field(length, 0.7), binding);
    const EffectivePotential v2 = effective_potential(electric_field(velocity, 0.7), binding);
    double gauge = 0.0;
    for (double x : linspace(-20.0, 20.0, 81)) gauge = std::max(gauge, std::abs(v1(x) - v2(x)));

    double phase = 0.0;
    SteadyOptions closed, ode;
    closed.refine_phase = ode.refine_phase = false;
    ode.backend = SteadyBackend::ode;
    const SquareSetup s = square_setup();
    const std::vector<double> sg = linspace(-1.0, 3.0, 81);
    for (const BarrierModel& b : {s.plain, BarrierModel::linear(s.V0, s.E0), BarrierModel::parabolic(1.5, 0.5)}) {
        const SteadyProblem pr = SteadyProblem::scattering(b, Tier::NonRel);
        const double eps = b.shape() == Shape::Parabolic ? 1.0 : s.eps0;
        phase = std::max(phase, max_phase_gap(pr.solve(eps, 0.0, sg, closed), pr.solve(eps, 0.0, sg, ode)));
    }
    {
        const SteadyProblem pr = SteadyProblem::scattering(s.magnetic, Tier::MagneticDipole);
        const double pz = -s.E0 * s.a / (2.0 * kSpeedOfLight);
        phase = std::max(phase, max_phase_gap(pr.solve(s.eps0, pz, sg, closed), pr.solve(s.eps0, pz, sg, ode)));
    }
    struct TiCase {
        Shape shape;
        double ratio;
        Tier tier;
        Approximation approx;
    };
    const TiCase ti[] = {{Shape::Coulomb1D, 1.0 / 30.0, Tier::NonRel, Approximation::linear},
                         {Shape::Coulomb1D, 1.0 / 17.0, Tier::NonRel, Approximation::quadratic},
                         {Shape::Coulomb1D, 1.0 / 17.0, Tier::MagneticDipole, Approximation::quadratic},
                         {Shape::ZeroRange, 1.0 / 17.0, Tier::NonRel, Approximation::exact},
                         {Shape::ZeroRange, 1.0 / 10.0, Tier::KleinGordon, Approximation::exact}};
    for (const TiCase& c : ti) {
        const double kappa = c.tier == Tier::KleinGordon ? 31.6 : kKappa;
        const PhysParams p = PhysParams::from_ratio(kappa, c.ratio, 0.05, IpMode::nonrelativistic, c.tier);
        const BarrierModel b = BarrierModel::tunnel_ionization(p, c.shape);
        const double eps = -0.5 * kappa * kappa;
        const SteadyProblem pr = SteadyProblem::tunnel_ionization(b, eps, 0.0, c.tier, c.approx);
        const double xe = pr.exit(eps, 0.0);
        const std::vector<double> g = linspace(pr.entry(), 20.0 * xe, 81);
        phase = std::max(phase, max_phase_gap(pr.solve(eps, 0.0, g, closed), pr.solve(eps, 0.0, g, ode)));
    }

    // Klein-Gordon and magnetic corrections vanish as c grows.
    const double c100 = 100.0 * kSpeedOfLight;
    const PhysParams pn = PhysParams::from_ratio(31.6, 1.0 / 10.0, 0.05, IpMode::nonrelativistic, Tier::NonRel, c100);
    PhysParams pk = pn;
    pk.tier = Tier::KleinGordon;
    const double tn = tunnelion_delay(pn, Shape::ZeroRange, Tier::NonRel).tau_w.value;
    const double tk = tunnelion_delay(pk, Shape::ZeroRange, Tier::KleinGordon).tau_w.value;
    const PhysParams pc = PhysParams::from_ratio(kKappa, 1.0 / 30.0, 0.05, IpMode::nonrelativistic, Tier::NonRel, c100);
    const BarrierModel bc = BarrierModel::tunnel_ionization(pc, Shape::Coulomb1D);
    const double en = -0.5 * kKappa * kKappa;
    const double xn = tunneling_exponent(bc, en, 0.0, 0.0, Tier::NonRel);
    const double xm = tunneling_exponent(bc, en, 0.0, 0.0, Tier::MagneticDipole);
    const double limit = std::max(rel_dev(tk, tn), rel_dev(xm, xn));

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = wronskian <= 1e-12 && recurrence <= 1e-10 && gauge <= 1e-12 && phase <= 1e-6 &&
                    limit <= 1e-4 && secs < 120.0;
    return {ok, fmt::format("Airy Wronskian {:.1e}, D recurrence {:.1e}, gauge {:.1e}, backend phase {:.1e} rad, "
                            "c x 100 limit {:.1e}, {:.1f} s",
                            wronskian, recurrence, gauge, phase, limit, secs)};
}

struct Entry {
    const char* name;
    std::function<Outcome()> run;
};

const Entry kEntries[kCriterionCount] = {
    {"wkb-coulomb-shift", wkb_coulomb_shift},
    {"zero-range-independence", zero_range_independence},
    {"sfa-peak-ridge", sfa_peak_ridge},
    {"sfa-trajectory-endpoints", sfa_trajectory_endpoints},
    {"square-barrier-delay", square_delay},
    {"oracle-equivalence", oracle_equivalence},
    {"ionization-delay-dichotomy", ionization_dichotomy},
    {"scaled-delay-law", scaled_delay_law},
    {"formation-time", formation_time},
    {"numerical-hygiene", numerical_hygiene},
};

}  // namespace

CriterionResult run_criterion(int id) {
    if (id < 1 || id > kCriterionCount) throw DomainError(fmt::format("no acceptance criterion {}", id));
    const Entry& e = kEntries[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = e.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const Outcome o = e.run();
        r.pass = o.pass;
        r.measured = o.measured;
    } catch (const std::exception& ex) {
        r.pass = false;
        r.measured = fmt::format("error: {}", ex.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<CriterionResult> run_acceptance(std::span<const int> ids) {
    std::vector<CriterionResult> out;
    if (ids.empty()) {
        for (int i = 1; i <= kCriterionCount; ++i) out.push_back(run_criterion(i));
    } else {
        for (int i : ids) out.push_back(run_criterion(i));
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    return fmt::format("{} {:>2} {:<27} ({:.1f} s)  {}", r.pass ? "PASS" : "FAIL", r.id, r.name, r.seconds,
                       r.measured);
}

}  // namespace tunnelion
