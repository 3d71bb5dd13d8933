#include "tunnelion/sfa.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tunnelion/csv.hpp"
#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"

namespace tunnelion {

std::string_view to_string(SfaTier t) { return t == SfaTier::NonRel ? "nonrel" : "rel"; }

SfaTier parse_sfa_tier(std::string_view s) {
    if (s == "nonrel" || s == "NonRel" || s == "nonrelativistic") return SfaTier::NonRel;
    if (s == "rel" || s == "Relativistic" || s == "relativistic") return SfaTier::Relativistic;
    throw ConfigError("unknown SFA tier '" + std::string(s) + "'");
}

SfaConstants sfa_constants(const PhysParams& p, SfaTier tier) {
    p.validate();
    const double Ip = ionization_potential(p.kappa, p.c, p.ip_mode);
    const double c2 = p.c * p.c;
    if (tier == SfaTier::NonRel) return {Ip, 2.0 * Ip, c2 - Ip};
    // c^2 - eps0^2/c^2 without cancellation
    return {Ip, Ip * (2.0 * c2 - Ip) / c2, c2 - Ip};
}

namespace {

double p_squared(const Vec3& p) { return p.x * p.x + p.y * p.y + p.z * p.z; }

// eps - eps0 = c (sqrt(c^2 + p^2) - c) + Ip
double energy_gain(const Vec3& p, double c, double Ip) {
    const double p2 = p_squared(p);
    return c * p2 / (std::sqrt(c * c + p2) + c) + Ip;
}

// sqrt(kappa^2 + q_perp^2) with the tier's transverse momentum.
double transverse_root(const Vec3& p, const PhysParams& params, SfaTier tier,
                       const SfaConstants& k) {
    if (tier == SfaTier::NonRel) return std::sqrt(k.kappa2 + p.y * p.y + p.z * p.z);
    const double qz = p.z - energy_gain(p, params.c, k.Ip) / params.c;
    return std::sqrt(k.kappa2 + p.y * p.y + qz * qz);
}

double field_at_saddle(double p_x, const PhysParams& params) {
    const double r = p_x * params.omega / params.E0;
    if (!(std::abs(r) < 1.0))
        throw DomainError("momentum_wavefunction: |p_x| must be below E0/omega");
    return params.E0 * std::sqrt(1.0 - r * r);
}

}  // namespace

double light_cone_frequency(const Vec3& p, const PhysParams& params) {
    const double c = params.c;
    return params.omega * (std::sqrt(c * c + p_squared(p)) - p.z) / c;
}

ComplexSaddle saddle_time(const Vec3& p, const PhysParams& params, SfaTier tier) {
    const SfaConstants k = sfa_constants(params, tier);
    const double K = transverse_root(p, params, tier, k);
    const double w = params.omega;
    const double scale = tier == SfaTier::NonRel ? w : 1.0;  // d(phase)/ds
    const double amp = params.E0 / w;
    auto f = [&](cplx s) { return (p.x + amp * std::sin(scale * s)) / K - cplx(0.0, 1.0); };
    auto df = [&](cplx s) { return amp * scale * std::cos(scale * s) / K; };
    const cplx guess = cplx(-p.x, K) / params.E0 * (tier == SfaTier::NonRel ? 1.0 : w);
    RootOptions opts;
    opts.max_step = 0.25 * kPi / scale;
    ComplexSaddle s = find_complex_root(f, guess, 1e-13, df, opts);
    if (!(s.root.imag() > 0.0))
        throw ConvergenceError("saddle_time: no saddle with positive imaginary part near the guess");
    return s;
}

MomentumAmplitude momentum_wavefunction(const Vec3& p, const PhysParams& params, SfaTier tier) {
    const SfaConstants k = sfa_constants(params, tier);
    const double E = field_at_saddle(p.x, params);
    const double K = transverse_root(p, params, tier, k);
    double pref = 2.0 * kPi / (E * K);
    double expo = K * K * K / (3.0 * E);
    if (tier == SfaTier::Relativistic) {
        const double ratio = light_cone_frequency(p, params) / params.omega;
        pref *= ratio;
        expo /= ratio;
    }
    MomentumAmplitude m;
    m.p = p;
    m.tier = tier;
    m.log_density = std::log(pref) - 2.0 * expo;
    m.exponent = expo;
    m.amplitude = cplx(0.0, -std::sqrt(pref) * std::exp(-expo));
    return m;
}

double ridge_formula(double p_x, const PhysParams& params) {
    const double Ip = ionization_potential(params.kappa, params.c, params.ip_mode);
    const double c = params.c;
    const double r = Ip / (c * c);
    return Ip / (3.0 * c) * (1.0 + r / 18.0) +
           p_x * p_x / (2.0 * c) * (1.0 + r / 3.0 + 2.0 * r * r / 27.0);
}

std::string_view to_string(MapWeight w) { return w == MapWeight::full ? "full" : "exponent"; }

MapWeight parse_map_weight(std::string_view s) {
    if (s == "full") return MapWeight::full;
    if (s == "exponent") return MapWeight::exponent;
    throw ConfigError("unknown map weight '" + std::string(s) + "' (full|exponent)");
}

double log_weight(const MomentumAmplitude& m, MapWeight w) {
    return w == MapWeight::full ? m.log_density : -2.0 * m.exponent;
}

double argmax_p_z(double p_x, const PhysParams& params, SfaTier tier, MapWeight weight) {
    const double Ip = ionization_potential(params.kappa, params.c, params.ip_mode);
    const double centre = tier == SfaTier::NonRel ? 0.0 : ridge_formula(p_x, params);
    const double half = 0.5 * Ip / params.c + 0.1 * std::abs(centre);
    auto ld = [&](double pz) {
        return log_weight(momentum_wavefunction({p_x, 0.0, pz}, params, tier), weight);
    };
    return maximize(ld, centre - half, centre + half, 52).first;
}

TrajectoryPoint trajectory_point(const Vec3& p, const PhysParams& params, SfaTier tier, cplx s_s,
                                 cplx s) {
    const double w = params.omega, E0 = params.E0, c = params.c;
    TrajectoryPoint pt;
    pt.s = s;
    if (tier == SfaTier::NonRel) {
        pt.q = {p.x + (E0 / w) * std::sin(w * s), p.y, p.z};
        const cplx dt = s - s_s;
        pt.x = {p.x * dt - (E0 / (w * w)) * (std::cos(w * s) - std::cos(w * s_s)), p.y * dt, p.z * dt};
        return pt;
    }
    const double L = light_cone_frequency(p, params);
    const double Am = c * E0 / w;
    const cplx a = Am * std::sin(s);
    const double g = w / (c * c * L);
    pt.q = {p.x + a / c, p.y, p.z + g * (p.x * a + a * a / (2.0 * c))};
    const cplx d = s - s_s;
    const cplx I1 = -Am * (std::cos(s) - std::cos(s_s));
    const cplx I2 = Am * Am * (0.5 * d - 0.25 * (std::sin(2.0 * s) - std::sin(2.0 * s_s)));
    pt.x = {(p.x * d - (E0 / w) * (std::cos(s) - std::cos(s_s))) / L, p.y * d / L,
            (p.z * d + g * (p.x * I1 + I2 / (2.0 * c))) / L};
    return pt;
}

ComplexTrajectory complex_trajectory(const Vec3& p, const PhysParams& params, SfaTier tier,
                                     std::size_t samples, double continuum_span) {
    if (samples < 2) throw DomainError("complex_trajectory: need at least 2 samples");
    ComplexTrajectory tr;
    tr.tier = tier;
    tr.saddle = saddle_time(p, params, tier);
    const cplx ss = tr.saddle.root;
    const double re = ss.real();
    if (!(continuum_span > 0.0)) continuum_span = tier == SfaTier::NonRel ? kPi / (2.0 * params.omega) : kPi / 2.0;
    for (std::size_t i = 0; i < samples; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(samples - 1);
        tr.under_barrier.push_back(trajectory_point(p, params, tier, ss, cplx(re, ss.imag() * (1.0 - f))));
        tr.continuum.push_back(trajectory_point(p, params, tier, ss, cplx(re + f * continuum_span, 0.0)));
    }
    tr.entry = tr.under_barrier.front();
    tr.exit = tr.under_barrier.back();
    return tr;
}

Vec3 exit_to_final(const Vec3& p_exit, double t_e, const PhysParams& params) {
    const double c = params.c, w = params.omega;
    const double a = (c * params.E0 / w) * std::sin(w * t_e);
    Vec3 pf{p_exit.x - a / c, p_exit.y, p_exit.z};
    for (int it = 0; it < 100; ++it) {
        const double L = light_cone_frequency(pf, params);
        const double z = p_exit.z - (w / (c * c * L)) * (pf.x * a + a * a / (2.0 * c));
        const bool done = std::abs(z - pf.z) <= 1e-15 * (std::abs(z) + 1.0);
        pf.z = z;
        if (done) break;
    }
    return pf;
}

ExitState backpropagate_to_exit(const Vec3& p_final, const PhysParams& params) {
    const ComplexSaddle s = saddle_time(p_final, params, SfaTier::Relativistic);
    const double c = params.c, w = params.omega;
    const double eta = s.root.real();
    const double a = (c * params.E0 / w) * std::sin(eta);
    const double L = light_cone_frequency(p_final, params);
    ExitState e;
    e.t_e = eta / w;
    e.p_exit = {p_final.x + a / c, p_final.y,
                p_final.z + (w / (c * c * L)) * (p_final.x * a + a * a / (2.0 * c))};
    return e;
}

double exit_ridge_relation(double p_x, const PhysParams& params) {
    const double Ip = ionization_potential(params.kappa, params.c, params.ip_mode);
    const double c = params.c;
    double pz = Ip / (3.0 * c);
    for (int it = 0; it < 100; ++it) {
        const double L = light_cone_frequency({p_x, 0.0, pz}, params);
        const double next = Ip / (3.0 * c) + params.omega * p_x * p_x / (2.0 * c * L);
        const bool done = std::abs(next - pz) <= 1e-15 * (std::abs(next) + 1.0);
        pz = next;
        if (done) break;
    }
    return pz;
}

namespace {

void normalize(std::vector<double>& logd, std::vector<double>& out) {
    const double m = *std::max_element(logd.begin(), logd.end());
    out.resize(logd.size());
    for (std::size_t i = 0; i < logd.size(); ++i) out[i] = std::exp(logd[i] - m);
}

}  // namespace

MomentumMap detector_map(const PhysParams& params, SfaTier tier, std::span<const double> p_x,
                         std::span<const double> p_z, MapWeight weight) {
    if (p_x.empty() || p_z.empty()) throw DomainError("detector_map: empty axis");
    MomentumMap m;
    m.p_x.assign(p_x.begin(), p_x.end());
    m.p_z.assign(p_z.begin(), p_z.end());
    std::vector<double> logd(p_x.size() * p_z.size());
    parallel_for(p_x.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < p_z.size(); ++j)
            logd[i * p_z.size() + j] =
                log_weight(momentum_wavefunction({p_x[i], 0.0, p_z[j]}, params, tier), weight);
    });
    normalize(logd, m.density);
    return m;
}

MomentumMap exit_map(const PhysParams& params, std::span<const double> t_e,
                     std::span<const double> p_z, MapWeight weight) {
    if (t_e.empty() || p_z.empty()) throw DomainError("exit_map: empty axis");
    MomentumMap m;
    m.t_e.assign(t_e.begin(), t_e.end());
    m.p_z.assign(p_z.begin(), p_z.end());
    m.p_x.resize(t_e.size());
    std::vector<double> logd(t_e.size() * p_z.size());
    parallel_for(t_e.size(), [&](std::size_t i) {
        for (std::size_t j = 0; j < p_z.size(); ++j) {
            const Vec3 pf = exit_to_final({0.0, 0.0, p_z[j]}, t_e[i], params);
            if (j == 0) m.p_x[i] = pf.x;
            logd[i * p_z.size() + j] =
                log_weight(momentum_wavefunction(pf, params, SfaTier::Relativistic), weight);
        }
    });
    normalize(logd, m.density);
    return m;
}

double row_peak_p_z(const MomentumMap& m, std::size_t i) {
    const std::size_t nz = m.p_z.size();
    const auto row = m.density.begin() + static_cast<std::ptrdiff_t>(i * nz);
    const std::size_t k = static_cast<std::size_t>(std::max_element(row, row + static_cast<std::ptrdiff_t>(nz)) - row);
    if (k == 0 || k + 1 == nz) return m.p_z[k];
    // the log density is locally quadratic
    return parabola_vertex(m.p_z[k - 1], std::log(row[k - 1]), m.p_z[k], std::log(row[k]),
                           m.p_z[k + 1], std::log(row[k + 1]));
}

void write_map_csv(const std::filesystem::path& path, const MomentumMap& m) {
    const std::size_t nz = m.p_z.size();
    if (m.t_e.empty()) {
        CsvWriter out(path, {"p_x", "p_z", "density"});
        for (std::size_t i = 0; i < m.p_x.size(); ++i)
            for (std::size_t j = 0; j < nz; ++j) out.row({m.p_x[i], m.p_z[j], m.density[i * nz + j]});
        return;
    }
    CsvWriter out(path, {"t_e", "p_x", "p_z", "density"});
    for (std::size_t i = 0; i < m.t_e.size(); ++i)
        for (std::size_t j = 0; j < nz; ++j)
            out.row({m.t_e[i], m.p_x[i], m.p_z[j], m.density[i * nz + j]});
}

FormationCurve formation_amplitude(double p_x, const PhysParams& params, std::span<const double> t) {
    if (t.empty()) throw DomainError("formation_amplitude: empty time grid");
    if (!std::is_sorted(t.begin(), t.end()))
        throw DomainError("formation_amplitude: time grid must be sorted");
    const SfaConstants k = sfa_constants(params, SfaTier::NonRel);
    const double w = params.omega, E0 = params.E0;
    const double b = E0 / w;
    // Phi(t) = kappa^2 t / 2 + (1/2) int_0^t q^2, q = p_x + b sin(w t)
    auto Phi = [&](cplx s) {
        const cplx integral = p_x * p_x * s - 2.0 * p_x * (b / w) * (std::cos(w * s) - 1.0) +
                              b * b * (0.5 * s - std::sin(2.0 * w * s) / (4.0 * w));
        return 0.5 * k.kappa2 * s + 0.5 * integral;
    };
    const ComplexSaddle sd = saddle_time({p_x, 0.0, 0.0}, params, SfaTier::NonRel);
    const cplx ts = sd.root;
    const cplx phi_s = Phi(ts);
    auto g = [&](double tau) { return std::exp(cplx(0.0, 1.0) * (Phi(cplx(tau, ts.imag())) - phi_s)); };

    FormationCurve fc;
    fc.t.assign(t.begin(), t.end());
    fc.saddle_phase = phi_s;
    fc.t_s_re = ts.real();
    fc.t_s_im = ts.imag();
    fc.tau_K = params.kappa / E0;
    const double start = ts.real() - kPi / (2.0 * w);
    cplx acc = 0.0;
    double prev = start;
    fc.amplitude.reserve(t.size());
    for (double ti : t) {
        if (ti > prev) {
            acc += integrate_complex(g, prev, ti, 1e-10);
            prev = ti;
        }
        fc.amplitude.push_back(cplx(0.0, -1.0) * acc);
    }

    const double final_mag = std::abs(fc.amplitude.back());
    auto crossing = [&](double level) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double m = std::abs(fc.amplitude[i]);
            if (m >= level) {
                if (i == 0) return t[0];
                const double m0 = std::abs(fc.amplitude[i - 1]);
                return t[i - 1] + (level - m0) / (m - m0) * (t[i] - t[i - 1]);
            }
        }
        return t.back();
    };
    const double t10 = crossing(0.1 * final_mag);
    fc.t90 = crossing(0.9 * final_mag);
    fc.rise_time = fc.t90 - t10;
    double lo = HUGE_VAL, hi = -HUGE_VAL;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < ts.real() + 3.0 * fc.tau_K) continue;
        const double m = std::abs(fc.amplitude[i]);
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    fc.plateau_drift = (hi >= lo && final_mag > 0.0) ? (hi - lo) / final_mag : 0.0;
    return fc;
}

MomentumShare ion_momentum_share(const PhysParams& params, SfaTier tier, MapWeight weight) {
    const double Ip = ionization_potential(params.kappa, params.c, params.ip_mode);
    const double total = Ip / params.c;
    const double pe = tier == SfaTier::NonRel ? 0.0 : argmax_p_z(0.0, params, tier, weight);
    return {pe, total - pe};
}

}  // namespace tunnelion
