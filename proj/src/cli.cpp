#include "tunnelion/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tunnelion/acceptance.hpp"
#include "tunnelion/barrier.hpp"
#include "tunnelion/config.hpp"
#include "tunnelion/csv.hpp"
#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"
#include "tunnelion/oracle.hpp"
#include "tunnelion/sfa.hpp"
#include "tunnelion/wigner.hpp"
#include "tunnelion/wkb.hpp"

namespace tunnelion::cli {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return kConfigError;
    if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const RangeError*>(&e)) return kNonConvergence;
    if (dynamic_cast<const UnsupportedError*>(&e) || dynamic_cast<const NoBarrierError*>(&e)) return kUnsupported;
    return kFailure;
}

namespace {

constexpr std::string_view kBarrierKeys[] = {
    "barrier",   "barrier.V0", "barrier.a",       "barrier.F",          "barrier.beta",
    "barrier.kappa", "barrier.E0", "barrier.Ip",  "barrier.c",          "barrier.bfield",
    "barrier.bfield.E0", "barrier.bfield.lo", "barrier.bfield.hi"};

// Config view that remembers every value it hands out; the manifest is the
// resolved set.
class Settings {
public:
    explicit Settings(Config given) : given_(std::move(given)) {}

    bool given(std::string_view key) const { return given_.has(key); }

    double num(std::string_view key, double fallback) {
        const double v = given_.get_double(key, fallback);
        put(key, format_double(v));
        return v;
    }
    std::size_t count(std::string_view key, int fallback) {
        const int v = given_.get_int(key, fallback);
        if (v < 1) throw ConfigError(fmt::format("key '{}' must be a positive integer", key));
        put(key, std::to_string(v));
        return static_cast<std::size_t>(v);
    }
    std::string str(std::string_view key, std::string fallback) {
        std::string v = given_.get_string(key, std::move(fallback));
        put(key, v);
        return v;
    }
    std::vector<double> list(std::string_view key, std::vector<double> fallback) {
        std::vector<double> v = given_.get_list(key, std::move(fallback));
        if (v.empty()) throw ConfigError(fmt::format("key '{}' needs at least one value", key));
        std::string text;
        for (double x : v) text += (text.empty() ? "" : ",") + format_double(x);
        put(key, text);
        return v;
    }
    bool flag(std::string_view key, bool fallback) {
        const std::string v = given_.get_string(key, fallback ? "true" : "false");
        bool out = false;
        if (v == "true" || v == "1") out = true;
        else if (v != "false" && v != "0") throw ConfigError(fmt::format("key '{}' must be true or false", key));
        put(key, out ? "true" : "false");
        return out;
    }

    PhysParams params(const PhysParams& defaults) {
        const PhysParams p = params_from_config(given_, defaults);
        put("kappa", format_double(p.kappa));
        put("c", format_double(p.c));
        put("E0_over_Ea", format_double(p.E0 / (p.kappa * p.kappa * p.kappa)));
        put("omega", format_double(p.omega));
        put("ip_mode", std::string(to_string(p.ip_mode)));
        put("tier", std::string(to_string(p.tier)));
        return p;
    }

    void barrier(const BarrierModel& b) {
        Config c;
        b.write_config(c);
        for (const auto& [k, v] : c.entries()) put(k, v);
    }

    const Config& given_config() const { return given_; }
    const Config& resolved() const { return resolved_; }

private:
    Config given_, resolved_;
    void put(std::string_view key, std::string value) { resolved_.set(std::string(key), std::move(value)); }
};

struct Job {
    std::string command;
    Settings settings;
    fs::path out;
    // File name and writer; executed only after the computation succeeded.
    std::vector<std::pair<std::string, std::function<void(const fs::path&)>>> files;
    std::vector<std::pair<std::string, std::string>> summary;
    std::vector<std::pair<std::string, double>> derived;

    void add_summary(std::string key, const std::string& value) { summary.emplace_back(std::move(key), value); }
    void add_summary(std::string key, double value) { summary.emplace_back(std::move(key), format_double(value)); }
};

void add_derived(Job& job, const PhysParams& p) {
    const DerivedParams d = derive_params(p);
    job.derived = {{"E0", p.E0},           {"Ip", d.Ip},        {"Ip_nr", d.Ip_nr},
                   {"Ea", d.Ea},           {"gamma", d.gamma},  {"tau_K", d.tau_K},
                   {"xi", d.xi},           {"field_ratio", d.field_ratio}};
}

void write_outputs(Job& job) {
    fs::create_directories(job.out);
    if (!job.summary.empty()) {
        job.files.emplace_back("summary.csv", [&job](const fs::path& path) {
            CsvWriter w(path, {"quantity", "value"});
            for (const auto& [k, v] : job.summary) w.row({std::string_view(k), std::string_view(v)});
        });
    }
    for (const auto& [name, write] : job.files) write(job.out / name);

    std::ofstream m(job.out / "manifest.txt");
    m << "# tunnelion manifest\n# command: " << job.command << "\n";
    for (const auto& [k, v] : job.derived) m << "# derived." << k << " = " << format_double(v) << "\n";
    for (const auto& [name, write] : job.files) m << "# output: " << name << "\n";
    for (const auto& [k, v] : job.settings.resolved().entries()) m << k << "=" << v << "\n";
    if (!m) throw Error("cannot write manifest in " + job.out.string());
}

void require_known(const Settings& s, std::initializer_list<std::span<const std::string_view>> groups) {
    std::vector<std::string_view> allowed(param_keys().begin(), param_keys().end());
    for (auto g : groups) allowed.insert(allowed.end(), g.begin(), g.end());
    s.given_config().require_known(allowed);
}

void write_trajectory_csv(const fs::path& path, const Trajectory& w, const Trajectory& c) {
    if (w.z.empty()) {
        CsvWriter out(path, {"x", "tau_wigner", "tau_classical"});
        for (std::size_t i = 0; i < w.x.size(); ++i) out.row({w.x[i], w.tau[i], c.tau[i]});
        return;
    }
    CsvWriter out(path, {"x", "tau_wigner", "tau_classical", "z_wigner", "z_classical"});
    for (std::size_t i = 0; i < w.x.size(); ++i) out.row({w.x[i], w.tau[i], c.tau[i], w.z[i], c.z[i]});
}

// ---- params ----------------------------------------------------------------

void cmd_params(Job& job) {
    Settings& s = job.settings;
    require_known(s, {});
    const PhysParams p = s.params(PhysParams::from_ratio(90.0, 1.0 / 30.0, 0.05));
    add_derived(job, p);
    const DerivedParams d = derive_params(p);
    for (const auto& [k, v] : job.derived) job.add_summary(k, v);
    job.add_summary("tunneling_regime", d.tunneling_regime ? "true" : "false");
    for (const auto& [k, v] : job.summary) std::cout << k << " = " << v << "\n";
}

// ---- wkb ---------------------------------------------------------------------

constexpr std::string_view kWkbKeys[] = {"barrier", "wkb.axis", "wkb.points", "wkb.pz_lo", "wkb.pz_hi", "wkb.ratios"};

Shape ionization_shape(Settings& s) {
    const Shape shape = parse_shape(s.str("barrier", "coulomb"));
    if (shape != Shape::Coulomb1D && shape != Shape::ZeroRange)
        throw ConfigError("this command needs barrier = coulomb or zero-range");
    return shape;
}

void cmd_wkb_scan(Job& job) {
    Settings& s = job.settings;
    require_known(s, {kWkbKeys});
    const PhysParams p = s.params(PhysParams::from_ratio(90.0, 1.0 / 30.0, 0.05, IpMode::nonrelativistic,
                                                         Tier::MagneticDipole));
    const Shape shape = ionization_shape(s);
    const std::string axis_name = s.str("wkb.axis", "exit");
    if (axis_name != "exit" && axis_name != "entry") throw ConfigError("wkb.axis must be exit or entry");
    const std::size_t points = s.count("wkb.points", 201);
    const double lo = s.num("wkb.pz_lo", -1.2), hi = s.num("wkb.pz_hi", 0.4);
    add_derived(job, p);

    const double Ip = ionization_potential(p.kappa, p.c, p.ip_mode);
    const BarrierModel b = BarrierModel::tunnel_ionization(p, shape);
    const auto g = momentum_scan(b, -Ip, p.tier, axis_name == "exit" ? MomentumAxis::exit : MomentumAxis::entry,
                                 {lo * Ip / p.c, hi * Ip / p.c, points});
    job.add_summary("peak_axis", g.peak_axis);
    job.add_summary("peak_axis_over_Ip_c", g.peak_axis * p.c / Ip);
    job.add_summary("peak_p_z", g.peak_p_z);
    job.add_summary("peak_at_edge", g.peak_at_edge ? "true" : "false");
    job.add_summary("multiple_maxima", g.multiple_maxima ? "true" : "false");
    job.files.emplace_back("wkb_scan.csv", [g](const fs::path& path) {
        CsvWriter w(path, {"q_z", "weight", "tier", "p_z"});
        for (std::size_t i = 0; i < g.p_z.size(); ++i) w.row({g.axis[i], g.values[i], to_string(g.tier), g.p_z[i]});
    });
    std::cout << fmt::format("{} peak q_z = {:.6g} ({:.4f} Ip/c)\n", axis_name, g.peak_axis, g.peak_axis * p.c / Ip);
}

void cmd_wkb_shift_curve(Job& job) {
    Settings& s = job.settings;
    require_known(s, {kWkbKeys});
    const PhysParams p = s.params(PhysParams::from_ratio(90.0, 1.0 / 30.0, 0.05, IpMode::nonrelativistic,
                                                         Tier::MagneticDipole));
    const Shape shape = ionization_shape(s);
    const std::vector<double> ratios =
        s.list("wkb.ratios", {1.0 / 50, 1.0 / 40, 1.0 / 30, 1.0 / 25, 1.0 / 20, 1.0 / 17});
    const std::size_t points = s.count("wkb.points", 201);
    add_derived(job, p);

    const auto curve = exit_shift_curve(shape, p.kappa, ratios, p.tier, p.c, points);
    const double unit = 0.5 * p.kappa * p.kappa / p.c;
    job.files.emplace_back("shift_curve.csv", [curve, unit](const fs::path& path) {
        CsvWriter w(path, {"field_ratio", "q_exit", "q_entry", "q_exit_over_Ip_c", "q_entry_over_Ip_c"});
        for (const auto& pt : curve)
            w.row({pt.field_ratio, pt.q_exit, pt.q_entry, pt.q_exit / unit, pt.q_entry / unit});
    });
    for (const auto& pt : curve)
        std::cout << fmt::format("E0/Ea = {:.5f}  exit {:.4f} Ip/c  entry {:.4f} Ip/c\n", pt.field_ratio,
                                 pt.q_exit / unit, pt.q_entry / unit);
}

// ---- sfa ---------------------------------------------------------------------

constexpr std::string_view kSfaKeys[] = {"sfa.tier",   "sfa.weight",  "sfa.frame",   "sfa.px_max",  "sfa.px_points",
                                         "sfa.pz_points", "sfa.p_x",  "sfa.p_z",     "sfa.samples", "sfa.span",
                                         "sfa.t_span", "sfa.t_points"};

void cmd_sfa_map(Job& job) {
    Settings& s = job.settings;
    require_known(s, {kSfaKeys});
    const PhysParams p = s.params(PhysParams::from_ratio(90.0, 1.0 / 30.0, 10.0, IpMode::relativistic));
    const SfaTier tier = parse_sfa_tier(s.str("sfa.tier", "relativistic"));
    const MapWeight weight = parse_map_weight(s.str("sfa.weight", "full"));
    const std::string frame = s.str("sfa.frame", "detector");
    if (frame != "detector" && frame != "exit") throw ConfigError("sfa.frame must be detector or exit");
    if (frame == "exit" && tier != SfaTier::Relativistic) throw UnsupportedError("the exit map is relativistic only");
    const double px_max = s.num("sfa.px_max", 0.3);
    if (!(px_max > 0.0 && px_max < 1.0)) throw ConfigError("sfa.px_max must be in (0, 1) (units of E0/omega)");
    const std::size_t nx = s.count("sfa.px_points", 61), nz = s.count("sfa.pz_points", 121);
    add_derived(job, p);

    const double Ip = ionization_potential(p.kappa, p.c, p.ip_mode);
    const double centre = tier == SfaTier::Relativistic ? ridge_formula(0.0, p) : 0.0;
    const std::vector<double> pz = linspace(centre - 0.5 * Ip / p.c, centre + 0.5 * Ip / p.c, nz);
    MomentumMap m;
    if (frame == "detector") {
        const std::vector<double> px = linspace(-px_max * p.E0 / p.omega, px_max * p.E0 / p.omega, nx);
        m = detector_map(p, tier, px, pz, weight);
    } else {
        const double te = std::asin(px_max) / p.omega;
        m = exit_map(p, linspace(-te, te, nx), pz, weight);
    }
    const double peak = argmax_p_z(0.0, p, tier, weight);
    job.add_summary("argmax_p_z_at_px0", peak);
    job.add_summary("ridge_formula_at_px0", ridge_formula(0.0, p));
    job.add_summary("Ip_over_3c", Ip / (3.0 * p.c));
    job.files.emplace_back("map.csv", [m](const fs::path& path) { write_map_csv(path, m); });
    std::cout << fmt::format("argmax p_z(p_x = 0) = {:.6g} ({:.4f} Ip/c)\n", peak, peak * p.c / Ip);
}

void cmd_sfa_trajectory(Job& job) {
    Settings& s = job.settings;
    require_known(s, {kSfaKeys});
    const PhysParams p = s.params(PhysParams::from_ratio(90.0, 1.0 / 30.0, 0.05, IpMode::relativistic));
    const SfaTier tier = parse_sfa_tier(s.str("sfa.tier", "relativistic"));
    const double px = s.num("sfa.p_x", 0.0);
    const std::string pz_text = s.str("sfa.p_z", "peak");
    const std::size_t samples = s.count("sfa.samples", 200);
    const double span = s.num("sfa.span", 0.0);
    add_derived(job, p);

    const double pz = pz_text == "peak"
                          ? (tier == SfaTier::Relativistic ? argmax_p_z(px, p, tier, MapWeight::exponent) : 0.0)
                          : parse_number("sfa.p_z", pz_text);
    const ComplexTrajectory tr = complex_trajectory({px, 0.0, pz}, p, tier, samples, span);
    job.add_summary("p_z", pz);
    job.add_summary("saddle_re", tr.saddle.root.real());
    job.add_summary("saddle_im", tr.saddle.root.imag());
    job.add_summary("entry_x", tr.entry.x.x.real());
    job.add_summary("exit_x", tr.exit.x.x.real());
    job.add_summary("entry_q_z", tr.entry.q.z.real());
    job.add_summary("exit_q_z", tr.exit.q.z.real());
    job.add_summary("exit_q_x_abs", std::abs(tr.exit.q.x));
    job.files.emplace_back("trajectory.csv", [tr](const fs::path& path) {
        CsvWriter w(path, {"segment", "s_re", "s_im", "x_re", "x_im", "z_re", "z_im", "qx_re", "qx_im", "qz_re",
                           "qz_im"});
        auto emit = [&](std::string_view seg, const TrajectoryPoint& t) {
            w.row({seg, t.s.real(), t.s.imag(), t.x.x.real(), t.x.x.imag(), t.x.z.real(), t.x.z.imag(),
                   t.q.x.real(), t.q.x.imag(), t.q.z.real(), t.q.z.imag()});
        };
        for (const auto& t : tr.under_barrier) emit("under_barrier", t);
        for (const auto& t : tr.continuum) emit("continuum", t);
    });
    std::cout << fmt::format("entry x = {:.6g}, exit x = {:.6g}, entry q_z = {:.6g}, exit q_z = {:.6g}\n",
                             tr.entry.x.x.real(), tr.exit.x.x.real(), tr.entry.q.z.real(), tr.exit.q.z.real());
}

void cmd_sfa_formation(Job& job) {
    Settings& s = job.settings;
    require_known(s, {kSfaKeys});
    const PhysParams p = s.params(PhysParams::from_ratio(1.0, 1.0 / 30.0, 0.005));
    const double px = s.num("sfa.p_x", 0.0);
    const double span = s.num("sfa.t_span", 6.0);
    const std::size_t n = s.count("sfa.t_points", 601);
    add_derived(job, p);

    const double tau_K = p.kappa / p.E0;
    const FormationCurve fc = formation_amplitude(px, p, linspace(-span * tau_K, span * tau_K, n));
    job.add_summary("tau_K", fc.tau_K);
    job.add_summary("t_s_re", fc.t_s_re);
    job.add_summary("t_s_im", fc.t_s_im);
    job.add_summary("rise_time", fc.rise_time);
    job.add_summary("t90", fc.t90);
    job.add_summary("plateau_drift", fc.plateau_drift);
    job.files.emplace_back("formation.csv", [fc](const fs::path& path) {
        CsvWriter w(path, {"t", "amplitude_re", "amplitude_im", "amplitude_abs"});
        for (std::size_t i = 0; i < fc.t.size(); ++i)
            w.row({fc.t[i], fc.amplitude[i].real(), fc.amplitude[i].imag(), std::abs(fc.amplitude[i])});
    });
    std::cout << fmt::format("rise (10-90 %) {:.4g} = {:.3f} tau_K, plateau drift {:.2e}\n", fc.rise_time,
                             fc.rise_time / tau_K, fc.plateau_drift);
}

// ---- wigner ------------------------------------------------------------------

constexpr std::string_view kWignerKeys[] = {
    "wigner.eps0",        "wigner.p_z",        "wigner.backend",  "wigner.approximation", "wigner.x_min",
    "wigner.x_max",       "wigner.grid_points", "wigner.rel_step", "wigner.far_field_factor", "wigner.ratios",
    "wigner.kappas",      "wigner.tiers"};

constexpr std::string_view kIonizationKeys[] = {"barrier", "regime"};

DerivativeOptions derivative_options(Settings& s) {
    DerivativeOptions d;
    d.rel_step = s.num("wigner.rel_step", d.rel_step);
    if (!(d.rel_step > 0.0 && d.rel_step < 0.1)) throw ConfigError("wigner.rel_step must be in (0, 0.1)");
    return d;
}

void cmd_wigner_model(Job& job) {
    Settings& s = job.settings;
    require_known(s, {kBarrierKeys, kWignerKeys});
    const bool bfield = s.flag("barrier.bfield", false);
    PhysParams defaults = PhysParams::from_ratio(90.0, 1.0 / 30.0, 0.05, IpMode::relativistic,
                                                 bfield ? Tier::MagneticDipole : Tier::NonRel);
    const PhysParams p = s.params(defaults);
    if (p.tier != Tier::NonRel && p.tier != Tier::MagneticDipole)
        throw UnsupportedError("scattering models support the NonRel and MagneticDipole tiers");
    if (bfield && p.tier != Tier::MagneticDipole) throw UnsupportedError("barrier.bfield needs tier = MagneticDipole");

    Config bc = s.given_config();
    if (!bc.has("barrier")) bc.set("barrier", "square");
    const Shape shape = parse_shape(bc.get_string("barrier", "square"));
    if (shape != Shape::Square && shape != Shape::Linear && shape != Shape::Parabolic)
        throw ConfigError("wigner model needs barrier = square, linear or parabolic");
    if (bfield && shape == Shape::Square) {
        if (!bc.has("barrier.bfield.lo")) bc.set("barrier.bfield.lo", "0");
        if (!bc.has("barrier.bfield.hi")) bc.set("barrier.bfield.hi", bc.get_string("barrier.a", format_double(14.0 / p.kappa)));
    }
    if (bfield && !bc.has("barrier.bfield.lo")) bc.set("barrier.bfield.lo", "0");
    const BarrierModel b = BarrierModel::from_config(bc, p);
    s.barrier(b);

    const double Ip = ionization_potential(p.kappa, p.c, p.ip_mode);
    const double eps0 = s.num("wigner.eps0", Ip);
    const double pz_default = (bfield && shape == Shape::Square) ? -b.vector_potential()->E0 * b.width() / (2.0 * p.c) : 0.0;
    const double pz = s.num("wigner.p_z", pz_default);
    DerivativeOptions d = derivative_options(s);
    d.steady.backend = parse_backend(s.str("wigner.backend", "closed_form"));
    const std::size_t n = s.count("wigner.grid_points", 400);
    add_derived(job, p);

    const SteadyProblem pr = SteadyProblem::scattering(b, p.tier);
    const double x_exit = pr.exit(eps0, pz);
    const double x_min = s.num("wigner.x_min", -1.0);
    const double x_max = s.num("wigner.x_max", 10.0 * x_exit);
    if (!(x_max > x_min)) throw ConfigError("wigner.x_max must exceed wigner.x_min");
    const ScatteringDelay r = scattering_delay(pr, eps0, pz, linspace(x_min, x_max, n), d, bfield);

    job.add_summary("x_exit", r.x_exit);
    job.add_summary("delay", r.delay.value);
    job.add_summary("delay_check", r.delay.check);
    job.add_summary("delay_stable", r.delay.stable ? "true" : "false");
    job.add_summary("far_field_x", r.delay.x_f);
    if (shape == Shape::Square && b.V0() > eps0)
        job.add_summary("thick_barrier_formula", 1.0 / (2.0 * std::sqrt((b.V0() - eps0) * eps0)));
    if (r.drift) {
        job.add_summary("drift", r.drift->value);
        job.add_summary("drift_stable", r.drift->stable ? "true" : "false");
    }
    job.add_summary("p_z", pz);
    job.files.emplace_back("wigner_model.csv",
                           [r](const fs::path& path) { write_trajectory_csv(path, r.wigner, r.classical); });
    std::cout << fmt::format("{} barrier: far-field delay {:.6e} ({}), x_exit {:.6g}\n", to_string(shape),
                             r.delay.value, r.delay.stable ? "stable" : "UNSTABLE", r.x_exit);
    if (r.drift) std::cout << fmt::format("far-field z drift {:.3e}\n", r.drift->value);
}

void cmd_wigner_ionization(Job& job) {
    Settings& s = job.settings;
    require_known(s, {kWignerKeys, kIonizationKeys});
    const std::string regime = s.str("regime", "deep");
    if (regime != "deep" && regime != "near") throw ConfigError("regime must be deep or near");
    const double ratio = regime == "deep" ? 1.0 / 30.0 : 1.0 / 17.0;
    const PhysParams p = s.params(PhysParams::from_ratio(90.0, ratio, 0.05));
    const Shape shape = ionization_shape(s);
    TunnelDelayOptions o;
    o.approximation = parse_approximation(s.str("wigner.approximation", "automatic"));
    const std::string backend = s.str("wigner.backend", "automatic");
    if (backend != "automatic") o.backend = parse_backend(backend);
    o.far_field_factor = s.num("wigner.far_field_factor", o.far_field_factor);
    o.grid_points = s.count("wigner.grid_points", static_cast<int>(o.grid_points));
    o.derivative = derivative_options(s);
    add_derived(job, p);

    const TunnelDelay t = tunnelion_delay(p, shape, p.tier, o);
    job.add_summary("regime", std::string(to_string(t.regime.regime)));
    job.add_summary("criterion", t.regime.criterion);
    job.add_summary("scaled_field", t.regime.scaled_field);
    job.add_summary("approximation", std::string(to_string(t.approximation)));
    job.add_summary("backend", std::string(to_string(t.backend)));
    job.add_summary("Ip", t.Ip);
    job.add_summary("p_z", t.p_z);
    job.add_summary("x0", t.x0);
    job.add_summary("xe", t.xe);
    job.add_summary("tau_W", t.tau_w.value);
    job.add_summary("tau_W_check", t.tau_w.check);
    job.add_summary("tau_W_Ip", t.tau_w.value * t.Ip);
    job.add_summary("tau_W_stable", t.tau_w.stable ? "true" : "false");
    job.files.emplace_back("wigner_ionization.csv",
                           [t](const fs::path& path) { write_trajectory_csv(path, t.wigner, t.classical); });
    std::cout << fmt::format("{} {} ({}, {}): tau_W = {:.6e}, tau_W Ip = {:.4e} ({})\n", to_string(p.tier),
                             to_string(t.regime.regime), to_string(t.approximation), to_string(t.backend),
                             t.tau_w.value, t.tau_w.value * t.Ip, t.tau_w.stable ? "stable" : "UNSTABLE");
}

void cmd_delay_vs_ip(Job& job) {
    Settings& s = job.settings;
    require_known(s, {kWignerKeys});
    const PhysParams p = s.params(PhysParams::from_ratio(90.0, 1.0 / 17.0, 0.05));
    const std::vector<double> ratios = s.list("wigner.ratios", {1.0 / 17.0, 1.0 / 10.0});
    const std::vector<double> kappas = s.list("wigner.kappas", {31.6, 39.8, 50.1, 63.1, 79.4, 100.0});
    std::vector<Tier> tiers;
    {
        std::string text = s.str("wigner.tiers", "NonRel,KleinGordon");
        std::string_view rest = text;
        while (true) {
            const auto comma = rest.find(',');
            tiers.push_back(parse_tier(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
    }
    TunnelDelayOptions o;
    o.derivative = derivative_options(s);
    add_derived(job, p);

    const auto rows = delay_vs_ip_scan(ratios, kappas, tiers, p.c, o);
    job.files.emplace_back("delay_vs_ip.csv", [rows](const fs::path& path) {
        CsvWriter w(path, {"field_ratio", "kappa", "Ip", "tier", "tau_W", "tau_W_Ip", "stable"});
        for (const auto& r : rows)
            w.row({r.field_ratio, r.kappa, r.Ip, to_string(r.tier), r.tau_w, r.tau_w_Ip,
                   std::string_view(r.stable ? "true" : "false")});
    });
    for (const auto& r : rows)
        std::cout << fmt::format("E0/Ea = {:.4f} {:>11} Ip = {:8.1f}  tau_W Ip = {:.5e}\n", r.field_ratio,
                                 to_string(r.tier), r.Ip, r.tau_w_Ip);
}

// ---- oracle --------------------------------------------------------------------

constexpr std::string_view kOracleKeys[] = {"oracle.rel_width", "oracle.x0",       "oracle.dx",
                                            "oracle.t_points",  "oracle.x_after",  "oracle.panels"};

void cmd_oracle_square(Job& job) {
    Settings& s = job.settings;
    require_known(s, {kOracleKeys, std::span<const std::string_view>(kBarrierKeys, 3)});
    const PhysParams p = s.params(PhysParams::from_ratio(90.0, 1.0 / 30.0, 0.05, IpMode::relativistic));
    if (p.tier != Tier::NonRel) throw UnsupportedError("the packet oracle runs the NonRel square barrier");
    Config bc = s.given_config();
    if (bc.get_string("barrier", "square") != "square") throw ConfigError("oracle square-packet needs barrier = square");
    bc.set("barrier", "square");
    const BarrierModel b = BarrierModel::from_config(bc, p);
    s.barrier(b);
    const double Ip = ionization_potential(p.kappa, p.c, p.ip_mode);
    const double rel_width = s.num("oracle.rel_width", 0.01);
    const double x0 = s.num("oracle.x0", -4.0);
    const double dx = s.num("oracle.dx", 0.01);
    const std::size_t nt = s.count("oracle.t_points", 121);
    const double after = s.num("oracle.x_after", 2.0);
    PacketQuadrature q;
    q.panels = s.count("oracle.panels", static_cast<int>(q.panels));
    if (!(dx > 0.0 && after > 0.0)) throw ConfigError("oracle.dx and oracle.x_after must be positive");
    add_derived(job, p);

    const GaussianPacketSpec spec = GaussianPacketSpec::from_energy(Ip, rel_width, x0);
    const SteadyProblem pr = SteadyProblem::scattering(b, Tier::NonRel);
    spec.validate(b);
    const double lo = b.width(), hi = b.width() + after;
    const std::vector<double> xw = linspace(lo, hi + 0.5, 401);
    const Trajectory w = wigner_trajectory(pr, Ip, 0.0, xw);
    const Trajectory c = classical_trajectory(pr, Ip, 0.0, xw);
    const auto hi_index = static_cast<std::size_t>(std::lround(400.0 * after / (after + 0.5)));
    const auto nx = static_cast<std::size_t>(std::lround((hi + 1.0 - (x0 - 3.0)) / dx)) + 1;
    const std::vector<double> x = linspace(x0 - 3.0, hi + 1.0, nx);
    const std::vector<double> t =
        linspace(predicted_arrival(w.tau.front(), spec), predicted_arrival(w.tau[hi_index], spec), nt);
    const PacketDensity d = propagate_packet(pr, spec, t, x, q);
    const PeakTrack track = track_peak(d, lo, hi + 0.5);

    std::vector<double> x_wigner(track.samples.size(), std::nan(""));
    double max_dev = 0.0;
    for (std::size_t i = 0; i < track.samples.size(); ++i) {
        const PeakSample& smp = track.samples[i];
        const double tau = smp.t - predicted_arrival(0.0, spec);
        const auto it = std::lower_bound(w.tau.begin(), w.tau.end(), tau);
        if (it == w.tau.begin() || it == w.tau.end()) continue;
        const auto j = static_cast<std::size_t>(it - w.tau.begin());
        x_wigner[i] = xw[j - 1] + (tau - w.tau[j - 1]) / (w.tau[j] - w.tau[j - 1]) * (xw[j] - xw[j - 1]);
        if (!smp.at_edge && x_wigner[i] <= hi) max_dev = std::max(max_dev, std::abs(smp.x - x_wigner[i]));
    }
    double norm_drift = 0.0;
    for (double v : d.norm) norm_drift = std::max(norm_drift, std::abs(v - d.norm.front()));

    job.add_summary("p0", spec.p0);
    job.add_summary("dp", spec.dp);
    job.add_summary("nodes", static_cast<double>(d.nodes));
    job.add_summary("core_nodes", static_cast<double>(d.core_nodes));
    job.add_summary("quadrature_change", d.quadrature_change);
    job.add_summary("norm_drift", norm_drift);
    job.add_summary("max_peak_vs_wigner", max_dev);
    job.add_summary("any_multimodal", track.any_multimodal ? "true" : "false");
    job.files.emplace_back("density.csv", [d](const fs::path& path) { write_density_csv(path, d); });
    job.files.emplace_back("peaks.csv", [track, x_wigner](const fs::path& path) {
        CsvWriter out(path, {"t", "x_peak", "x_wigner", "at_edge", "multimodal", "maxima"});
        for (std::size_t i = 0; i < track.samples.size(); ++i) {
            const PeakSample& smp = track.samples[i];
            out.row({smp.t, smp.x, x_wigner[i], static_cast<long long>(smp.at_edge),
                     static_cast<long long>(smp.multimodal), static_cast<long long>(smp.maxima.size())});
        }
    });
    job.files.emplace_back("trajectory.csv", [w, c](const fs::path& path) { write_trajectory_csv(path, w, c); });
    std::cout << fmt::format("packet peak vs Wigner: max |dx| = {:.4g} (grid {:.3g}), norm drift {:.2e}\n", max_dev,
                             dx, norm_drift);
}

// ---- acceptance ----------------------------------------------------------------

void cmd_acceptance(Job& job, const std::vector<int>& only, bool& all_pass) {
    require_known(job.settings, {});
    for (int id : only)
        if (id < 1 || id > kCriterionCount) throw ConfigError(fmt::format("no acceptance criterion {}", id));
    std::vector<CriterionResult> results;
    for (int id = 1; id <= kCriterionCount; ++id) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        results.push_back(run_criterion(id));
        std::cout << format_result(results.back()) << std::endl;
    }
    all_pass = std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
    const auto passed = std::count_if(results.begin(), results.end(), [](const CriterionResult& r) { return r.pass; });
    std::cout << fmt::format("{}/{} criteria passed\n", passed, results.size());
    job.add_summary("passed", static_cast<double>(passed));
    job.add_summary("total", static_cast<double>(results.size()));
    job.files.emplace_back("acceptance.csv", [results](const fs::path& path) {
        CsvWriter w(path, {"id", "name", "pass", "seconds", "measured"});
        for (const auto& r : results)
            w.row({static_cast<long long>(r.id), std::string_view(r.name), std::string_view(r.pass ? "PASS" : "FAIL"),
                   r.seconds, std::string_view(r.measured)});
    });
}

unsigned threads_from_env() {
    const char* env = std::getenv("TUNNELION_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0) throw ConfigError("TUNNELION_THREADS must be a non-negative integer");
    return static_cast<unsigned>(v);
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Relativistic tunnel-ionization toolkit: WKB, SFA, Wigner delays and a wave-packet oracle"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "out";
    std::vector<std::string> sets;
    int threads = -1;
    auto globals = [&](CLI::App* a) {
        a->add_option("--config", config_path, "key=value parameter file");
        a->add_option("--out", out_dir, "output directory");
        a->add_option("--set", sets, "override key=value (repeatable)")->take_all();
        a->add_option("--threads", threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    };
    globals(&app);

    std::string command;
    std::vector<std::pair<std::string, std::string>> flag_sets;
    std::vector<int> only;

    std::string barrier_flag, regime_flag, tier_flag, where_flag;
    bool bfield_flag = false;
    using Setup = std::function<void(CLI::App*)>;
    // Every job is reachable as "group name" and as the flat "group-name".
    auto job = [&](CLI::App* group, const std::string& name, const std::string& desc, const std::string& id,
                   const Setup& setup = {}) {
        for (CLI::App* parent : {&app, group}) {
            if (!parent) continue;
            CLI::App* sub = parent->add_subcommand(parent == &app ? id : name, desc);
            sub->fallthrough();
            sub->callback([&command, id] { command = id; });
            if (setup) setup(sub);
            if (!group) break;
        }
    };
    auto group = [&](const std::string& name, const std::string& desc) {
        return app.add_subcommand(name, desc)->require_subcommand(1)->fallthrough();
    };

    job(nullptr, "params", "print parameters derived from the configuration", "params");

    CLI::App* wkb = group("wkb", "WKB tunneling momenta");
    job(wkb, "scan", "tunneling amplitude against the exit or entry kinetic momentum", "wkb-scan");
    job(wkb, "shift-curve", "exit and entry momentum peaks against E0/Ea", "wkb-shift-curve");

    CLI::App* sfa = group("sfa", "strong-field approximation");
    job(sfa, "map", "photoelectron momentum map", "sfa-map", [&](CLI::App* a) {
        a->add_option("--where", where_flag, "detector or exit")->check(CLI::IsMember({"detector", "exit"}));
    });
    job(sfa, "trajectory", "complex saddle-point trajectory", "sfa-trajectory");
    job(sfa, "formation", "ionization amplitude against time", "sfa-formation");

    CLI::App* wig = group("wigner", "Wigner trajectories and delays");
    job(wig, "model", "scattering on a model barrier", "wigner-model", [&](CLI::App* a) {
        a->add_option("--barrier", barrier_flag, "square, linear or parabolic")
            ->check(CLI::IsMember({"square", "linear", "parabolic"}));
        a->add_flag("--bfield", bfield_flag, "add the transverse magnetic field");
    });
    job(wig, "ionization", "tunnel-ionization delay", "wigner-ionization", [&](CLI::App* a) {
        a->add_option("--regime", regime_flag, "deep (E0/Ea = 1/30) or near (1/17)")
            ->check(CLI::IsMember({"deep", "near"}));
        a->add_option("--tier", tier_flag, "NonRel, MagneticDipole or KleinGordon");
    });
    job(wig, "delay-vs-ip", "zero-range scaled delay against Ip", "delay-vs-ip");

    CLI::App* orc = group("oracle", "wave-packet oracle");
    job(orc, "square-packet", "Gaussian packet through the square barrier", "oracle-square");

    job(nullptr, "acceptance", "run the acceptance criteria", "acceptance", [&](CLI::App* a) {
        a->add_option("--only", only, "criterion numbers")->delimiter(',');
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (threads < 0) threads = static_cast<int>(threads_from_env());
        set_max_threads(static_cast<unsigned>(threads));

        Config cfg = config_path.empty() ? Config{} : Config::load_file(config_path);
        for (const auto& s : sets) cfg.assign(s);
        if (!barrier_flag.empty()) cfg.set("barrier", barrier_flag);
        if (bfield_flag) cfg.set("barrier.bfield", "true");
        if (!regime_flag.empty()) cfg.set("regime", regime_flag);
        if (!tier_flag.empty()) cfg.set("tier", tier_flag);
        if (!where_flag.empty()) cfg.set("sfa.frame", where_flag);

        Job job{command, Settings(std::move(cfg)), out_dir, {}, {}, {}};
        bool all_pass = true;
        if (command == "params") cmd_params(job);
        else if (command == "wkb-scan") cmd_wkb_scan(job);
        else if (command == "wkb-shift-curve") cmd_wkb_shift_curve(job);
        else if (command == "sfa-map") cmd_sfa_map(job);
        else if (command == "sfa-trajectory") cmd_sfa_trajectory(job);
        else if (command == "sfa-formation") cmd_sfa_formation(job);
        else if (command == "wigner-model") cmd_wigner_model(job);
        else if (command == "wigner-ionization") cmd_wigner_ionization(job);
        else if (command == "delay-vs-ip") cmd_delay_vs_ip(job);
        else if (command == "oracle-square") cmd_oracle_square(job);
        else if (command == "acceptance") cmd_acceptance(job, only, all_pass);
        write_outputs(job);
        return kOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

}  // namespace tunnelion::cli
