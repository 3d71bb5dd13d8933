#include "tunnelion/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tunnelion/csv.hpp"
#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"

namespace tunnelion {

std::string_view to_string(Shape s) {
    switch (s) {
        case Shape::Square: return "square";
        case Shape::Linear: return "linear";
        case Shape::Parabolic: return "parabolic";
        case Shape::Coulomb1D: return "coulomb";
        case Shape::ZeroRange: return "zero_range";
        case Shape::ParabolicCoord: return "parabolic_coord";
    }
    return "?";
}

Shape parse_shape(std::string_view s) {
    if (s == "square") return Shape::Square;
    if (s == "linear") return Shape::Linear;
    if (s == "parabolic") return Shape::Parabolic;
    if (s == "coulomb" || s == "coulomb1d") return Shape::Coulomb1D;
    if (s == "zero_range" || s == "zero-range" || s == "zerorange") return Shape::ZeroRange;
    if (s == "parabolic_coord" || s == "parabolic-coord") return Shape::ParabolicCoord;
    throw ConfigError("unknown barrier shape '" + std::string(s) + "'");
}

long double VectorPotentialZ::operator()(long double x) const {
    return static_cast<long double>(E0) *
           std::clamp(x, static_cast<long double>(lo), static_cast<long double>(hi));
}

double VectorPotentialZ::slope(double x) const { return (x >= lo && x <= hi) ? E0 : 0.0; }

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string("barrier: ") + what + " must be positive");
}

}  // namespace

BarrierModel BarrierModel::square(double V0, double a) {
    require_positive(a, "width a");
    BarrierModel b;
    b.shape_ = Shape::Square;
    b.V0_ = V0;
    b.a_ = a;
    return b;
}

BarrierModel BarrierModel::linear(double V0, double F) {
    require_positive(F, "slope F");
    BarrierModel b;
    b.shape_ = Shape::Linear;
    b.V0_ = V0;
    b.F_ = F;
    return b;
}

BarrierModel BarrierModel::parabolic(double V0, double beta) {
    require_positive(beta, "curvature beta");
    BarrierModel b;
    b.shape_ = Shape::Parabolic;
    b.V0_ = V0;
    b.beta_ = beta;
    return b;
}

BarrierModel BarrierModel::coulomb(double kappa, double E0) {
    require_positive(kappa, "kappa");
    require_positive(E0, "E0");
    BarrierModel b;
    b.shape_ = Shape::Coulomb1D;
    b.kappa_ = kappa;
    b.F_ = E0;
    b.Ip_ = 0.5 * kappa * kappa;
    return b;
}

BarrierModel BarrierModel::zero_range(double Ip, double E0) {
    require_positive(Ip, "Ip");
    require_positive(E0, "E0");
    BarrierModel b;
    b.shape_ = Shape::ZeroRange;
    b.Ip_ = Ip;
    b.kappa_ = std::sqrt(2.0 * Ip);
    b.F_ = E0;
    return b;
}

BarrierModel BarrierModel::parabolic_coord(double E0) {
    require_positive(E0, "E0");
    BarrierModel b;
    b.shape_ = Shape::ParabolicCoord;
    b.F_ = E0;
    b.kappa_ = 1.0;
    b.Ip_ = 0.5;
    return b;
}

BarrierModel BarrierModel::tunnel_ionization(const PhysParams& p, Shape shape) {
    p.validate();
    BarrierModel b;
    switch (shape) {
        case Shape::Coulomb1D: b = coulomb(p.kappa, p.E0); break;
        case Shape::ZeroRange:
            b = zero_range(ionization_potential(p.kappa, p.c, p.ip_mode), p.E0);
            break;
        case Shape::ParabolicCoord: b = parabolic_coord(p.E0); break;
        default: throw UnsupportedError("tunnel_ionization: shape must be coulomb, zero_range or parabolic_coord");
    }
    b.c_ = p.c;
    b.az_ = VectorPotentialZ{p.E0};
    return b;
}

BarrierModel BarrierModel::with_vector_potential(VectorPotentialZ az) const {
    BarrierModel b = *this;
    b.az_ = az;
    return b;
}

BarrierModel BarrierModel::with_light_speed(double c) const {
    require_positive(c, "c");
    BarrierModel b = *this;
    b.c_ = c;
    return b;
}

long double BarrierModel::potential_ld(long double x) const {
    const long double V0 = V0_, F = F_;
    switch (shape_) {
        case Shape::Square: return (x >= 0.0L && x <= static_cast<long double>(a_)) ? V0 : 0.0L;
        case Shape::Linear: return x >= 0.0L ? V0 - F * x : 0.0L;
        case Shape::Parabolic: return x >= 0.0L ? V0 - static_cast<long double>(beta_) * x * x : 0.0L;
        case Shape::Coulomb1D: return -F * x - static_cast<long double>(kappa_) / x;
        case Shape::ZeroRange: return -F * x;
        case Shape::ParabolicCoord: return -0.25L / x - 0.125L / (x * x) - F * x / 8.0L;
    }
    return 0.0L;
}

double BarrierModel::potential_d1(double x) const {
    switch (shape_) {
        case Shape::Square: return 0.0;
        case Shape::Linear: return x >= 0.0 ? -F_ : 0.0;
        case Shape::Parabolic: return x >= 0.0 ? -2.0 * beta_ * x : 0.0;
        case Shape::Coulomb1D: return -F_ + kappa_ / (x * x);
        case Shape::ZeroRange: return -F_;
        case Shape::ParabolicCoord: return 0.25 / (x * x) + 0.25 / (x * x * x) - F_ / 8.0;
    }
    return 0.0;
}

double BarrierModel::potential_d2(double x) const {
    switch (shape_) {
        case Shape::Square:
        case Shape::Linear:
        case Shape::ZeroRange: return 0.0;
        case Shape::Parabolic: return x >= 0.0 ? -2.0 * beta_ : 0.0;
        case Shape::Coulomb1D: return -2.0 * kappa_ / (x * x * x);
        case Shape::ParabolicCoord: return -0.5 / (x * x * x) - 0.75 / (x * x * x * x);
    }
    return 0.0;
}

double BarrierModel::domain_lo() const {
    switch (shape_) {
        case Shape::Coulomb1D:
        case Shape::ParabolicCoord:
        case Shape::ZeroRange: return 0.0;
        default: return -std::numeric_limits<double>::infinity();
    }
}

bool BarrierModel::singular_at_origin() const {
    return shape_ == Shape::Coulomb1D || shape_ == Shape::ParabolicCoord;
}

std::optional<double> BarrierModel::fixed_entry() const {
    if (singular_at_origin()) return std::nullopt;
    return 0.0;
}

std::vector<double> BarrierModel::breakpoints() const {
    switch (shape_) {
        case Shape::Square: return {0.0, a_};
        case Shape::Linear:
        case Shape::Parabolic: return {0.0};
        default: return {};
    }
}

double BarrierModel::length_scale(double eps) const {
    switch (shape_) {
        case Shape::Square: return a_;
        case Shape::Linear: return std::max(V0_ - eps, 1e-300) / F_;
        case Shape::Parabolic: return std::sqrt(std::max(V0_ - eps, 1e-300) / beta_);
        case Shape::Coulomb1D:
        case Shape::ZeroRange: return std::abs(eps) / F_;
        case Shape::ParabolicCoord: return 8.0 * std::abs(eps) / F_;
    }
    return 1.0;
}

void BarrierModel::write_config(Config& cfg) const {
    cfg.set("barrier", std::string(to_string(shape_)));
    auto put = [&](const char* key, double v) { cfg.set(key, format_double(v)); };
    switch (shape_) {
        case Shape::Square: put("barrier.V0", V0_); put("barrier.a", a_); break;
        case Shape::Linear: put("barrier.V0", V0_); put("barrier.F", F_); break;
        case Shape::Parabolic: put("barrier.V0", V0_); put("barrier.beta", beta_); break;
        case Shape::Coulomb1D: put("barrier.kappa", kappa_); put("barrier.E0", F_); break;
        case Shape::ZeroRange: put("barrier.Ip", Ip_); put("barrier.E0", F_); break;
        case Shape::ParabolicCoord: put("barrier.E0", F_); break;
    }
    put("barrier.c", c_);
    cfg.set("barrier.bfield", az_ ? "true" : "false");
    if (az_) {
        put("barrier.bfield.E0", az_->E0);
        put("barrier.bfield.lo", az_->lo);
        put("barrier.bfield.hi", az_->hi);
    }
}

BarrierModel BarrierModel::from_config(const Config& cfg, const PhysParams& p) {
    const Shape shape = parse_shape(cfg.get_string("barrier", "coulomb"));
    const double Ip = ionization_potential(p.kappa, p.c, p.ip_mode);
    BarrierModel b;
    switch (shape) {
        case Shape::Square:
            b = square(cfg.get_double("barrier.V0", 2.0 * Ip), cfg.get_double("barrier.a", 14.0 / p.kappa));
            break;
        case Shape::Linear:
            b = linear(cfg.get_double("barrier.V0", 2.0 * Ip), cfg.get_double("barrier.F", p.E0));
            break;
        case Shape::Parabolic:
            b = parabolic(cfg.get_double("barrier.V0", 2.0 * Ip),
                          cfg.get_double("barrier.beta", std::pow(p.kappa, 4) / 30.0));
            break;
        case Shape::Coulomb1D:
            b = coulomb(cfg.get_double("barrier.kappa", p.kappa), cfg.get_double("barrier.E0", p.E0));
            break;
        case Shape::ZeroRange:
            b = zero_range(cfg.get_double("barrier.Ip", Ip), cfg.get_double("barrier.E0", p.E0));
            break;
        case Shape::ParabolicCoord: b = parabolic_coord(cfg.get_double("barrier.E0", p.E0)); break;
    }
    b.c_ = cfg.get_double("barrier.c", p.c);
    const std::string bf = cfg.get_string("barrier.bfield", "false");
    if (bf == "true" || bf == "1") {
        VectorPotentialZ az;
        az.E0 = cfg.get_double("barrier.bfield.E0", p.E0);
        az.lo = cfg.get_double("barrier.bfield.lo", -std::numeric_limits<double>::infinity());
        az.hi = cfg.get_double("barrier.bfield.hi", std::numeric_limits<double>::infinity());
        b.az_ = az;
    } else if (bf != "false" && bf != "0") {
        throw ConfigError("barrier.bfield must be true or false");
    }
    return b;
}

// ---- effective potential ----------------------------------------------------

ScalarField electric_field(const PotentialPair& pot, double t, double c) {
    return [pot, t, c](double x) {
        constexpr double h = 1e-20;
        using C = std::complex<double>;
        const double dphi = pot.phi ? pot.phi(C(x, h), C(t, 0.0)).imag() / h : 0.0;
        const double dadt = pot.a_x ? pot.a_x(C(x, 0.0), C(t, h)).imag() / h : 0.0;
        return -dphi - dadt / c;
    };
}

EffectivePotential::EffectivePotential(ScalarField e_field, ScalarField binding, double origin)
    : e_field_(std::move(e_field)), binding_(std::move(binding)), origin_(origin) {
    if (!e_field_) e_field_ = [](double) { return 0.0; };
    if (!binding_) binding_ = [](double) { return 0.0; };
}

double EffectivePotential::field_term(double x) const {
    return integrate(e_field_, origin_, x, 1e-14);
}

EffectivePotential effective_potential(ScalarField e_field, ScalarField binding, double origin) {
    return EffectivePotential(std::move(e_field), std::move(binding), origin);
}

// ---- longitudinal momentum -------------------------------------------------

double position_energy(const BarrierModel& b, double eps, double p_y, double p_z, double x,
                       Tier tier) {
    const double q = includes_magnetic_dipole(tier) ? b.q_z(p_z, x) : p_z;
    return eps - 0.5 * p_y * p_y - 0.5 * q * q;
}

long double px_squared(const BarrierModel& b, long double eps, long double p_y, long double p_z,
                       long double x, Tier tier) {
    const long double c = b.light_speed();
    long double q = p_z;
    if (includes_magnetic_dipole(tier) && b.vector_potential()) q += (*b.vector_potential())(x) / c;
    const long double V = b.potential_ld(x);
    switch (tier) {
        case Tier::NonRel:
        case Tier::MagneticDipole: return 2.0L * (eps - V) - p_y * p_y - q * q;
        case Tier::MagneticDipolePlusKinetic: {
            const long double p0 = 2.0L * (eps - V) - p_y * p_y - q * q;
            return p0 + p0 * p0 / (4.0L * c * c);
        }
        case Tier::FullyRelativistic:
        case Tier::KleinGordon: {
            const long double W = eps - V;
            return 2.0L * W + W * W / (c * c) - p_y * p_y - q * q;
        }
    }
    return 0.0L;
}

LongitudinalMomentum longitudinal_momentum(const BarrierModel& b, double eps, double p_y,
                                           double p_z, double x, Tier tier) {
    const long double p2 = px_squared(b, eps, p_y, p_z, x, tier);
    return {static_cast<double>(std::sqrt(std::abs(p2))), p2 < 0.0L};
}

namespace {

long double bisect_ld(const std::function<long double(long double)>& f, long double lo,
                      long double hi) {
    long double flo = f(lo), fhi = f(hi);
    if (flo == 0.0L) return lo;
    if (fhi == 0.0L) return hi;
    if ((flo > 0) == (fhi > 0)) throw ConvergenceError("turning_points: lost bracket");
    for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + hi);
        if (mid == lo || mid == hi) break;
        const long double fm = f(mid);
        if (fm == 0.0L) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

}  // namespace

TurningPoints turning_points(const BarrierModel& b, double eps, double p_y, double p_z, Tier tier) {
    auto f = [&](long double x) { return px_squared(b, eps, p_y, p_z, x, tier); };
    const double L = b.length_scale(eps);

    if (b.shape() == Shape::Square) {
        const double a = b.width();
        for (double x : {0.0, 0.5 * a, a})
            if (f(x) >= 0.0L) throw NoBarrierError("turning_points: energy above the square barrier");
        return {0.0, a};
    }

    if (const auto entry = b.fixed_entry()) {
        const long double x0 = *entry;
        if (f(x0) >= 0.0L) throw NoBarrierError("turning_points: energy above the barrier top");
        for (double span : {4.0, 16.0, 64.0}) {
            const int n = 400;
            long double prev = x0;
            for (int k = 0; k <= n; ++k) {
                const long double x =
                    x0 + static_cast<long double>(L) * 1e-6L *
                             std::pow(static_cast<long double>(span) * 1e6L, static_cast<long double>(k) / n);
                if (f(x) >= 0.0L) {
                    const long double xe = bisect_ld(f, prev, x);
                    return {static_cast<double>(x0), static_cast<double>(xe)};
                }
                prev = x;
            }
        }
        throw NoBarrierError("turning_points: no tunnel exit found");
    }

    // Singular models: both points from a log-spaced scan around the minimum of p_x^2.
    const int n = 400;
    const long double lo = 1e-6L * L, hi = 4.0L * L;
    std::vector<long double> xs(n + 1), fs(n + 1);
    std::size_t kmin = 0;
    for (int k = 0; k <= n; ++k) {
        xs[k] = lo * std::pow(hi / lo, static_cast<long double>(k) / n);
        fs[k] = f(xs[k]);
        if (fs[k] < fs[kmin]) kmin = k;
    }
    if (fs[kmin] >= 0.0L) throw NoBarrierError("turning_points: energy above the barrier top");
    std::size_t l = kmin;
    while (l > 0 && fs[l] < 0.0L) --l;
    std::size_t r = kmin;
    while (r < static_cast<std::size_t>(n) && fs[r] < 0.0L) ++r;
    if (fs[l] < 0.0L) throw NoBarrierError("turning_points: no inner turning point");
    if (fs[r] < 0.0L) throw NoBarrierError("turning_points: no tunnel exit in search range");
    const long double x0 = bisect_ld(f, xs[l], xs[l + 1]);
    const long double xe = bisect_ld(f, xs[r - 1], xs[r]);
    return {static_cast<double>(x0), static_cast<double>(xe)};
}

void write_grid_csv(const std::filesystem::path& path, const BarrierModel& b, double eps,
                    double p_y, double p_z, Tier tier, std::span<const double> xs) {
    CsvWriter out(path, {"x", "V_eff", "eps_x", "q_z"});
    for (double x : xs) {
        const double q = includes_magnetic_dipole(tier) ? b.q_z(p_z, x) : p_z;
        out.row({x, b.potential(x), position_energy(b, eps, p_y, p_z, x, tier), q});
    }
}

}  // namespace tunnelion
