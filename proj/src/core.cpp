#include "tunnelion/core.hpp"

#include <cmath>
#include <string>

#include "tunnelion/errors.hpp"

namespace tunnelion {

std::string_view to_string(IpMode m) {
    return m == IpMode::relativistic ? "relativistic" : "nonrelativistic";
}

std::string_view to_string(Tier t) {
    switch (t) {
        case Tier::NonRel: return "NonRel";
        case Tier::MagneticDipole: return "MagneticDipole";
        case Tier::MagneticDipolePlusKinetic: return "MagneticDipolePlusKinetic";
        case Tier::FullyRelativistic: return "FullyRelativistic";
        case Tier::KleinGordon: return "KleinGordon";
    }
    return "?";
}

IpMode parse_ip_mode(std::string_view s) {
    if (s == "nonrelativistic" || s == "nonrel") return IpMode::nonrelativistic;
    if (s == "relativistic" || s == "rel") return IpMode::relativistic;
    throw ConfigError("unknown ip_mode '" + std::string(s) + "'");
}

Tier parse_tier(std::string_view s) {
    for (Tier t : {Tier::NonRel, Tier::MagneticDipole, Tier::MagneticDipolePlusKinetic,
                   Tier::FullyRelativistic, Tier::KleinGordon}) {
        if (s == to_string(t)) return t;
    }
    throw ConfigError("unknown tier '" + std::string(s) + "'");
}

bool includes_magnetic_dipole(Tier t) { return t != Tier::NonRel; }

PhysParams PhysParams::from_ratio(double kappa, double E0_over_Ea, double omega, IpMode mode,
                                  Tier tier, double c) {
    PhysParams p;
    p.kappa = kappa;
    p.c = c;
    p.E0 = E0_over_Ea * kappa * kappa * kappa;
    p.omega = omega;
    p.ip_mode = mode;
    p.tier = tier;
    p.validate();
    return p;
}

void PhysParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError(std::string(name) + " must be finite and positive");
    };
    positive(kappa, "kappa");
    positive(c, "c");
    positive(E0, "E0");
    positive(omega, "omega");
    if (ip_mode == IpMode::relativistic && kappa >= c)
        throw DomainError("relativistic ip_mode requires kappa < c");
}

double ionization_potential(double kappa, double c, IpMode mode) {
    if (mode == IpMode::nonrelativistic) return 0.5 * kappa * kappa;
    if (kappa >= c) throw DomainError("relativistic ip_mode requires kappa < c");
    // c^2 - sqrt(c^4 - kappa^2 c^2) without the cancellation
    const double c2 = c * c;
    return kappa * kappa * c2 / (c2 + c * std::sqrt(c2 - kappa * kappa));
}

DerivedParams derive_params(const PhysParams& p) {
    p.validate();
    DerivedParams d{};
    d.Ip = ionization_potential(p.kappa, p.c, p.ip_mode);
    d.Ip_nr = 0.5 * p.kappa * p.kappa;
    d.Ea = p.kappa * p.kappa * p.kappa;
    d.gamma = p.omega * std::sqrt(2.0 * d.Ip) / p.E0;
    d.tau_K = p.kappa / p.E0;
    d.xi = p.E0 / (p.c * p.omega);
    d.field_ratio = p.E0 / d.Ea;
    d.tunneling_regime = d.gamma < 1.0;
    return d;
}

}  // namespace tunnelion
