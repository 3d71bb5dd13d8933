#pragma once

#include <string>
#include <string_view>

namespace tunnelion {

inline constexpr double kSpeedOfLight = 137.035999;
inline constexpr double kPi = 3.14159265358979323846;

enum class IpMode { nonrelativistic, relativistic };

// Ordered by the corrections they include.
enum class Tier { NonRel, MagneticDipole, MagneticDipolePlusKinetic, FullyRelativistic, KleinGordon };

std::string_view to_string(IpMode m);
std::string_view to_string(Tier t);
IpMode parse_ip_mode(std::string_view s);
Tier parse_tier(std::string_view s);

bool includes_magnetic_dipole(Tier t);

struct PhysParams {
    double kappa = 1.0;
    double c = kSpeedOfLight;
    double E0 = 1.0 / 30.0;
    double omega = 0.05;
    IpMode ip_mode = IpMode::nonrelativistic;
    Tier tier = Tier::NonRel;

    // E0 given as a fraction of the atomic field kappa^3.
    static PhysParams from_ratio(double kappa, double E0_over_Ea, double omega,
                                 IpMode mode = IpMode::nonrelativistic,
                                 Tier tier = Tier::NonRel, double c = kSpeedOfLight);

    void validate() const;
};

struct DerivedParams {
    double Ip;          // per ip_mode
    double Ip_nr;       // kappa^2 / 2
    double Ea;          // kappa^3, always from the nonrelativistic Ip
    double gamma;       // Keldysh parameter
    double tau_K;       // kappa / E0
    double xi;          // E0 / (c omega)
    double field_ratio; // E0 / Ea
    bool tunneling_regime;
};

double ionization_potential(double kappa, double c, IpMode mode);

DerivedParams derive_params(const PhysParams& p);

}  // namespace tunnelion
