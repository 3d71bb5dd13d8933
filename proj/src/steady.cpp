#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/numeric/odeint.hpp>

#include "tunnelion/errors.hpp"
#include "tunnelion/numerics.hpp"
#include "tunnelion/specfun.hpp"
#include "tunnelion/wigner.hpp"

namespace tunnelion {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr cplx kI{0.0, 1.0};

Poly4 poly(std::initializer_list<double> c) {
    Poly4 p;
    std::size_t i = 0;
    for (double v : c) p.c[i++] = v;
    return p;
}

Poly4 add(const Poly4& a, const Poly4& b, double sb = 1.0) {
    Poly4 r;
    for (std::size_t i = 0; i < 5; ++i) r.c[i] = a.c[i] + sb * b.c[i];
    return r;
}

Poly4 scale(const Poly4& a, double s) {
    Poly4 r;
    for (std::size_t i = 0; i < 5; ++i) r.c[i] = s * a.c[i];
    return r;
}

Poly4 mul(const Poly4& a, const Poly4& b) {
    if (a.degree() + b.degree() > 4) throw UnsupportedError("polynomial degree above 4");
    Poly4 r;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; i + j < 5; ++j) r.c[i + j] += a.c[i] * b.c[j];
    return r;
}

// Two independent solutions of u'' = q u for quadratic q; f1 is outgoing
// (or decaying to the right) where that is meaningful.
struct BasisValue {
    cplx f1, f1p, f2, f2p;
    double ls1 = 0.0, ls2 = 0.0;  // log scales of the (f1, f1p) and (f2, f2p) pairs

    BasisValue unscaled() const {
        if (ls1 > 700.0 || ls2 > 700.0) throw RangeError("steady basis value overflows");
        const double s1 = std::exp(ls1), s2 = std::exp(ls2);
        return {f1 * s1, f1p * s1, f2 * s2, f2p * s2};
    }
};

class Basis {
public:
    Basis(const Poly4& q, double lo, double hi) {
        if (q.degree() > 2) throw UnsupportedError("closed form needs a quadratic q(x)");
        const double c0 = q.c[0], c1 = q.c[1], c2 = q.c[2];
        if (c2 != 0.0) {
            kind_ = Kind::weber;
            xc_ = -c1 / (2.0 * c2);
            const double B = c0 - c1 * c1 / (4.0 * c2);
            if (c2 < 0.0) {
                alpha_ = std::pow(4.0 * -c2, 0.25) * std::exp(cplx(0.0, -kPi / 4.0));
                growing_ = false;
            } else {
                alpha_ = std::pow(4.0 * c2, 0.25);
                growing_ = true;
            }
            nu_ = -0.5 - B / (alpha_ * alpha_);
        } else if (c1 != 0.0) {
            kind_ = Kind::airy;
            xc_ = -c0 / c1;
            descending_ = c1 < 0.0;
            beta_ = std::cbrt(std::abs(c1));
        } else {
            kind_ = Kind::plane;
            if (c0 < 0.0) {
                k_ = std::sqrt(-c0);
            } else if (c0 > 0.0) {
                kappa_ = std::sqrt(c0);
                mid_ = std::isfinite(lo) && std::isfinite(hi) ? 0.5 * (lo + hi)
                       : std::isfinite(lo)                    ? lo
                                                              : hi;
            } else {
                mid_ = std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
            }
        }
    }

    // Whether f1 carries positive current toward +inf.
    bool outgoing() const {
        switch (kind_) {
            case Kind::plane: return k_ > 0.0;
            case Kind::airy: return descending_;
            case Kind::weber: return !growing_;
        }
        return false;
    }
    bool evanescent_plane() const { return kind_ == Kind::plane && kappa_ > 0.0; }
    double k() const { return k_; }

    // f1 at many points sharing one ray of the D_nu argument (one Taylor sweep);
    // empty when that does not apply.
    std::optional<std::vector<BasisValue>> f1_on_ray(std::span<const double> xs) const {
        if (kind_ != Kind::weber) return std::nullopt;
        std::vector<double> radii(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j) {
            const double y = xs[j] - xc_;
            if (!(y > 0.0)) return std::nullopt;
            radii[j] = std::abs(alpha_) * y;
        }
        const PcfRay r = pcf_d_ray(nu_, std::arg(alpha_), radii);
        std::vector<BasisValue> out(xs.size());
        for (std::size_t j = 0; j < xs.size(); ++j)
            out[j] = {r.d[j], alpha_ * r.dp[j], 0.0, 0.0, r.log_scale, 0.0};
        return out;
    }

    // Unscaled pair of solutions.
    BasisValue operator()(double x) const { return scaled(x, true).unscaled(); }

    // Log-scaled values; f2 is skipped when need2 is false.
    BasisValue scaled(double x, bool need2) const {
        switch (kind_) {
            case Kind::plane: {
                if (k_ > 0.0) {
                    const cplx e = std::exp(kI * (k_ * x));
                    const cplx em = 1.0 / e;
                    return {e, kI * k_ * e, em, -kI * k_ * em};
                }
                if (kappa_ > 0.0) {
                    const double d = std::exp(-kappa_ * (x - mid_));
                    const double g = std::exp(kappa_ * (x - mid_));
                    return {d, -kappa_ * d, g, kappa_ * g};
                }
                return {1.0, 0.0, x - mid_, 1.0};
            }
            case Kind::airy: {
                if (descending_) {
                    const AiryValues a = airy(beta_ * (xc_ - x));
                    const cplx f1 = a.ai - kI * a.bi, f1s = a.aip - kI * a.bip;
                    const cplx f2 = a.ai + kI * a.bi, f2s = a.aip + kI * a.bip;
                    return {f1, -beta_ * f1s, f2, -beta_ * f2s};
                }
                const AiryValues a = airy(beta_ * (x - xc_));
                return {a.ai, beta_ * a.aip, a.bi, beta_ * a.bip};
            }
            case Kind::weber: {
                const double y = x - xc_;
                const PcfScaled d1 = pcf_d_scaled(nu_, alpha_ * y);
                BasisValue v{d1.d, alpha_ * d1.dp, 0.0, 0.0, d1.log_scale, 0.0};
                if (!need2) return v;
                const PcfScaled d2 = growing_ ? pcf_d_scaled(-nu_ - 1.0, kI * alpha_ * y)
                                              : pcf_d_scaled(nu_, -alpha_ * y);
                v.f2 = d2.d;
                v.f2p = (growing_ ? kI * alpha_ : -alpha_) * d2.dp;
                v.ls2 = d2.log_scale;
                return v;
            }
        }
        return {};
    }

private:
    enum class Kind { plane, airy, weber };
    Kind kind_ = Kind::plane;
    double k_ = 0.0, kappa_ = 0.0, mid_ = 0.0;
    double xc_ = 0.0, beta_ = 0.0;
    bool descending_ = false, growing_ = false;
    cplx alpha_, nu_;
};

std::vector<double> unwrap(std::span<const cplx> u) {
    std::vector<double> phi(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double a = std::arg(u[i]);
        if (i == 0) {
            phi[i] = a;
            continue;
        }
        phi[i] = a + 2.0 * kPi * std::round((phi[i - 1] - a) / (2.0 * kPi));
    }
    return phi;
}

cplx incident_part(cplx u, cplx du, double k) { return 0.5 * (u + du / (kI * k)); }
cplx reflected_part(cplx u, cplx du, double k) { return 0.5 * (u - du / (kI * k)); }

}  // namespace

std::string_view to_string(SteadyBackend b) {
    return b == SteadyBackend::ode ? "ode" : "closed_form";
}

std::string_view to_string(Approximation a) {
    switch (a) {
        case Approximation::automatic: return "automatic";
        case Approximation::linear: return "linear";
        case Approximation::quadratic: return "quadratic";
        case Approximation::exact: return "exact";
    }
    return "?";
}

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::deep: return "deep";
        case Regime::near_threshold: return "near-threshold";
        case Regime::over_barrier: return "over-barrier";
    }
    return "?";
}

SteadyBackend parse_backend(std::string_view s) {
    if (s == "closed_form" || s == "closed-form" || s == "closed") return SteadyBackend::closed_form;
    if (s == "ode") return SteadyBackend::ode;
    throw ConfigError("unknown backend: " + std::string(s));
}

Approximation parse_approximation(std::string_view s) {
    if (s == "automatic" || s == "auto") return Approximation::automatic;
    if (s == "linear") return Approximation::linear;
    if (s == "quadratic") return Approximation::quadratic;
    if (s == "exact") return Approximation::exact;
    throw ConfigError("unknown approximation: " + std::string(s));
}

double Poly4::operator()(double x) const {
    return (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
}

double Poly4::d1(double x) const {
    return ((4.0 * c[4] * x + 3.0 * c[3]) * x + 2.0 * c[2]) * x + c[1];
}

double Poly4::d2(double x) const { return (12.0 * c[4] * x + 6.0 * c[3]) * x + 2.0 * c[2]; }

int Poly4::degree() const {
    for (int i = 4; i > 0; --i)
        if (c[static_cast<std::size_t>(i)] != 0.0) return i;
    return 0;
}

// ---- problem assembly -------------------------------------------------------

namespace {

void check_tier(Tier tier) {
    if (tier == Tier::MagneticDipolePlusKinetic || tier == Tier::FullyRelativistic)
        throw UnsupportedError("steady states support the NonRel, MagneticDipole and KleinGordon tiers");
}

}  // namespace

SteadyProblem SteadyProblem::scattering(const BarrierModel& b, Tier tier) {
    check_tier(tier);
    if (b.shape() != Shape::Square && b.shape() != Shape::Linear && b.shape() != Shape::Parabolic)
        throw UnsupportedError("scattering needs a square, linear or parabolic barrier");
    if (tier == Tier::KleinGordon) throw UnsupportedError("Klein-Gordon scattering is not supported");
    SteadyProblem pr;
    pr.barrier_ = b;
    pr.tier_ = tier;
    pr.scattering_ = true;
    pr.entry_ = 0.0;
    pr.breaks_ = b.breakpoints();
    if (tier == Tier::MagneticDipole && b.vector_potential()) {
        const auto& az = *b.vector_potential();
        if (std::isfinite(az.lo)) pr.breaks_.push_back(az.lo);
        if (std::isfinite(az.hi)) pr.breaks_.push_back(az.hi);
    }
    std::sort(pr.breaks_.begin(), pr.breaks_.end());
    pr.breaks_.erase(std::unique(pr.breaks_.begin(), pr.breaks_.end()), pr.breaks_.end());
    return pr;
}

SteadyProblem SteadyProblem::tunnel_ionization(const BarrierModel& b, double eps0, double p_z,
                                               Tier tier, Approximation approx) {
    check_tier(tier);
    if (b.shape() != Shape::Coulomb1D && b.shape() != Shape::ZeroRange)
        throw UnsupportedError("tunnel ionization needs a Coulomb1D or ZeroRange barrier");
    SteadyProblem pr;
    pr.barrier_ = b;
    pr.tier_ = tier;
    pr.scattering_ = false;
    const Tier tp_tier = tier == Tier::MagneticDipole ? Tier::MagneticDipole : Tier::NonRel;
    const double pz_tp = tier == Tier::KleinGordon ? 0.0 : p_z;
    const TurningPoints tp = turning_points(b, eps0, 0.0, pz_tp, tp_tier);
    pr.entry_ = tp.x0;
    if (b.shape() == Shape::ZeroRange) approx = Approximation::exact;
    if (approx == Approximation::automatic)
        throw UnsupportedError("approximation must be resolved before building the problem");
    pr.approx_ = approx;
    const double xe = tp.xe;
    const double v0 = b.potential(xe), v1 = b.potential_d1(xe), v2 = b.potential_d2(xe);
    switch (approx) {
        case Approximation::linear: pr.v_ti_ = poly({v0 - v1 * xe, v1}); break;
        case Approximation::quadratic:
            pr.v_ti_ = poly({v0 - v1 * xe + 0.5 * v2 * xe * xe, v1 - v2 * xe, 0.5 * v2});
            break;
        case Approximation::exact:
            if (b.shape() == Shape::ZeroRange) {
                pr.v_ti_ = poly({0.0, -b.field()});
            } else {
                if (tier != Tier::NonRel)
                    throw UnsupportedError(
                        "the exact Coulomb barrier is supported for the NonRel tier only");
                pr.exact_coulomb_ = true;
            }
            break;
        case Approximation::automatic: break;
    }
    return pr;
}

double SteadyProblem::region_lo(std::size_t i) const {
    if (i == 0) return scattering_ ? -kInf : entry_;
    return breaks_[i - 1];
}

double SteadyProblem::region_hi(std::size_t i) const {
    return i < breaks_.size() ? breaks_[i] : kInf;
}

std::size_t SteadyProblem::region_of(double x) const {
    return static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), x) -
                                    breaks_.begin());
}

Poly4 SteadyProblem::v_poly(std::size_t i) const {
    if (!scattering_) return v_ti_;
    const double lo = region_lo(i), hi = region_hi(i);
    const double m = std::isfinite(lo) && std::isfinite(hi) ? 0.5 * (lo + hi)
                     : std::isfinite(lo)                    ? lo + 1.0
                                                            : hi - 1.0;
    const BarrierModel& b = barrier_;
    switch (b.shape()) {
        case Shape::Square: return (m > 0.0 && m < b.width()) ? poly({b.V0()}) : Poly4{};
        case Shape::Linear: return m > 0.0 ? poly({b.V0(), -b.field()}) : Poly4{};
        case Shape::Parabolic: return m > 0.0 ? poly({b.V0(), 0.0, -b.beta()}) : Poly4{};
        default: break;
    }
    return {};
}

Poly4 SteadyProblem::qz_poly(std::size_t i, double p_z) const {
    if (tier_ != Tier::MagneticDipole || !barrier_.vector_potential()) return poly({p_z});
    const auto& az = *barrier_.vector_potential();
    const double c = barrier_.light_speed();
    const double lo = region_lo(i), hi = region_hi(i);
    const double m = std::isfinite(lo) && std::isfinite(hi) ? 0.5 * (lo + hi)
                     : std::isfinite(lo)                    ? lo + 1.0
                                                            : hi - 1.0;
    if (m > az.lo && m < az.hi) return poly({p_z, az.E0 / c});
    return poly({p_z + az.E0 * std::clamp(m, az.lo, az.hi) / c});
}

double SteadyProblem::exact_v(double x) const { return barrier_.potential(x); }

std::optional<Poly4> SteadyProblem::region_poly(std::size_t i, double eps, double p_z) const {
    if (exact_coulomb_) return std::nullopt;
    const Poly4 v = v_poly(i);
    const Poly4 qz = qz_poly(i, p_z);
    const Poly4 qz2 = mul(qz, qz);
    if (tier_ == Tier::KleinGordon) {
        const double c2 = barrier_.light_speed() * barrier_.light_speed();
        const Poly4 w = add(poly({eps}), v, -1.0);
        const Poly4 k2 = add(scale(w, 2.0), scale(mul(w, w), 1.0 / c2));
        return add(qz2, k2, -1.0);
    }
    return add(add(scale(v, 2.0), poly({-2.0 * eps})), qz2);
}

double SteadyProblem::q(double x, double eps, double p_z) const {
    const std::size_t i = region_of(x);
    if (exact_coulomb_) return 2.0 * (exact_v(x) - eps) + p_z * p_z;
    return (*region_poly(i, eps, p_z))(x);
}

double SteadyProblem::lorentz_factor(double x, double eps) const {
    if (tier_ != Tier::KleinGordon) return 1.0;
    const double c = barrier_.light_speed();
    const double w = eps - (exact_coulomb_ ? exact_v(x) : v_poly(region_of(x))(x));
    return 1.0 + w / (c * c);
}

double SteadyProblem::velocity(double x, double eps, double p_z) const {
    return std::sqrt(std::max(-q(x, eps, p_z), 0.0)) / lorentz_factor(x, eps);
}

double SteadyProblem::z_velocity(double x, double eps, double p_z) const {
    return qz_poly(region_of(x), p_z)(x) / lorentz_factor(x, eps);
}

double SteadyProblem::k2_relative(double x_ref, double s, double eps, double p_z) const {
    if (exact_coulomb_) {
        const double dv = -barrier_.field() * s + barrier_.kappa() * s / (x_ref * (x_ref + s));
        return -2.0 * dv;
    }
    const Poly4 p = *region_poly(region_of(x_ref + s), eps, p_z);
    const double d1 = p.d1(x_ref), d2 = 0.5 * p.d2(x_ref);
    const double d3 = p.c[3] + 4.0 * p.c[4] * x_ref, d4 = p.c[4];
    return -((((d4 * s + d3) * s + d2) * s + d1) * s);
}

double SteadyProblem::exit(double eps, double p_z) const {
    const double lo = entry_;
    double L = barrier_.length_scale(eps);
    if (!(L > 0.0) || !std::isfinite(L)) L = 1.0;
    double hi = std::max(lo, breaks_.empty() ? lo : breaks_.back()) + L;
    auto f = [&](double x) { return q(x, eps, p_z); };
    for (int i = 0; i < 60 && f(hi) >= 0.0; ++i) hi = lo + 2.0 * (hi - lo);
    if (f(hi) >= 0.0) throw NoBarrierError("no classically allowed region beyond the barrier");
    constexpr int n = 4000;
    const double x_first = scattering_ ? std::nextafter(lo, kInf) : lo;
    double prev = hi;
    for (int j = n - 1; j >= 0; --j) {
        const double x = x_first + (hi - x_first) * j / n;
        if (f(x) > 0.0) return bisect_root(f, x, prev, 1e-14);
        prev = x;
    }
    throw NoBarrierError("no classically forbidden region at this energy");
}

// ---- solving ----------------------------------------------------------------

SteadyState SteadyProblem::solve(double eps, double p_z, std::span<const double> grid,
                                 const SteadyOptions& opts) const {
    if (grid.empty()) throw DomainError("empty grid");
    if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("grid must be ascending");
    if (!scattering_ && grid.front() < entry_ * (1.0 - 1e-12))
        throw DomainError("grid starts before the entry point");
    std::vector<double> x(grid.begin(), grid.end());
    SteadyState st;
    for (int round = 0;; ++round) {
        st = opts.backend == SteadyBackend::ode ? solve_ode(eps, p_z, x, opts)
                                                : solve_closed(eps, p_z, x, opts);
        st.phi = unwrap(st.u_plus);
        if (!opts.refine_phase || round == 12) break;
        std::vector<double> refined;
        bool changed = false;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            refined.push_back(x[i]);
            const bool crosses_entry = scattering_ && x[i] < entry_ && x[i + 1] >= entry_;
            if (!crosses_entry && std::abs(st.phi[i + 1] - st.phi[i]) >= kPi / 4.0) {
                refined.push_back(0.5 * (x[i] + x[i + 1]));
                changed = true;
            }
        }
        refined.push_back(x.back());
        if (!changed) break;
        x = std::move(refined);
    }
    st.x = std::move(x);
    st.eps = eps;
    st.p_z = p_z;
    st.tier = tier_;
    st.backend = opts.backend;
    return st;
}

SteadyState SteadyProblem::solve_closed(double eps, double p_z, std::span<const double> grid,
                                        const SteadyOptions& opts) const {
    if (exact_coulomb_) throw UnsupportedError("the exact Coulomb barrier needs the ODE backend");
    const std::size_t nreg = breaks_.size() + 1;
    std::vector<Basis> basis;
    basis.reserve(nreg);
    for (std::size_t i = 0; i < nreg; ++i)
        basis.emplace_back(*region_poly(i, eps, p_z), region_lo(i), region_hi(i));
    if (!basis.back().outgoing())
        throw UnsupportedError("no outgoing wave in the rightmost region");
    if (scattering_ && basis.front().k() <= 0.0)
        throw UnsupportedError("no propagating incident wave left of the barrier");

    if (!scattering_ && nreg == 1) {
        // Single outgoing solution normalized at the entry, in log-scaled form.
        const std::size_t n = grid.size();
        std::vector<double> xs(grid.begin(), grid.end());
        xs.push_back(entry_);
        std::vector<BasisValue> vals;
        if (auto ray = basis[0].f1_on_ray(xs)) {
            vals = std::move(*ray);
        } else {
            vals.reserve(xs.size());
            for (double x : xs) vals.push_back(basis[0].scaled(x, false));
        }
        const BasisValue e = vals.back();
        if (e.f1 == 0.0) throw RangeError("steady state underflows at the entry point");
        SteadyState st;
        st.u.resize(n);
        st.du.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            const cplx f = std::exp(vals[j].ls1 - e.ls1) / e.f1;
            st.u[j] = vals[j].f1 * f;
            st.du[j] = vals[j].f1p * f;
        }
        st.u_plus = st.u;
        st.coeffs.T = std::exp(-e.ls1) / e.f1;
        return st;
    }

    std::vector<std::array<cplx, 2>> coef(nreg);
    coef[nreg - 1] = {1.0, 0.0};
    double residual = 0.0;
    for (std::size_t i = nreg - 1; i > 0; --i) {
        const double xb = breaks_[i - 1];
        const BasisValue r = basis[i](xb);
        const cplx u = coef[i][0] * r.f1 + coef[i][1] * r.f2;
        const cplx du = coef[i][0] * r.f1p + coef[i][1] * r.f2p;
        const BasisValue l = basis[i - 1](xb);
        const cplx det = l.f1 * l.f2p - l.f2 * l.f1p;
        coef[i - 1] = {(u * l.f2p - l.f2 * du) / det, (l.f1 * du - l.f1p * u) / det};
        const cplx ul = coef[i - 1][0] * l.f1 + coef[i - 1][1] * l.f2;
        const cplx dul = coef[i - 1][0] * l.f1p + coef[i - 1][1] * l.f2p;
        residual = std::max({residual, std::abs(ul - u) / std::abs(u),
                             std::abs(dul - du) / std::max(std::abs(du), 1e-300)});
    }

    cplx norm = 1.0;
    SteadyState st;
    if (scattering_) {
        norm = coef[0][0];
        st.k_in = basis.front().k();
        st.k_out = basis.back().k();
    } else {
        const BasisValue e = basis[0](entry_);
        norm = coef[0][0] * e.f1 + coef[0][1] * e.f2;
    }
    for (auto& c : coef) {
        c[0] /= norm;
        c[1] /= norm;
    }
    st.coeffs.T = coef[nreg - 1][0];
    if (scattering_) st.coeffs.R = coef[0][1];
    if (nreg > 1) {
        st.coeffs.C1 = coef[1][0];
        st.coeffs.C2 = coef[1][1];
    }
    st.matching_residual = residual;

    const std::size_t n = grid.size();
    st.u.resize(n);
    st.du.resize(n);
    st.u_plus.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = grid[j];
        const std::size_t i = region_of(x);
        const BasisValue v = basis[i](x);
        cplx c2 = coef[i][1];
        if (opts.drop_growing && basis[i].evanescent_plane() && i > 0 && i + 1 < nreg) c2 = 0.0;
        st.u[j] = coef[i][0] * v.f1 + c2 * v.f2;
        st.du[j] = coef[i][0] * v.f1p + c2 * v.f2p;
        st.u_plus[j] = (scattering_ && i == 0) ? coef[0][0] * v.f1 : st.u[j];
    }
    return st;
}

SteadyState SteadyProblem::solve_ode(double eps, double p_z, std::span<const double> grid,
                                     const SteadyOptions& opts) const {
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 4>;

    const std::size_t nreg = breaks_.size() + 1;
    std::vector<std::optional<Poly4>> polys(nreg);
    for (std::size_t i = 0; i < nreg; ++i) polys[i] = region_poly(i, eps, p_z);
    auto qf = [&](std::size_t i, double x) {
        return polys[i] ? (*polys[i])(x) : 2.0 * (exact_v(x) - eps) + p_z * p_z;
    };
    auto qd = [&](std::size_t i, double x) -> std::pair<double, double> {
        if (polys[i]) return {polys[i]->d1(x), polys[i]->d2(x)};
        return {2.0 * barrier_.potential_d1(x), 2.0 * barrier_.potential_d2(x)};
    };

    // Start value: exact plane wave or second-order Riccati-WKB outgoing data.
    const std::size_t last = nreg - 1;
    const bool plane_out = polys[last] && polys[last]->degree() == 0;
    double x_start = std::max(grid.back(), breaks_.empty() ? entry_ : breaks_.back());
    cplx u0 = 1.0, du0;
    if (plane_out) {
        const double q0 = qf(last, x_start);
        if (q0 >= 0.0) throw UnsupportedError("no outgoing wave in the rightmost region");
        const double k = std::sqrt(-q0);
        u0 = std::exp(kI * (k * x_start));
        du0 = kI * k * u0;
    } else {
        const double xe = exit(eps, p_z);
        x_start = std::max(1.25 * x_start - 0.25 * entry_, 1.5 * xe);
        // Move out until the neglected Riccati terms are below ~1e-9.
        auto adiabatic = [&](double x) {
            const double q0 = qf(last, x);
            const auto [q1, q2] = qd(last, x);
            return q0 < 0.0 ? std::abs(q1) / std::pow(-q0, 1.5) + std::abs(q2) / (q0 * q0) : 1.0;
        };
        for (int i = 0; i < 100 && adiabatic(x_start) > 1e-3; ++i) x_start *= 1.25;
        const double q0 = qf(last, x_start);
        if (q0 >= 0.0) throw UnsupportedError("no outgoing wave in the rightmost region");
        const auto [q1, q2] = qd(last, x_start);
        const cplx s0 = kI * std::sqrt(-q0);
        const double s1 = -q1 / (4.0 * q0);
        const cplx s2 = -(-q2 / (4.0 * q0) + 5.0 * q1 * q1 / (16.0 * q0 * q0)) / (2.0 * s0);
        du0 = s0 + s1 + s2;
    }

    // Targets in descending order: grid points and breakpoints.
    const std::size_t n = grid.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });

    std::vector<cplx> u(n), du(n);
    std::vector<double> lscale(n);
    State s{u0.real(), u0.imag(), du0.real(), du0.imag()};
    double log_scale = 0.0;
    double x_cur = x_start;
    std::size_t reg = last;
    auto stepper = odeint::make_controlled<odeint::runge_kutta_fehlberg78<State>>(
        opts.ode_rel_tol, opts.ode_rel_tol);

    auto renormalize = [&] {
        const double m = std::hypot(std::hypot(s[0], s[1]), std::hypot(s[2], s[3]));
        if (m > 0.0 && std::isfinite(m)) {
            for (double& v : s) v /= m;
            log_scale += std::log(m);
        }
    };
    renormalize();
    auto advance = [&](double x_to) {
        if (x_to >= x_cur) return;
        const std::size_t r = reg;
        auto sys = [&, r](const State& y, State& dy, double x) {
            const double qq = qf(r, x);
            dy[0] = y[2];
            dy[1] = y[3];
            dy[2] = qq * y[0];
            dy[3] = qq * y[1];
        };
        double dt0 = -(x_cur - x_to) / 16.0;
        const double qa = std::sqrt(std::abs(qf(r, x_cur)) + 1e-300);
        dt0 = std::max(dt0, -0.2 / qa);
        odeint::integrate_adaptive(stepper, sys, s, x_cur, x_to, dt0);
        x_cur = x_to;
        renormalize();
    };

    std::size_t next_break = breaks_.size();  // breaks_[next_break - 1] is the next one below
    while (next_break > 0 && breaks_[next_break - 1] >= x_cur) --next_break;
    std::optional<std::pair<cplx, cplx>> at_entry;
    double entry_scale = 0.0;
    for (std::size_t idx : order) {
        const double xt = grid[idx];
        while (next_break > 0 && breaks_[next_break - 1] > xt) {
            advance(breaks_[next_break - 1]);
            --next_break;
            reg = next_break;
            if (scattering_ && reg == 0 && x_cur == entry_) {
                at_entry = {{s[0], s[1]}, {s[2], s[3]}};
                entry_scale = log_scale;
            }
        }
        advance(xt);
        u[idx] = {s[0], s[1]};
        du[idx] = {s[2], s[3]};
        lscale[idx] = log_scale;
    }
    while (next_break > 0 && (scattering_ && !at_entry)) {
        advance(breaks_[next_break - 1]);
        --next_break;
        reg = next_break;
        if (reg == 0) {
            at_entry = {{s[0], s[1]}, {s[2], s[3]}};
            entry_scale = log_scale;
        }
    }

    SteadyState st;
    cplx norm;
    double norm_scale;
    if (scattering_) {
        if (!at_entry) throw DomainError("grid does not reach the barrier entry");
        const double k1 = std::sqrt(-qf(0, entry_ - 1.0));
        const cplx inc = incident_part(at_entry->first, at_entry->second, k1);
        const cplx ref = reflected_part(at_entry->first, at_entry->second, k1);
        norm = inc;
        norm_scale = entry_scale;
        st.coeffs.R = ref / inc;
        st.k_in = k1;
        if (plane_out) st.k_out = std::sqrt(-qf(last, x_start));
    } else {
        const std::size_t i0 = order.back();
        if (std::abs(grid[i0] - entry_) > 1e-12 * std::max(1.0, std::abs(entry_)))
            throw DomainError("tunnel-ionization grid must start at the entry point");
        norm = u[i0];
        norm_scale = lscale[i0];
    }
    st.u.resize(n);
    st.du.resize(n);
    st.u_plus.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double f = std::exp(lscale[j] - norm_scale);
        st.u[j] = u[j] * f / norm;
        st.du[j] = du[j] * f / norm;
        if (scattering_ && grid[j] < entry_) {
            st.u_plus[j] = incident_part(st.u[j], st.du[j], st.k_in);
        } else {
            st.u_plus[j] = st.u[j];
        }
    }
    if (scattering_ && plane_out) {
        // The start value was exp(i k x) with unit amplitude.
        st.coeffs.T = std::exp(-norm_scale) / norm;
    }
    st.coeffs.C1 = st.coeffs.C2 = cplx(std::numeric_limits<double>::quiet_NaN());
    return st;
}

SteadyState solve_steady(const BarrierModel& b, double eps, double p_z, Tier tier,
                         std::span<const double> grid, const SteadyOptions& opts) {
    return SteadyProblem::scattering(b, tier).solve(eps, p_z, grid, opts);
}

}  // namespace tunnelion
