#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "taylor.hpp"
#include "tunnelion/core.hpp"
#include "tunnelion/errors.hpp"
#include "tunnelion/specfun.hpp"

namespace tunnelion {

namespace {

using detail::Quadratic;
using detail::ScaledState;

Quadratic weber(cplx a) { return {0.25, 0.0, -(a + 0.5)}; }

void check_order(cplx a, cplx z) {
    if (!(std::abs(a) <= 2000.0) || !(std::abs(z) <= 4000.0))
        throw RangeError("pcf_d: argument outside |a| <= 2000, |z| <= 4000");
}

bool is_pole(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

// Log-scaled (D_a(0), D_a'(0)).
ScaledState origin_state(cplx a) {
    const double ln2 = std::log(2.0);
    const double lnsqpi = 0.5 * std::log(kPi);
    const cplx g0 = 0.5 * (1.0 - a);
    const cplx g1 = -0.5 * a;
    const bool zero0 = is_pole(g0);
    const bool zero1 = is_pole(g1);
    const cplx l0 = zero0 ? cplx(0.0) : 0.5 * a * ln2 + lnsqpi - log_gamma(g0);
    const cplx l1 = zero1 ? cplx(0.0) : 0.5 * (a + 1.0) * ln2 + lnsqpi - log_gamma(g1);
    double m = -HUGE_VAL;
    if (!zero0) m = std::max(m, l0.real());
    if (!zero1) m = std::max(m, l1.real());
    ScaledState st;
    st.log_scale = m;
    st.w = zero0 ? cplx(0.0) : std::exp(l0 - m);
    st.wp = zero1 ? cplx(0.0) : -std::exp(l1 - m);
    return st;
}

double series_radius(cplx a) { return 2.0 / std::sqrt(1.0 + std::abs(a + 0.5)); }

double asymptotic_radius(cplx a) { return 10.0 + 2.0 * std::abs(a); }

// Inward integration along the ray from infinity down to radius r is stable
// only while D_a stays recessive there: Re(z^2)/2 must outgrow (2 Re a + 1) ln r.
bool inward_stable(cplx a, double r, double th) {
    return std::abs(th) <= kPi / 4.0 && r * r * std::cos(2.0 * th) >= 2.0 * a.real() + 1.0;
}

// Asymptotic expansion, log-scaled. err: relative size of the first omitted term.
ScaledState asymptotic(cplx a, cplx z, double& err) {
    const cplx lz = std::log(z);
    const cplx z2 = z * z;
    auto series = [&](auto next, cplx& sum, cplx& dsum) {
        cplx t = 1.0;
        sum = 1.0;
        dsum = 0.0;
        double last = 1.0;
        double e = 0.0;
        for (int s = 0; s < 200; ++s) {
            const cplx tn = next(t, s);
            const double mag = std::abs(tn);
            if (mag > last && s > 0) {
                e = last;
                break;
            }
            sum += tn;
            // d/dz z^{-2(s+1)} = -2(s+1)/z * z^{-2(s+1)}
            dsum += tn * (-2.0 * (s + 1.0)) / z;
            t = tn;
            last = mag;
            if (mag < 1e-17 * std::abs(sum)) break;
            e = mag;
        }
        return e;
    };
    cplx s1, ds1;
    err = series(
        [&](cplx t, int s) {
            return -t * (2.0 * s - a) * (2.0 * s + 1.0 - a) / (2.0 * (s + 1.0) * z2);
        },
        s1, ds1);
    const cplx L1 = a * lz - 0.25 * z2;
    const cplx v1 = s1;
    const cplx p1 = (a / z - 0.5 * z) * s1 + ds1;
    const double th = std::arg(z);
    ScaledState st;
    if (std::abs(th) > kPi / 2.0 && !is_pole(-a)) {
        cplx s2, ds2;
        const double e2 = series(
            [&](cplx u, int s) {
                return u * (a + 1.0 + 2.0 * s) * (a + 2.0 + 2.0 * s) / (2.0 * (s + 1.0) * z2);
            },
            s2, ds2);
        const double sgn = th >= 0.0 ? 1.0 : -1.0;
        const cplx L2 = 0.5 * std::log(2.0 * kPi) - log_gamma(-a) + cplx(0.0, sgn * kPi) * a +
                        (-a - 1.0) * lz + 0.25 * z2 + cplx(0.0, kPi);
        const cplx v2 = s2;
        const cplx p2 = ((-a - 1.0) / z + 0.5 * z) * s2 + ds2;
        const double m = std::max(L1.real(), L2.real());
        const cplx f1 = std::exp(L1 - m), f2 = std::exp(L2 - m);
        st.w = f1 * v1 + f2 * v2;
        st.wp = f1 * p1 + f2 * p2;
        st.log_scale = m;
        const double parts = std::abs(f1 * v1) + std::abs(f2 * v2);
        err = std::max(err, e2) * parts / std::max(std::abs(st.w), 1e-300);
    } else {
        st.log_scale = L1.real();
        st.w = std::exp(cplx(0.0, L1.imag())) * v1;
        st.wp = std::exp(cplx(0.0, L1.imag())) * p1;
    }
    st.renormalize();
    return st;
}

// Asymptotic anchor at radius R on the ray, enlarging R until the
// truncation error is acceptable.
ScaledState anchor(cplx a, double theta, double& R, double& err) {
    for (int i = 0; i < 8; ++i) {
        ScaledState st = asymptotic(a, std::polar(R, theta), err);
        if (err < 1e-15) return st;
        R *= 1.5;
    }
    return asymptotic(a, std::polar(R, theta), err);
}

// Error propagation along a route. D is carried together with a companion C,
// W(D, C) = 1, kept orthogonal to D by removing nu_j D after every step. An
// error of relative size e_m injected at step m, where D has the weighted
// norm N_m, reaches step j as e_m N_m^2 (C_j + S_mj D_j), S_mj the sum of the
// nu removed in between. Bounding |S_mj| by the sum of |nu| lets both sums be
// accumulated forwards: relative error at j <= sum e_m + (|C_j| P_j + N_j T_j) / N_j
// with P_j = sum e_m N_m^2 and T_j = sum_i |nu_i| P_{i-1}.
class ErrorTracker {
public:
    ErrorTracker(const Quadratic& Q, cplx z0, const ScaledState& d, double eps0) : Q_(&Q) {
        const double k = weight(z0);
        const double n2 = std::norm(d.w) * k + std::norm(d.wp) / k;
        c_.w = std::conj(d.wp) / k / -n2;
        c_.wp = -k * std::conj(d.w) / -n2;
        c_.log_scale = -d.log_scale;
        c_.renormalize();
        eps_sum_ = eps0;
        log_p_ = std::log(eps0) + 2.0 * d.log_scale + std::log(n2);
        log_n_ = d.log_scale + 0.5 * std::log(n2);
        log_c_ = -log_n_;
    }

    // Moves the companion along with D; call with the step D just took.
    void step(cplx z0, cplx h, const ScaledState& d) {
        detail::taylor_step(*Q_, z0, h, c_);
        const double k = weight(z0 + h);
        const double n2s = std::norm(d.w) * k + std::norm(d.wp) / k;
        const cplx inner = std::conj(d.w) * c_.w * k + std::conj(d.wp) * c_.wp / k;
        const cplx nu = inner / n2s;  // in the scale exp(c.log_scale - d.log_scale)
        c_.w -= nu * d.w;
        c_.wp -= nu * d.wp;
        if (nu != cplx(0.0))
            log_t_ = log_add(log_t_, std::log(std::abs(nu)) + c_.log_scale - d.log_scale + log_p_);
        c_.renormalize();
        log_n_ = d.log_scale + 0.5 * std::log(n2s);
        log_c_ = c_.log_scale + 0.5 * std::log(std::norm(c_.w) * k + std::norm(c_.wp) / k);
        log_p_ = log_add(log_p_, std::log(kRound) + 2.0 * log_n_);
        eps_sum_ += kRound;
    }

    double error() const {
        if (!std::isfinite(log_n_)) return HUGE_VAL;
        const double e = eps_sum_ + std::exp(log_c_ + log_p_ - log_n_) + std::exp(log_t_);
        return std::isfinite(e) ? e : HUGE_VAL;
    }

private:
    static constexpr double kRound = 4e-16;

    const Quadratic* Q_;
    ScaledState c_;
    double eps_sum_ = 0.0, log_p_ = 0.0, log_t_ = -HUGE_VAL, log_n_ = 0.0, log_c_ = 0.0;

    double weight(cplx z) const { return std::sqrt(std::abs((*Q_)(z))) + 1.0; }

    static double log_add(double x, double y) {
        if (x < y) std::swap(x, y);
        if (!std::isfinite(y)) return x;
        return x + std::log1p(std::exp(y - x));
    }
};

// taylor_path with the companion of the tracker carried along.
void tracked_path(const Quadratic& Q, cplx from, cplx to, ScaledState& st, ErrorTracker& track) {
    const double total = std::abs(to - from);
    if (total == 0.0) return;
    const cplx dir = (to - from) / total;
    double done = 0.0;
    cplx z = from;
    while (done < total) {
        const double k = std::sqrt(std::abs(Q(z))) + 1.0;
        const double kk =
            std::max(k, std::sqrt(std::abs(Q(z + dir * std::min(3.0 / k, total - done)))) + 1.0);
        double step = std::min(3.0 / kk, total - done);
        if (total - done - step < 1e-3 * step) step = total - done;
        const cplx h = dir * step;
        detail::taylor_step(Q, z, h, st);
        track.step(z, h, st);
        done += step;
        z = (done >= total) ? to : from + dir * done;
    }
}

enum class Start { asymptotic, origin, anchor };

struct Evaluated {
    ScaledState st;
    double quality;  // estimated relative error
    Start start = Start::asymptotic;
};

// Integration route: from the origin or from an asymptotic anchor at angle
// theta0, then through the listed points.
struct Route {
    Start start = Start::origin;
    double theta0 = 0.0;
    double R = 0.0;
    std::vector<cplx> points;
};

double origin_error(cplx a) { return 1e-16 * (2.0 + std::abs(a) * std::log(2.0 + std::abs(a))); }

Evaluated run(cplx a, const Route& route) {
    const Quadratic Q = weber(a);
    ScaledState st;
    double eps0 = origin_error(a);
    cplx z0 = 0.0;
    if (route.start == Start::origin) {
        st = origin_state(a);
    } else {
        double R = route.R, err = 0.0;
        st = anchor(a, route.theta0, R, err);
        eps0 = std::max(err, 1e-16);
        z0 = std::polar(R, route.theta0);
    }
    ErrorTracker track(Q, z0, st, eps0);
    for (cplx w : route.points) {
        tracked_path(Q, z0, w, st, track);
        z0 = w;
    }
    return {st, track.error(), route.start};
}

// Radially to |z| along theta0, then along the circle to arg z.
std::vector<cplx> radial_then_arc(double r, double theta0, double theta) {
    std::vector<cplx> pts{std::polar(r, theta0)};
    const double d = std::remainder(theta - theta0, 2.0 * kPi);
    const int n = static_cast<int>(std::ceil(std::abs(d) / (kPi / 24.0)));
    for (int i = 1; i <= n; ++i) pts.push_back(std::polar(r, theta0 + d * i / n));
    if (n > 0) pts.back() = std::polar(r, theta);
    return pts;
}

std::vector<Route> routes(cplx a, cplx z) {
    const double r = std::abs(z);
    const double th = r == 0.0 ? 0.0 : std::arg(z);
    const double R = std::max(asymptotic_radius(a), 1.5 * r);
    std::vector<Route> out;
    Route direct{Start::origin, 0.0, 0.0, {z}};
    Route ray{Start::anchor, th, R, {z}};
    if (inward_stable(a, r, th)) {
        out.push_back(ray);
        out.push_back(direct);
    } else {
        out.push_back(direct);
        out.push_back(ray);
    }
    for (int k = -3; k <= 4; ++k) {
        const double t0 = k * kPi / 4.0;
        if (std::abs(std::remainder(t0 - th, 2.0 * kPi)) < 1e-12) continue;
        out.push_back({Start::anchor, t0, R, radial_then_arc(r, t0, th)});
        out.push_back({Start::origin, 0.0, 0.0, radial_then_arc(r, t0, th)});
    }
    return out;
}

constexpr double kGood = 1e-11;
// For large |a| the anchors sit far out and detours cost ~R^2 steps each;
// they are then only tried when both direct routes are unstable.
constexpr double kDirectEnough = 1e-8;
constexpr double kCheapRadius = 120.0;

// Best of the integration routes; the first one usually suffices.
Evaluated integrate(cplx a, cplx z) {
    Evaluated best{{}, HUGE_VAL, Start::origin};
    const std::vector<Route> all = routes(a, z);
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (i == 2 && best.quality <= kDirectEnough && asymptotic_radius(a) > kCheapRadius) break;
        Evaluated e = run(a, all[i]);
        if (e.quality < best.quality) best = e;
        if (best.quality <= kGood) break;
    }
    return best;
}

Evaluated evaluate(cplx a, cplx z, PcfBackend backend) {
    const double r = std::abs(z);
    const double Ra = asymptotic_radius(a);
    switch (backend) {
        case PcfBackend::series_asymptotic: {
            if (r <= std::max(series_radius(a), 1.0)) return run(a, {Start::origin, 0.0, 0.0, {z}});
            if (r >= Ra) {
                double err = 0.0;
                ScaledState st = asymptotic(a, z, err);
                if (err > 1e-10)
                    throw ConvergenceError("pcf_d: asymptotic expansion not converged");
                return {st, err, Start::asymptotic};
            }
            throw ConvergenceError("pcf_d: series/asymptotic backend cannot reach this |z|");
        }
        case PcfBackend::ode: return integrate(a, z);
        case PcfBackend::automatic: break;
    }
    if (r >= Ra) {
        double err = 0.0;
        ScaledState st = asymptotic(a, z, err);
        if (err < 1e-12) return {st, err, Start::asymptotic};
    }
    return integrate(a, z);
}

PcfValue unscale(const Evaluated& e) {
    if (!std::isfinite(e.st.log_scale) && e.st.log_scale > 0.0)
        throw RangeError("pcf_d: overflow");
    if (e.st.log_scale > 700.0) throw RangeError("pcf_d: |log D| exceeds 700");
    const double s = std::exp(e.st.log_scale);
    return {e.st.w * s, e.st.wp * s, e.quality > 1e-10};
}

}  // namespace

PcfValue pcf_d_full(cplx a, cplx z, PcfBackend backend) {
    check_order(a, z);
    return unscale(evaluate(a, z, backend));
}

PcfScaled pcf_d_scaled(cplx a, cplx z, PcfBackend backend) {
    check_order(a, z);
    const Evaluated e = evaluate(a, z, backend);
    return {e.st.w, e.st.wp, e.st.log_scale, e.quality > 1e-10};
}

cplx pcf_d(cplx a, cplx z, PcfBackend backend) { return pcf_d_full(a, z, backend).d; }

PcfRay pcf_d_ray(cplx a, double theta, std::span<const double> radii) {
    PcfRay out;
    const std::size_t n = radii.size();
    out.d.assign(n, 0.0);
    out.dp.assign(n, 0.0);
    if (n == 0) return out;
    for (double r : radii) {
        if (!(r >= 0.0)) throw DomainError("pcf_d_ray: radii must be non-negative");
        check_order(a, std::polar(r, theta));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto i, auto j) { return radii[i] < radii[j]; });

    std::vector<ScaledState> states(n);
    const double Ra = asymptotic_radius(a);
    const Quadratic Q = weber(a);
    std::vector<std::size_t> inner;
    for (auto i : order) {
        double err = 1.0;
        if (radii[i] >= Ra) states[i] = asymptotic(a, std::polar(radii[i], theta), err);
        if (err > 1e-12) inner.push_back(i);
    }
    if (!inner.empty()) {
        // One sweep in the usually stable direction; points where the tracked
        // error is too large are redone individually.
        const double rmax = radii[inner.back()];
        std::vector<std::size_t> redo;
        auto keep = [&](std::size_t i, const ScaledState& st, const ErrorTracker& track) {
            states[i] = st;
            if (track.error() > kGood) redo.push_back(i);
        };
        if (inward_stable(a, radii[inner.front()], theta) && rmax > series_radius(a)) {
            double R = std::max(Ra, 1.2 * rmax), err = 0.0;
            ScaledState st = anchor(a, theta, R, err);
            cplx zc = std::polar(R, theta);
            ErrorTracker track(Q, zc, st, std::max(err, 1e-16));
            for (auto it = inner.rbegin(); it != inner.rend(); ++it) {
                const cplx zt = std::polar(radii[*it], theta);
                tracked_path(Q, zc, zt, st, track);
                zc = zt;
                keep(*it, st, track);
            }
        } else {
            ScaledState st = origin_state(a);
            cplx zc = 0.0;
            ErrorTracker track(Q, zc, st, origin_error(a));
            for (auto i : inner) {
                const cplx zt = std::polar(radii[i], theta);
                tracked_path(Q, zc, zt, st, track);
                zc = zt;
                keep(i, st, track);
            }
        }
        for (auto i : redo) states[i] = integrate(a, std::polar(radii[i], theta)).st;
    }
    double m = -HUGE_VAL;
    for (const auto& s : states) m = std::max(m, s.log_scale);
    out.log_scale = m;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = std::exp(states[i].log_scale - m);
        out.d[i] = states[i].w * f;
        out.dp[i] = states[i].wp * f;
    }
    return out;
}

PcfCrossCheck pcf_d_crosscheck(cplx a, cplx z, double tol) {
    check_order(a, z);
    const Evaluated p = evaluate(a, z, PcfBackend::automatic);
    // Secondary: the most accurate route starting somewhere else, falling back
    // to any other route.
    Evaluated s{{}, HUGE_VAL, Start::origin}, other{{}, HUGE_VAL, Start::origin};
    bool skipped_primary = p.start == Start::asymptotic;
    for (const Route& route : routes(a, z)) {
        Evaluated e = run(a, route);
        if (!skipped_primary && e.quality == p.quality && e.st.w == p.st.w) {
            skipped_primary = true;
            continue;
        }
        Evaluated& slot = e.start != p.start ? s : other;
        if (e.quality < slot.quality) slot = e;
    }
    if (s.quality > 1e-10 && other.quality < s.quality) s = other;
    const double m = std::max(p.st.log_scale, s.st.log_scale);
    const cplx dp = p.st.w * std::exp(p.st.log_scale - m);
    const cplx ds = s.st.w * std::exp(s.st.log_scale - m);
    const double rel = std::abs(dp - ds) / std::max(std::abs(dp), 1e-300);
    PcfCrossCheck out{unscale(p), unscale(s), rel};
    if (!(rel <= tol))
        throw ConvergenceError("pcf_d_crosscheck: backends disagree (rel diff " +
                               std::to_string(rel) + ")");
    return out;
}

}  // namespace tunnelion
