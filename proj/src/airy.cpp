#include <cmath>

#include "taylor.hpp"
#include "tunnelion/core.hpp"
#include "tunnelion/errors.hpp"
#include "tunnelion/specfun.hpp"

namespace tunnelion {

namespace {

using detail::Quadratic;
using detail::ScaledState;

constexpr double kAi0 = 0.355028053887817239260;
constexpr double kAip0 = -0.258819403792806798405;
constexpr double kBi0 = 0.614926627446000735150;
constexpr double kBip0 = 0.448288357353826357915;
constexpr double kSeriesRadius = 2.0;
constexpr double kAsymRadius = 8.5;

const Quadratic kAiryQ{0.0, 1.0, 0.0};

struct Pair {
    cplx w, wp;
    double quality;  // error estimate relative to |w|
};

Pair maclaurin(cplx z, double w0, double wp0) {
    ScaledState st{w0, wp0, 0.0};
    const double cancel = detail::taylor_step(kAiryQ, 0.0, z, st);
    const double s = std::exp(st.log_scale);
    return {st.w * s, st.wp * s, cancel * 1e-16};
}

void check_overflow(cplx z) {
    const cplx zeta = (2.0 / 3.0) * z * std::sqrt(z);
    if (std::abs(zeta.real()) > 690.0)
        throw RangeError("airy: |Re(2/3 z^{3/2})| exceeds 690 (overflow)");
}

// |arg z| <= 2pi/3 and |z| large.
ScaledState ai_asymptotic(cplx z, double& err) {
    const cplx sz = std::sqrt(z);
    const cplx zeta = (2.0 / 3.0) * z * sz;
    const cplx inv = 1.0 / zeta;
    cplx su = 1.0, sv = 1.0;
    double u = 1.0;
    cplx p = 1.0;
    double last = 1.0;
    err = 0.0;
    for (int k = 1; k < 60; ++k) {
        const double uk = u * (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) /
                          ((2.0 * k - 1.0) * 216.0 * k);
        const double vk = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * uk;
        p *= -inv;
        const cplx tu = uk * p;
        const double mag = std::abs(tu);
        if (mag > last) {
            err = last;
            break;
        }
        su += tu;
        sv += vk * p;
        u = uk;
        last = mag;
        if (mag < 1e-17) break;
    }
    const cplx z14 = std::sqrt(sz);
    const cplx pref = 1.0 / (2.0 * std::sqrt(kPi));
    ScaledState st;
    st.log_scale = -zeta.real();
    const cplx phase = std::exp(cplx(0.0, -zeta.imag()));
    st.w = pref * phase * su / z14;
    st.wp = -pref * phase * z14 * sv;
    return st;
}

ScaledState ai_scaled(cplx z, double& quality);

ScaledState ai_connection(cplx z, double& quality) {
    const cplx w = std::polar(1.0, 2.0 * kPi / 3.0);
    double q1 = 0.0, q2 = 0.0;
    ScaledState a = ai_scaled(w * z, q1);
    ScaledState b = ai_scaled(w * w * z, q2);
    const double m = std::max(a.log_scale, b.log_scale);
    const cplx fa = std::exp(a.log_scale - m);
    const cplx fb = std::exp(b.log_scale - m);
    ScaledState out;
    out.log_scale = m;
    out.w = -w * a.w * fa - w * w * b.w * fb;
    out.wp = -w * w * a.wp * fa - w * b.wp * fb;
    const double parts = std::abs(a.w * fa) + std::abs(b.w * fb);
    quality = std::max(q1, q2) * parts / std::max(std::abs(out.w), 1e-300) + 1e-16 * parts / std::max(std::abs(out.w), 1e-300);
    return out;
}

ScaledState ai_scaled(cplx z, double& quality) {
    const double r = std::abs(z);
    const double th = std::arg(z);
    if (r <= kSeriesRadius) {
        const Pair p = maclaurin(z, kAi0, kAip0);
        quality = p.quality;
        return {p.w, p.wp, 0.0};
    }
    if (r >= kAsymRadius) {
        if (std::abs(th) <= 2.0 * kPi / 3.0 + 1e-12) {
            double err = 0.0;
            ScaledState st = ai_asymptotic(z, err);
            quality = err + 1e-16;
            return st;
        }
        return ai_connection(z, quality);
    }
    const cplx dir = std::polar(1.0, th);
    if (std::abs(th) <= kPi / 3.0) {
        double err = 0.0;
        ScaledState st = ai_asymptotic(kAsymRadius * dir, err);
        detail::taylor_path(kAiryQ, kAsymRadius * dir, z, st);
        quality = err + 1e-15;
        return st;
    }
    const Pair p = maclaurin(kSeriesRadius * dir, kAi0, kAip0);
    ScaledState st{p.w, p.wp, 0.0};
    detail::taylor_path(kAiryQ, kSeriesRadius * dir, z, st);
    quality = p.quality + 1e-15;
    return st;
}

}  // namespace

AiryValues airy(cplx z) {
    check_overflow(z);
    AiryValues out;
    double q = 0.0;
    {
        const ScaledState st = ai_scaled(z, q);
        const double s = std::exp(st.log_scale);
        out.ai = st.w * s;
        out.aip = st.wp * s;
    }
    double qb = 0.0;
    if (std::abs(z) <= kSeriesRadius) {
        const Pair p = maclaurin(z, kBi0, kBip0);
        out.bi = p.w;
        out.bip = p.wp;
        qb = p.quality;
    } else {
        const cplx w = std::polar(1.0, 2.0 * kPi / 3.0);
        double q1 = 0.0, q2 = 0.0;
        const ScaledState a = ai_scaled(w * z, q1);
        const ScaledState b = ai_scaled(std::conj(w) * z, q2);
        const double sa = std::exp(a.log_scale);
        const double sb = std::exp(b.log_scale);
        const cplx e1 = std::polar(1.0, kPi / 6.0);
        const cplx e5 = std::polar(1.0, 5.0 * kPi / 6.0);
        out.bi = e1 * a.w * sa + std::conj(e1) * b.w * sb;
        out.bip = e5 * a.wp * sa + std::conj(e5) * b.wp * sb;
        const double parts = std::abs(a.w * sa) + std::abs(b.w * sb);
        qb = (std::max(q1, q2) + 1e-16) * parts / std::max(std::abs(out.bi), 1e-300);
    }
    out.degraded = q > 1e-12 || qb > 1e-12;
    return out;
}

cplx airy_ai(cplx z) { return airy(z).ai; }
cplx airy_bi(cplx z) { return airy(z).bi; }

}  // namespace tunnelion
