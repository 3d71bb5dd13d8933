#pragma once

// Taylor-series stepping for w'' = Q(z) w with quadratic Q, carried with a
// separate log scale so that recessive/dominant growth never overflows.

#include <algorithm>
#include <cmath>
#include <complex>

namespace tunnelion::detail {

using cplx = std::complex<double>;

struct Quadratic {
    cplx a2, a1, a0;  // Q(z) = a2 z^2 + a1 z + a0
    cplx operator()(cplx z) const { return (a2 * z + a1) * z + a0; }
};

struct ScaledState {
    cplx w, wp;
    double log_scale = 0.0;  // true (w, wp) = exp(log_scale) * (w, wp)

    void renormalize() {
        const double s = std::max(std::abs(w), std::abs(wp));
        if (s > 0.0 && std::isfinite(s) && (s > 1e8 || s < 1e-8)) {
            w /= s;
            wp /= s;
            log_scale += std::log(s);
        }
    }
};

// One Taylor step z0 -> z0 + h. Returns the largest |term| / |result| ratio
// (cancellation indicator).
inline double taylor_step(const Quadratic& Q, cplx z0, cplx h, ScaledState& st) {
    if (h == cplx(0.0)) return 1.0;
    const cplx q0 = Q(z0);
    const cplx q1 = 2.0 * Q.a2 * z0 + Q.a1;
    const cplx q2 = Q.a2;
    const cplx h2 = h * h;
    // d_k = c_k h^k
    cplx dm2 = 0.0, dm1 = 0.0;
    cplx d0 = st.w, d1 = st.wp * h;
    cplx w = d0 + d1;
    cplx wph = d1;  // h * w'
    double max_term = std::max(std::abs(d0), std::abs(d1));
    int small_run = 0;
    for (int k = 0; k < 400; ++k) {
        // (k+2)(k+1) d_{k+2} = h^2 (q0 d_k + q1 h d_{k-1} + q2 h^2 d_{k-2})
        const cplx d2 = h2 * (q0 * d0 + q1 * h * dm1 + q2 * h2 * dm2) /
                        (static_cast<double>(k + 2) * static_cast<double>(k + 1));
        w += d2;
        wph += static_cast<double>(k + 2) * d2;
        const double ad = std::abs(d2);
        max_term = std::max(max_term, ad);
        const double ref = std::abs(w) + std::abs(wph);
        if (ad <= 1e-18 * ref) {
            if (++small_run >= 3 && k > 4) break;
        } else {
            small_run = 0;
        }
        dm2 = dm1;
        dm1 = d0;
        d0 = d1;
        d1 = d2;
    }
    st.w = w;
    st.wp = wph / h;
    st.renormalize();
    const double denom = std::max(std::abs(w), 1e-300);
    return max_term / denom;
}

struct NoObserver {
    void operator()(cplx, const ScaledState&) const {}
};

// Integrates along the straight segment from z_from to z_to; observe(z, st)
// runs after every step.
template <class Observer = NoObserver>
double taylor_path(const Quadratic& Q, cplx z_from, cplx z_to, ScaledState& st,
                   double phase_per_step = 3.0, Observer&& observe = {}) {
    double worst = 1.0;
    cplx z = z_from;
    const double total = std::abs(z_to - z_from);
    if (total == 0.0) return worst;
    const cplx dir = (z_to - z_from) / total;
    double done = 0.0;
    while (done < total) {
        const double k = std::sqrt(std::abs(Q(z))) + 1.0;
        // look ahead: |Q| grows along the step
        const double kk = std::max(k, std::sqrt(std::abs(Q(z + dir * std::min(phase_per_step / k, total - done)))) + 1.0);
        double step = std::min(phase_per_step / kk, total - done);
        if (total - done - step < 1e-3 * step) step = total - done;
        const cplx h = dir * step;
        worst = std::max(worst, taylor_step(Q, z, h, st));
        done += step;
        z = (done >= total) ? z_to : z_from + dir * done;
        observe(z, st);
    }
    return worst;
}

}  // namespace tunnelion::detail
