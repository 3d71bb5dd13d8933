#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tunnelion/errors.hpp"

namespace tunnelion {

using cplx = std::complex<double>;

// Principal-branch log Gamma (imaginary part defined modulo 2*pi).
cplx log_gamma(cplx z);
// 1/Gamma(z); exactly zero at the poles.
cplx rgamma(cplx z);

// ---- Airy functions -------------------------------------------------------
//
// |z| <= 2: Maclaurin series. |z| >= 8.5: asymptotic expansion (with the
// connection formula beyond |arg z| = 2pi/3). In between: Taylor stepping of
// w'' = z w along the ray, inward from the asymptotic circle where Ai is
// recessive (|arg z| <= pi/3) and outward from |z| = 2 elsewhere.
// Overflow bound: |Re (2/3) z^{3/2}| < 690 (about |z| < 105 on the real axis).

struct AiryValues {
    cplx ai, aip, bi, bip;
    bool degraded = false;  // internal error estimate above 1e-12 relative
};

AiryValues airy(cplx z);
cplx airy_ai(cplx z);
cplx airy_bi(cplx z);

// ---- Parabolic cylinder function D_a(z) (Whittaker) ------------------------
//
// D_a'' + (a + 1/2 - z^2/4) D_a = 0, D_a(z) ~ z^a exp(-z^2/4) for |arg z| < 3pi/4.
// Supported range: |a| <= 2000, |z| <= 4000, and |log D| < 700 for the
// unscaled entry points. Principal branches for all fractional powers.
// Values come from the best of several integration routes, each carrying a
// propagated error estimate; degraded is set when that estimate exceeds 1e-10
// relative. Near the Stokes lines with large |a| and |z| ~ 2 sqrt|a| the
// estimate can stay above 1e-10 on every route (a few percent of random
// points with |a| <= 40, |z| <= 25).

enum class PcfBackend {
    automatic,          // series, asymptotic or ODE depending on (a, z)
    series_asymptotic,  // Maclaurin or asymptotic only; throws in the gap between
    ode                 // Taylor-stepped Weber ODE from a series/asymptotic anchor
};

struct PcfValue {
    cplx d, dp;
    bool degraded = false;  // internal error estimate above 1e-10 relative
};

PcfValue pcf_d_full(cplx a, cplx z, PcfBackend backend = PcfBackend::automatic);

// Log-scaled value: true (D, D') = exp(log_scale) * (d, dp). No overflow bound.
struct PcfScaled {
    cplx d, dp;
    double log_scale = 0.0;
    bool degraded = false;
};
PcfScaled pcf_d_scaled(cplx a, cplx z, PcfBackend backend = PcfBackend::automatic);
cplx pcf_d(cplx a, cplx z, PcfBackend backend = PcfBackend::automatic);

// Log-scaled values along a ray z = r e^{i theta}: true value = exp(log_scale) * d.
struct PcfRay {
    std::vector<cplx> d, dp;
    double log_scale = 0.0;
};
PcfRay pcf_d_ray(cplx a, double theta, std::span<const double> radii);

struct PcfCrossCheck {
    PcfValue primary;
    PcfValue secondary;
    double rel_diff;
};
// Evaluates with the automatic backend and with an independent path; throws
// ConvergenceError when the two differ by more than tol.
PcfCrossCheck pcf_d_crosscheck(cplx a, cplx z, double tol = 1e-8);

// ---- Complex root finding --------------------------------------------------

struct ComplexSaddle {
    cplx root;
    double residual = 0.0;
    int iterations = 0;
    bool used_homotopy = false;
    std::vector<cplx> branch;  // iterates / homotopy path from the guess
};

struct RootOptions {
    int max_iterations = 100;
    double max_step = 0.0;        // 0: unlimited
    double search_radius = 0.0;   // 0: 1e3 * (1 + |guess|)
    int homotopy_steps = 32;
};

class SingularJacobianError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

// Damped Newton; falls back to the homotopy f(z) - (1-s) f(guess) when plain
// Newton stalls. df may be empty (central differences are used).
ComplexSaddle find_complex_root(const std::function<cplx(cplx)>& f, cplx guess, double tol,
                                const std::function<cplx(cplx)>& df = {},
                                const RootOptions& opts = {});

}  // namespace tunnelion
