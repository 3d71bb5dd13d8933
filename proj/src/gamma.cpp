#include <array>
#include <cmath>

#include "tunnelion/core.hpp"
#include "tunnelion/specfun.hpp"

namespace tunnelion {

namespace {

// Stirling series with Bernoulli terms, valid for Re z >= 15.
cplx log_gamma_stirling(cplx z) {
    static constexpr std::array<double, 8> b = {1.0 / 12.0,      -1.0 / 360.0,    1.0 / 1260.0,
                                                -1.0 / 1680.0,   1.0 / 1188.0,    -691.0 / 360360.0,
                                                1.0 / 156.0,     -3617.0 / 122400.0};
    const cplx zi = 1.0 / z;
    const cplx zi2 = zi * zi;
    cplx series = 0.0;
    cplx p = zi;
    for (double bk : b) {
        series += bk * p;
        p *= zi2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series;
}

// log sin(pi z) without overflow for large |Im z|.
cplx log_sin_pi(cplx z) {
    const cplx iz = cplx(0.0, kPi) * z;
    if (z.imag() > 0) {
        // sin = (e^{i pi z} - e^{-i pi z}) / (2i), e^{-i pi z} dominant
        return -iz + std::log((1.0 - std::exp(2.0 * iz)) / cplx(0.0, -2.0));
    }
    return iz + std::log((std::exp(-2.0 * iz) - 1.0) / cplx(0.0, -2.0));
}

bool is_nonpositive_integer(cplx z) {
    return z.imag() == 0.0 && z.real() <= 0.0 && std::floor(z.real()) == z.real();
}

}  // namespace

cplx log_gamma(cplx z) {
    if (is_nonpositive_integer(z)) return {HUGE_VAL, 0.0};
    if (z.real() < 0.5) {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return std::log(kPi) - log_sin_pi(z) - log_gamma(1.0 - z);
    }
    cplx shift = 0.0;
    cplx w = z;
    while (w.real() < 15.0) {
        shift += std::log(w);
        w += 1.0;
    }
    return log_gamma_stirling(w) - shift;
}

cplx rgamma(cplx z) {
    if (is_nonpositive_integer(z)) return 0.0;
    return std::exp(-log_gamma(z));
}

}  // namespace tunnelion
