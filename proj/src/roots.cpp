#include <cmath>
#include <optional>

#include "tunnelion/errors.hpp"
#include "tunnelion/specfun.hpp"

namespace tunnelion {

namespace {

using Fn = std::function<cplx(cplx)>;

cplx derivative(const Fn& f, const Fn& df, cplx z) {
    if (df) return df(z);
    const double h = 1e-6 * (1.0 + std::abs(z));
    return (f(z + h) - f(z - h)) / (2.0 * h);
}

struct NewtonResult {
    cplx z;
    double residual;
    int iterations;
    bool converged;
};

NewtonResult newton(const Fn& g, const Fn& dg, cplx z, double tol, const RootOptions& opts,
                    cplx centre, double radius, std::vector<cplx>* branch) {
    cplx gz = g(z);
    double res = std::abs(gz);
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (res <= tol) return {z, res, it, true};
        const cplx d = derivative(g, dg, z);
        if (!std::isfinite(std::abs(d)) || std::abs(d) == 0.0)
            throw SingularJacobianError("find_complex_root: singular derivative");
        cplx step = gz / d;
        if (opts.max_step > 0.0 && std::abs(step) > opts.max_step)
            step *= opts.max_step / std::abs(step);
        double lambda = 1.0;
        bool accepted = false;
        cplx zn = z, gn = gz;
        for (int k = 0; k < 30; ++k) {
            zn = z - lambda * step;
            gn = g(zn);
            if (std::isfinite(std::abs(gn)) && std::abs(gn) < res) {
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            // Step below the resolution of z: we are at the precision floor.
            const bool floor = std::abs(step) <= 8e-16 * (1.0 + std::abs(z));
            return {z, res, it, floor && res <= 1e6 * tol};
        }
        z = zn;
        gz = gn;
        res = std::abs(gn);
        if (branch) branch->push_back(z);
        if (std::abs(z - centre) > radius) return {z, res, it, false};
    }
    return {z, res, it, res <= tol};
}

}  // namespace

ComplexSaddle find_complex_root(const Fn& f, cplx guess, double tol, const Fn& df,
                                const RootOptions& opts) {
    if (!(tol > 0.0)) throw DomainError("find_complex_root: tol must be positive");
    const double radius =
        opts.search_radius > 0.0 ? opts.search_radius : 1e3 * (1.0 + std::abs(guess));
    ComplexSaddle out;
    out.branch.push_back(guess);
    const NewtonResult plain = newton(f, df, guess, tol, opts, guess, radius, &out.branch);
    if (plain.converged) {
        out.root = plain.z;
        out.residual = plain.residual;
        out.iterations = plain.iterations;
        return out;
    }

    const cplx f0 = f(guess);
    int total = plain.iterations;
    for (int steps = std::max(opts.homotopy_steps, 2); steps <= 16 * std::max(opts.homotopy_steps, 2);
         steps *= 2) {
        std::vector<cplx> path{guess};
        cplx z = guess;
        bool ok = true;
        for (int j = 1; j <= steps && ok; ++j) {
            const double s = static_cast<double>(j) / steps;
            const Fn g = [&, s](cplx x) { return f(x) - (1.0 - s) * f0; };
            const NewtonResult r =
                newton(g, df, z, j == steps ? tol : std::max(tol, 1e-8 * std::abs(f0)), opts,
                       guess, radius, nullptr);
            total += r.iterations;
            ok = r.converged;
            z = r.z;
            path.push_back(z);
        }
        if (ok) {
            out.root = z;
            out.residual = std::abs(f(z));
            out.iterations = total;
            out.used_homotopy = true;
            out.branch = std::move(path);
            return out;
        }
    }
    throw ConvergenceError("find_complex_root: no convergence from guess (" +
                           std::to_string(guess.real()) + ", " + std::to_string(guess.imag()) +
                           ")");
}

}  // namespace tunnelion
