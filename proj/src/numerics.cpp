#include "tunnelion/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "tunnelion/errors.hpp"

namespace tunnelion {

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = b;
    return v;
}

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                 unsigned max_depth) {
    if (a == b) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth,
                                                                          rel_tol, &err);
}

cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b, double rel_tol,
                          unsigned max_depth) {
    if (a == b) return {};
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, max_depth,
                                                                          rel_tol, &err);
}

double integrate_sqrt_ends(const std::function<double(double)>& f, double a, double b,
                           double rel_tol) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double ul = std::sqrt(m - a);
    const double ur = std::sqrt(b - m);
    const double left = integrate([&](double u) { return 2.0 * u * f(a + u * u); }, 0.0, ul, rel_tol);
    const double right = integrate([&](double u) { return 2.0 * u * f(b - u * u); }, 0.0, ur, rel_tol);
    return left + right;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double rel_tol) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) throw ConvergenceError("bisect_root: no sign change in bracket");
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
        if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    }
    return std::abs(flo) <= std::abs(fhi) ? lo : hi;
}

std::pair<double, double> maximize(const std::function<double(double)>& f, double lo, double hi,
                                   int bits) {
    std::uintmax_t iters = 500;
    auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, lo, hi, bits,
                                                   iters);
    return {r.first, -r.second};
}

double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curv = (d12 - d01) / (x2 - x0);
    if (curv == 0.0) return x1;
    // y = y1 + d*(x-x1) + curv*(x-x1)^2 with slope at x1:
    const double slope1 = d01 + curv * (x1 - x0);
    return x1 - slope1 / (2.0 * curv);
}

namespace {
std::atomic<unsigned> g_max_threads{0};
}

void set_max_threads(unsigned n) { g_max_threads = n; }

unsigned max_threads() {
    const unsigned n = g_max_threads.load();
    if (n != 0) return n;
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(max_threads(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(err_mutex);
                        if (!first_error) first_error = std::current_exception();
                        next = n;
                    }
                }
            });
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace tunnelion
