#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace tunnelion {

using cplx = std::complex<double>;

std::vector<double> linspace(double a, double b, std::size_t n);

// Adaptive Gauss-Kronrod (61 point) on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12, unsigned max_depth = 18);
cplx integrate_complex(const std::function<cplx(double)>& f, double a, double b, double rel_tol = 1e-12,
                       unsigned max_depth = 18);

// Integral over [a, b] of a function vanishing like a square root at either end;
// substitutes x = a + u^2 on the left half and x = b - u^2 on the right half.
double integrate_sqrt_ends(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-12);

// Bisection on a sign change, to rel_tol relative width.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double rel_tol = 1e-12);

// Brent maximization on [lo, hi]; returns (argmax, max).
std::pair<double, double> maximize(const std::function<double(double)>& f, double lo, double hi,
                                   int bits = 50);

// Vertex of the parabola through three points (x_i, y_i).
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2);

// Worker cap for parallel loops; 0 = hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs body(i) for i in [0, n). The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tunnelion
