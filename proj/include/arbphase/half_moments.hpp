#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace arbphase {

inline double normal_pdf(double x) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

// erfc-based, accurate in both tails.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

// Gaussian half-moments I_n(w0) = E[(w+w0)^n Theta(w+w0)], w ~ N(0,1).
// Closed forms; i_n_quadrature below integrates the definition directly and
// is the reference these are tested against.
inline double i1(double w0) { return normal_pdf(w0) + w0 * normal_cdf(w0); }
inline double i2(double w0) { return (1.0 + w0 * w0) * normal_cdf(w0) + w0 * normal_pdf(w0); }

namespace detail {

// Adaptive Simpson with the usual |S2-S1|/15 error estimate.
inline double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                          double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = (left + right - whole) / 15.0;
    if (depth <= 0 || std::abs(err) <= tol) return left + right + err;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 52);
}

}  // namespace detail

// Quadrature oracle for i1/i2: integrates (w+w0)^n phi(w) on [-w0, 10], the
// upper truncation at ten standard deviations contributing < 1e-20.
inline double i_n_quadrature(int order, double w0) {
    if (order != 1 && order != 2) throw std::invalid_argument("i_n_quadrature: order must be 1 or 2");
    if (!std::isfinite(w0)) throw std::invalid_argument("i_n_quadrature: w0 must be finite");
    const double lo = std::max(-w0, -10.0);
    const double hi = 10.0;
    if (lo >= hi) return 0.0;
    auto f = [order, w0](double w) {
        const double s = w + w0;
        return (order == 1 ? s : s * s) * normal_pdf(w);
    };
    return detail::adaptive_simpson(f, lo, hi, 5e-14);
}

}  // namespace arbphase
