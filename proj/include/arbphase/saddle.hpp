#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "arbphase/half_moments.hpp"
#include "arbphase/market.hpp"

namespace arbphase {

// Analytic critical lines. The excess-return covariance has the structure
// Y_ww' = delta_ww' + c/Omega; everything about the measure family enters the
// saddle-point system only through the scalar c. The paper's text writes the
// subset-family coefficient with a radical, while its appendix arithmetic
// produces the coefficient directly; both readings are implemented and the
// Monte Carlo phase boundary arbitrates (CoefficientDirect wins, see README).

enum class CovInterpretation { CoefficientDirect, PaperSqrt };

inline const char* interpretation_name(CovInterpretation i) {
    return i == CovInterpretation::CoefficientDirect ? "direct" : "sqrt";
}

struct CovCoefficient {
    double c = 0.0;  // Omega times the off-diagonal covariance
    CovInterpretation interpretation = CovInterpretation::CoefficientDirect;

    // Magnitude fed to the saddle equations under the chosen reading.
    double effective() const {
        const double mag = std::abs(c);
        return interpretation == CovInterpretation::CoefficientDirect ? mag : std::sqrt(mag);
    }
};

constexpr double kThermodynamic = std::numeric_limits<double>::infinity();

inline CovCoefficient subset_cov_coefficient(double kappa,
                                             CovInterpretation interp = CovInterpretation::CoefficientDirect) {
    if (!(kappa > 0.0) || kappa > 1.0)
        throw std::invalid_argument("subset_cov_coefficient: kappa must lie in (0,1]");
    return {1.0 / kappa - 2.0, interp};
}

// c = Delta / Omega^(alpha-2) - 1. Pass kThermodynamic for the limit, which
// exists only for alpha >= 2.
inline CovCoefficient perturbed_cov_coefficient(double delta, double alpha, double omega,
                                                CovInterpretation interp = CovInterpretation::CoefficientDirect) {
    if (!(delta > 0.0)) throw std::invalid_argument("perturbed_cov_coefficient: Delta must be > 0");
    if (!(omega >= 1.0)) throw std::invalid_argument("perturbed_cov_coefficient: Omega must be >= 1");
    double c;
    if (std::isinf(omega)) {
        if (alpha > 2.0)
            c = -1.0;
        else if (alpha == 2.0)
            c = delta - 1.0;
        else
            throw std::domain_error(
                "perturbed_cov_coefficient: no thermodynamic limit for alpha < 2 (coefficient diverges)");
    } else {
        c = delta * std::pow(omega, 2.0 - alpha) - 1.0;
    }
    if (c < -1.0) c = -1.0;  // positive semidefiniteness bound
    return {c, interp};
}

inline CovCoefficient cov_coefficient(const MeasureFamily& family, double omega,
                                      CovInterpretation interp = CovInterpretation::CoefficientDirect) {
    if (const auto* s = std::get_if<SubsetUniform>(&family)) {
        if (std::isinf(omega))
            throw std::invalid_argument("cov_coefficient: subset family needs finite Omega to form kappa");
        return subset_cov_coefficient(static_cast<double>(s->k_states) / omega, interp);
    }
    const auto& p = std::get<PerturbedUniform>(family);
    return perturbed_cov_coefficient(p.delta, p.alpha, omega, interp);
}

enum class SaddleBranch { NegativeC, PositiveC, DegenerateUnity, DegenerateZero };

struct SaddleSolution {
    double xi = 0.0;
    double n_c = 0.0;
    double s_scale = 1.0;  // overall saddle scale; free at criticality, reported as 1
    double residual_norm = 0.0;
    SaddleBranch branch = SaddleBranch::DegenerateZero;
    int iterations = 0;
};

class SaddleSolveError : public std::runtime_error {
public:
    SaddleSolveError(const std::string& what, double xi, double n, double residual)
        : std::runtime_error(what), last_xi(xi), last_n(n), last_residual(residual) {}
    double last_xi, last_n, last_residual;
};

// Residuals of the two-equation saddle system at (n, xi); the branch follows
// the sign of c. With a = xi * sqrt(n * ceff):
//   c < 0:  f1 = 1 + xi^2 - I2(a)/n,   f2 = -xi + sqrt(ceff/n) I1(a)
//   c >= 0: f1 = 1 - xi^2 - I2(a)/n,   f2 =  xi + sqrt(ceff/n) I1(a)
inline std::pair<double, double> saddle_residuals(double n, double xi, const CovCoefficient& cc) {
    if (!(n > 0.0)) throw std::invalid_argument("saddle_residuals: n must be > 0");
    const double ceff = cc.effective();
    const double a = xi * std::sqrt(n * ceff);
    if (cc.c < 0.0)
        return {1.0 + xi * xi - i2(a) / n, -xi + std::sqrt(ceff / n) * i1(a)};
    return {1.0 - xi * xi - i2(a) / n, xi + std::sqrt(ceff / n) * i1(a)};
}

struct SaddleOptions {
    double tol = 1e-12;
    int max_iterations = 200;
    std::optional<double> bracket_hint;  // previous |a*| during continuation
};

namespace detail {

// Brent root finder on a bracketing interval.
template <typename F>
double brent(F f, double a, double b, double tol, int max_iter, int& used) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (fa * fb > 0.0) throw std::logic_error("brent: root not bracketed");
    double c = a, fc = fa, d = b - a, e = d;
    for (used = 0; used < max_iter; ++used) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

}  // namespace detail

// Joint root of the saddle system. Eliminating xi via f2 reduces the pair to
// a single equation in a = xi sqrt(n ceff):
//   c < 0:  a = ceff * I1(a)  (a >= 0),  then  n = I2(a) - a^2/ceff
//   c > 0:  a = -ceff * I1(a) (a <= 0),  then  n = I2(a) + a^2/ceff
// The 1D root is bracketed and solved by Brent, then the pair is polished by
// a damped 2D Newton step on the original residuals.
inline SaddleSolution solve_critical_n(const CovCoefficient& cc, const SaddleOptions& opts = {}) {
    if (cc.c < -1.0 - 1e-12)
        throw std::invalid_argument("solve_critical_n: c must be >= -1 (covariance PSD)");

    SaddleSolution sol;
    if (std::abs(cc.c) < 1e-12) {
        sol.branch = SaddleBranch::DegenerateZero;
        sol.xi = 0.0;
        sol.n_c = 0.5;
        return sol;
    }

    const double ceff = cc.effective();
    const bool negative = cc.c < 0.0;
    if (negative && std::abs(ceff - 1.0) < 1e-6) {
        // xi runs off to infinity; the critical density saturates at 1.
        sol.branch = SaddleBranch::DegenerateUnity;
        sol.xi = std::numeric_limits<double>::infinity();
        sol.n_c = 1.0;
        return sol;
    }

    auto gap = [&](double a) { return negative ? a - ceff * i1(a) : a + ceff * i1(a); };

    // Bracket the root of gap(). gap(0) = -/+ ceff*phi(0) != 0 and the
    // opposite sign is reached once |a| outgrows ceff*I1.
    double lo, hi;
    if (negative) {
        lo = 0.0;
        hi = opts.bracket_hint.value_or(1.0);
        int guard = 0;
        while (gap(hi) < 0.0) {
            hi *= 2.0;
            if (++guard > 200)
                throw SaddleSolveError("solve_critical_n: failed to bracket (c -> -1 divergence)", hi, 1.0,
                                       std::abs(gap(hi)));
        }
    } else {
        hi = 0.0;
        lo = -opts.bracket_hint.value_or(1.0);
        int guard = 0;
        while (gap(lo) > 0.0) {
            lo *= 2.0;
            if (++guard > 200)
                throw SaddleSolveError("solve_critical_n: failed to bracket", lo, 1.0, std::abs(gap(lo)));
        }
    }
    int used = 0;
    double a = detail::brent(gap, lo, hi, 1e-15, opts.max_iterations, used);
    sol.iterations = used;

    double n = negative ? i2(a) - a * a / ceff : i2(a) + a * a / ceff;
    if (!(n > 0.0))
        throw SaddleSolveError("solve_critical_n: nonpositive density at 1D root", a, n, 0.0);
    double xi = a / std::sqrt(n * ceff);

    // Damped Newton polish on the joint residuals.
    for (int it = 0; it < 40; ++it) {
        auto [f1, f2] = saddle_residuals(n, xi, cc);
        const double fn = std::max(std::abs(f1), std::abs(f2));
        sol.residual_norm = fn;
        if (fn < opts.tol) break;
        const double hx = 1e-7 * std::max(1.0, std::abs(xi));
        const double hn = 1e-7 * std::max(1.0, std::abs(n));
        auto [f1x, f2x] = saddle_residuals(n, xi + hx, cc);
        auto [f1n, f2n] = saddle_residuals(n + hn, xi, cc);
        const double j11 = (f1x - f1) / hx, j12 = (f1n - f1) / hn;
        const double j21 = (f2x - f2) / hx, j22 = (f2n - f2) / hn;
        const double det = j11 * j22 - j12 * j21;
        if (std::abs(det) < 1e-14) break;
        const double dxi = (-f1 * j22 + f2 * j12) / det;
        const double dn = (-f2 * j11 + f1 * j21) / det;
        double step = 1.0;
        for (int half = 0; half < 30; ++half) {
            const double nn = n + step * dn;
            const double nxi = xi + step * dxi;
            if (nn > 0.0) {
                auto [g1, g2] = saddle_residuals(nn, nxi, cc);
                if (std::max(std::abs(g1), std::abs(g2)) < fn) {
                    n = nn;
                    xi = nxi;
                    break;
                }
            }
            step *= 0.5;
        }
        ++sol.iterations;
    }

    auto [f1, f2] = saddle_residuals(n, xi, cc);
    sol.residual_norm = std::max(std::abs(f1), std::abs(f2));
    if (sol.residual_norm >= 1e-10)
        throw SaddleSolveError("solve_critical_n: residuals did not converge", xi, n, sol.residual_norm);

    sol.branch = negative ? SaddleBranch::NegativeC : SaddleBranch::PositiveC;
    sol.xi = xi;
    sol.n_c = n;
    return sol;
}

// A critical line n_c(parameter) for one family.
enum class LineParam { SubsetKappa, PerturbedAlpha, PerturbedDelta };

inline const char* line_param_name(LineParam p) {
    switch (p) {
        case LineParam::SubsetKappa: return "kappa";
        case LineParam::PerturbedAlpha: return "alpha";
        default: return "delta";
    }
}

struct LineRequest {
    LineParam param = LineParam::SubsetKappa;
    std::vector<double> grid;               // strictly increasing parameter values
    double delta = 1.0;                     // fixed Delta for alpha sweeps
    double alpha = 2.0;                     // fixed alpha for Delta sweeps
    double omega = kThermodynamic;          // finite-size Omega, or thermodynamic
    std::optional<double> finite_assets;    // self-consistent Omega = N / n_c
    CovInterpretation interpretation = CovInterpretation::CoefficientDirect;
};

struct CriticalLine {
    std::string family;
    LineParam param = LineParam::SubsetKappa;
    CovInterpretation interpretation = CovInterpretation::CoefficientDirect;
    double omega = kThermodynamic;
    std::optional<double> finite_assets;
    std::vector<std::pair<double, double>> points;  // (param value, n_c)
};

namespace detail {

inline CovCoefficient line_coefficient(const LineRequest& req, double value, double omega) {
    switch (req.param) {
        case LineParam::SubsetKappa: return subset_cov_coefficient(value, req.interpretation);
        case LineParam::PerturbedAlpha:
            return perturbed_cov_coefficient(req.delta, value, omega, req.interpretation);
        default: return perturbed_cov_coefficient(value, req.alpha, omega, req.interpretation);
    }
}

}  // namespace detail

inline CriticalLine critical_line(const LineRequest& req) {
    if (req.grid.empty()) throw std::invalid_argument("critical_line: empty parameter grid");
    for (std::size_t i = 1; i < req.grid.size(); ++i)
        if (!(req.grid[i] > req.grid[i - 1]))
            throw std::invalid_argument("critical_line: parameter grid must be strictly increasing");

    CriticalLine line;
    line.param = req.param;
    line.family = req.param == LineParam::SubsetKappa ? "subset" : "perturbed";
    line.interpretation = req.interpretation;
    line.omega = req.omega;
    line.finite_assets = req.finite_assets;

    SaddleOptions opts;
    for (double value : req.grid) {
        try {
            SaddleSolution sol;
            if (req.finite_assets && req.param != LineParam::SubsetKappa) {
                // Self-consistent finite size: Omega = N / n on the line.
                double n = 0.9;
                for (int it = 0; it < 400; ++it) {
                    const double omega_eff = std::max(1.0, *req.finite_assets / n);
                    sol = solve_critical_n(detail::line_coefficient(req, value, omega_eff), opts);
                    const double next = 0.5 * (n + sol.n_c);
                    if (std::abs(next - n) < 1e-12) {
                        n = next;
                        break;
                    }
                    n = next;
                }
                sol.n_c = n;
            } else {
                sol = solve_critical_n(detail::line_coefficient(req, value, req.omega), opts);
            }
            line.points.emplace_back(value, sol.n_c);
            if (std::isfinite(sol.xi) && sol.xi != 0.0) {
                const double a_prev = std::abs(sol.xi) * std::sqrt(sol.n_c);  // rough continuation scale
                opts.bracket_hint = std::max(1.0, 2.0 * a_prev);
            }
        } catch (const SaddleSolveError& e) {
            throw SaddleSolveError("critical_line: " + std::string(e.what()) + " at " +
                                       std::string(line_param_name(req.param)) + "=" + std::to_string(value),
                                   e.last_xi, e.last_n, e.last_residual);
        }
    }
    return line;
}

}  // namespace arbphase
