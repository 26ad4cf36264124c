#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "arbphase/matrix.hpp"

namespace arbphase::lp {

// Dense bounded-variable primal simplex for problems in the equality form
//
//     minimize c.x   subject to   A x = b,   lower <= x <= upper,
//
// where the last m columns of A form an identity (slacks) providing the
// initial basis, and the supplied nonbasic bound assignment must be primal
// feasible. That is all the detector needs; this is intentionally not a
// general LP library.
//
// Pivot selection is Dantzig with a permanent switch to Bland's rule after a
// stall, which guarantees finite termination. All pivots are deterministic
// functions of the input ordering, so verdicts are reproducible bit for bit.

enum class SimplexStatus { Optimal, IterationLimit };

struct SimplexOptions {
    int max_pivots = 200000;
    double eps_cost = 1e-10;    // reduced-cost optimality threshold
    double eps_pivot = 1e-11;   // ratio-test denominator threshold
    int stall_window = 64;      // pivots without improvement before Bland
    bool bland_only = false;
};

struct SimplexResult {
    SimplexStatus status = SimplexStatus::Optimal;
    double objective = 0.0;
    std::vector<double> x;
    int pivots = 0;
    bool bland_used = false;
};

namespace detail {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

class BoundedSimplex {
public:
    // at_upper[j] selects the starting bound of each nonbasic structural
    // column; slack columns start basic.
    BoundedSimplex(const Matrix& a, const std::vector<double>& b, const std::vector<double>& cost,
                   const std::vector<double>& lower, const std::vector<double>& upper,
                   const std::vector<bool>& at_upper)
        : m_(a.rows()), n_(a.cols()), tab_(a), cost_(cost), lo_(lower), hi_(upper),
          x_(n_, 0.0), basic_(n_, false), at_upper_(at_upper), basis_(m_) {
        if (cost.size() != n_ || lower.size() != n_ || upper.size() != n_ || at_upper.size() != n_ ||
            b.size() != m_ || n_ < m_)
            throw std::invalid_argument("BoundedSimplex: inconsistent dimensions");
        const std::size_t first_slack = n_ - m_;
        for (std::size_t j = 0; j < first_slack; ++j) x_[j] = at_upper_[j] ? hi_[j] : lo_[j];
        for (std::size_t r = 0; r < m_; ++r) {
            const std::size_t j = first_slack + r;
            basis_[r] = j;
            basic_[j] = true;
            double v = b[r];
            for (std::size_t k = 0; k < first_slack; ++k) v -= tab_(r, k) * x_[k];
            x_[j] = v;
            if (v < lo_[j] - 1e-9 || v > hi_[j] + 1e-9)
                throw std::invalid_argument("BoundedSimplex: initial point infeasible");
        }
        recompute_reduced_costs();
    }

    SimplexResult run(const SimplexOptions& opts) {
        SimplexResult res;
        bool bland = opts.bland_only;
        int since_improve = 0;
        double best_obj = objective();

        while (res.pivots < opts.max_pivots) {
            std::size_t q = n_;
            if (!find_entering(bland, opts.eps_cost, q)) {
                // Reduced costs drift under tableau updates; confirm
                // optimality against freshly computed ones.
                recompute_reduced_costs();
                if (!find_entering(bland, opts.eps_cost, q)) break;
            }
            step(q, opts, bland);
            ++res.pivots;

            const double obj = objective();
            if (obj < best_obj - 1e-13) {
                best_obj = obj;
                since_improve = 0;
            } else if (!bland && ++since_improve >= opts.stall_window) {
                bland = true;
                res.bland_used = true;
            }
        }

        res.status = res.pivots >= opts.max_pivots ? SimplexStatus::IterationLimit : SimplexStatus::Optimal;
        res.objective = objective();
        res.x = x_;
        return res;
    }

private:
    double objective() const {
        double v = 0.0;
        for (std::size_t j = 0; j < n_; ++j) v += cost_[j] * x_[j];
        return v;
    }

    void recompute_reduced_costs() {
        red_ = cost_;
        for (std::size_t r = 0; r < m_; ++r) {
            const double cb = cost_[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < n_; ++j) red_[j] -= cb * tab_(r, j);
        }
        for (std::size_t r = 0; r < m_; ++r) red_[basis_[r]] = 0.0;
    }

    // Improvement for a nonbasic column: moving off its lower bound wants a
    // negative reduced cost, off its upper bound a positive one.
    double improvement(std::size_t j) const {
        const double d = red_[j];
        return at_upper_[j] ? d : -d;
    }

    bool find_entering(bool bland, double eps, std::size_t& q) const {
        if (bland) {
            for (std::size_t j = 0; j < n_; ++j)
                if (!basic_[j] && improvement(j) > eps) {
                    q = j;
                    return true;
                }
            return false;
        }
        double best = eps;
        bool found = false;
        for (std::size_t j = 0; j < n_; ++j) {
            if (basic_[j]) continue;
            const double g = improvement(j);
            if (g > best) {
                best = g;
                q = j;
                found = true;
            }
        }
        return found;
    }

    void step(std::size_t q, const SimplexOptions& opts, bool bland) {
        const double dir = at_upper_[q] ? -1.0 : 1.0;  // sign of the change in x_q

        // Ratio test: basic variables move by -dir * T(r,q) per unit of x_q.
        constexpr double tie_tol = 1e-13;
        double limit = hi_[q] - lo_[q];  // bound-to-bound flip distance
        std::size_t leave = m_;          // m_ means bound flip
        int leave_to_lower = 0;
        for (std::size_t r = 0; r < m_; ++r) {
            const double rate = dir * tab_(r, q);
            const std::size_t jb = basis_[r];
            double cap;
            int to_lower;
            if (rate > opts.eps_pivot) {
                cap = (x_[jb] - lo_[jb]) / rate;
                to_lower = 1;
            } else if (rate < -opts.eps_pivot && hi_[jb] < detail::kInf) {
                cap = (hi_[jb] - x_[jb]) / (-rate);
                to_lower = 0;
            } else {
                continue;
            }
            if (cap < 0.0) cap = 0.0;
            if (cap < limit - tie_tol) {
                limit = cap;
                leave = r;
                leave_to_lower = to_lower;
            } else if (cap <= limit + tie_tol) {
                // Near-tie: prefer a pivot over a flip; among rows, Bland
                // takes the lowest basis index, Dantzig the largest pivot.
                const bool take = leave == m_ ||
                                  (bland ? basis_[r] < basis_[leave]
                                         : std::abs(tab_(r, q)) > std::abs(tab_(leave, q)));
                if (take) {
                    if (cap < limit) limit = cap;
                    leave = r;
                    leave_to_lower = to_lower;
                }
            }
        }

        if (!std::isfinite(limit))
            throw std::runtime_error("BoundedSimplex: unbounded direction (malformed problem)");

        if (leave == m_) {
            // Bound flip: x_q jumps to its other bound, basis unchanged.
            for (std::size_t r = 0; r < m_; ++r) x_[basis_[r]] -= dir * tab_(r, q) * limit;
            x_[q] = at_upper_[q] ? lo_[q] : hi_[q];
            at_upper_[q] = !at_upper_[q];
            return;
        }

        // Pivot on (leave, q).
        for (std::size_t r = 0; r < m_; ++r) x_[basis_[r]] -= dir * tab_(r, q) * limit;
        x_[q] = (at_upper_[q] ? hi_[q] : lo_[q]) + dir * limit;

        const std::size_t jl = basis_[leave];
        basic_[jl] = false;
        at_upper_[jl] = !leave_to_lower;
        x_[jl] = leave_to_lower ? lo_[jl] : hi_[jl];

        const double piv = tab_(leave, q);
        auto prow = tab_.row(leave);
        for (auto& v : prow) v /= piv;
        for (std::size_t r = 0; r < m_; ++r) {
            if (r == leave) continue;
            const double f = tab_(r, q);
            if (f == 0.0) continue;
            auto row = tab_.row(r);
            for (std::size_t j = 0; j < n_; ++j) row[j] -= f * prow[j];
            row[q] = 0.0;
        }
        const double fd = red_[q];
        if (fd != 0.0) {
            for (std::size_t j = 0; j < n_; ++j) red_[j] -= fd * prow[j];
        }
        red_[q] = 0.0;
        tab_(leave, q) = 1.0;

        basis_[leave] = q;
        basic_[q] = true;
    }

    std::size_t m_, n_;
    Matrix tab_;
    std::vector<double> cost_, lo_, hi_, x_, red_;
    std::vector<bool> basic_, at_upper_;
    std::vector<std::size_t> basis_;
};

}  // namespace arbphase::lp
