#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "arbphase/detect.hpp"
#include "arbphase/matrix.hpp"

namespace arbphase {

// Independent small-instance oracle for detect(), via Gordan's theorem:
// a portfolio with strictly positive return in every state exists iff the
// origin lies outside the convex hull of the state vectors {y^w}.
//
// The distance from the origin to the hull is found by exhaustive
// enumeration: for every subset S of at most N+1 points, project the origin
// onto the affine hull of S (a KKT system on the Gram matrix) and keep the
// projection when its barycentric coordinates are nonnegative. By
// Caratheodory the global minimizer is among these. No simplex pivot is
// shared with detect(); the two paths are independent.

struct HullOracleConfig {
    std::size_t max_assets = 6;
    std::size_t max_states = 12;
    double tol = 1e-9;  // on the normalized Euclidean hull distance
};

namespace detail {

// Solve the (k+1)x(k+1) KKT system [G 1; 1^T 0][lambda; nu] = [0; 1] by
// Gaussian elimination with partial pivoting. Returns false on a (near-)
// singular system, which corresponds to a degenerate subset whose faces are
// enumerated elsewhere anyway.
inline bool min_norm_combination(const std::vector<double>& gram, std::size_t k,
                                 std::vector<double>& lambda, double& dist2) {
    const std::size_t dim = k + 1;
    std::vector<double> m(dim * dim, 0.0);
    std::vector<double> rhs(dim, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) m[i * dim + j] = gram[i * k + j];
        m[i * dim + k] = 1.0;
        m[k * dim + i] = 1.0;
    }
    rhs[k] = 1.0;

    std::vector<std::size_t> perm(dim);
    for (std::size_t i = 0; i < dim; ++i) perm[i] = i;
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t piv = col;
        double best = std::abs(m[perm[col] * dim + col]);
        for (std::size_t r = col + 1; r < dim; ++r) {
            const double v = std::abs(m[perm[r] * dim + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < 1e-12) return false;
        std::swap(perm[col], perm[piv]);
        const double d = m[perm[col] * dim + col];
        for (std::size_t r = col + 1; r < dim; ++r) {
            const double f = m[perm[r] * dim + col] / d;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < dim; ++j) m[perm[r] * dim + j] -= f * m[perm[col] * dim + j];
            rhs[perm[r]] -= f * rhs[perm[col]];
        }
    }
    std::vector<double> sol(dim);
    for (std::size_t ri = dim; ri-- > 0;) {
        double v = rhs[perm[ri]];
        for (std::size_t j = ri + 1; j < dim; ++j) v -= m[perm[ri] * dim + j] * sol[j];
        sol[ri] = v / m[perm[ri] * dim + ri];
    }
    lambda.assign(sol.begin(), sol.begin() + k);
    dist2 = sol[k];  // nu = lambda^T G lambda at the KKT point
    return true;
}

}  // namespace detail

inline ArbitrageVerdict detect_hull_oracle(const Matrix& returns, const HullOracleConfig& cfg = {}) {
    const std::size_t n_assets = returns.rows();
    const std::size_t n_states = returns.cols();
    if (n_assets < 1 || n_states < 1)
        throw std::invalid_argument("detect_hull_oracle: need at least one asset and one state");
    if (n_assets > cfg.max_assets || n_states > cfg.max_states)
        throw std::invalid_argument("detect_hull_oracle: instance exceeds the oracle size cap");
    if (!returns.all_finite())
        throw std::invalid_argument("detect_hull_oracle: returns contain non-finite entries");

    double scale = 0.0;
    for (double v : returns.raw()) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) {
        ArbitrageVerdict v;
        v.kind = VerdictKind::ZeroVolume;
        return v;
    }

    // Points p_w = y^w / scale and their Gram matrix.
    Matrix pts(n_states, n_assets);
    for (std::size_t i = 0; i < n_assets; ++i)
        for (std::size_t w = 0; w < n_states; ++w) pts(w, i) = returns(i, w) / scale;
    std::vector<double> gram_full(n_states * n_states);
    for (std::size_t a = 0; a < n_states; ++a)
        for (std::size_t b = 0; b < n_states; ++b) {
            double d = 0.0;
            for (std::size_t i = 0; i < n_assets; ++i) d += pts(a, i) * pts(b, i);
            gram_full[a * n_states + b] = d;
        }

    const std::size_t max_k = std::min(n_states, n_assets + 1);
    double best = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> idx(max_k);
    std::vector<double> gram, lambda;
    for (std::size_t k = 1; k <= max_k; ++k) {
        // enumerate k-subsets of {0..n_states-1} in lexicographic order
        for (std::size_t i = 0; i < k; ++i) idx[i] = i;
        for (;;) {
            if (k == 1) {
                best = std::min(best, gram_full[idx[0] * n_states + idx[0]]);
            } else {
                gram.resize(k * k);
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b < k; ++b) gram[a * k + b] = gram_full[idx[a] * n_states + idx[b]];
                double dist2;
                if (detail::min_norm_combination(gram, k, lambda, dist2)) {
                    bool feasible = true;
                    for (double l : lambda)
                        if (l < -1e-12) {
                            feasible = false;
                            break;
                        }
                    if (feasible) best = std::min(best, std::max(dist2, 0.0));
                }
            }
            // next combination
            std::size_t pos = k;
            while (pos-- > 0) {
                if (idx[pos] + 1 <= n_states - (k - pos)) {
                    ++idx[pos];
                    for (std::size_t j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
                    break;
                }
                if (pos == 0) {
                    pos = static_cast<std::size_t>(-1);
                    break;
                }
            }
            if (pos == static_cast<std::size_t>(-1)) break;
        }
        if (best <= 0.0) break;
    }

    const double dist = std::sqrt(std::max(best, 0.0));
    ArbitrageVerdict verdict;
    verdict.margin = dist * scale;  // hull distance, not a portfolio margin
    verdict.marginal = dist > cfg.tol * 0.1 && dist < cfg.tol * 10.0;
    verdict.kind = dist > cfg.tol ? VerdictKind::InfiniteVolume : VerdictKind::ZeroVolume;
    return verdict;
}

}  // namespace arbphase
