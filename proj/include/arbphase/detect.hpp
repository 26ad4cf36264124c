#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arbphase/matrix.hpp"
#include "arbphase/simplex.hpp"

namespace arbphase {

// Decides whether the arbitrage cone {z : y^w . z >= 0 for all w} has empty
// interior (zero volume) or not (infinite volume), by solving
//
//     maximize t   s.t.   sum_i z_i y_i^w >= t  for all w,   |z_i| <= 1.
//
// t* > 0 iff some portfolio earns a strictly positive return in every state.
// Returns are normalized by their max-abs entry before solving, so the
// tolerance acts on a scale-free margin and the verdict is invariant under
// positive rescaling of the input.

enum class PivotRule { Bland, DantzigBlandFallback };

struct DetectorConfig {
    double tol = 1e-9;         // strict-positivity threshold on the normalized margin
    int max_pivots = 200000;   // total simplex pivots across subproblems
    PivotRule pivot_rule = PivotRule::DantzigBlandFallback;

    void validate() const {
        if (!(tol > 0.0)) throw std::invalid_argument("DetectorConfig: tol must be > 0");
        if (max_pivots <= 0) throw std::invalid_argument("DetectorConfig: max_pivots must be > 0");
    }
};

enum class VerdictKind { ZeroVolume, InfiniteVolume };

struct ArbitrageVerdict {
    VerdictKind kind = VerdictKind::ZeroVolume;
    std::optional<std::vector<double>> witness;  // present iff InfiniteVolume
    double margin = 0.0;       // min_w sum_i z_i y_i^w in original units
    bool marginal = false;     // normalized margin within a decade of tol
    int pivots = 0;
};

// Pivot cap exhausted: the instance is undecided, never misclassified.
class DetectorUndecided : public std::runtime_error {
public:
    explicit DetectorUndecided(int pivots)
        : std::runtime_error("detector undecided: pivot cap exceeded after " + std::to_string(pivots) +
                             " pivots"),
          pivots_(pivots) {}
    int pivots() const noexcept { return pivots_; }

private:
    int pivots_;
};

inline bool verify_witness(const Matrix& returns, std::span<const double> z, double tol) {
    if (z.size() != returns.rows())
        throw std::invalid_argument("verify_witness: portfolio length mismatch");
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < returns.cols(); ++w) {
        double r = 0.0;
        for (std::size_t i = 0; i < returns.rows(); ++i) r += z[i] * returns(i, w);
        worst = std::min(worst, r);
    }
    return worst > tol;
}

namespace detail {

// One LP solve over the constraint rows listed in `rows`. Returns (t*, z*).
// Variables are laid out as [z_1..z_N, t, slacks]; each constraint row w is
// -y^w . z + t + s_w = 0 with s_w >= 0.
inline std::pair<double, std::vector<double>> solve_feasibility_lp(
    const Matrix& y_states,  // Omega x N, normalized
    const std::vector<std::uint32_t>& rows, double t_bound, const DetectorConfig& cfg, int& pivot_budget,
    int& pivots_total, bool& bland_seen) {
    const std::size_t n_assets = y_states.cols();
    const std::size_t m = rows.size();
    const std::size_t n_cols = n_assets + 1 + m;

    Matrix a(m, n_cols);
    for (std::size_t r = 0; r < m; ++r) {
        auto src = y_states.row(rows[r]);
        for (std::size_t i = 0; i < n_assets; ++i) a(r, i) = -src[i];
        a(r, n_assets) = 1.0;
        a(r, n_assets + 1 + r) = 1.0;
    }

    std::vector<double> b(m, 0.0);
    std::vector<double> cost(n_cols, 0.0);
    cost[n_assets] = -1.0;  // maximize t
    std::vector<double> lo(n_cols, 0.0), hi(n_cols, lp::detail::kInf);
    std::vector<bool> at_upper(n_cols, false);
    for (std::size_t i = 0; i < n_assets; ++i) {
        lo[i] = -1.0;
        hi[i] = 1.0;
    }
    lo[n_assets] = -t_bound;  // t starts here; the LP value is always >= 0
    hi[n_assets] = t_bound;

    lp::SimplexOptions opts;
    opts.max_pivots = pivot_budget;
    opts.bland_only = cfg.pivot_rule == PivotRule::Bland;

    lp::BoundedSimplex solver(a, b, cost, lo, hi, at_upper);
    lp::SimplexResult res = solver.run(opts);
    pivots_total += res.pivots;
    pivot_budget -= res.pivots;
    bland_seen = bland_seen || res.bland_used;
    if (res.status == lp::SimplexStatus::IterationLimit) throw DetectorUndecided(pivots_total);

    std::vector<double> z(res.x.begin(), res.x.begin() + n_assets);
    return {res.x[n_assets], std::move(z)};
}

}  // namespace detail

inline ArbitrageVerdict detect(const Matrix& returns, const DetectorConfig& cfg = {}) {
    cfg.validate();
    if (returns.rows() < 1 || returns.cols() < 1)
        throw std::invalid_argument("detect: need at least one asset and one state");
    if (!returns.all_finite()) throw std::invalid_argument("detect: returns contain non-finite entries");

    const std::size_t n_assets = returns.rows();
    const std::size_t n_states = returns.cols();

    double scale = 0.0;
    for (double v : returns.raw()) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) {
        // All-zero returns: every portfolio earns exactly zero everywhere.
        ArbitrageVerdict v;
        v.kind = VerdictKind::ZeroVolume;
        return v;
    }

    // State-major copy, normalized: row w holds y^w / scale.
    Matrix y_states(n_states, n_assets);
    for (std::size_t i = 0; i < n_assets; ++i)
        for (std::size_t w = 0; w < n_states; ++w) y_states(w, i) = returns(i, w) / scale;

    double t_bound = 1.0;
    for (std::size_t w = 0; w < n_states; ++w) {
        double s = 0.0;
        for (double v : y_states.row(w)) s += std::abs(v);
        t_bound = std::max(t_bound, s + 1.0);
    }

    // Constraint generation: solve on a working set, add the most violated
    // states, repeat. The working set starts with a deterministic prefix and
    // at the end always contains every binding constraint.
    const std::size_t batch = n_assets + 1;
    std::vector<std::uint32_t> working;
    std::vector<bool> in_working(n_states, false);
    const std::size_t head = std::min<std::size_t>(n_states, std::max<std::size_t>(2 * batch, 16));
    for (std::size_t w = 0; w < head; ++w) {
        working.push_back(static_cast<std::uint32_t>(w));
        in_working[w] = true;
    }

    int pivot_budget = cfg.max_pivots;
    int pivots_total = 0;
    bool bland_seen = false;
    double t_star = 0.0;
    std::vector<double> z_star;
    std::vector<double> state_margin(n_states, 0.0);
    std::vector<std::uint32_t> violated;

    constexpr double eps_violation = 1e-11;
    const int max_rounds = static_cast<int>(n_states / batch) + 8;
    for (int round = 0; round < max_rounds; ++round) {
        auto [t, z] = detail::solve_feasibility_lp(y_states, working, t_bound, cfg, pivot_budget,
                                                   pivots_total, bland_seen);
        t_star = t;
        z_star = std::move(z);

        violated.clear();
        for (std::size_t w = 0; w < n_states; ++w) {
            double r = 0.0;
            auto row = y_states.row(w);
            for (std::size_t i = 0; i < n_assets; ++i) r += z_star[i] * row[i];
            state_margin[w] = r;
            if (!in_working[w] && r < t_star - eps_violation) violated.push_back(static_cast<std::uint32_t>(w));
        }
        if (violated.empty()) break;

        std::sort(violated.begin(), violated.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (state_margin[a] != state_margin[b]) return state_margin[a] < state_margin[b];
            return a < b;
        });
        const std::size_t take = std::min(batch, violated.size());
        for (std::size_t k = 0; k < take; ++k) {
            working.push_back(violated[k]);
            in_working[violated[k]] = true;
        }
        if (round + 1 == max_rounds)
            throw std::runtime_error("detect: constraint generation failed to converge");
    }

    const double margin_norm = *std::min_element(state_margin.begin(), state_margin.end());

    ArbitrageVerdict verdict;
    verdict.pivots = pivots_total;
    verdict.margin = margin_norm * scale;
    verdict.marginal = margin_norm > cfg.tol * 0.1 && margin_norm < cfg.tol * 10.0;
    if (margin_norm > cfg.tol) {
        verdict.kind = VerdictKind::InfiniteVolume;
        verdict.witness = std::move(z_star);
    } else {
        verdict.kind = VerdictKind::ZeroVolume;
    }
    return verdict;
}

}  // namespace arbphase
