#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "arbphase/detect.hpp"
#include "arbphase/market.hpp"
#include "arbphase/rng.hpp"
#include "arbphase/saddle.hpp"

namespace arbphase {

// Monte Carlo phase diagrams: for every (family parameter, n) cell, sample R
// markets, run the detector, record the fraction of infinite-volume
// instances. Cell seeds are derived from (master_seed, param_index, n_index),
// so the grid is identical for any worker count or execution order.

struct SweepSpec {
    LineParam param = LineParam::SubsetKappa;
    std::vector<double> param_grid;
    std::vector<double> n_grid;
    std::size_t assets = 64;       // N per instance
    std::size_t realizations = 50; // R per cell
    std::uint64_t master_seed = 12345;
    unsigned parallelism = 0;      // 0 = hardware concurrency
    double delta = 1.0;            // fixed Delta for alpha sweeps
    double alpha = 2.0;            // fixed alpha for Delta sweeps
    bool hard_constraint = false;
    bool bernoulli_subsets = false;
    DetectorConfig detector;

    void validate() const {
        if (param_grid.empty() || n_grid.empty()) throw std::invalid_argument("SweepSpec: empty grid");
        if (assets < 2) throw std::invalid_argument("SweepSpec: need at least two assets");
        if (realizations < 1) throw std::invalid_argument("SweepSpec: need at least one realization");
        for (std::size_t i = 1; i < param_grid.size(); ++i)
            if (!(param_grid[i] > param_grid[i - 1]))
                throw std::invalid_argument("SweepSpec: param grid must be strictly increasing");
        for (std::size_t i = 1; i < n_grid.size(); ++i)
            if (!(n_grid[i] > n_grid[i - 1]))
                throw std::invalid_argument("SweepSpec: n grid must be strictly increasing");
        for (double n : n_grid) {
            if (!(n > 0.0)) throw std::invalid_argument("SweepSpec: n must be positive");
            if (std::lround(static_cast<double>(assets) / n) < 1)
                throw std::invalid_argument("SweepSpec: Omega = round(N/n) must be >= 1");
        }
        detector.validate();
    }

    // Nearest-integer state count for a grid density.
    std::size_t omega_for(double n) const {
        return static_cast<std::size_t>(std::lround(static_cast<double>(assets) / n));
    }

    MeasureFamily family_for(double param_value, std::size_t omega) const {
        switch (param) {
            case LineParam::SubsetKappa: {
                const auto k = static_cast<std::size_t>(
                    std::clamp<long>(std::lround(param_value * static_cast<double>(omega)), 1,
                                     static_cast<long>(omega)));
                return SubsetUniform{k, bernoulli_subsets};
            }
            case LineParam::PerturbedAlpha: return PerturbedUniform{delta, param_value, hard_constraint};
            default: return PerturbedUniform{param_value, alpha, hard_constraint};
        }
    }
};

struct CellResult {
    double fraction = 0.0;
    std::uint32_t infinite = 0;
    std::uint32_t marginal = 0;
    std::uint32_t undecided = 0;
    std::uint32_t omega = 0;
    std::uint64_t cell_seed = 0;
};

struct PhaseGrid {
    SweepSpec spec;
    std::vector<CellResult> cells;  // param-major: cells[ip * n_grid.size() + in]

    const CellResult& cell(std::size_t ip, std::size_t in) const {
        return cells[ip * spec.n_grid.size() + in];
    }
    double fraction(std::size_t ip, std::size_t in) const { return cell(ip, in).fraction; }
};

inline CellResult run_cell(const SweepSpec& spec, double param_value, double n, std::uint64_t cell_seed) {
    CellResult out;
    out.cell_seed = cell_seed;
    const std::size_t omega = spec.omega_for(n);
    out.omega = static_cast<std::uint32_t>(omega);
    const MeasureFamily family = spec.family_for(param_value, omega);

    for (std::size_t r = 0; r < spec.realizations; ++r) {
        MarketParams params{spec.assets, omega, seed_combine(cell_seed, r)};
        const MarketInstance inst = sample_market(params, family);
        try {
            const ArbitrageVerdict v = detect(inst.excess_returns, spec.detector);
            if (v.kind == VerdictKind::InfiniteVolume) ++out.infinite;
            if (v.marginal) ++out.marginal;
        } catch (const DetectorUndecided&) {
            ++out.undecided;  // counted, excluded from the denominator
        }
    }
    const std::size_t decided = spec.realizations - out.undecided;
    out.fraction = decided == 0 ? 0.0 : static_cast<double>(out.infinite) / static_cast<double>(decided);
    return out;
}

inline PhaseGrid run_grid(const SweepSpec& spec) {
    spec.validate();
    PhaseGrid grid;
    grid.spec = spec;
    const std::size_t np = spec.param_grid.size();
    const std::size_t nn = spec.n_grid.size();
    grid.cells.assign(np * nn, CellResult{});

    unsigned workers = spec.parallelism ? spec.parallelism : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, np * nn));

    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(np * nn);
    auto work = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= np * nn) return;
            const std::size_t ip = idx / nn;
            const std::size_t in = idx % nn;
            const std::uint64_t cell_seed = seed_combine(seed_combine(spec.master_seed, ip), in);
            try {
                grid.cells[idx] = run_cell(spec, spec.param_grid[ip], spec.n_grid[in], cell_seed);
            } catch (const std::exception& e) {
                errors[idx] = e.what();  // cell failure must not abort the grid
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    std::string failures;
    for (std::size_t idx = 0; idx < errors.size(); ++idx) {
        if (!errors[idx].empty())
            failures += "cell " + std::to_string(idx) + ": " + errors[idx] + "\n";
    }
    if (!failures.empty()) throw std::runtime_error("run_grid: cell failures\n" + failures);
    return grid;
}

// Empirical transition: per parameter row, the first adjacent n-pair whose
// fractions bracket `level`, linearly interpolated. Rows that never cross
// are reported as censored rather than extrapolated.
struct TransitionLine {
    double level = 0.5;
    std::vector<std::pair<double, double>> points;            // (param, n at level)
    std::vector<std::pair<double, std::string>> censored;     // (param, reason)
};

inline TransitionLine extract_transition(const PhaseGrid& grid, double level = 0.5) {
    TransitionLine line;
    line.level = level;
    const auto& ns = grid.spec.n_grid;
    for (std::size_t ip = 0; ip < grid.spec.param_grid.size(); ++ip) {
        const double param = grid.spec.param_grid[ip];
        bool found = false;
        for (std::size_t in = 0; in + 1 < ns.size(); ++in) {
            const double f0 = grid.fraction(ip, in);
            const double f1 = grid.fraction(ip, in + 1);
            if (f0 <= level && level <= f1 && f1 > f0) {
                const double t = (level - f0) / (f1 - f0);
                line.points.emplace_back(param, ns[in] + t * (ns[in + 1] - ns[in]));
                found = true;
                break;
            }
        }
        if (!found) {
            const bool all_above = grid.fraction(ip, 0) > level;
            line.censored.emplace_back(param, all_above ? "transition below grid" : "no crossing on grid");
        }
    }
    return line;
}

// Deviation report between an empirical transition and an analytic line,
// evaluated at the empirical parameter values (analytic side interpolated
// linearly when the grids differ).
struct LineComparison {
    struct Row {
        double param;
        double n_empirical;
        double n_analytic;
        double abs_dev;
    };
    double max_abs_dev = 0.0;
    double mean_abs_dev = 0.0;
    std::vector<Row> rows;
    std::vector<double> skipped_params;  // empirical points outside the analytic range
};

inline LineComparison compare_lines(const TransitionLine& empirical, const CriticalLine& analytic) {
    if (analytic.points.empty()) throw std::invalid_argument("compare_lines: empty analytic line");
    LineComparison cmp;
    auto analytic_at = [&](double param, double& out) {
        const auto& pts = analytic.points;
        if (pts.size() == 1) {
            if (std::abs(param - pts.front().first) > 1e-9) return false;
            out = pts.front().second;
            return true;
        }
        if (param < pts.front().first - 1e-12 || param > pts.back().first + 1e-12) return false;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            if (param <= pts[i + 1].first + 1e-12) {
                const double span = pts[i + 1].first - pts[i].first;
                const double t = span > 0.0 ? std::clamp((param - pts[i].first) / span, 0.0, 1.0) : 0.0;
                out = pts[i].second + t * (pts[i + 1].second - pts[i].second);
                return true;
            }
        }
        out = pts.back().second;
        return true;
    };

    double sum = 0.0;
    for (const auto& [param, n_emp] : empirical.points) {
        double n_ana;
        if (!analytic_at(param, n_ana)) {
            cmp.skipped_params.push_back(param);
            continue;
        }
        const double dev = std::abs(n_emp - n_ana);
        cmp.rows.push_back({param, n_emp, n_ana, dev});
        cmp.max_abs_dev = std::max(cmp.max_abs_dev, dev);
        sum += dev;
    }
    if (cmp.rows.empty()) throw std::invalid_argument("compare_lines: no overlapping parameter range");
    cmp.mean_abs_dev = sum / static_cast<double>(cmp.rows.size());
    return cmp;
}

}  // namespace arbphase
