#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "arbphase/matrix.hpp"
#include "arbphase/rng.hpp"

namespace arbphase {

// One-period random market: N assets, Omega terminal states. Payoffs are
// i.i.d. standard normal; each asset carries its own pricing measure drawn
// from one of the two families below. Prices are the measure-expected
// payoffs, excess returns are payoff minus price.

struct MarketParams {
    std::size_t assets = 0;   // N
    std::size_t states = 0;   // Omega
    std::uint64_t seed = 0;

    void validate() const {
        if (assets < 1) throw std::invalid_argument("MarketParams: assets must be >= 1");
        if (states < 1) throw std::invalid_argument("MarketParams: states must be >= 1");
    }
    double asset_density() const { return static_cast<double>(assets) / static_cast<double>(states); }
};

// Measure uniform over a random size-K subset of states, independently per
// asset. `bernoulli` switches to the thermodynamic-limit reading where each
// state is included with probability K/Omega (rows stay normalized over the
// realized subset; empty rows are resampled).
struct SubsetUniform {
    std::size_t k_states = 0;
    bool bernoulli = false;
};

// Measure 1/Omega plus zero-sum Gaussian noise with entry variance
// delta / Omega^alpha. With hard_constraint, negative entries are clipped to
// zero and the row renormalized; the pre-clip rows are kept in raw_values.
struct PerturbedUniform {
    double delta = 1.0;
    double alpha = 2.0;
    bool hard_constraint = false;
};

using MeasureFamily = std::variant<SubsetUniform, PerturbedUniform>;

inline std::string family_name(const MeasureFamily& family) {
    if (std::holds_alternative<SubsetUniform>(family)) return "subset";
    return "perturbed";
}

struct MeasureSet {
    Matrix values;                      // q_i^w, rows sum to 1
    std::optional<Matrix> raw_values;   // pre-clipping values (hard constraint only)
    MeasureFamily family;
    std::size_t resampled_rows = 0;     // degenerate rows that had to be redrawn
};

struct MarketInstance {
    Matrix payoffs;                 // s_i^w
    MeasureSet measures;
    std::vector<double> prices;     // p_i = sum_w q_i^w s_i^w
    Matrix excess_returns;          // y_i^w = s_i^w - p_i
};

inline Matrix sample_payoffs(const MarketParams& params, RngStream& rng) {
    params.validate();
    Matrix s(params.assets, params.states);
    for (double& v : s.raw()) v = rng.normal();
    return s;
}

inline MeasureSet sample_subset_measures(const MarketParams& params, const SubsetUniform& family,
                                         RngStream& rng) {
    params.validate();
    if (family.k_states < 1 || family.k_states > params.states)
        throw std::invalid_argument("SubsetUniform: K must satisfy 1 <= K <= Omega");

    MeasureSet out;
    out.family = family;
    out.values = Matrix(params.assets, params.states);
    std::vector<std::uint32_t> picked;

    for (std::size_t i = 0; i < params.assets; ++i) {
        auto row = out.values.row(i);
        if (!family.bernoulli) {
            rng.sample_indices(params.states, family.k_states, picked);
            const double w = 1.0 / static_cast<double>(family.k_states);
            for (std::uint32_t idx : picked) row[idx] = w;
        } else {
            // Thermodynamic-limit variant: i.i.d. inclusion with prob K/Omega,
            // row normalized over the realized subset.
            const double p = static_cast<double>(family.k_states) / static_cast<double>(params.states);
            std::size_t count = 0;
            for (;;) {
                count = 0;
                for (std::size_t w = 0; w < params.states; ++w) {
                    const bool in = rng.uniform01() < p;
                    row[w] = in ? 1.0 : 0.0;
                    if (in) ++count;
                }
                if (count > 0) break;
                ++out.resampled_rows;
            }
            const double w = 1.0 / static_cast<double>(count);
            for (auto& v : row)
                if (v != 0.0) v = w;
        }
    }
    return out;
}

inline MeasureSet sample_perturbed_measures(const MarketParams& params, const PerturbedUniform& family,
                                            RngStream& rng) {
    params.validate();
    if (!(family.delta > 0.0)) throw std::invalid_argument("PerturbedUniform: Delta must be > 0");

    const std::size_t omega = params.states;
    const double base = 1.0 / static_cast<double>(omega);
    const double sd = std::sqrt(family.delta * std::pow(static_cast<double>(omega), -family.alpha));

    MeasureSet out;
    out.family = family;
    out.values = Matrix(params.assets, omega);
    if (family.hard_constraint) out.raw_values = Matrix(params.assets, omega);

    std::vector<double> noise(omega);
    for (std::size_t i = 0; i < params.assets; ++i) {
        auto row = out.values.row(i);
        for (;;) {
            double mean = 0.0;
            for (std::size_t w = 0; w < omega; ++w) {
                noise[w] = sd * rng.normal();
                mean += noise[w];
            }
            mean /= static_cast<double>(omega);
            // mean subtraction realizes the zero-sum conditioning exactly
            for (std::size_t w = 0; w < omega; ++w) row[w] = base + (noise[w] - mean);

            if (!family.hard_constraint) break;

            auto raw = out.raw_values->row(i);
            double positive_sum = 0.0;
            for (std::size_t w = 0; w < omega; ++w) {
                raw[w] = row[w];
                if (row[w] < 0.0)
                    row[w] = 0.0;
                else
                    positive_sum += row[w];
            }
            if (positive_sum > 0.0) {
                for (auto& v : row) v /= positive_sum;
                break;
            }
            ++out.resampled_rows;  // fully clipped row, redraw it
        }
    }
    return out;
}

inline MeasureSet sample_measures(const MarketParams& params, const MeasureFamily& family, RngStream& rng) {
    if (const auto* s = std::get_if<SubsetUniform>(&family)) return sample_subset_measures(params, *s, rng);
    return sample_perturbed_measures(params, std::get<PerturbedUniform>(family), rng);
}

inline std::vector<double> compute_prices(const Matrix& payoffs, const MeasureSet& measures) {
    const Matrix& q = measures.values;
    if (payoffs.rows() != q.rows() || payoffs.cols() != q.cols())
        throw std::invalid_argument("compute_prices: payoff/measure shape mismatch");
    std::vector<double> prices(payoffs.rows());
    for (std::size_t i = 0; i < payoffs.rows(); ++i) {
        double p = 0.0;
        auto s = payoffs.row(i);
        auto qi = q.row(i);
        for (std::size_t w = 0; w < payoffs.cols(); ++w) p += qi[w] * s[w];
        prices[i] = p;
    }
    return prices;
}

inline Matrix compute_excess_returns(const Matrix& payoffs, const std::vector<double>& prices) {
    if (prices.size() != payoffs.rows())
        throw std::invalid_argument("compute_excess_returns: price vector length mismatch");
    Matrix y(payoffs.rows(), payoffs.cols());
    for (std::size_t i = 0; i < payoffs.rows(); ++i) {
        auto src = payoffs.row(i);
        auto dst = y.row(i);
        for (std::size_t w = 0; w < payoffs.cols(); ++w) dst[w] = src[w] - prices[i];
    }
    return y;
}

// Fraction of strictly negative entries among the raw (pre-clipping) measure
// values; diagnoses when perturbed measures stop being probabilities.
inline double negative_fraction(const MeasureSet& measures) {
    const Matrix& m = measures.raw_values ? *measures.raw_values : measures.values;
    if (m.empty()) return 0.0;
    std::size_t neg = 0;
    for (double v : m.raw())
        if (v < 0.0) ++neg;
    return static_cast<double>(neg) / static_cast<double>(m.raw().size());
}

// Full instance from one seed: payoffs first, then measures, so that the
// draw order (and hence the instance) is pinned by (params, family, seed).
inline MarketInstance sample_market(const MarketParams& params, const MeasureFamily& family) {
    RngStream rng(params.seed);
    MarketInstance inst;
    inst.payoffs = sample_payoffs(params, rng);
    inst.measures = sample_measures(params, family, rng);
    inst.prices = compute_prices(inst.payoffs, inst.measures);
    inst.excess_returns = compute_excess_returns(inst.payoffs, inst.prices);
    return inst;
}

}  // namespace arbphase
