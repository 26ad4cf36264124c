#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "arbphase/detect.hpp"
#include "arbphase/hull_oracle.hpp"
#include "arbphase/market.hpp"
#include "arbphase/rng.hpp"

using namespace arbphase;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = rows.begin()->size();
    Matrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
        std::size_t j = 0;
        for (double v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

Matrix random_returns(std::size_t n_assets, std::size_t n_states, RngStream& rng) {
    Matrix m(n_assets, n_states);
    for (double& v : m.raw()) v = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("single asset, single state half-line cone") {
    const Matrix y = from_rows({{1.0}});
    const ArbitrageVerdict v = detect(y);
    REQUIRE(v.kind == VerdictKind::InfiniteVolume);
    REQUIRE(v.witness.has_value());
    REQUIRE((*v.witness)[0] == Catch::Approx(1.0));
    REQUIRE(v.margin == Catch::Approx(1.0));
}

TEST_CASE("opposing constraints pin the portfolio to zero") {
    const Matrix y = from_rows({{1.0, -1.0}});
    const ArbitrageVerdict v = detect(y);
    REQUIRE(v.kind == VerdictKind::ZeroVolume);
    REQUIRE_FALSE(v.witness.has_value());
}

TEST_CASE("N=3 Omega=2 generic returns always admit arbitrage") {
    RngStream rng(2024);
    for (int rep = 0; rep < 50; ++rep) {
        const Matrix y = random_returns(3, 2, rng);
        const ArbitrageVerdict v = detect(y);
        REQUIRE(v.kind == VerdictKind::InfiniteVolume);
        REQUIRE(verify_witness(y, *v.witness, 1e-9));
    }
}

TEST_CASE("witness box normalization and margin consistency") {
    RngStream rng(77);
    for (int rep = 0; rep < 100; ++rep) {
        const Matrix y = random_returns(4, 3, rng);
        const ArbitrageVerdict v = detect(y);
        if (v.kind != VerdictKind::InfiniteVolume) continue;
        double linf = 0.0;
        for (double z : *v.witness) linf = std::max(linf, std::abs(z));
        REQUIRE(linf <= 1.0 + 1e-12);
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t w = 0; w < y.cols(); ++w) {
            double r = 0.0;
            for (std::size_t i = 0; i < y.rows(); ++i) r += (*v.witness)[i] * y(i, w);
            worst = std::min(worst, r);
        }
        REQUIRE(v.margin == Catch::Approx(worst).margin(1e-12));
        REQUIRE(worst > 1e-9);
    }
}

TEST_CASE("verify_witness basics") {
    const Matrix y = from_rows({{1.0, 0.5}, {-0.2, 0.7}});
    const std::vector<double> zeros{0.0, 0.0};
    REQUIRE_FALSE(verify_witness(y, zeros, 1e-9));

    const ArbitrageVerdict v = detect(y);
    REQUIRE(v.kind == VerdictKind::InfiniteVolume);
    REQUIRE(verify_witness(y, *v.witness, 1e-9));
    std::vector<double> negated = *v.witness;
    for (double& z : negated) z = -z;
    REQUIRE_FALSE(verify_witness(y, negated, 1e-9));
}

TEST_CASE("detect rejects malformed input") {
    Matrix nan_returns = from_rows({{1.0, std::nan("")}});
    REQUIRE_THROWS_AS(detect(nan_returns), std::invalid_argument);
    REQUIRE_THROWS_AS(detect(Matrix{}), std::invalid_argument);
    DetectorConfig bad;
    bad.tol = 0.0;
    REQUIRE_THROWS_AS(detect(from_rows({{1.0}}), bad), std::invalid_argument);
}

TEST_CASE("all-zero returns give zero volume") {
    const Matrix y(3, 4, 0.0);
    REQUIRE(detect(y).kind == VerdictKind::ZeroVolume);
}

TEST_CASE("scale invariance of the verdict") {
    RngStream rng(5150);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + rng.uniform_below(5);
        const std::size_t w = 1 + rng.uniform_below(8);
        const Matrix y = random_returns(n, w, rng);
        const double factors[] = {1e-6, 1e-3, 1e3, 1e6};
        const VerdictKind base = detect(y).kind;
        for (double f : factors) {
            Matrix scaled = y;
            for (double& v : scaled.raw()) v *= f;
            REQUIRE(detect(scaled).kind == base);
        }
    }
}

TEST_CASE("permutation invariance of the verdict") {
    RngStream rng(31337);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 2 + rng.uniform_below(4);
        const std::size_t w = 2 + rng.uniform_below(7);
        const Matrix y = random_returns(n, w, rng);
        const VerdictKind base = detect(y).kind;

        std::vector<std::uint32_t> aperm, sperm;
        rng.sample_indices(n, n, aperm);
        rng.sample_indices(w, w, sperm);
        Matrix shuffled(n, w);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < w; ++j) shuffled(i, j) = y(aperm[i], sperm[j]);
        REQUIRE(detect(shuffled).kind == base);
    }
}

TEST_CASE("adding a state can only destroy arbitrage") {
    RngStream rng(99);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = 1 + rng.uniform_below(5);
        const std::size_t w = 1 + rng.uniform_below(6);
        const Matrix y = random_returns(n, w, rng);
        Matrix extended(n, w + 1);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < w; ++j) extended(i, j) = y(i, j);
            extended(i, w) = rng.normal();
        }
        const VerdictKind before = detect(y).kind;
        const VerdictKind after = detect(extended).kind;
        if (before == VerdictKind::ZeroVolume) REQUIRE(after == VerdictKind::ZeroVolume);
    }
}

TEST_CASE("hull oracle trivial cases") {
    // +/- unit vectors span R^N: the hull contains the origin.
    for (std::size_t n = 1; n <= 4; ++n) {
        Matrix y(n, 2 * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            y(i, 2 * i) = 1.0;
            y(i, 2 * i + 1) = -1.0;
        }
        REQUIRE(detect_hull_oracle(y).kind == VerdictKind::ZeroVolume);
        REQUIRE(detect(y).kind == VerdictKind::ZeroVolume);
    }
    // a single state vector leaves a half space
    RngStream rng(7);
    for (std::size_t n = 1; n <= 5; ++n) {
        const Matrix y = random_returns(n, 1, rng);
        REQUIRE(detect_hull_oracle(y).kind == VerdictKind::InfiniteVolume);
    }
}

TEST_CASE("hull oracle enforces its size cap") {
    RngStream rng(1);
    const Matrix y = random_returns(7, 4, rng);
    REQUIRE_THROWS_AS(detect_hull_oracle(y), std::invalid_argument);
}

TEST_CASE("detector agrees with the hull oracle on random instances") {
    RngStream rng(424242);
    int marginal = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = 1 + rng.uniform_below(4);
        const std::size_t w = 1 + rng.uniform_below(8);
        const Matrix y = random_returns(n, w, rng);
        const ArbitrageVerdict lp = detect(y);
        const ArbitrageVerdict hull = detect_hull_oracle(y);
        if (lp.marginal || hull.marginal) {
            ++marginal;
            continue;
        }
        REQUIRE(lp.kind == hull.kind);
    }
    REQUIRE(marginal < 10);
}

TEST_CASE("detector agrees with the oracle on sampled market instances") {
    RngStream seeds(8888);
    int marginal = 0;
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = 2 + seeds.uniform_below(3);
        const std::size_t w = 2 + seeds.uniform_below(7);
        MarketParams params{n, w, seeds.next_u64()};
        const bool subset = seeds.uniform_below(2) == 0;
        MeasureFamily family;
        if (subset)
            family = SubsetUniform{1 + seeds.uniform_below(w)};
        else
            family = PerturbedUniform{0.5 + 0.5 * seeds.uniform01(), 2.0, seeds.uniform_below(2) == 0};
        const MarketInstance inst = sample_market(params, family);
        const ArbitrageVerdict lp = detect(inst.excess_returns);
        const ArbitrageVerdict hull = detect_hull_oracle(inst.excess_returns);
        if (lp.marginal || hull.marginal) {
            ++marginal;
            continue;
        }
        REQUIRE(lp.kind == hull.kind);
    }
    REQUIRE(marginal < 6);
}
