#include <doctest.h>

#include <cmath>
#include <random>

#include "casmi/errors.hpp"
#include "casmi/estimators.hpp"
#include "casmi/inference.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using namespace casmi;
using testsupport::make_column;

TEST_CASE("chi2_survival basics") {
    CHECK(chi2_survival(0.0, 3) == 1.0);
    CHECK(chi2_survival(-5.0, 1) == 1.0);
    CHECK_THROWS_AS(chi2_survival(1.0, 0), std::invalid_argument);
    // standard 5% quantiles
    CHECK(chi2_survival(3.841459, 1) == doctest::Approx(0.05).epsilon(1e-5));
    CHECK(chi2_survival(9.487729, 4) == doctest::Approx(0.05).epsilon(1e-5));
    CHECK(chi2_survival(1.0, 1) == doctest::Approx(0.3173105).epsilon(1e-5));
}

TEST_CASE("chi2_survival matches closed-form oracles to 1e-10") {
    for (double x : {0.05, 0.5, 1.0, 2.5, 5.0, 10.0, 25.0, 60.0, 120.0, 200.0}) {
        CAPTURE(x);
        CHECK(std::abs(chi2_survival(x, 1) - testsupport::chi2_survival_df1(x)) <= 1e-10);
        for (int df : {2, 4, 10, 50, 200}) {
            CAPTURE(df);
            CHECK(std::abs(chi2_survival(x, static_cast<std::uint64_t>(df)) -
                           testsupport::chi2_survival_even_df(x, df)) <= 1e-10);
        }
    }
}

TEST_CASE("test_independence statistic arithmetic") {
    const auto x = make_column({0, 0, 1, 1}, 2);
    const auto y = make_column({0, 1, 0, 1}, 2);
    const auto ct = cross_tabulate(x, y);
    const double m = mi_z(ct);
    const auto result = test_independence(ct, 0.10);
    CHECK(result.df == 1);
    CHECK(result.statistic == doctest::Approx(8.0 * m + 1.0).epsilon(1e-12));
    CHECK(result.p_value == chi2_survival(result.statistic, 1));
    CHECK(result.reject == (result.p_value < 0.10));
}

TEST_CASE("perfect dependence over three balanced categories rejects") {
    std::vector<std::uint32_t> codes;
    for (int i = 0; i < 100; ++i) {
        codes.push_back(0);
        codes.push_back(1);
        codes.push_back(2);
    }
    const auto y = make_column(codes, 3);
    const auto result = test_independence(cross_tabulate(y, y), 0.10);
    CHECK(result.df == 4);
    CHECK(result.p_value < 1e-12);
    CHECK(result.reject);
}

TEST_CASE("p-value stays positive on extreme statistics") {
    std::vector<std::uint32_t> codes;
    codes.reserve(300000);
    for (int i = 0; i < 100000; ++i) {
        codes.push_back(0);
        codes.push_back(1);
        codes.push_back(2);
    }
    const auto y = make_column(codes, 3);
    const auto result = test_independence(cross_tabulate(y, y), 0.10);
    CHECK(result.p_value > 0.0);
    CHECK(result.p_value <= 1.0);
    CHECK(result.reject);
}

TEST_CASE("degenerate margins are rejected") {
    const auto x = make_column(std::vector<std::uint32_t>(6, 0), 1);
    const auto y = make_column({0, 1, 0, 1, 0, 1}, 2);
    CHECK_THROWS_AS(test_independence(cross_tabulate(x, y)), DegenerateTable);
    CHECK_THROWS_AS(test_independence(cross_tabulate(y, x)), DegenerateTable);
    CHECK_THROWS_AS(test_independence(cross_tabulate(y, y), 0.0), std::invalid_argument);
}

TEST_CASE("statistic is invariant under relabeling of either margin") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = testsupport::random_uniform_column(80, 4, rng);
        const auto y = testsupport::random_uniform_column(80, 3, rng);
        const auto base = test_independence(cross_tabulate(x, y));
        const auto shuffled =
            test_independence(cross_tabulate(testsupport::relabel(x, rng),
                                             testsupport::relabel(y, rng)));
        CHECK(base.statistic == shuffled.statistic);
        CHECK(base.df == shuffled.df);
        CHECK(base.p_value == shuffled.p_value);
    }
}

namespace {

// X uniform on 4 categories; Y = X with probability rho, else uniform.
std::pair<CategoricalColumn, CategoricalColumn> paired_sample(std::size_t n, double rho,
                                                              std::mt19937_64& rng) {
    std::uniform_int_distribution<std::uint32_t> cat(0, 3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::uint32_t> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = cat(rng);
        ys[i] = unit(rng) < rho ? xs[i] : cat(rng);
    }
    // regenerate until both margins are full so the dense invariant holds
    std::vector<bool> sx(4, false), sy(4, false);
    for (std::size_t i = 0; i < n; ++i) {
        sx[xs[i]] = true;
        sy[ys[i]] = true;
    }
    for (int c = 0; c < 4; ++c) {
        if (!sx[c] || !sy[c]) return paired_sample(n, rho, rng);
    }
    return {testsupport::make_column(xs, 4, "x"), testsupport::make_column(ys, 4, "y")};
}

double rejection_rate(std::size_t n, double rho, int reps, double alpha, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    int rejections = 0;
    for (int rep = 0; rep < reps; ++rep) {
        const auto [x, y] = paired_sample(n, rho, rng);
        if (test_independence(cross_tabulate(x, y), alpha).reject) ++rejections;
    }
    return static_cast<double>(rejections) / reps;
}

}  // namespace

TEST_CASE("test is calibrated near its nominal level under independence") {
    const double rate = rejection_rate(200, 0.0, 2000, 0.10, 2024);
    CHECK(rate >= 0.06);
    CHECK(rate <= 0.14);
}

TEST_CASE("power is non-decreasing in the dependence strength") {
    const double r_03 = rejection_rate(200, 0.3, 2000, 0.10, 99);
    const double r_06 = rejection_rate(200, 0.6, 2000, 0.10, 99);
    const double r_09 = rejection_rate(200, 0.9, 2000, 0.10, 99);
    CHECK(r_03 <= r_06);
    CHECK(r_06 <= r_09);
    CHECK(r_09 > 0.99);  // near-deterministic dependence at n = 200
}
