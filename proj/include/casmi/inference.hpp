#pragma once

#include <cstdint>

#include "casmi/column.hpp"

namespace casmi {

struct IndependenceTest {
    double statistic = 0.0;  // chi-squared value
    std::uint64_t df = 0;    // (K1-1)(K2-1) over observed categories
    double p_value = 1.0;
    bool reject = false;
};

/// Upper tail P(chi2_df > x) via the regularized incomplete gamma
/// Q(df/2, x/2). Returns 1 for x <= 0; throws for df = 0.
double chi2_survival(double x, std::uint64_t df);

/// Independence test with statistic 2n*MIz + df, which converges to
/// chi-squared(df) under independence. Throws DegenerateTable when either
/// margin has fewer than two observed categories.
IndependenceTest test_independence(const ContingencyTable& ct, double alpha = 0.10);

}  // namespace casmi
