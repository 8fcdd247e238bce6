#include "casmi/inference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "casmi/errors.hpp"
#include "casmi/estimators.hpp"

namespace casmi {

namespace {

constexpr double kEps = 1e-15;
constexpr double kFpMin = 1e-300;
constexpr int kMaxIter = 2000;

// Lower regularized incomplete gamma P(a, x) by series; converges fast for
// x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma Q(a, x) by modified Lentz continued
// fraction; used for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi2_survival(double x, std::uint64_t df) {
    if (df == 0) {
        throw std::invalid_argument("chi2_survival: df must be >= 1");
    }
    if (x <= 0.0) return 1.0;
    const double a = 0.5 * static_cast<double>(df);
    const double half_x = 0.5 * x;
    if (half_x < a + 1.0) return 1.0 - gamma_p_series(a, half_x);
    return gamma_q_continued_fraction(a, half_x);
}

IndependenceTest test_independence(const ContingencyTable& ct, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("test_independence: alpha must lie in (0, 1)");
    }
    const std::size_t k1 = ct.row_marginal().k_effective();
    const std::size_t k2 = ct.col_marginal().k_effective();
    if (k1 < 2 || k2 < 2) {
        throw DegenerateTable("test_independence: a margin has fewer than two categories");
    }
    IndependenceTest result;
    result.df = static_cast<std::uint64_t>(k1 - 1) * static_cast<std::uint64_t>(k2 - 1);
    result.statistic =
        2.0 * static_cast<double>(ct.n()) * mi_z(ct) + static_cast<double>(result.df);
    result.p_value = chi2_survival(result.statistic, result.df);
    if (result.p_value == 0.0) {
        // survival underflow on extreme statistics; keep p in (0, 1]
        result.p_value = std::numeric_limits<double>::min();
    }
    result.reject = result.p_value < alpha;
    return result;
}

}  // namespace casmi
