#include "casmi/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "casmi/errors.hpp"

namespace casmi {

namespace {

// Multiplicities grouped by equal count value, sorted by count. Entropy
// estimators depend only on the multiset of counts; grouping makes the result
// bit-identical under any relabeling and cuts the work to one inner loop per
// distinct count.
std::vector<std::pair<std::uint64_t, std::uint64_t>> count_profile(const FrequencyTable& t) {
    std::unordered_map<std::uint64_t, std::uint64_t> grouped;
    for (const auto& [code, count] : t.entries()) ++grouped[count];
    std::vector<std::pair<std::uint64_t, std::uint64_t>> profile(grouped.begin(), grouped.end());
    std::sort(profile.begin(), profile.end());
    return profile;
}

}  // namespace

EntropyEstimate plugin_entropy(const FrequencyTable& t) {
    const double n = static_cast<double>(t.n());
    double h = 0.0;
    for (const auto& [count, mult] : count_profile(t)) {
        const double p = static_cast<double>(count) / n;
        h -= static_cast<double>(mult) * p * std::log(p);
    }
    return {h, EstimatorKind::plugin};
}

EntropyEstimate zhang_entropy(const FrequencyTable& t) {
    const std::uint64_t n = t.n();
    const double dn = static_cast<double>(n);
    double h = 0.0;
    for (const auto& [count, mult] : count_profile(t)) {
        if (count >= n) continue;  // inner sum is empty for a saturated count
        const double fm1 = static_cast<double>(count - 1);
        double prod = 1.0;
        double inner = 0.0;
        const std::uint64_t v_max = n - count;
        for (std::uint64_t v = 1; v <= v_max; ++v) {
            prod *= 1.0 - fm1 / static_cast<double>(n - v);
            inner += prod / static_cast<double>(v);
        }
        h += static_cast<double>(mult) * (static_cast<double>(count) / dn) * inner;
    }
    return {h, EstimatorKind::zhang};
}

double turing_missing_mass(const FrequencyTable& t) {
    return static_cast<double>(t.singleton_count()) / static_cast<double>(t.n());
}

double mi_z(const ContingencyTable& ct) {
    return zhang_entropy(ct.row_marginal()).value + zhang_entropy(ct.col_marginal()).value -
           zhang_entropy(ct.flatten()).value;
}

double plugin_mi(const ContingencyTable& ct) {
    return plugin_entropy(ct.row_marginal()).value + plugin_entropy(ct.col_marginal()).value -
           plugin_entropy(ct.flatten()).value;
}

CasmiScore casmi_score(const ContingencyTable& ct, double u) {
    if (!(u > 0.0)) {
        throw std::invalid_argument("casmi: u must be positive");
    }
    const double hz_y = zhang_entropy(ct.col_marginal()).value;
    if (!(hz_y > 0.0)) {
        throw DegenerateOutcome("casmi: outcome column is constant");
    }
    CasmiScore s;
    s.mi_z = mi_z(ct);
    s.kappa_z = s.mi_z / hz_y;
    s.coverage = 1.0 - turing_missing_mass(ct.row_marginal());
    s.u = u;
    s.score = std::max(s.kappa_z, 0.0) * std::pow(s.coverage, u);
    return s;
}

CasmiScore casmi_score(const CategoricalColumn& x, const CategoricalColumn& y, double u) {
    return casmi_score(cross_tabulate(x, y), u);
}

}  // namespace casmi
