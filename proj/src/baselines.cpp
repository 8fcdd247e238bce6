#include "casmi/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "casmi/errors.hpp"
#include "casmi/estimators.hpp"

namespace casmi {

namespace {

double plugin_mi_of(const CategoricalColumn& a, const CategoricalColumn& b) {
    return plugin_mi(cross_tabulate(a, b));
}

double plugin_h_of(std::initializer_list<const CategoricalColumn*> cols) {
    const std::vector<const CategoricalColumn*> v(cols);
    return plugin_entropy(tabulate(join_columns(v))).value;
}

// I(X;Y | J) = H(X,J) + H(J,Y) - H(J) - H(X,J,Y), all plug-in.
double conditional_mi(const CategoricalColumn& x, const CategoricalColumn& y,
                      const CategoricalColumn& j) {
    return plugin_h_of({&x, &j}) + plugin_h_of({&j, &y}) - plugin_entropy(tabulate(j)).value -
           plugin_h_of({&x, &j, &y});
}

double step_score(BaselineKind kind, const CategoricalColumn& x, const CategoricalColumn& y,
                  std::span<const CategoricalColumn* const> selected, double relevance) {
    switch (kind) {
        case BaselineKind::MIM:
            return relevance;
        case BaselineKind::JMI: {
            double sum = 0.0;
            for (const auto* j : selected) {
                sum += plugin_mi_of(join_columns({&x, j}), y);
            }
            return sum;
        }
        case BaselineKind::CMIM: {
            double worst = std::numeric_limits<double>::infinity();
            for (const auto* j : selected) {
                worst = std::min(worst, conditional_mi(x, y, *j));
            }
            return worst;
        }
        case BaselineKind::MRMR: {
            double redundancy = 0.0;
            for (const auto* j : selected) {
                redundancy += plugin_mi_of(x, *j);
            }
            return relevance - redundancy / static_cast<double>(selected.size());
        }
        case BaselineKind::DISR: {
            double sum = 0.0;
            for (const auto* j : selected) {
                sum += plugin_mi_of(join_columns({&x, j}), y) / plugin_h_of({&x, j, &y});
            }
            return sum;
        }
        case BaselineKind::NJMIM: {
            double worst = std::numeric_limits<double>::infinity();
            for (const auto* j : selected) {
                worst = std::min(worst,
                                 plugin_mi_of(join_columns({&x, j}), y) / plugin_h_of({&x, j, &y}));
            }
            return worst;
        }
    }
    throw std::logic_error("baseline_select: unknown kind");
}

}  // namespace

std::vector<std::string> baseline_select(BaselineKind kind,
                                         std::span<const CategoricalColumn* const> features,
                                         const CategoricalColumn& y, std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("baseline_select: k must be positive");
    }
    if (k > features.size()) {
        throw std::invalid_argument("baseline_select: k exceeds the feature count");
    }
    if (tabulate(y).k_effective() < 2) {
        throw DegenerateOutcome("baseline_select: outcome column is constant");
    }

    std::vector<double> relevance(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        relevance[i] = plugin_mi_of(*features[i], y);
    }

    if (kind == BaselineKind::MIM) {
        std::vector<std::size_t> order(features.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return relevance[a] > relevance[b]; });
        std::vector<std::string> picked;
        picked.reserve(k);
        for (std::size_t i = 0; i < k; ++i) picked.push_back(features[order[i]]->name());
        return picked;
    }

    std::vector<std::size_t> remaining(features.size());
    std::iota(remaining.begin(), remaining.end(), 0);
    std::vector<const CategoricalColumn*> selected;
    std::vector<std::string> picked;
    picked.reserve(k);

    while (picked.size() < k) {
        std::size_t best_pos = 0;
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
            const std::size_t idx = remaining[pos];
            const double score =
                selected.empty()
                    ? relevance[idx]
                    : step_score(kind, *features[idx], y, selected, relevance[idx]);
            if (score > best) {
                best = score;
                best_pos = pos;
            }
        }
        const std::size_t idx = remaining[best_pos];
        picked.push_back(features[idx]->name());
        selected.push_back(features[idx]);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
    }
    return picked;
}

const char* to_string(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::MIM: return "MIM";
        case BaselineKind::JMI: return "JMI";
        case BaselineKind::CMIM: return "CMIM";
        case BaselineKind::MRMR: return "MRMR";
        case BaselineKind::DISR: return "DISR";
        case BaselineKind::NJMIM: return "NJMIM";
    }
    return "unknown";
}

std::optional<BaselineKind> baseline_from_string(const std::string& name) {
    std::string upper;
    upper.reserve(name.size());
    for (char c : name) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (upper == "MIM") return BaselineKind::MIM;
    if (upper == "JMI") return BaselineKind::JMI;
    if (upper == "CMIM") return BaselineKind::CMIM;
    if (upper == "MRMR") return BaselineKind::MRMR;
    if (upper == "DISR") return BaselineKind::DISR;
    if (upper == "NJMIM") return BaselineKind::NJMIM;
    return std::nullopt;
}

}  // namespace casmi
