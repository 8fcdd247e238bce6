#include "casmi/selector.hpp"

#include <algorithm>
#include <stdexcept>

#include "casmi/errors.hpp"
#include "casmi/inference.hpp"

namespace casmi {

namespace {

void validate_config(const SelectionConfig& config) {
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
        throw std::invalid_argument("SelectionConfig: alpha must lie in (0, 1)");
    }
    if (!(config.u > 0.0)) {
        throw std::invalid_argument("SelectionConfig: u must be positive");
    }
    if (config.desired_k && *config.desired_k == 0) {
        throw std::invalid_argument("SelectionConfig: desired_k must be positive");
    }
}

}  // namespace

Stage1Result stage1_screen(std::span<const CategoricalColumn* const> features,
                           const CategoricalColumn& y, double alpha) {
    if (features.empty()) {
        throw std::invalid_argument("stage1_screen: no features");
    }
    if (tabulate(y).k_effective() < 2) {
        throw DegenerateOutcome("stage1_screen: outcome column is constant");
    }
    Stage1Result out;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& feature = *features[i];
        const auto ct = cross_tabulate(feature, y);
        if (ct.row_marginal().k_effective() < 2) {
            out.screened_out.push_back({feature.name(), 1.0});
            continue;
        }
        const auto test = test_independence(ct, alpha);
        if (test.reject) {
            out.retained.push_back(i);
        } else {
            out.screened_out.push_back({feature.name(), test.p_value});
        }
    }
    return out;
}

SelectionResult stage2_greedy(std::span<const CategoricalColumn* const> features,
                              std::span<const std::size_t> retained,
                              const CategoricalColumn& y, const SelectionConfig& config) {
    validate_config(config);
    SelectionResult res;
    if (retained.empty()) {
        res.stop_reason = StopReason::empty_after_stage1;
        return res;
    }

    std::vector<std::size_t> remaining(retained.begin(), retained.end());
    std::vector<const CategoricalColumn*> joint_members;
    const bool score_stopping = !config.desired_k.has_value();
    double current = 0.0;

    while (!remaining.empty()) {
        if (config.desired_k && res.selected.size() == *config.desired_k) {
            res.stop_reason = StopReason::reached_desired_k;
            return res;
        }

        SelectionStep step;
        std::size_t best_pos = 0;
        double best_score = -1.0;
        CasmiScore best{};
        for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
            const auto* candidate = features[remaining[pos]];
            joint_members.push_back(candidate);
            const CasmiScore sc = casmi_score(join_columns(joint_members), y, config.u);
            joint_members.pop_back();
            step.candidate_scores.emplace_back(candidate->name(), sc.score);
            // remaining preserves original order, so the first maximum is the
            // smallest-index tie winner
            if (sc.score > best_score) {
                best_score = sc.score;
                best_pos = pos;
                best = sc;
            }
        }
        const std::size_t best_idx = remaining[best_pos];
        step.picked = features[best_idx]->name();
        step.score = best;

        if (score_stopping) {
            const bool stop =
                res.selected.empty()
                    ? best_score <= 0.0
                    : (config.stop_rule == StopRule::strict_increase ? best_score <= current
                                                                     : best_score < current);
            if (stop) {
                step.accepted = false;
                res.score_trace.push_back(std::move(step));
                res.stop_reason = StopReason::score_drop;
                return res;
            }
        }

        res.score_trace.push_back(std::move(step));
        res.selected.push_back(features[best_idx]->name());
        joint_members.push_back(features[best_idx]);
        current = best_score;
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_pos));
    }

    res.stop_reason = (config.desired_k && res.selected.size() == *config.desired_k)
                          ? StopReason::reached_desired_k
                          : StopReason::exhausted;
    return res;
}

SelectionResult select(std::span<const CategoricalColumn* const> features,
                       const CategoricalColumn& y, const SelectionConfig& config) {
    validate_config(config);
    auto stage1 = stage1_screen(features, y, config.alpha);
    if (stage1.retained.empty()) {
        SelectionResult res;
        res.screened_out = std::move(stage1.screened_out);
        res.stop_reason = StopReason::empty_after_stage1;
        return res;
    }
    SelectionResult res = stage2_greedy(features, stage1.retained, y, config);
    res.screened_out = std::move(stage1.screened_out);
    return res;
}

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::score_drop: return "score_drop";
        case StopReason::exhausted: return "exhausted";
        case StopReason::reached_desired_k: return "reached_desired_k";
        case StopReason::empty_after_stage1: return "empty_after_stage1";
    }
    return "unknown";
}

const char* to_string(StopRule rule) {
    switch (rule) {
        case StopRule::strict_increase: return "strict_increase";
        case StopRule::non_decrease: return "non_decrease";
    }
    return "unknown";
}

}  // namespace casmi
