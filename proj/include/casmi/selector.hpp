#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "casmi/column.hpp"
#include "casmi/estimators.hpp"

namespace casmi {

enum class StopRule {
    strict_increase,  // stop when the best new score <= current score (default)
    non_decrease,     // stop when the best new score < current score
};

struct SelectionConfig {
    double alpha = 0.10;
    double u = 1.0;
    StopRule stop_rule = StopRule::strict_increase;
    std::optional<std::size_t> desired_k;
};

enum class StopReason {
    score_drop,
    exhausted,
    reached_desired_k,
    empty_after_stage1,
};

struct ScreenedFeature {
    std::string name;
    double p_value;  // recorded as 1 for a degenerate (constant) feature
};

/// One greedy step: the winning candidate with its full score and the score
/// of every candidate evaluated at that step. accepted is false only for the
/// final rejected step of a score_drop stop.
struct SelectionStep {
    std::string picked;
    CasmiScore score;
    std::vector<std::pair<std::string, double>> candidate_scores;
    bool accepted = true;
};

struct SelectionResult {
    std::vector<ScreenedFeature> screened_out;
    std::vector<std::string> selected;
    std::vector<SelectionStep> score_trace;
    StopReason stop_reason = StopReason::empty_after_stage1;
};

struct Stage1Result {
    std::vector<std::size_t> retained;  // indices into the feature list, input order
    std::vector<ScreenedFeature> screened_out;
};

/// Eliminates features whose independence test fails to reject at alpha.
/// Constant features cannot carry evidence and are screened out with
/// p_value 1. Throws DegenerateOutcome when y is constant.
Stage1Result stage1_screen(std::span<const CategoricalColumn* const> features,
                           const CategoricalColumn& y, double alpha);

/// Greedy joint-feature growth over the retained candidates: each step joins
/// one more feature onto the running product column and keeps the candidate
/// with the highest coverage-adjusted score, stopping per the configured
/// rule. Ties break toward the smallest original column index. When
/// desired_k is set the score rule never stops the loop; selection runs to
/// exactly desired_k picks (or until candidates run out).
SelectionResult stage2_greedy(std::span<const CategoricalColumn* const> features,
                              std::span<const std::size_t> retained,
                              const CategoricalColumn& y, const SelectionConfig& config);

/// Both stages composed.
SelectionResult select(std::span<const CategoricalColumn* const> features,
                       const CategoricalColumn& y, const SelectionConfig& config = {});

const char* to_string(StopReason reason);
const char* to_string(StopRule rule);

}  // namespace casmi
