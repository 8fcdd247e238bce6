#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "casmi/column.hpp"

namespace casmi {

enum class BaselineKind { MIM, JMI, CMIM, MRMR, DISR, NJMIM };

/// Forward-greedy selection with plug-in estimators. Every kind starts from
/// the feature with the largest plug-in mutual information with y; later
/// steps score each candidate against the already-selected set per the
/// kind's criterion. Returns exactly k feature names in pick order, ties
/// broken toward the smallest original column index. Throws for k = 0 or
/// k > feature count, and DegenerateOutcome when y is constant.
std::vector<std::string> baseline_select(BaselineKind kind,
                                         std::span<const CategoricalColumn* const> features,
                                         const CategoricalColumn& y, std::size_t k);

const char* to_string(BaselineKind kind);
std::optional<BaselineKind> baseline_from_string(const std::string& name);

}  // namespace casmi
