#pragma once

#include <stdexcept>

namespace casmi {

/// The outcome column is constant, so scores and tests against it are
/// undefined.
struct DegenerateOutcome : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A margin of a contingency table has fewer than two observed categories.
struct DegenerateTable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed delimited-text input.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace casmi
