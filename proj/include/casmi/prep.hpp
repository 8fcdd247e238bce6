#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "casmi/column.hpp"

namespace casmi {

enum class NaPolicy { na_category, drop_row };
enum class BinMethod { equal_frequency, equal_width };

struct IngestOptions {
    char delimiter = ',';
    std::vector<std::string> na_tokens = {"NA", ""};
    NaPolicy na_policy = NaPolicy::na_category;
    BinMethod numeric_binning = BinMethod::equal_frequency;
    std::size_t bins = 5;
    bool auto_bins = false;
    /// Columns kept categorical even when every cell parses as a number.
    std::vector<std::string> force_categorical;
};

struct Dataset {
    std::vector<CategoricalColumn> columns;  // includes the outcome
    std::string outcome_name;

    std::size_t rows() const;
    const CategoricalColumn& outcome() const;
    const CategoricalColumn* find(const std::string& name) const;
    /// All columns except the outcome, in file order.
    std::vector<const CategoricalColumn*> features() const;
};

/// Parses delimited text (header row mandatory, quoted fields with
/// doubled-quote escaping), applies the NA policy, and bins numeric columns.
/// A column is numeric only if every non-NA cell parses as a finite number.
/// An empty outcome name falls back to the first column, for diagnostics
/// that do not model an outcome. Throws ParseError on malformed input, a
/// missing outcome column, or when drop_row removes every row.
Dataset ingest(std::istream& in, const std::string& outcome_name,
               const IngestOptions& opts = {});
Dataset ingest_file(const std::string& path, const std::string& outcome_name,
                    const IngestOptions& opts = {});

/// Discretizes reals into a categorical column. Missing values are NaN and
/// become a trailing "NA" category. Intervals are left-closed/right-open with
/// the last interval closed; labels encode the interval bounds. Equal-width
/// cuts are evenly spaced on [min, max]; equal-frequency cuts sit at the
/// empirical i/bins quantiles with duplicate cuts merged, so fewer bins may
/// come back. Throws std::invalid_argument when every value is missing or
/// bins < 2.
CategoricalColumn bin_numeric(std::string name, std::span<const double> values,
                              BinMethod method, std::size_t bins);

/// Halves the equal-frequency bin count from start_bins until the binned
/// column's estimated coverage reaches target_coverage (or bins = 2) and
/// returns the first qualifying binning.
CategoricalColumn auto_bin(std::string name, std::span<const double> values,
                           std::size_t start_bins, double target_coverage = 0.5);

enum class CoverageFlag { none, low_coverage, id_like };

struct CoverageRow {
    std::string name;
    double coverage;  // 1 - T1
    CoverageFlag flag;
};

/// Estimated sample coverage per column. Flags columns below 50% coverage
/// and all-singleton (ID-like) columns.
std::vector<CoverageRow> coverage_report(const Dataset& ds);

/// Writes the dataset back out as delimited text; re-ingesting with the same
/// options recovers the same row partition and labels.
void emit(const Dataset& ds, std::ostream& out, char delimiter = ',');

const char* to_string(CoverageFlag flag);

}  // namespace casmi
