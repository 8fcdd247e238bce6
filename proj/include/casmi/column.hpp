#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace casmi {

/// A column of dense categorical codes with one label per category.
/// Codes always cover {0..K-1}; every estimator downstream works on codes
/// and counts only, never on labels.
class CategoricalColumn {
public:
    CategoricalColumn(std::string name, std::vector<std::uint32_t> codes,
                      std::vector<std::string> labels);

    /// Builds a column from raw per-row labels, assigning codes in
    /// first-appearance order. Equal labels share a code.
    static CategoricalColumn from_labels(std::string name,
                                         std::span<const std::string> row_labels);

    const std::string& name() const noexcept { return name_; }
    std::size_t size() const noexcept { return codes_.size(); }
    std::uint32_t code(std::size_t row) const { return codes_[row]; }
    std::span<const std::uint32_t> codes() const noexcept { return codes_; }
    std::size_t num_categories() const noexcept { return labels_.size(); }
    const std::string& label(std::uint32_t code) const { return labels_[code]; }
    std::span<const std::string> labels() const noexcept { return labels_; }

private:
    std::string name_;
    std::vector<std::uint32_t> codes_;
    std::vector<std::string> labels_;
};

/// Exact multiplicities f_k of one column. Only categories with positive
/// count are stored, so k_effective() is the number of observed categories.
class FrequencyTable {
public:
    using Entry = std::pair<std::uint32_t, std::uint64_t>;  // (code, count)

    FrequencyTable() = default;

    static FrequencyTable from_column(const CategoricalColumn& col);

    /// From a raw histogram indexed by code; zero bins are dropped.
    static FrequencyTable from_histogram(std::span<const std::uint64_t> hist);

    std::uint64_t n() const noexcept { return n_; }
    std::size_t k_effective() const noexcept { return entries_.size(); }
    std::span<const Entry> entries() const noexcept { return entries_; }

    /// Number of categories observed exactly once.
    std::uint64_t singleton_count() const noexcept;

private:
    std::vector<Entry> entries_;
    std::uint64_t n_ = 0;
};

/// Joint counts f_ij over observed (row, col) pairs plus both marginals.
class ContingencyTable {
public:
    struct Cell {
        std::uint32_t row;
        std::uint32_t col;
        std::uint64_t count;
    };

    std::span<const Cell> cells() const noexcept { return cells_; }
    const FrequencyTable& row_marginal() const noexcept { return row_; }
    const FrequencyTable& col_marginal() const noexcept { return col_; }
    std::uint64_t n() const noexcept { return n_; }

    /// Frequency table of the joint column: the cell counts re-indexed
    /// densely.
    FrequencyTable flatten() const;

private:
    friend ContingencyTable cross_tabulate(const CategoricalColumn& x,
                                           const CategoricalColumn& y);
    std::vector<Cell> cells_;
    FrequencyTable row_;
    FrequencyTable col_;
    std::uint64_t n_ = 0;
};

FrequencyTable tabulate(const CategoricalColumn& col);

/// Cell (i, j) counts rows where x has code i and y has code j.
/// Throws std::invalid_argument on length mismatch.
ContingencyTable cross_tabulate(const CategoricalColumn& x,
                                const CategoricalColumn& y);

/// Joint (product) column over observed tuples only. Codes are assigned in
/// first-appearance row order; a joint category's label is the tuple of
/// member labels. Throws std::invalid_argument on an empty list or on
/// length mismatch.
CategoricalColumn join_columns(std::span<const CategoricalColumn* const> cols);
CategoricalColumn join_columns(const std::vector<const CategoricalColumn*>& cols);

/// Convenience for building pointer views over owned columns.
std::vector<const CategoricalColumn*> column_ptrs(
    const std::vector<CategoricalColumn>& cols);

}  // namespace casmi
