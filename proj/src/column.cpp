#include "casmi/column.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace casmi {

CategoricalColumn::CategoricalColumn(std::string name,
                                     std::vector<std::uint32_t> codes,
                                     std::vector<std::string> labels)
    : name_(std::move(name)), codes_(std::move(codes)), labels_(std::move(labels)) {
    if (codes_.empty()) {
        throw std::invalid_argument("CategoricalColumn: column must have at least one row");
    }
    if (labels_.empty()) {
        throw std::invalid_argument("CategoricalColumn: label dictionary is empty");
    }
    std::vector<bool> used(labels_.size(), false);
    for (std::uint32_t c : codes_) {
        if (c >= labels_.size()) {
            throw std::invalid_argument("CategoricalColumn: code without a label");
        }
        used[c] = true;
    }
    if (!std::all_of(used.begin(), used.end(), [](bool b) { return b; })) {
        throw std::invalid_argument("CategoricalColumn: unused label (codes must be dense)");
    }
}

CategoricalColumn CategoricalColumn::from_labels(std::string name,
                                                 std::span<const std::string> row_labels) {
    if (row_labels.empty()) {
        throw std::invalid_argument("CategoricalColumn: column must have at least one row");
    }
    std::unordered_map<std::string, std::uint32_t> index;
    std::vector<std::uint32_t> codes;
    std::vector<std::string> labels;
    codes.reserve(row_labels.size());
    for (const auto& lbl : row_labels) {
        auto [it, inserted] = index.try_emplace(lbl, static_cast<std::uint32_t>(labels.size()));
        if (inserted) labels.push_back(lbl);
        codes.push_back(it->second);
    }
    return CategoricalColumn(std::move(name), std::move(codes), std::move(labels));
}

FrequencyTable FrequencyTable::from_column(const CategoricalColumn& col) {
    std::vector<std::uint64_t> hist(col.num_categories(), 0);
    for (std::uint32_t c : col.codes()) ++hist[c];
    return from_histogram(hist);
}

FrequencyTable FrequencyTable::from_histogram(std::span<const std::uint64_t> hist) {
    FrequencyTable t;
    for (std::size_t code = 0; code < hist.size(); ++code) {
        if (hist[code] > 0) {
            t.entries_.emplace_back(static_cast<std::uint32_t>(code), hist[code]);
            t.n_ += hist[code];
        }
    }
    if (t.n_ == 0) {
        throw std::invalid_argument("FrequencyTable: no observations");
    }
    return t;
}

std::uint64_t FrequencyTable::singleton_count() const noexcept {
    std::uint64_t n1 = 0;
    for (const auto& [code, count] : entries_) {
        if (count == 1) ++n1;
    }
    return n1;
}

FrequencyTable ContingencyTable::flatten() const {
    std::vector<std::uint64_t> hist;
    hist.reserve(cells_.size());
    for (const auto& cell : cells_) hist.push_back(cell.count);
    return FrequencyTable::from_histogram(hist);
}

FrequencyTable tabulate(const CategoricalColumn& col) {
    return FrequencyTable::from_column(col);
}

ContingencyTable cross_tabulate(const CategoricalColumn& x, const CategoricalColumn& y) {
    if (x.size() != y.size()) {
        throw std::invalid_argument("cross_tabulate: column lengths differ");
    }
    const std::uint64_t ky = y.num_categories();
    std::unordered_map<std::uint64_t, std::uint64_t> cells;
    cells.reserve(x.size());
    for (std::size_t row = 0; row < x.size(); ++row) {
        const std::uint64_t key = static_cast<std::uint64_t>(x.code(row)) * ky + y.code(row);
        ++cells[key];
    }

    ContingencyTable ct;
    ct.n_ = x.size();
    ct.cells_.reserve(cells.size());
    for (const auto& [key, count] : cells) {
        ct.cells_.push_back({static_cast<std::uint32_t>(key / ky),
                             static_cast<std::uint32_t>(key % ky), count});
    }
    std::sort(ct.cells_.begin(), ct.cells_.end(), [](const auto& a, const auto& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    std::vector<std::uint64_t> row_hist(x.num_categories(), 0);
    std::vector<std::uint64_t> col_hist(y.num_categories(), 0);
    for (const auto& cell : ct.cells_) {
        row_hist[cell.row] += cell.count;
        col_hist[cell.col] += cell.count;
    }
    ct.row_ = FrequencyTable::from_histogram(row_hist);
    ct.col_ = FrequencyTable::from_histogram(col_hist);
    return ct;
}

CategoricalColumn join_columns(std::span<const CategoricalColumn* const> cols) {
    if (cols.empty()) {
        throw std::invalid_argument("join_columns: empty column list");
    }
    const std::size_t n = cols[0]->size();
    for (const auto* col : cols) {
        if (col->size() != n) {
            throw std::invalid_argument("join_columns: column lengths differ");
        }
    }

    // Fold columns pairwise; the running code stays < n, so the exact pairing
    // key running*K + next never overflows at realistic sizes.
    std::vector<std::uint32_t> codes(cols[0]->codes().begin(), cols[0]->codes().end());
    for (std::size_t c = 1; c < cols.size(); ++c) {
        const auto& next = *cols[c];
        const std::uint64_t k_next = next.num_categories();
        std::unordered_map<std::uint64_t, std::uint32_t> remap;
        remap.reserve(n);
        for (std::size_t row = 0; row < n; ++row) {
            const std::uint64_t key =
                static_cast<std::uint64_t>(codes[row]) * k_next + next.code(row);
            auto [it, inserted] = remap.try_emplace(key, static_cast<std::uint32_t>(remap.size()));
            codes[row] = it->second;
        }
    }
    if (cols.size() == 1) {
        // re-code so a single-column join follows the same first-appearance
        // convention as genuine joins
        std::unordered_map<std::uint32_t, std::uint32_t> remap;
        for (auto& code : codes) {
            auto [it, inserted] = remap.try_emplace(code, static_cast<std::uint32_t>(remap.size()));
            code = it->second;
        }
    }

    std::uint32_t k = 0;
    for (std::uint32_t code : codes) k = std::max(k, code + 1);

    // One representative row per joint category supplies the member labels.
    std::vector<std::size_t> rep(k, 0);
    std::vector<bool> seen(k, false);
    for (std::size_t row = 0; row < n; ++row) {
        if (!seen[codes[row]]) {
            seen[codes[row]] = true;
            rep[codes[row]] = row;
        }
    }

    std::vector<std::string> labels(k);
    std::string name;
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c > 0) name += '*';
        name += cols[c]->name();
    }
    for (std::uint32_t code = 0; code < k; ++code) {
        const std::size_t row = rep[code];
        if (cols.size() == 1) {
            labels[code] = cols[0]->label(cols[0]->code(row));
            continue;
        }
        std::string lbl = "(";
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c > 0) lbl += ',';
            lbl += cols[c]->label(cols[c]->code(row));
        }
        lbl += ')';
        labels[code] = std::move(lbl);
    }
    return CategoricalColumn(std::move(name), std::move(codes), std::move(labels));
}

CategoricalColumn join_columns(const std::vector<const CategoricalColumn*>& cols) {
    return join_columns(std::span<const CategoricalColumn* const>(cols));
}

std::vector<const CategoricalColumn*> column_ptrs(const std::vector<CategoricalColumn>& cols) {
    std::vector<const CategoricalColumn*> out;
    out.reserve(cols.size());
    for (const auto& col : cols) out.push_back(&col);
    return out;
}

}  // namespace casmi
