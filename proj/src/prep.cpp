#include "casmi/prep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "casmi/errors.hpp"
#include "casmi/estimators.hpp"
#include "casmi/text.hpp"

namespace casmi {

namespace {

std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

// Records of a delimited file with RFC-4180-style quoting: fields may be
// wrapped in double quotes, a doubled quote inside a quoted field is a
// literal quote, and quoted fields may span newlines.
std::vector<std::vector<std::string>> parse_records(std::istream& in, char delimiter) {
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    const auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    const auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
        } else if (c == delimiter) {
            end_field();
        } else if (c == '\n') {
            end_record();
        } else if (c == '\r') {
            if (i + 1 < content.size() && content[i + 1] == '\n') ++i;
            end_record();
        } else {
            field += c;
            field_started = true;
        }
    }
    if (in_quotes) {
        throw ParseError("ingest: unterminated quoted field");
    }
    if (field_started || !record.empty()) {
        end_record();
    }
    return records;
}

bool needs_quoting(const std::string& s, char delimiter) {
    return s.find(delimiter) != std::string::npos || s.find('"') != std::string::npos ||
           s.find('\n') != std::string::npos || s.find('\r') != std::string::npos;
}

void write_field(std::ostream& out, const std::string& s, char delimiter) {
    if (!needs_quoting(s, delimiter)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

}  // namespace

std::size_t Dataset::rows() const {
    return columns.empty() ? 0 : columns.front().size();
}

const CategoricalColumn& Dataset::outcome() const {
    const auto* col = find(outcome_name);
    if (col == nullptr) {
        throw std::logic_error("Dataset: outcome column missing");
    }
    return *col;
}

const CategoricalColumn* Dataset::find(const std::string& name) const {
    for (const auto& col : columns) {
        if (col.name() == name) return &col;
    }
    return nullptr;
}

std::vector<const CategoricalColumn*> Dataset::features() const {
    std::vector<const CategoricalColumn*> out;
    out.reserve(columns.size());
    for (const auto& col : columns) {
        if (col.name() != outcome_name) out.push_back(&col);
    }
    return out;
}

CategoricalColumn bin_numeric(std::string name, std::span<const double> values,
                              BinMethod method, std::size_t bins) {
    if (bins < 2) {
        throw std::invalid_argument("bin_numeric: bins must be >= 2");
    }
    std::vector<double> present;
    present.reserve(values.size());
    for (double v : values) {
        if (!std::isnan(v)) present.push_back(v);
    }
    if (present.empty()) {
        throw std::invalid_argument("bin_numeric: all values missing");
    }
    std::sort(present.begin(), present.end());
    const double lo = present.front();
    const double hi = present.back();

    std::vector<double> cuts;
    if (method == BinMethod::equal_width) {
        for (std::size_t i = 1; i < bins; ++i) {
            cuts.push_back(lo + (hi - lo) * (static_cast<double>(i) / static_cast<double>(bins)));
        }
    } else {
        // Inverse-ECDF quantile at i/bins, then the next strictly larger data
        // value, so intervals stay left-closed and duplicate quantiles merge.
        const std::size_t m = present.size();
        for (std::size_t i = 1; i < bins; ++i) {
            const std::size_t idx = (m * i + bins - 1) / bins;  // ceil(m*i/bins)
            const double q = present[idx - 1];
            const auto it = std::upper_bound(present.begin(), present.end(), q);
            if (it != present.end()) cuts.push_back(*it);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::erase_if(cuts, [&](double c) { return c <= lo || c > hi; });

    const std::size_t n_bins = cuts.size() + 1;
    const auto bin_of = [&](double v) {
        return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) -
                                        cuts.begin());
    };

    std::vector<bool> used(n_bins, false);
    bool has_na = false;
    for (double v : values) {
        if (std::isnan(v)) {
            has_na = true;
        } else {
            used[bin_of(v)] = true;
        }
    }

    // Dense codes in left-to-right interval order; empty equal-width bins drop
    // out, the NA category (when present) comes last.
    std::vector<std::uint32_t> code_of(n_bins, 0);
    std::vector<std::string> labels;
    for (std::size_t b = 0; b < n_bins; ++b) {
        if (!used[b]) continue;
        code_of[b] = static_cast<std::uint32_t>(labels.size());
        const double lower = b == 0 ? lo : cuts[b - 1];
        const double upper = b == n_bins - 1 ? hi : cuts[b];
        std::string label = "[" + text::format_double(lower) + "," + text::format_double(upper);
        label += (b == n_bins - 1) ? ']' : ')';
        labels.push_back(std::move(label));
    }
    const auto na_code = static_cast<std::uint32_t>(labels.size());
    if (has_na) labels.emplace_back("NA");

    std::vector<std::uint32_t> codes;
    codes.reserve(values.size());
    for (double v : values) {
        codes.push_back(std::isnan(v) ? na_code : code_of[bin_of(v)]);
    }
    return CategoricalColumn(std::move(name), std::move(codes), std::move(labels));
}

CategoricalColumn auto_bin(std::string name, std::span<const double> values,
                           std::size_t start_bins, double target_coverage) {
    if (start_bins < 2) {
        throw std::invalid_argument("auto_bin: start_bins must be >= 2");
    }
    std::size_t bins = start_bins;
    for (;;) {
        auto col = bin_numeric(name, values, BinMethod::equal_frequency, bins);
        const double coverage = 1.0 - turing_missing_mass(tabulate(col));
        if (coverage >= target_coverage || bins == 2) return col;
        bins = std::max<std::size_t>(2, bins / 2);
    }
}

Dataset ingest(std::istream& in, const std::string& outcome_name, const IngestOptions& opts) {
    const auto records = parse_records(in, opts.delimiter);
    if (records.empty()) {
        throw ParseError("ingest: empty file");
    }
    const auto& header = records.front();
    if (header.size() < 2) {
        throw ParseError("ingest: need at least two columns");
    }
    {
        std::unordered_set<std::string> names(header.begin(), header.end());
        if (names.size() != header.size()) {
            throw ParseError("ingest: duplicate column names");
        }
        if (!outcome_name.empty() && !names.contains(outcome_name)) {
            throw ParseError("ingest: outcome column '" + outcome_name + "' missing");
        }
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != header.size()) {
            throw ParseError("ingest: row " + std::to_string(r + 1) + " has " +
                             std::to_string(records[r].size()) + " fields, expected " +
                             std::to_string(header.size()));
        }
    }
    if (records.size() < 2) {
        throw ParseError("ingest: no data rows");
    }

    const auto is_na = [&](const std::string& cell) {
        return std::find(opts.na_tokens.begin(), opts.na_tokens.end(), cell) !=
               opts.na_tokens.end();
    };

    std::vector<std::size_t> keep_rows;
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (opts.na_policy == NaPolicy::drop_row &&
            std::any_of(records[r].begin(), records[r].end(), is_na)) {
            continue;
        }
        keep_rows.push_back(r);
    }
    if (keep_rows.empty()) {
        throw ParseError("ingest: every row was dropped by the NA policy");
    }

    const auto forced = [&](const std::string& name) {
        return std::find(opts.force_categorical.begin(), opts.force_categorical.end(), name) !=
               opts.force_categorical.end();
    };

    Dataset ds;
    ds.outcome_name = outcome_name.empty() ? header.front() : outcome_name;
    for (std::size_t j = 0; j < header.size(); ++j) {
        bool numeric = !forced(header[j]);
        bool any_value = false;
        if (numeric) {
            for (std::size_t r : keep_rows) {
                const auto& cell = records[r][j];
                if (is_na(cell)) continue;
                any_value = true;
                if (!parse_number(cell)) {
                    numeric = false;
                    break;
                }
            }
            if (!any_value) numeric = false;
        }

        if (numeric) {
            std::vector<double> values;
            values.reserve(keep_rows.size());
            for (std::size_t r : keep_rows) {
                const auto& cell = records[r][j];
                values.push_back(is_na(cell) ? std::numeric_limits<double>::quiet_NaN()
                                             : *parse_number(cell));
            }
            ds.columns.push_back(opts.auto_bins
                                     ? auto_bin(header[j], values, std::max<std::size_t>(opts.bins, 2))
                                     : bin_numeric(header[j], values, opts.numeric_binning,
                                                   opts.bins));
        } else {
            std::vector<std::string> labels;
            labels.reserve(keep_rows.size());
            for (std::size_t r : keep_rows) {
                const auto& cell = records[r][j];
                labels.push_back(is_na(cell) ? std::string("NA") : cell);
            }
            ds.columns.push_back(CategoricalColumn::from_labels(header[j], labels));
        }
    }
    return ds;
}

Dataset ingest_file(const std::string& path, const std::string& outcome_name,
                    const IngestOptions& opts) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("ingest: cannot open '" + path + "'");
    }
    return ingest(in, outcome_name, opts);
}

std::vector<CoverageRow> coverage_report(const Dataset& ds) {
    std::vector<CoverageRow> rows;
    rows.reserve(ds.columns.size());
    for (const auto& col : ds.columns) {
        const auto table = tabulate(col);
        const double coverage = 1.0 - turing_missing_mass(table);
        CoverageFlag flag = CoverageFlag::none;
        const bool all_singletons = table.singleton_count() == table.k_effective() &&
                                    table.k_effective() == table.n();
        if (coverage == 0.0 && all_singletons) {
            flag = CoverageFlag::id_like;
        } else if (coverage < 0.5) {
            flag = CoverageFlag::low_coverage;
        }
        rows.push_back({col.name(), coverage, flag});
    }
    return rows;
}

void emit(const Dataset& ds, std::ostream& out, char delimiter) {
    if (ds.columns.empty()) return;
    for (std::size_t j = 0; j < ds.columns.size(); ++j) {
        if (j > 0) out << delimiter;
        write_field(out, ds.columns[j].name(), delimiter);
    }
    out << '\n';
    const std::size_t n = ds.rows();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < ds.columns.size(); ++j) {
            if (j > 0) out << delimiter;
            write_field(out, ds.columns[j].label(ds.columns[j].code(r)), delimiter);
        }
        out << '\n';
    }
}

const char* to_string(CoverageFlag flag) {
    switch (flag) {
        case CoverageFlag::none: return "";
        case CoverageFlag::low_coverage: return "low_coverage";
        case CoverageFlag::id_like: return "id_like";
    }
    return "";
}

}  // namespace casmi
