#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "casmi/baselines.hpp"
#include "casmi/errors.hpp"
#include "casmi/estimators.hpp"
#include "casmi/prep.hpp"
#include "casmi/selector.hpp"
#include "casmi/simlab.hpp"
#include "casmi/text.hpp"

namespace {

using nlohmann::ordered_json;

struct IngestFlags {
    std::string input;
    std::string delimiter = ",";
    std::vector<std::string> na_tokens{"NA", ""};
    std::string na_policy = "na-category";
    std::string binning = "equal-frequency";
    std::size_t bins = 5;
    bool auto_bins = false;
    std::vector<std::string> as_categorical;
};

void add_ingest_flags(CLI::App* cmd, IngestFlags& f) {
    cmd->add_option("--input", f.input, "Delimited input file with a header row")->required();
    cmd->add_option("--delimiter", f.delimiter, "Field delimiter, one character");
    cmd->add_option("--na-token", f.na_tokens, "Strings treated as missing (default: NA and empty)");
    cmd->add_option("--na-policy", f.na_policy, "Missing-value policy")
        ->check(CLI::IsMember({"na-category", "drop-row"}));
    cmd->add_option("--binning", f.binning, "Discretization for numeric columns")
        ->check(CLI::IsMember({"equal-frequency", "equal-width"}));
    cmd->add_option("--bins", f.bins, "Bin count for numeric columns")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}));
    cmd->add_flag("--auto-bins", f.auto_bins,
                  "Halve the bin count until coverage reaches 50%");
    cmd->add_option("--as-categorical", f.as_categorical,
                    "Columns kept categorical even when numeric");
}

casmi::IngestOptions to_options(const IngestFlags& f) {
    if (f.delimiter.size() != 1) {
        throw CLI::ValidationError("--delimiter", "must be a single character");
    }
    casmi::IngestOptions opts;
    opts.delimiter = f.delimiter[0];
    opts.na_tokens = f.na_tokens;
    opts.na_policy =
        f.na_policy == "drop-row" ? casmi::NaPolicy::drop_row : casmi::NaPolicy::na_category;
    opts.numeric_binning = f.binning == "equal-width" ? casmi::BinMethod::equal_width
                                                      : casmi::BinMethod::equal_frequency;
    opts.bins = f.bins;
    opts.auto_bins = f.auto_bins;
    opts.force_categorical = f.as_categorical;
    return opts;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file '" + path + "'");
    }
    return out;
}

std::string join_names(const std::vector<std::string>& names, char sep = '|') {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i > 0) out += sep;
        out += names[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// select
// ---------------------------------------------------------------------------

struct SelectArgs {
    IngestFlags ingest;
    std::string outcome;
    double alpha = 0.10;
    double u = 1.0;
    std::string stop_rule = "strict-increase";
    std::optional<std::size_t> k;
    std::string extend_with;
    std::string format = "human";
};

void print_select_human(const casmi::SelectionResult& res, double alpha,
                        const std::string& extend_with,
                        const std::vector<std::string>& extension, std::size_t feature_count) {
    std::cout << "screened out " << res.screened_out.size() << " of " << feature_count
              << " features at alpha=" << casmi::text::format_double(alpha) << "\n";
    for (const auto& sf : res.screened_out) {
        std::cout << "  " << sf.name << "  p_value=" << casmi::text::format_double(sf.p_value)
                  << "\n";
    }
    std::cout << "selected " << res.selected.size()
              << " features (stop reason: " << casmi::to_string(res.stop_reason) << ")\n";
    std::size_t step_no = 0;
    for (const auto& step : res.score_trace) {
        if (!step.accepted) continue;
        ++step_no;
        std::cout << "  " << step_no << ". " << step.picked
                  << "  score=" << casmi::text::format_double(step.score.score)
                  << "  kappa_z=" << casmi::text::format_double(step.score.kappa_z)
                  << "  coverage=" << casmi::text::format_double(step.score.coverage)
                  << "  mi_z=" << casmi::text::format_double(step.score.mi_z) << "\n";
    }
    if (!res.score_trace.empty() && !res.score_trace.back().accepted) {
        const auto& step = res.score_trace.back();
        std::cout << "rejected step: " << step.picked
                  << "  score=" << casmi::text::format_double(step.score.score) << "\n";
    }
    if (!extension.empty()) {
        std::cout << "extension via " << extend_with << ": " << join_names(extension, ',') << "\n";
    }
}

ordered_json select_report_json(const casmi::SelectionResult& res, const SelectArgs& args,
                                const std::vector<std::string>& extension) {
    ordered_json report;
    report["input"] = args.ingest.input;
    report["outcome"] = args.outcome;
    report["alpha"] = args.alpha;
    report["u"] = args.u;
    report["stop_rule"] = args.stop_rule == "non-decrease" ? "non_decrease" : "strict_increase";
    if (args.k) report["k"] = *args.k;
    auto screened = ordered_json::array();
    for (const auto& sf : res.screened_out) {
        screened.push_back({{"feature", sf.name}, {"p_value", sf.p_value}});
    }
    report["screened_out"] = std::move(screened);
    report["selected"] = res.selected;
    auto steps = ordered_json::array();
    for (const auto& step : res.score_trace) {
        ordered_json js;
        js["feature"] = step.picked;
        js["accepted"] = step.accepted;
        js["score"] = step.score.score;
        js["kappa_z"] = step.score.kappa_z;
        js["coverage"] = step.score.coverage;
        js["mi_z"] = step.score.mi_z;
        auto cands = ordered_json::array();
        for (const auto& [name, score] : step.candidate_scores) {
            cands.push_back({{"feature", name}, {"score", score}});
        }
        js["candidates"] = std::move(cands);
        steps.push_back(std::move(js));
    }
    report["steps"] = std::move(steps);
    report["stop_reason"] = casmi::to_string(res.stop_reason);
    if (!extension.empty()) {
        report["extended_with"] = args.extend_with;
        report["extension"] = extension;
    }
    return report;
}

void run_select(const SelectArgs& args) {
    if (!(args.alpha > 0.0 && args.alpha < 1.0)) {
        throw CLI::ValidationError("--alpha", "must lie strictly between 0 and 1");
    }
    if (!(args.u > 0.0)) {
        throw CLI::ValidationError("--u", "must be positive");
    }
    std::optional<casmi::BaselineKind> extend_kind;
    if (!args.extend_with.empty()) {
        extend_kind = casmi::baseline_from_string(args.extend_with);
        if (!extend_kind) {
            throw CLI::ValidationError("--extend-with", "unknown method '" + args.extend_with + "'");
        }
        if (!args.k) {
            throw CLI::ValidationError("--extend-with", "requires --k");
        }
    }

    const casmi::Dataset ds = casmi::ingest_file(args.ingest.input, args.outcome,
                                                 to_options(args.ingest));
    const auto features = ds.features();
    const auto& y = ds.outcome();

    casmi::SelectionConfig config;
    config.alpha = args.alpha;
    config.u = args.u;
    config.stop_rule = args.stop_rule == "non-decrease" ? casmi::StopRule::non_decrease
                                                        : casmi::StopRule::strict_increase;

    casmi::SelectionResult res;
    std::vector<std::string> extension;
    if (args.k && extend_kind) {
        if (*args.k > features.size()) {
            throw CLI::ValidationError("--k", "exceeds the feature count");
        }
        res = casmi::select(features, y, config);  // natural stop supplies c
        if (*args.k <= res.selected.size()) {
            config.desired_k = *args.k;
            res = casmi::select(features, y, config);
        } else {
            // Choice-2 extension: walk the baseline's ranking and take the
            // first k - c names not already selected, which is exactly the
            // smallest baseline-k cut producing that many new names.
            const std::size_t need = *args.k - res.selected.size();
            const auto ranking = casmi::baseline_select(*extend_kind, features, y,
                                                        features.size());
            for (const auto& name : ranking) {
                if (extension.size() == need) break;
                if (std::find(res.selected.begin(), res.selected.end(), name) ==
                    res.selected.end()) {
                    extension.push_back(name);
                }
            }
        }
    } else {
        config.desired_k = args.k;
        res = casmi::select(features, y, config);
    }

    if (args.format == "json") {
        std::cout << select_report_json(res, args, extension).dump(2) << "\n";
    } else {
        print_select_human(res, args.alpha, args.extend_with, extension, features.size());
    }
}

// ---------------------------------------------------------------------------
// coverage / entropy
// ---------------------------------------------------------------------------

void run_coverage(const IngestFlags& flags, const std::string& outcome, const std::string& format) {
    const casmi::Dataset ds = casmi::ingest_file(flags.input, outcome, to_options(flags));
    const auto rows = casmi::coverage_report(ds);
    if (format == "json") {
        auto arr = ordered_json::array();
        for (const auto& row : rows) {
            arr.push_back({{"column", row.name},
                           {"coverage", row.coverage},
                           {"flag", casmi::to_string(row.flag)}});
        }
        std::cout << ordered_json{{"coverage", std::move(arr)}}.dump(2) << "\n";
        return;
    }
    std::cout << "column\tcoverage\tflag\n";
    for (const auto& row : rows) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", row.coverage);
        std::cout << row.name << "\t" << buf << "\t" << casmi::to_string(row.flag) << "\n";
    }
}

void run_entropy(const IngestFlags& flags, const std::string& outcome, const std::string& format) {
    casmi::Dataset ds = casmi::ingest_file(flags.input, outcome, to_options(flags));
    struct Row {
        std::string name;
        std::size_t k_effective;
        double plugin;
        double zhang;
        double coverage;
    };
    std::vector<Row> rows;
    for (const auto& col : ds.columns) {
        const auto table = casmi::tabulate(col);
        rows.push_back({col.name(), table.k_effective(), casmi::plugin_entropy(table).value,
                        casmi::zhang_entropy(table).value,
                        1.0 - casmi::turing_missing_mass(table)});
    }
    if (format == "json") {
        auto arr = ordered_json::array();
        for (const auto& row : rows) {
            arr.push_back({{"column", row.name},
                           {"k_effective", row.k_effective},
                           {"plugin_entropy", row.plugin},
                           {"zhang_entropy", row.zhang},
                           {"coverage", row.coverage}});
        }
        std::cout << ordered_json{{"n", ds.rows()}, {"columns", std::move(arr)}}.dump(2) << "\n";
        return;
    }
    std::cout << "n=" << ds.rows() << "\n";
    std::cout << "column\tk_effective\tplugin_entropy\tzhang_entropy\tcoverage\n";
    for (const auto& row : rows) {
        std::cout << row.name << "\t" << row.k_effective << "\t"
                  << casmi::text::format_double(row.plugin) << "\t"
                  << casmi::text::format_double(row.zhang) << "\t"
                  << casmi::text::format_double(row.coverage) << "\n";
    }
}

// ---------------------------------------------------------------------------
// simulate-entropy / simulate-irr
// ---------------------------------------------------------------------------

void run_simulate_entropy(const std::vector<std::size_t>& sizes, std::size_t reps,
                          std::uint64_t seed, const std::string& out_path, unsigned workers) {
    const auto rows = casmi::simlab::run_entropy_experiment(sizes, reps, seed, workers);
    const double true_h = casmi::simlab::triangle_true_entropy();
    auto out = open_output(out_path);
    out << "n,mean_plugin_entropy,mean_zhang_entropy,true_entropy\n";
    for (const auto& row : rows) {
        out << row.n << "," << casmi::text::format_double(row.mean_plugin) << ","
            << casmi::text::format_double(row.mean_zhang) << ","
            << casmi::text::format_double(true_h) << "\n";
        std::cerr << "simulate-entropy: n=" << row.n << " reps=" << reps << " elapsed=";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2fs", row.seconds);
        std::cerr << buf << "\n";
    }
    std::cout << "wrote " << out_path << "\n";
}

void run_simulate_irr(const std::vector<std::size_t>& sizes, std::size_t reps,
                      const std::vector<std::string>& method_names, std::uint64_t seed,
                      const std::string& out_prefix, unsigned workers, double alpha, double u,
                      const std::string& stop_rule) {
    std::vector<casmi::simlab::Method> methods;
    for (const auto& name : method_names) {
        const auto m = casmi::simlab::method_from_string(name);
        if (!m) {
            throw CLI::ValidationError("--methods", "unknown method '" + name + "'");
        }
        methods.push_back(*m);
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw CLI::ValidationError("--alpha", "must lie strictly between 0 and 1");
    }
    if (!(u > 0.0)) {
        throw CLI::ValidationError("--u", "must be positive");
    }
    casmi::SelectionConfig config;
    config.alpha = alpha;
    config.u = u;
    config.stop_rule = stop_rule == "non-decrease" ? casmi::StopRule::non_decrease
                                                   : casmi::StopRule::strict_increase;

    const auto report = casmi::simlab::run_irr_experiment(sizes, reps, methods, config, seed,
                                                          workers);
    {
        auto out = open_output(out_prefix + "_runs.csv");
        out << "n,rep,method,k,irr,selected\n";
        for (const auto& run : report.runs) {
            out << run.n << "," << run.rep << "," << casmi::simlab::to_string(run.method) << ","
                << run.k << "," << casmi::text::format_double(run.irr) << ","
                << join_names(run.selected) << "\n";
        }
    }
    {
        auto out = open_output(out_prefix + "_aggregate.csv");
        out << "n,method,mean_irr,irr_q025,irr_q975\n";
        for (const auto& agg : report.aggregates) {
            out << agg.n << "," << casmi::simlab::to_string(agg.method) << ","
                << casmi::text::format_double(agg.mean_irr) << ","
                << casmi::text::format_double(agg.irr_q025) << ","
                << casmi::text::format_double(agg.irr_q975) << "\n";
        }
    }
    for (const auto& [n, seconds] : report.size_seconds) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2fs", seconds);
        std::cerr << "simulate-irr: n=" << n << " reps=" << reps << " elapsed=" << buf << "\n";
    }
    std::cout << "wrote " << out_prefix << "_runs.csv and " << out_prefix << "_aggregate.csv\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CASMI feature selection for categorical data"};
    app.require_subcommand(1);

    // select
    SelectArgs sel_args;
    auto* sel = app.add_subcommand("select", "Run two-stage feature selection on a dataset");
    add_ingest_flags(sel, sel_args.ingest);
    sel->add_option("--outcome", sel_args.outcome, "Outcome column name")->required();
    sel->add_option("--alpha", sel_args.alpha, "Stage-1 significance level");
    sel->add_option("--u", sel_args.u, "Coverage penalty exponent");
    sel->add_option("--stop-rule", sel_args.stop_rule, "Greedy stopping rule")
        ->check(CLI::IsMember({"strict-increase", "non-decrease"}));
    sel->add_option("--k", sel_args.k, "Desired number of features")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}));
    sel->add_option("--extend-with", sel_args.extend_with,
                    "Baseline supplying extra features when --k exceeds the natural stop");
    sel->add_option("--format", sel_args.format, "Report format")
        ->check(CLI::IsMember({"human", "json"}));
    sel->callback([&] { run_select(sel_args); });

    // coverage
    IngestFlags cov_flags;
    std::string cov_outcome;
    std::string cov_format = "human";
    auto* cov = app.add_subcommand("coverage", "Per-column sample coverage diagnostics");
    add_ingest_flags(cov, cov_flags);
    cov->add_option("--outcome", cov_outcome, "Outcome column name (optional)");
    cov->add_option("--format", cov_format)->check(CLI::IsMember({"human", "json"}));
    cov->callback([&] { run_coverage(cov_flags, cov_outcome, cov_format); });

    // entropy
    IngestFlags ent_flags;
    std::string ent_outcome;
    std::string ent_format = "human";
    auto* ent = app.add_subcommand("entropy", "Per-column entropy estimates and coverage");
    add_ingest_flags(ent, ent_flags);
    ent->add_option("--outcome", ent_outcome, "Outcome column name")->required();
    ent->add_option("--format", ent_format)->check(CLI::IsMember({"human", "json"}));
    ent->callback([&] { run_entropy(ent_flags, ent_outcome, ent_format); });

    // simulate-entropy
    std::vector<std::size_t> se_sizes{100, 300, 500, 1000, 1500, 2000};
    std::size_t se_reps = 1000;
    std::uint64_t se_seed = 42;
    std::string se_out = "entropy_simulation.csv";
    unsigned se_workers = 0;
    auto* se = app.add_subcommand("simulate-entropy",
                                  "Replicated estimator comparison on the triangle law");
    se->add_option("--sizes", se_sizes, "Sample sizes")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    se->add_option("--reps", se_reps, "Replications per size")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    se->add_option("--seed", se_seed, "Master seed");
    se->add_option("--out", se_out, "Output table path");
    se->add_option("--workers", se_workers, "Worker threads (0 = all processors)");
    se->callback([&] { run_simulate_entropy(se_sizes, se_reps, se_seed, se_out, se_workers); });

    // simulate-irr
    std::vector<std::size_t> si_sizes{250, 500, 1000, 1500};
    std::size_t si_reps = 200;
    std::vector<std::string> si_methods{"CASMI", "MIM", "JMI", "CMIM", "MRMR", "DISR", "NJMIM"};
    std::uint64_t si_seed = 42;
    std::string si_out = "irr_simulation";
    unsigned si_workers = 0;
    double si_alpha = 0.10;
    double si_u = 1.0;
    std::string si_stop_rule = "strict-increase";
    auto* si = app.add_subcommand("simulate-irr",
                                  "Replicated IRR comparison of CASMI against the baselines");
    si->add_option("--sizes", si_sizes, "Sample sizes")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    si->add_option("--reps", si_reps, "Replications per size")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
    si->add_option("--methods", si_methods, "Methods to compare (CASMI always included)");
    si->add_option("--seed", si_seed, "Master seed");
    si->add_option("--out", si_out, "Output file prefix");
    si->add_option("--workers", si_workers, "Worker threads (0 = all processors)");
    si->add_option("--alpha", si_alpha, "Stage-1 significance level");
    si->add_option("--u", si_u, "Coverage penalty exponent");
    si->add_option("--stop-rule", si_stop_rule)
        ->check(CLI::IsMember({"strict-increase", "non-decrease"}));
    si->callback([&] {
        run_simulate_irr(si_sizes, si_reps, si_methods, si_seed, si_out, si_workers, si_alpha,
                         si_u, si_stop_rule);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
