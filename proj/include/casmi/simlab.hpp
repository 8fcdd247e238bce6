#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "casmi/prep.hpp"
#include "casmi/selector.hpp"

namespace casmi::simlab {

/// One categorical value of a synthetic variable. Values are exact tenths
/// (e.g. -35 is the label "-3.5") so atoms merge without floating-point
/// comparisons.
struct Category {
    int value_tenths;
    double prob;
};

/// Fixed catalog of the synthetic population: the latent laws, the indicator
/// thresholds mapping each latent draw to a categorical value, and the
/// response rule. X6 duplicates X4's draw; X7..X10 are independent of the
/// response.
class GeneratorSpec {
public:
    static const GeneratorSpec& instance();

    /// Exact category table of feature X<id>, id in 1..10.
    std::span<const Category> feature_categories(int feature_id) const;
    std::span<const Category> noise_categories() const;

    // Indicator thresholds, resolved half-open where the written conditions
    // overlap at boundary points (all probability-zero events).
    static int x1_from_normal(double z);
    static int x2_from_poisson(long p);
    static int x3_from_uniform(double u);   // uniform(-1, 1)
    static int x4_from_binomial(long b);    // binomial(4, 0.1)
    static int x5_from_normal(double z);
    static int x7_from_poisson(long p);
    static int x8_from_uniform(double u);   // uniform(-1, 1)
    static int x9_from_binomial(long b);    // binomial(6, 0.2)
    static int x10_from_normal(double z);
    static int noise_from_uniform(double u);  // uniform(0, 1)

    /// Y in tenths from the relevant block (X6 = X4 supplied implicitly).
    static int response_tenths(int x1, int x2, int x3, int x4, int x5, int eps);

private:
    GeneratorSpec();
    std::vector<Category> features_[10];
    std::vector<Category> noise_;
};

std::string label_from_tenths(int tenths);

/// n rows of X1..X10 and Y, every column categorical. Latent variables are
/// drawn from independently seeded substreams so the result is reproducible
/// per (seed, n) within one build.
Dataset generate_dataset(std::size_t n, std::uint64_t seed);

/// Exact joint distribution of (selected feature tuple, Y), enumerated from
/// the 5*5*5*5*5*3 atoms of (X1..X5, noise). Irrelevant members (X7..X10)
/// enter as independent coordinates.
struct TrueJointDistribution {
    struct Atom {
        std::vector<int> x_tenths;  // one slot per scoped feature
        int y_tenths;
        double prob;
    };
    std::vector<Atom> support;
    std::vector<int> scope;  // feature ids, slot order
};

TrueJointDistribution true_distribution(std::span<const int> feature_ids);

/// Mutual information of the scoped tuple with Y under the exact joint
/// distribution (no estimation).
double true_mi(std::span<const int> feature_ids);

/// Information recovery ratio: true MI of (selected intersected with the
/// relevant set X1..X6) over true MI of the full relevant set.
double irr(std::span<const int> selected_feature_ids);
double irr_of_names(std::span<const std::string> selected_names);

/// Triangle law p_k = k / 2001000, k = 1..2000.
std::vector<double> triangle_probabilities();
double triangle_true_entropy();

struct EntropyExperimentRow {
    std::size_t n = 0;
    double mean_plugin = 0.0;
    double mean_zhang = 0.0;
    double seconds = 0.0;  // wall clock spent on this size
};

/// Replicated estimator comparison on the triangle law: for each size, draws
/// `reps` independent samples and averages both entropy estimators.
std::vector<EntropyExperimentRow> run_entropy_experiment(std::span<const std::size_t> sizes,
                                                         std::size_t reps, std::uint64_t seed,
                                                         unsigned workers = 0);

enum class Method { CASMI, MIM, JMI, CMIM, MRMR, DISR, NJMIM };

const char* to_string(Method m);
std::optional<Method> method_from_string(const std::string& name);

struct IrrRun {
    std::size_t n = 0;
    std::size_t rep = 0;
    Method method = Method::CASMI;
    std::vector<std::string> selected;
    std::size_t k = 0;
    double irr = 0.0;
};

struct IrrAggregate {
    std::size_t n = 0;
    Method method = Method::CASMI;
    double mean_irr = 0.0;
    double irr_q025 = 0.0;
    double irr_q975 = 0.0;
};

struct ExperimentReport {
    std::vector<IrrRun> runs;
    std::vector<IrrAggregate> aggregates;
    std::vector<std::pair<std::size_t, double>> size_seconds;
};

/// Per (size, replication): generate a dataset, run the two-stage selector,
/// then run every requested baseline with k fixed to the selector's feature
/// count, and score each method's IRR. CASMI is always included. Aggregates
/// report the mean and the empirical 2.5%/97.5% quantiles.
ExperimentReport run_irr_experiment(std::span<const std::size_t> sizes, std::size_t reps,
                                    std::span<const Method> methods,
                                    const SelectionConfig& config, std::uint64_t seed,
                                    unsigned workers = 0);

}  // namespace casmi::simlab
