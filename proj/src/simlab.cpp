#include "casmi/simlab.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "casmi/baselines.hpp"
#include "casmi/errors.hpp"
#include "casmi/estimators.hpp"
#include "casmi/rng.hpp"

namespace casmi::simlab {

namespace {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

std::vector<double> poisson_pmf(double lambda, int k_max) {
    std::vector<double> p(static_cast<std::size_t>(k_max) + 1);
    p[0] = std::exp(-lambda);
    for (int k = 1; k <= k_max; ++k) {
        p[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k) - 1] * lambda / k;
    }
    return p;
}

std::vector<double> binomial_pmf(int m, double q) {
    std::vector<double> p(static_cast<std::size_t>(m) + 1);
    p[0] = std::pow(1.0 - q, m);
    for (int k = 1; k <= m; ++k) {
        p[static_cast<std::size_t>(k)] =
            p[static_cast<std::size_t>(k) - 1] * (static_cast<double>(m - k + 1) / k) * (q / (1.0 - q));
    }
    return p;
}

void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body) {
    if (workers == 0) {
        workers = std::thread::hardware_concurrency();
        if (workers == 0) workers = 1;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t t = 0; t < count; ++t) body(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    const auto run = [&] {
        for (;;) {
            const std::size_t t = next.fetch_add(1);
            if (t >= count) return;
            try {
                body(t);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

CategoricalColumn column_from_tenths(std::string name, std::span<const int> tenths) {
    std::unordered_map<int, std::uint32_t> index;
    std::vector<std::uint32_t> codes;
    codes.reserve(tenths.size());
    std::vector<std::string> labels;
    for (int t : tenths) {
        auto [it, inserted] = index.try_emplace(t, static_cast<std::uint32_t>(labels.size()));
        if (inserted) labels.push_back(label_from_tenths(t));
        codes.push_back(it->second);
    }
    return CategoricalColumn(std::move(name), std::move(codes), std::move(labels));
}

constexpr int kRelevantMask = 0x1f;  // X1..X5 after folding the X6 duplicate

int relevant_mask(std::span<const int> ids) {
    int mask = 0;
    for (int id : ids) {
        if (id == 6) id = 4;  // X6 duplicates X4 exactly
        if (id >= 1 && id <= 5) mask |= 1 << (id - 1);
    }
    return mask;
}

BaselineKind baseline_of(Method m) {
    switch (m) {
        case Method::MIM: return BaselineKind::MIM;
        case Method::JMI: return BaselineKind::JMI;
        case Method::CMIM: return BaselineKind::CMIM;
        case Method::MRMR: return BaselineKind::MRMR;
        case Method::DISR: return BaselineKind::DISR;
        case Method::NJMIM: return BaselineKind::NJMIM;
        case Method::CASMI: break;
    }
    throw std::logic_error("baseline_of: CASMI is not a baseline");
}

double quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted.front();
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

GeneratorSpec::GeneratorSpec() {
    const double p1a = normal_cdf(-3.0);
    const double p1b = normal_cdf(-0.5);
    const double p1c = normal_cdf(0.5);
    const double p1d = normal_cdf(3.0);
    features_[0] = {{-35, p1a}, {-14, p1b - p1a}, {0, p1c - p1b}, {10, p1d - p1c}, {22, 1.0 - p1d}};

    const auto pois = poisson_pmf(2.0, 4);
    features_[1] = {{-50, pois[0]},
                    {-30, pois[1]},
                    {0, pois[2]},
                    {24, pois[3] + pois[4]},
                    {54, 1.0 - (pois[0] + pois[1] + pois[2] + pois[3] + pois[4])}};

    features_[2] = {{-20, 0.2}, {-10, 0.2}, {0, 0.2}, {10, 0.2}, {20, 0.2}};

    const auto b4 = binomial_pmf(4, 0.1);
    features_[3] = {{-20, b4[0]}, {-10, b4[1]}, {0, b4[2]}, {10, b4[3]}, {50, b4[4]}};

    const double p5a = normal_cdf(-0.5);
    const double p5b = normal_cdf(-0.2);
    const double p5c = normal_cdf(0.2);
    const double p5d = normal_cdf(0.6);
    features_[4] = {{-25, p5a}, {-20, p5b - p5a}, {17, p5c - p5b}, {20, p5d - p5c}, {40, 1.0 - p5d}};

    features_[5] = features_[3];  // X6 duplicates X4

    features_[6] = {{-20, pois[0]}, {-10, pois[1]}, {20, 1.0 - pois[0] - pois[1]}};

    features_[7] = features_[2];

    const auto b6 = binomial_pmf(6, 0.2);
    features_[8].clear();
    for (int k = 0; k <= 6; ++k) {
        features_[8].push_back({k * 10 - 12, b6[static_cast<std::size_t>(k)]});
    }

    const double pta = normal_cdf(-1.5);
    const double ptb = normal_cdf(-0.7);
    const double ptc = normal_cdf(0.7);
    const double ptd = normal_cdf(1.5);
    features_[9] = {{-20, pta}, {-15, ptb - pta}, {0, ptc - ptb}, {15, ptd - ptc}, {20, 1.0 - ptd}};

    noise_ = {{-10, 1.0 / 3.0}, {0, 1.0 / 3.0}, {10, 1.0 / 3.0}};
}

const GeneratorSpec& GeneratorSpec::instance() {
    static const GeneratorSpec spec;
    return spec;
}

std::span<const Category> GeneratorSpec::feature_categories(int feature_id) const {
    if (feature_id < 1 || feature_id > 10) {
        throw std::invalid_argument("GeneratorSpec: feature id must lie in 1..10");
    }
    return features_[static_cast<std::size_t>(feature_id - 1)];
}

std::span<const Category> GeneratorSpec::noise_categories() const {
    return noise_;
}

int GeneratorSpec::x1_from_normal(double z) {
    if (z < -3.0) return -35;
    if (z < -0.5) return -14;
    if (z < 0.5) return 0;
    if (z < 3.0) return 10;
    return 22;
}

int GeneratorSpec::x2_from_poisson(long p) {
    if (p == 0) return -50;
    if (p == 1) return -30;
    if (p == 2) return 0;
    if (p <= 4) return 24;
    return 54;
}

int GeneratorSpec::x3_from_uniform(double u) {
    if (u <= -0.6) return -20;
    if (u < -0.2) return -10;
    if (u <= 0.2) return 0;
    if (u < 0.6) return 10;
    return 20;
}

int GeneratorSpec::x4_from_binomial(long b) {
    return b == 4 ? 50 : static_cast<int>(b - 2) * 10;
}

int GeneratorSpec::x5_from_normal(double z) {
    if (z < -0.5) return -25;
    if (z < -0.2) return -20;
    if (z < 0.2) return 17;
    if (z < 0.6) return 20;
    return 40;
}

int GeneratorSpec::x7_from_poisson(long p) {
    return p < 2 ? static_cast<int>(p - 2) * 10 : 20;
}

int GeneratorSpec::x8_from_uniform(double u) {
    return x3_from_uniform(u);
}

int GeneratorSpec::x9_from_binomial(long b) {
    return static_cast<int>(b) * 10 - 12;
}

int GeneratorSpec::x10_from_normal(double z) {
    if (z < -1.5) return -20;
    if (z < -0.7) return -15;
    if (z < 0.7) return 0;
    if (z < 1.5) return 15;
    return 20;
}

int GeneratorSpec::noise_from_uniform(double u) {
    if (u <= 1.0 / 3.0) return -10;
    if (u < 2.0 / 3.0) return 0;
    return 10;
}

int GeneratorSpec::response_tenths(int x1, int x2, int x3, int x4, int x5, int eps) {
    const int x3_units = x3 / 10;
    const int x4_units = x4 / 10;
    return x1 + x2 + 10 * x3_units * x3_units * x3_units - 5 * x4_units * x4_units +
           std::abs(x5) + x4 + eps;
}

std::string label_from_tenths(int tenths) {
    const int mag = std::abs(tenths);
    std::string s = tenths < 0 ? "-" : "";
    s += std::to_string(mag / 10);
    if (mag % 10 != 0) {
        s += '.';
        s += static_cast<char>('0' + mag % 10);
    }
    return s;
}

Dataset generate_dataset(std::size_t n, std::uint64_t seed) {
    if (n == 0) {
        throw std::invalid_argument("generate_dataset: n must be >= 1");
    }
    enum Var : std::uint64_t { Z1, Z2, Z3, Pois1, Pois2, B1, B2, U1, U2, U3, kVarCount };

    const auto draw_normals = [&](Var var) {
        std::mt19937_64 eng(rng::substream_seed(seed, 0, var));
        std::normal_distribution<double> law(0.0, 1.0);
        std::vector<double> out(n);
        for (auto& v : out) v = law(eng);
        return out;
    };
    const auto draw_poissons = [&](Var var) {
        std::mt19937_64 eng(rng::substream_seed(seed, 0, var));
        std::poisson_distribution<long> law(2.0);
        std::vector<long> out(n);
        for (auto& v : out) v = law(eng);
        return out;
    };
    const auto draw_binomials = [&](Var var, int m, double q) {
        std::mt19937_64 eng(rng::substream_seed(seed, 0, var));
        std::binomial_distribution<long> law(m, q);
        std::vector<long> out(n);
        for (auto& v : out) v = law(eng);
        return out;
    };
    const auto draw_uniforms = [&](Var var, double lo, double hi) {
        std::mt19937_64 eng(rng::substream_seed(seed, 0, var));
        std::uniform_real_distribution<double> law(lo, hi);
        std::vector<double> out(n);
        for (auto& v : out) v = law(eng);
        return out;
    };

    const auto z1 = draw_normals(Z1);
    const auto z2 = draw_normals(Z2);
    const auto z3 = draw_normals(Z3);
    const auto pois1 = draw_poissons(Pois1);
    const auto pois2 = draw_poissons(Pois2);
    const auto b1 = draw_binomials(B1, 4, 0.1);
    const auto b2 = draw_binomials(B2, 6, 0.2);
    const auto u1 = draw_uniforms(U1, -1.0, 1.0);
    const auto u2 = draw_uniforms(U2, -1.0, 1.0);
    const auto u3 = draw_uniforms(U3, 0.0, 1.0);

    std::array<std::vector<int>, 10> x;
    for (auto& col : x) col.resize(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[0][i] = GeneratorSpec::x1_from_normal(z1[i]);
        x[1][i] = GeneratorSpec::x2_from_poisson(pois1[i]);
        x[2][i] = GeneratorSpec::x3_from_uniform(u1[i]);
        x[3][i] = GeneratorSpec::x4_from_binomial(b1[i]);
        x[4][i] = GeneratorSpec::x5_from_normal(z2[i]);
        x[5][i] = x[3][i];  // X6 = X4, same draw
        x[6][i] = GeneratorSpec::x7_from_poisson(pois2[i]);
        x[7][i] = GeneratorSpec::x8_from_uniform(u2[i]);
        x[8][i] = GeneratorSpec::x9_from_binomial(b2[i]);
        x[9][i] = GeneratorSpec::x10_from_normal(z3[i]);
        const int eps = GeneratorSpec::noise_from_uniform(u3[i]);
        y[i] = GeneratorSpec::response_tenths(x[0][i], x[1][i], x[2][i], x[3][i], x[4][i], eps);
    }

    Dataset ds;
    ds.outcome_name = "Y";
    for (int f = 0; f < 10; ++f) {
        ds.columns.push_back(
            column_from_tenths("X" + std::to_string(f + 1), x[static_cast<std::size_t>(f)]));
    }
    ds.columns.push_back(column_from_tenths("Y", y));
    return ds;
}

TrueJointDistribution true_distribution(std::span<const int> feature_ids) {
    for (std::size_t i = 0; i < feature_ids.size(); ++i) {
        if (feature_ids[i] < 1 || feature_ids[i] > 10) {
            throw std::invalid_argument("true_distribution: feature id must lie in 1..10");
        }
        for (std::size_t j = i + 1; j < feature_ids.size(); ++j) {
            if (feature_ids[i] == feature_ids[j]) {
                throw std::invalid_argument("true_distribution: duplicate feature id");
            }
        }
    }
    const auto& spec = GeneratorSpec::instance();
    const auto x1 = spec.feature_categories(1);
    const auto x2 = spec.feature_categories(2);
    const auto x3 = spec.feature_categories(3);
    const auto x4 = spec.feature_categories(4);
    const auto x5 = spec.feature_categories(5);
    const auto eps = spec.noise_categories();

    // Project the 9375 relevant-block atoms onto the requested relevant
    // slots, merging equal tuples; the ordered map keeps the support
    // deterministic.
    std::map<std::vector<int>, double> merged;
    std::vector<int> key;
    for (const auto& c1 : x1)
        for (const auto& c2 : x2)
            for (const auto& c3 : x3)
                for (const auto& c4 : x4)
                    for (const auto& c5 : x5)
                        for (const auto& ce : eps) {
                            const double p =
                                c1.prob * c2.prob * c3.prob * c4.prob * c5.prob * ce.prob;
                            key.clear();
                            for (int id : feature_ids) {
                                switch (id) {
                                    case 1: key.push_back(c1.value_tenths); break;
                                    case 2: key.push_back(c2.value_tenths); break;
                                    case 3: key.push_back(c3.value_tenths); break;
                                    case 4:
                                    case 6: key.push_back(c4.value_tenths); break;
                                    case 5: key.push_back(c5.value_tenths); break;
                                    default: break;  // irrelevant ids join later
                                }
                            }
                            key.push_back(GeneratorSpec::response_tenths(
                                c1.value_tenths, c2.value_tenths, c3.value_tenths,
                                c4.value_tenths, c5.value_tenths, ce.value_tenths));
                            merged[key] += p;
                        }

    TrueJointDistribution dist;
    dist.scope.assign(feature_ids.begin(), feature_ids.end());
    dist.support.reserve(merged.size());
    for (const auto& [k, p] : merged) {
        dist.support.push_back(
            {std::vector<int>(k.begin(), k.end() - 1), k.back(), p});
    }

    // Irrelevant members are independent of everything else: expand each one
    // into its slot position as a product coordinate.
    for (std::size_t slot = 0; slot < feature_ids.size(); ++slot) {
        if (feature_ids[slot] <= 6) continue;
        const auto cats = spec.feature_categories(feature_ids[slot]);
        std::vector<TrueJointDistribution::Atom> expanded;
        expanded.reserve(dist.support.size() * cats.size());
        for (const auto& atom : dist.support) {
            for (const auto& cat : cats) {
                auto copy = atom;
                copy.x_tenths.insert(copy.x_tenths.begin() + static_cast<std::ptrdiff_t>(slot),
                                     cat.value_tenths);
                copy.prob = atom.prob * cat.prob;
                expanded.push_back(std::move(copy));
            }
        }
        dist.support = std::move(expanded);
    }
    return dist;
}

double true_mi(std::span<const int> feature_ids) {
    const auto dist = true_distribution(feature_ids);
    std::map<std::vector<int>, double> marginal_x;
    std::map<int, double> marginal_y;
    double h_joint = 0.0;
    for (const auto& atom : dist.support) {
        h_joint -= atom.prob * std::log(atom.prob);
        marginal_x[atom.x_tenths] += atom.prob;
        marginal_y[atom.y_tenths] += atom.prob;
    }
    double h_x = 0.0;
    for (const auto& [k, p] : marginal_x) h_x -= p * std::log(p);
    double h_y = 0.0;
    for (const auto& [k, p] : marginal_y) h_y -= p * std::log(p);
    return std::max(0.0, h_x + h_y - h_joint);
}

namespace {

const std::array<double, 32>& relevant_mi_table() {
    static const std::array<double, 32> table = [] {
        std::array<double, 32> t{};
        for (int mask = 0; mask <= kRelevantMask; ++mask) {
            std::vector<int> ids;
            for (int b = 0; b < 5; ++b) {
                if (mask & (1 << b)) ids.push_back(b + 1);
            }
            t[static_cast<std::size_t>(mask)] = ids.empty() ? 0.0 : true_mi(ids);
        }
        return t;
    }();
    return table;
}

}  // namespace

double irr(std::span<const int> selected_feature_ids) {
    const auto& table = relevant_mi_table();
    const int mask = relevant_mask(selected_feature_ids);
    return table[static_cast<std::size_t>(mask)] / table[kRelevantMask];
}

double irr_of_names(std::span<const std::string> selected_names) {
    std::vector<int> ids;
    ids.reserve(selected_names.size());
    for (const auto& name : selected_names) {
        int id = 0;
        const auto* first = name.data() + 1;
        const auto* last = name.data() + name.size();
        const auto parsed = name.size() >= 2 && name[0] == 'X'
                                ? std::from_chars(first, last, id)
                                : std::from_chars_result{first, std::errc::invalid_argument};
        if (parsed.ec != std::errc() || parsed.ptr != last || id < 1 || id > 10) {
            throw std::invalid_argument("irr_of_names: unknown feature '" + name + "'");
        }
        ids.push_back(id);
    }
    return irr(ids);
}

std::vector<double> triangle_probabilities() {
    std::vector<double> p(2000);
    for (int k = 1; k <= 2000; ++k) {
        p[static_cast<std::size_t>(k - 1)] = static_cast<double>(k) / 2001000.0;
    }
    return p;
}

double triangle_true_entropy() {
    double h = 0.0;
    for (double p : triangle_probabilities()) h -= p * std::log(p);
    return h;
}

std::vector<EntropyExperimentRow> run_entropy_experiment(std::span<const std::size_t> sizes,
                                                         std::size_t reps, std::uint64_t seed,
                                                         unsigned workers) {
    if (sizes.empty()) {
        throw std::invalid_argument("run_entropy_experiment: no sizes");
    }
    if (reps == 0) {
        throw std::invalid_argument("run_entropy_experiment: reps must be >= 1");
    }
    const auto probs = triangle_probabilities();
    std::vector<EntropyExperimentRow> rows;
    rows.reserve(sizes.size());
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const std::size_t n = sizes[si];
        if (n == 0) {
            throw std::invalid_argument("run_entropy_experiment: size must be >= 1");
        }
        const auto start = std::chrono::steady_clock::now();
        std::vector<std::pair<double, double>> per_rep(reps);
        parallel_for(reps, workers, [&](std::size_t r) {
            std::mt19937_64 eng(rng::substream_seed(seed, si * reps + r, 0));
            std::discrete_distribution<int> law(probs.begin(), probs.end());
            std::vector<std::uint64_t> hist(probs.size(), 0);
            for (std::size_t i = 0; i < n; ++i) {
                ++hist[static_cast<std::size_t>(law(eng))];
            }
            const auto table = FrequencyTable::from_histogram(hist);
            per_rep[r] = {plugin_entropy(table).value, zhang_entropy(table).value};
        });
        double sum_plugin = 0.0;
        double sum_zhang = 0.0;
        for (const auto& [hp, hz] : per_rep) {
            sum_plugin += hp;
            sum_zhang += hz;
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        rows.push_back({n, sum_plugin / static_cast<double>(reps),
                        sum_zhang / static_cast<double>(reps), elapsed.count()});
    }
    return rows;
}

const char* to_string(Method m) {
    switch (m) {
        case Method::CASMI: return "CASMI";
        case Method::MIM: return "MIM";
        case Method::JMI: return "JMI";
        case Method::CMIM: return "CMIM";
        case Method::MRMR: return "MRMR";
        case Method::DISR: return "DISR";
        case Method::NJMIM: return "NJMIM";
    }
    return "unknown";
}

std::optional<Method> method_from_string(const std::string& name) {
    std::string upper;
    upper.reserve(name.size());
    for (char c : name) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (upper == "CASMI") return Method::CASMI;
    if (const auto b = baseline_from_string(upper)) {
        switch (*b) {
            case BaselineKind::MIM: return Method::MIM;
            case BaselineKind::JMI: return Method::JMI;
            case BaselineKind::CMIM: return Method::CMIM;
            case BaselineKind::MRMR: return Method::MRMR;
            case BaselineKind::DISR: return Method::DISR;
            case BaselineKind::NJMIM: return Method::NJMIM;
        }
    }
    return std::nullopt;
}

ExperimentReport run_irr_experiment(std::span<const std::size_t> sizes, std::size_t reps,
                                    std::span<const Method> methods_in,
                                    const SelectionConfig& config, std::uint64_t seed,
                                    unsigned workers) {
    if (sizes.empty()) {
        throw std::invalid_argument("run_irr_experiment: no sizes");
    }
    if (reps == 0) {
        throw std::invalid_argument("run_irr_experiment: reps must be >= 1");
    }
    std::vector<Method> methods{Method::CASMI};
    for (Method m : methods_in) {
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) {
            methods.push_back(m);
        }
    }
    relevant_mi_table();  // build the memo before the workers need it

    ExperimentReport report;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const std::size_t n = sizes[si];
        if (n == 0) {
            throw std::invalid_argument("run_irr_experiment: size must be >= 1");
        }
        const auto start = std::chrono::steady_clock::now();
        std::vector<std::vector<IrrRun>> per_rep(reps);
        parallel_for(reps, workers, [&](std::size_t rep) {
            const std::uint64_t rep_id = si * reps + rep;
            const Dataset ds = generate_dataset(n, rng::substream_seed(seed, rep_id, 0));
            const auto features = ds.features();
            const auto& y = ds.outcome();

            std::vector<std::string> casmi_selected;
            try {
                casmi_selected = select(features, y, config).selected;
            } catch (const DegenerateOutcome&) {
                casmi_selected.clear();
            }
            const std::size_t k = casmi_selected.size();

            auto& rows = per_rep[rep];
            rows.reserve(methods.size());
            for (Method m : methods) {
                IrrRun row;
                row.n = n;
                row.rep = rep;
                row.method = m;
                row.k = k;
                if (m == Method::CASMI) {
                    row.selected = casmi_selected;
                } else if (k > 0) {
                    row.selected = baseline_select(baseline_of(m), features, y, k);
                }
                row.irr = irr_of_names(row.selected);
                rows.push_back(std::move(row));
            }
        });

        for (Method m : methods) {
            std::vector<double> irrs;
            irrs.reserve(reps);
            for (const auto& rows : per_rep) {
                for (const auto& row : rows) {
                    if (row.method == m) irrs.push_back(row.irr);
                }
            }
            std::sort(irrs.begin(), irrs.end());
            double mean = 0.0;
            for (double v : irrs) mean += v;
            mean /= static_cast<double>(irrs.size());
            report.aggregates.push_back(
                {n, m, mean, quantile(irrs, 0.025), quantile(irrs, 0.975)});
        }
        for (auto& rows : per_rep) {
            for (auto& row : rows) report.runs.push_back(std::move(row));
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        report.size_seconds.emplace_back(n, elapsed.count());
    }
    return report;
}

}  // namespace casmi::simlab
