#pragma once

#include "casmi/column.hpp"

namespace casmi {

enum class EstimatorKind { plugin, zhang };

struct EntropyEstimate {
    double value = 0.0;  // nats
    EstimatorKind kind = EstimatorKind::plugin;
};

/// Coverage-adjusted standardized mutual information of a feature (or joint
/// feature) against the outcome, with the intermediate quantities kept for
/// reporting.
struct CasmiScore {
    double mi_z = 0.0;      // nats, unclamped
    double kappa_z = 0.0;   // mi_z / Hz(Y)
    double coverage = 0.0;  // 1 - T1(X), in [0, 1]
    double u = 1.0;
    double score = 0.0;     // max(kappa_z, 0) * coverage^u
};

/// Plug-in (maximum likelihood) entropy, -sum (f/n) ln(f/n).
EntropyEstimate plugin_entropy(const FrequencyTable& t);

/// Entropy estimator with exponentially decaying bias. Evaluated through the
/// per-category form
///   sum_k (f_k/n) * sum_{v=1}^{n-f_k} (1/v) prod_{j=1}^{v} (1 - (f_k-1)/(n-j)),
/// which avoids the factorial-ratio coefficients of the direct double sum.
EntropyEstimate zhang_entropy(const FrequencyTable& t);

/// Turing's missing-mass estimate T1 = N1/n; sample coverage is 1 - T1.
double turing_missing_mass(const FrequencyTable& t);

/// Hz(X) + Hz(Y) - Hz(X,Y). May come out negative from estimation noise and
/// is returned unclamped.
double mi_z(const ContingencyTable& ct);

/// Plug-in mutual information; non-negative on empirical tables.
double plugin_mi(const ContingencyTable& ct);

/// Scores a feature column against the outcome. Throws DegenerateOutcome if
/// the outcome is constant; u must be positive (u = 1 is the plain score).
CasmiScore casmi_score(const CategoricalColumn& x, const CategoricalColumn& y, double u = 1.0);
CasmiScore casmi_score(const ContingencyTable& ct, double u = 1.0);

}  // namespace casmi
