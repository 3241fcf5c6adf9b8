#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskcal/linalg.hpp"
#include "riskcal/stats_core.hpp"
#include "riskcal/survey_data.hpp"

namespace riskcal {

// Pearson correlations among questionnaire items; symmetric, unit diagonal.
struct CorrelationMatrix {
    Matrix values;
    std::vector<std::string> items;
    std::size_t observations = 0;

    std::size_t size() const noexcept { return items.size(); }
};

// Validates shape, symmetry (1e-12), unit diagonal and entry range.
CorrelationMatrix make_correlation_matrix(Matrix values, std::vector<std::string> items,
                                          std::size_t observations = 0);

// Pools every response in the dataset (all risks).
CorrelationMatrix correlation_matrix(const SurveyDataset& ds, std::span<const int> items);
// Columns of `data` are items, rows observations.
CorrelationMatrix correlation_matrix(const Matrix& data, std::vector<std::string> items);

double kmo(const CorrelationMatrix& r);

struct BartlettResult {
    double chi2 = 0.0;
    std::size_t df = 0;
    double p_value = 1.0;
};

BartlettResult bartlett_sphericity(const CorrelationMatrix& r, std::size_t n);

struct SuitabilityReport {
    double kmo = 0.0;
    double bartlett_chi2 = 0.0;
    std::size_t bartlett_df = 0;
    double bartlett_p = 1.0;

    // KMO > 0.5 and Bartlett significant at 0.05.
    bool adequate() const { return kmo > 0.5 && bartlett_p < 0.05; }
};

SuitabilityReport suitability(const CorrelationMatrix& r, std::size_t n);

// Eigenvalues of R that are >= 1 (inclusive, 1e-10 slack for rounding).
std::size_t kaiser_count(const CorrelationMatrix& r);

enum class RotationKind { None, Varimax, Promax };
std::string_view to_string(RotationKind kind);

struct RotationInfo {
    RotationKind kind = RotationKind::None;
    int promax_power = 0;
    bool kaiser_normalization = false;
    int iterations = 0;
    bool converged = true;
    std::string note;
};

struct ExtractionDiagnostics {
    int iterations = 0;
    double last_delta = 0.0;
    bool converged = false;
    bool smc_fallback = false;            // SMC init impossible, used max |r| per row
    std::vector<double> objective_trace;  // off-diagonal residual sum of squares per iteration
};

struct FactorSolution {
    std::vector<std::string> items;
    Matrix loadings;             // p x m pattern
    Matrix unrotated_loadings;   // p x m, as extracted
    Matrix rotation_matrix;      // loadings = unrotated_loadings * rotation_matrix
    Matrix factor_correlation;   // m x m, identity unless oblique
    std::vector<double> communalities;
    std::vector<double> uniquenesses;
    std::vector<double> eigenvalues;  // of the input correlation matrix, descending
    std::vector<bool> heywood_flags;
    double variance_explained_ratio = 0.0;
    RotationInfo rotation;
    ExtractionDiagnostics extraction;

    std::size_t factors() const noexcept { return loadings.cols(); }
    bool heywood() const;
};

struct UlsOptions {
    double tolerance = 1e-6;
    int max_iterations = 1000;
};

// Iterated principal-axis refinement of the reduced correlation matrix,
// which settles at a stationary point of the off-diagonal least-squares
// criterion. Heywood cases (h^2 > 1 at any iteration) are flagged, not thrown.
FactorSolution extract_uls(const CorrelationMatrix& r, std::size_t factors,
                           const UlsOptions& options = {});

// Sum of squared off-diagonal residuals of R - L L^T.
double uls_objective(const Matrix& r, const Matrix& loadings);

// Raw varimax criterion: sum_j [ sum_i l_ij^4 / p - (sum_i l_ij^2 / p)^2 ].
double varimax_criterion(const Matrix& loadings);

// Kaiser-normalized rows when kaiser_normalize is set.
Matrix kaiser_normalized(const Matrix& loadings);

FactorSolution rotate_varimax(const FactorSolution& sol, bool kaiser_normalize = true);

// Hendrickson-White promax starting from varimax. A single-factor input is
// returned unchanged with a note.
FactorSolution rotate_promax(const FactorSolution& sol, int power = 4);

double variance_explained(const FactorSolution& sol);

struct SalientItem {
    std::string item;
    double loading = 0.0;
};

// Items with |loading| strictly above the threshold, per factor, by
// descending |loading|.
std::vector<std::vector<SalientItem>> salient_items(const FactorSolution& sol,
                                                    double threshold = 0.4);

struct ReliabilityReport {
    double alpha = 0.0;
    std::size_t k = 0;
    bool acceptable = false;  // alpha > 0.5
};

ReliabilityReport cronbach_alpha(const SurveyDataset& ds, std::span<const int> items);
ReliabilityReport cronbach_alpha_from_data(const Matrix& data);
ReliabilityReport cronbach_alpha_from_covariance(const Matrix& covariance);

struct SubscaleDefinition {
    std::string name;
    std::vector<int> items;

    static SubscaleDefinition dread() { return {"dread", {4, 5}}; }
    static SubscaleDefinition unknown() { return {"unknown", {9, 10}}; }
    ValueSelector selector() const { return {name, items}; }
};

// Throws TooFewItems (< 2 items) or UnknownItem.
SubscaleDefinition make_subscale(std::string name, std::vector<int> items);

std::vector<double> subscale_scores(const SurveyDataset& ds, const SubscaleDefinition& def);

struct StratumCorrelation {
    int frequency = 0;
    CorrelationResult dread;
    CorrelationResult unknown;
};

// Q1 against each subscale score, per Q2 level over all risks pooled.
std::vector<StratumCorrelation> stratified_factor_correlations(const SurveyDataset& ds,
                                                               const SubscaleDefinition& dread,
                                                               const SubscaleDefinition& unknown);

struct FactorCountCandidate {
    std::size_t factors = 0;
    bool heywood = false;
    std::vector<std::vector<SalientItem>> salient;
    std::string note;
};

struct FactorCountSearch {
    std::size_t kaiser = 0;
    std::size_t chosen = 0;
    std::vector<FactorCountCandidate> candidates;
};

// Starts at the Kaiser count and steps down while the extraction is a
// Heywood case. Salient items are reported per candidate for inspection.
FactorCountSearch search_factor_count(const CorrelationMatrix& r, int promax_power = 4,
                                      double salient_threshold = 0.4);

nlohmann::ordered_json to_json(const FactorSolution& sol);

}  // namespace riskcal
