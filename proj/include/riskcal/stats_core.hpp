#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "riskcal/survey_data.hpp"

namespace riskcal {

double mean(std::span<const double> x);
// n - 1 denominator; requires n >= 2.
double sample_variance(std::span<const double> x);

struct CorrelationResult {
    double r = 0.0;
    std::size_t n = 0;
    double p_value = 1.0;  // two-sided, t with n - 2 df; NaN when n < 3
};

CorrelationResult pearson(std::span<const double> x, std::span<const double> y);

// eta = sqrt(SS_between / SS_total) of y grouped by integer codes.
double correlation_ratio(std::span<const int> groups, std::span<const double> y);

struct AnovaResult {
    double ss_between = 0.0;
    double ss_within = 0.0;
    double df_between = 0.0;
    double df_within = 0.0;
    double f = 0.0;
    double p_value = 1.0;
};

// One-way fixed-effects ANOVA. Needs ≥ 2 groups and more observations than
// groups. When SS_between is zero the statistic is F = 0, p = 1.
AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);

// Per-response value: the mean of the listed item answers.
struct ValueSelector {
    std::string name;
    std::vector<int> items;

    static ValueSelector impact() { return {"Q1", {kImpactItem}}; }
    double operator()(const SurveyResponse& r) const;
};

struct GroupRow {
    std::string label;
    double mean = 0.0;
    std::size_t count = 0;
    std::optional<double> sd;  // empty for singleton groups
};

struct GroupStats {
    std::string value_name;
    std::vector<GroupRow> groups;
    GroupRow overall;
    std::optional<AnovaResult> anova;  // empty with fewer than two groups
};

// Groups by integer level in ascending order; only levels present appear.
GroupStats group_stats(std::span<const int> levels, std::span<const double> values);

// Stratifies `risk`'s responses by Q2 frequency.
GroupStats group_stats(const SurveyDataset& ds, const RiskId& risk, const ValueSelector& value);

struct RegressionModel {
    std::string dependent_name;
    double intercept = 0.0;
    std::vector<std::pair<std::string, double>> coefficients;
    std::size_t n_fit = 0;
};

struct RegressionRow {
    std::vector<double> predictors;
    double dependent = 0.0;
};

// Least squares with intercept through a thin SVD of the design matrix.
// RankDeficient when a singular value falls below 1e-10 x the largest.
RegressionModel ols_fit(std::span<const RegressionRow> rows, std::vector<std::string> names,
                        std::string dependent_name = "y");

double ols_predict(const RegressionModel& m, const std::map<std::string, double>& predictors);
double ols_predict(const RegressionModel& m, std::span<const double> predictors);

}  // namespace riskcal
