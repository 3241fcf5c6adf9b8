#include "riskcal/stats_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "riskcal/distributions.hpp"
#include "riskcal/error.hpp"
#include "riskcal/linalg.hpp"

namespace riskcal {

namespace {

bool is_constant(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

}  // namespace

double mean(std::span<const double> x) {
    if (x.empty()) fail(ErrorKind::TooFewPoints, "mean of an empty series");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
    if (x.size() < 2) fail(ErrorKind::TooFewPoints, "sample variance needs at least two values");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

CorrelationResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        fail(ErrorKind::LengthMismatch,
             fmt::format("pearson: series lengths differ ({} vs {})", x.size(), y.size()));
    if (x.size() < 2) fail(ErrorKind::TooFewPoints, "pearson needs at least two points");
    if (is_constant(x) || is_constant(y))
        fail(ErrorKind::ConstantSeries, "pearson: correlation with a constant series is undefined");

    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    CorrelationResult out;
    out.n = x.size();
    out.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    if (out.n < 3) {
        out.p_value = std::numeric_limits<double>::quiet_NaN();
    } else if (std::abs(out.r) == 1.0) {
        out.p_value = 0.0;
    } else {
        const double df = static_cast<double>(out.n - 2);
        const double t = out.r * std::sqrt(df / (1.0 - out.r * out.r));
        out.p_value = std::clamp(dist::student_t_two_sided(t, df), 0.0, 1.0);
    }
    return out;
}

double correlation_ratio(std::span<const int> groups, std::span<const double> y) {
    if (groups.size() != y.size())
        fail(ErrorKind::LengthMismatch, "correlation_ratio: group and value lengths differ");
    if (y.empty()) fail(ErrorKind::TooFewPoints, "correlation_ratio of an empty series");
    if (std::set<int>(groups.begin(), groups.end()).size() < 2)
        fail(ErrorKind::SingleGroup, "correlation_ratio needs at least two groups");
    if (is_constant(y)) fail(ErrorKind::ConstantSeries, "correlation_ratio: constant values");

    const double grand = mean(y);
    std::map<int, std::pair<double, std::size_t>> acc;
    double ss_total = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        auto& [sum, count] = acc[groups[i]];
        sum += y[i];
        ++count;
        ss_total += (y[i] - grand) * (y[i] - grand);
    }
    double ss_between = 0.0;
    for (const auto& [g, sc] : acc) {
        const double gm = sc.first / static_cast<double>(sc.second);
        ss_between += static_cast<double>(sc.second) * (gm - grand) * (gm - grand);
    }
    return std::sqrt(std::clamp(ss_between / ss_total, 0.0, 1.0));
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) fail(ErrorKind::SingleGroup, "ANOVA needs at least two groups");
    std::size_t total = 0;
    double grand_sum = 0.0;
    for (const auto& g : groups) {
        if (g.empty()) fail(ErrorKind::EmptyStratum, "ANOVA group is empty");
        total += g.size();
        for (double v : g) grand_sum += v;
    }
    if (total <= groups.size())
        fail(ErrorKind::TooFewPoints, "ANOVA needs more observations than groups");
    const double grand = grand_sum / static_cast<double>(total);

    AnovaResult out;
    for (const auto& g : groups) {
        const double gm = mean(g);
        out.ss_between += static_cast<double>(g.size()) * (gm - grand) * (gm - grand);
        for (double v : g) out.ss_within += (v - gm) * (v - gm);
    }
    out.df_between = static_cast<double>(groups.size() - 1);
    out.df_within = static_cast<double>(total - groups.size());
    if (out.ss_between == 0.0) {
        out.f = 0.0;
        out.p_value = 1.0;
    } else if (out.ss_within == 0.0) {
        out.f = std::numeric_limits<double>::infinity();
        out.p_value = 0.0;
    } else {
        out.f = (out.ss_between / out.df_between) / (out.ss_within / out.df_within);
        out.p_value = std::clamp(dist::f_upper_tail(out.f, out.df_between, out.df_within), 0.0, 1.0);
    }
    return out;
}

double ValueSelector::operator()(const SurveyResponse& r) const {
    double s = 0.0;
    for (int q : items) s += r.item(q);
    return s / static_cast<double>(items.size());
}

namespace {

GroupRow summarize(std::string label, std::span<const double> values) {
    GroupRow row;
    row.label = std::move(label);
    row.count = values.size();
    row.mean = mean(values);
    if (values.size() >= 2) row.sd = std::sqrt(sample_variance(values));
    return row;
}

}  // namespace

GroupStats group_stats(std::span<const int> levels, std::span<const double> values) {
    if (levels.size() != values.size())
        fail(ErrorKind::LengthMismatch, "group_stats: level and value lengths differ");
    if (values.empty()) fail(ErrorKind::EmptyStratum, "group_stats of an empty series");
    std::map<int, std::vector<double>> by_level;
    for (std::size_t i = 0; i < values.size(); ++i) by_level[levels[i]].push_back(values[i]);

    GroupStats out;
    std::vector<std::vector<double>> groups;
    for (auto& [level, vals] : by_level) {
        out.groups.push_back(summarize(std::to_string(level), vals));
        groups.push_back(vals);
    }
    out.overall = summarize("total", values);
    if (groups.size() >= 2 && values.size() > groups.size()) out.anova = one_way_anova(groups);
    return out;
}

GroupStats group_stats(const SurveyDataset& ds, const RiskId& risk, const ValueSelector& value) {
    if (!ds.has_risk(risk)) fail(ErrorKind::UnknownRisk, fmt::format("unknown risk '{}'", risk.str()));
    if (value.items.empty()) fail(ErrorKind::InvalidArgument, "value selector lists no items");
    std::vector<int> levels;
    std::vector<double> values;
    for (const auto& r : ds.responses()) {
        if (r.risk != risk) continue;
        levels.push_back(r.frequency());
        values.push_back(value(r));
    }
    if (values.empty())
        fail(ErrorKind::EmptyStratum, fmt::format("risk '{}' has no responses", risk.str()));
    auto out = group_stats(levels, values);
    out.value_name = value.name;
    return out;
}

RegressionModel ols_fit(std::span<const RegressionRow> rows, std::vector<std::string> names,
                        std::string dependent_name) {
    const std::size_t p = names.size();
    if (std::set<std::string>(names.begin(), names.end()).size() != p)
        fail(ErrorKind::InvalidArgument, "predictor names must be unique");
    if (rows.size() < p + 2)
        fail(ErrorKind::TooFewRows,
             fmt::format("regression with {} predictors needs at least {} rows, got {}", p, p + 2,
                         rows.size()));
    Matrix x(rows.size(), p + 1);
    std::vector<double> y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].predictors.size() != p)
            fail(ErrorKind::LengthMismatch,
                 fmt::format("row {} has {} predictors, expected {}", i, rows[i].predictors.size(), p));
        x(i, 0) = 1.0;
        for (std::size_t j = 0; j < p; ++j) x(i, j + 1) = rows[i].predictors[j];
        y[i] = rows[i].dependent;
    }
    const Svd svd = svd_thin(x);
    const double largest = svd.singular.front();
    if (!(svd.singular.back() >= 1e-10 * largest))
        fail(ErrorKind::RankDeficient,
             "design matrix is rank deficient (collinear or constant predictors)");

    // beta = V diag(1/sigma) U^T y
    std::vector<double> uty(p + 1, 0.0);
    for (std::size_t k = 0; k <= p; ++k) {
        for (std::size_t i = 0; i < rows.size(); ++i) uty[k] += svd.u(i, k) * y[i];
        uty[k] /= svd.singular[k];
    }
    std::vector<double> beta(p + 1, 0.0);
    for (std::size_t j = 0; j <= p; ++j)
        for (std::size_t k = 0; k <= p; ++k) beta[j] += svd.v(j, k) * uty[k];

    RegressionModel m;
    m.dependent_name = std::move(dependent_name);
    m.intercept = beta[0];
    m.n_fit = rows.size();
    for (std::size_t j = 0; j < p; ++j) m.coefficients.emplace_back(std::move(names[j]), beta[j + 1]);
    return m;
}

double ols_predict(const RegressionModel& m, const std::map<std::string, double>& predictors) {
    double y = m.intercept;
    for (const auto& [name, coef] : m.coefficients) {
        auto it = predictors.find(name);
        if (it == predictors.end())
            fail(ErrorKind::MissingPredictor, fmt::format("no value supplied for predictor '{}'", name));
        y += coef * it->second;
    }
    return y;
}

double ols_predict(const RegressionModel& m, std::span<const double> predictors) {
    if (predictors.size() != m.coefficients.size())
        fail(ErrorKind::MissingPredictor,
             fmt::format("model has {} predictors, {} values supplied", m.coefficients.size(),
                         predictors.size()));
    double y = m.intercept;
    for (std::size_t j = 0; j < predictors.size(); ++j) y += m.coefficients[j].second * predictors[j];
    return y;
}

}  // namespace riskcal
