#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskcal/factor_engine.hpp"
#include "riskcal/stats_core.hpp"
#include "riskcal/survey_data.hpp"

namespace riskcal {

// One response reduced to the quantities the prediction models use. Values
// are real-valued so that frames can also be built directly from summary
// stratum moments.
struct Observation {
    RiskId risk;
    int frequency = 0;
    double impact = 0.0;
    double dread = 0.0;
    double unknown = 0.0;
};

struct CalibrationFrame {
    std::vector<Observation> rows;
    std::vector<RiskId> risks;
};

CalibrationFrame make_frame(const SurveyDataset& ds, const SubscaleDefinition& dread,
                            const SubscaleDefinition& unknown);

enum class ModelId { R1, M1, R2, M2, R3, M3, R4R, R4M };
inline constexpr std::array<ModelId, 8> kAllModels = {ModelId::R1, ModelId::M1, ModelId::R2,
                                                      ModelId::M2, ModelId::R3, ModelId::M3,
                                                      ModelId::R4R, ModelId::R4M};
enum class Variable { Impact, Frequency, Dread, Unknown };
enum class Method { Regression, Mean };

std::string_view to_string(ModelId id);
std::string_view to_string(Variable v);
std::string_view to_string(Method m);
ModelId parse_model_id(std::string_view s);

struct ModelSpec {
    ModelId id = ModelId::R1;
    std::optional<RiskId> risk;  // fitting stratum; empty for the pooled R4 fit
    Variable dependent = Variable::Impact;
    Method method = Method::Regression;
    std::vector<Variable> independents;
    std::string input_values;  // prediction-time inputs as listed in the model table

    std::string label() const;
};

// The model-table row for `id`, fitted on `risk` (or pooled when empty).
ModelSpec model_spec(ModelId id, std::optional<RiskId> risk);

enum class R4Stratum { Pooled, PerRisk };

struct FitOptions {
    R4Stratum r4_stratum = R4Stratum::Pooled;
};

struct FittedCalibrationModel {
    ModelSpec spec;
    std::optional<RegressionModel> regression;
    std::optional<double> mean;
    std::string fit_stratum;
    std::size_t n_fit = 0;
    std::vector<std::size_t> training_rows;  // indices into the frame
    double dependent_min = 0.0;
    double dependent_max = 0.0;
};

// Drops Q2 = 3, then fits on the model's risk (or on every risk for a pooled
// R4 model).
FittedCalibrationModel fit_model(const CalibrationFrame& frame, const ModelSpec& spec);

struct FittedModelSet {
    FitOptions options;
    std::vector<FittedCalibrationModel> models;

    const FittedCalibrationModel* find(ModelId id, const std::optional<RiskId>& risk) const;
};

FittedModelSet fit_all(const CalibrationFrame& frame, std::span<const RiskId> risks,
                       const FitOptions& options = {});

struct CalibrationRow {
    ModelId model = ModelId::R1;
    RiskId risk;
    Variable target = Variable::Impact;
    double prediction = 0.0;
    std::optional<double> reference;
    std::optional<double> absolute_error;
};

struct ModelAverage {
    ModelId model = ModelId::R1;
    double mean_absolute_error = 0.0;
};

struct CalibrationResult {
    std::vector<CalibrationRow> rows;
    std::vector<ModelAverage> averages;  // over risks, in model-table order
    std::vector<ModelId> ranking;        // ascending average error

    const CalibrationRow* find(ModelId id, const RiskId& risk) const;
    std::optional<double> average(ModelId id) const;
};

// Every model in the set evaluated at Q2 = 3 for `risk`; R4R takes the R2/R3
// predictions, R4M the M2/M3 means.
std::vector<CalibrationRow> predict_impact(const FittedModelSet& models, const RiskId& risk);

// Fills references from the Q2 = 3 stratum of each risk and averages errors.
CalibrationResult evaluate(const CalibrationFrame& frame, std::vector<CalibrationRow> rows);

enum class SweepScope { Pooled, PerRisk };

struct SweepOptions {
    std::vector<std::size_t> sizes;  // empty: 1 .. stratum size
    std::size_t repetitions = 20;
    std::uint64_t seed = 1;
    bool with_replacement = false;
    SweepScope scope = SweepScope::Pooled;
};

struct SweepCell {
    std::size_t size = 0;
    double mean_absolute_error = 0.0;
    std::vector<double> errors;  // one per repetition
};

struct SweepSeries {
    std::optional<RiskId> risk;  // empty when pooled
    std::uint64_t seed = 0;
    std::size_t stratum_size = 0;
    double stratum_mean = 0.0;
    std::vector<SweepCell> cells;
};

struct SweepResult {
    std::uint64_t seed = 0;
    std::size_t repetitions = 0;
    bool with_replacement = false;
    SweepScope scope = SweepScope::Pooled;
    std::vector<SweepSeries> series;
};

// Subsets of the held-out values, keyed per (seed, size, repetition).
SweepSeries sweep_values(std::span<const double> holdout, std::span<const std::size_t> sizes,
                         std::size_t repetitions, std::uint64_t seed, bool with_replacement);

// Mean Q1 of random Q2 = 3 subsets against the whole Q2 = 3 stratum mean.
// Per-risk series i uses seed + i.
SweepResult subset_mean_sweep(const CalibrationFrame& frame, const SweepOptions& options);

struct Rq2Row {
    std::size_t size = 0;
    double sweep_error = 0.0;
    std::vector<std::pair<std::string, double>> model_errors;
    std::string preferred;  // "subset_mean" or a model label
};

struct Crossover {
    std::string model;
    std::optional<std::size_t> size;  // first size where the subset mean beats the model
};

struct Rq2Series {
    std::optional<RiskId> risk;
    std::vector<Rq2Row> rows;
    std::vector<Crossover> crossovers;
};

Rq2Series rq2_compare_errors(const SweepSeries& series,
                             const std::vector<std::pair<std::string, double>>& model_errors);

// Compares each sweep series against the R4R and M1 errors (per-risk errors
// for per-risk series, averages otherwise).
std::vector<Rq2Series> rq2_compare(const SweepResult& sweep, const CalibrationResult& results,
                                   std::span<const ModelId> models = {});

inline constexpr int kCalibrationSchemaVersion = 1;

nlohmann::ordered_json to_json(const FittedModelSet& models);
nlohmann::ordered_json to_json(const CalibrationResult& result);
nlohmann::ordered_json to_json(const SweepResult& sweep);
nlohmann::ordered_json to_json(const std::vector<Rq2Series>& rq2);

// model,average_absolute_error
std::string model_errors_csv(const CalibrationResult& result);
// scope,size,sweep_error[,model errors...]
std::string sweep_csv(const SweepResult& sweep, const std::vector<Rq2Series>& rq2);

}  // namespace riskcal
