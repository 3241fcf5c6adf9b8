#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskcal/calibration.hpp"
#include "riskcal/factor_engine.hpp"
#include "riskcal/stats_core.hpp"
#include "riskcal/survey_data.hpp"

namespace riskcal {

std::string_view toolkit_version();

enum class OutputFormat { Json, Markdown, Csv };
std::string_view to_string(OutputFormat f);

// Effective configuration of one run. Every field has a default and the
// whole struct is echoed into each report.
struct RunConfig {
    std::string command = "report";
    std::string input;
    OutputFormat format = OutputFormat::Json;
    std::string out;  // empty: stdout
    std::uint64_t seed = 1;

    // factor
    std::vector<int> items = {3, 4, 5, 6, 7, 8, 9, 10, 11};
    std::optional<std::size_t> factors;  // empty: automatic search
    int promax_power = 4;
    bool force = false;
    double salient_threshold = 0.4;

    // subscales
    std::vector<int> dread_items = {4, 5};
    std::vector<int> unknown_items = {9, 10};

    // screening
    double screen_flag_threshold = 0.3;

    // calibrate
    std::vector<std::string> risks;  // empty: whole catalog
    bool sweep = false;
    std::vector<std::size_t> sweep_sizes;  // empty: 1 .. stratum size
    std::size_t repetitions = 20;
    bool no_eval = false;
    bool with_replacement = false;
    R4Stratum r4_stratum = R4Stratum::Pooled;
    SweepScope sweep_scope = SweepScope::Pooled;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);

// "Q3..Q11", "3-5", "Q4,Q5", "q4, q9..q10"
std::vector<int> parse_item_list(std::string_view text);
std::vector<std::size_t> parse_size_list(std::string_view text);

std::string dataset_digest(std::string_view bytes);  // "fnv1a64:<16 hex>"

struct ImpactStratum {
    RiskId risk;
    GroupStats impact;
};

struct SubscaleStratum {
    RiskId risk;
    GroupStats impact;
    GroupStats dread;
    GroupStats unknown;
};

struct DescribeSection {
    DescriptiveTable attributes;
    std::vector<ImpactStratum> impact_by_frequency;
    std::vector<SubscaleStratum> subscale_means;
};

struct ScreenRow {
    std::string attribute;
    std::string method;  // "pearson" or "correlation_ratio"
    std::optional<double> impact;
    std::optional<double> frequency;
    bool flagged = false;
    std::string note;  // why a value is undefined
};

struct FactorSection {
    SuitabilityReport suitability;
    bool gate_passed = false;
    bool forced = false;
    std::optional<FactorCountSearch> search;
    FactorSolution solution;
    std::vector<std::vector<SalientItem>> salient;
    std::vector<std::pair<SubscaleDefinition, ReliabilityReport>> reliabilities;
    std::vector<StratumCorrelation> stratified;
};

struct CalibrateSection {
    FittedModelSet models;
    CalibrationResult results;
    bool evaluated = false;
    std::optional<SweepResult> sweep;
    std::vector<Rq2Series> rq2;
};

struct ReportBundle {
    RunConfig config;
    std::string digest;
    std::size_t responses = 0;
    std::size_t respondents = 0;
    std::vector<RiskId> risks;
    std::optional<DescribeSection> describe;
    std::optional<std::vector<ScreenRow>> screen;
    std::optional<FactorSection> factor;
    std::optional<CalibrateSection> calibrate;
};

DescribeSection run_describe(const SurveyDataset& ds, const RunConfig& cfg);
std::vector<ScreenRow> run_screen(const SurveyDataset& ds, const RunConfig& cfg);
// Throws SuitabilityGateFailed when KMO <= 0.5 or Bartlett p >= 0.05, unless cfg.force.
FactorSection run_factor(const SurveyDataset& ds, const RunConfig& cfg);
CalibrateSection run_calibrate(const SurveyDataset& ds, const RunConfig& cfg);

// Loads cfg.input and runs cfg.command ("describe", "screen", "factor",
// "calibrate" or "report").
ReportBundle run_command(const RunConfig& cfg);
ReportBundle run_on_text(const RunConfig& cfg, std::string_view csv_text);

// "<responses> responses, <respondents> respondents, <risks> risks"
std::string validation_summary(const SurveyDataset& ds);

std::string render_json(const ReportBundle& bundle);
std::string render_markdown(const ReportBundle& bundle);
// file name -> CSV contents
std::map<std::string, std::string> render_csv(const ReportBundle& bundle);

}  // namespace riskcal
