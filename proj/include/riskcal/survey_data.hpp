#pragma once

#include <array>
#include <cstddef>
#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace riskcal {

// Label of a risk in the dataset's catalog ("A", "B", ...). Open set.
class RiskId {
public:
    RiskId() = default;
    explicit RiskId(std::string value) : value_(std::move(value)) {}

    const std::string& str() const noexcept { return value_; }
    bool operator==(const RiskId&) const = default;
    auto operator<=>(const RiskId&) const = default;

private:
    std::string value_;
};

enum class EmployeesBucket { Under300 = 1, From300To1000 = 2, Over1000 = 3 };
enum class TeamSizeBucket { Under10 = 1, From10To50 = 2, Over50 = 3 };

enum class ProcessType { Development, Testing, ProjectManagement, DevelopmentSupport, Research };
inline constexpr std::array<ProcessType, 5> kProcessTypes = {
    ProcessType::Development, ProcessType::Testing, ProcessType::ProjectManagement,
    ProcessType::DevelopmentSupport, ProcessType::Research};

std::string_view process_name(ProcessType t);

// Non-exclusive: a respondent may be engaged in several process types.
struct ProcessFlags {
    std::array<bool, 5> engaged{};

    bool operator[](ProcessType t) const { return engaged[static_cast<std::size_t>(t)]; }
    bool& operator[](ProcessType t) { return engaged[static_cast<std::size_t>(t)]; }
    bool operator==(const ProcessFlags&) const = default;
};

struct RespondentProfile {
    std::string respondent_id;
    double years_experience = 0.0;
    EmployeesBucket employees = EmployeesBucket::Under300;
    TeamSizeBucket team_size = TeamSizeBucket::Under10;
    ProcessFlags process;

    bool operator==(const RespondentProfile&) const = default;
};

// Questionnaire items are numbered 1..11: q1 impact (1..10), q2 frequency of
// own experience (1 rarely, 2 occasionally, 3 often), q3..q11 five-point
// Likert grades.
inline constexpr int kImpactItem = 1;
inline constexpr int kFrequencyItem = 2;
inline constexpr int kFirstLikertItem = 3;
inline constexpr int kLastLikertItem = 11;
inline constexpr int kItemCount = 11;

// Accepts "q4", "Q4", "Q04". Throws UnknownItem.
int parse_item(std::string_view label);
// "Q4"
std::string item_label(int item);

struct SurveyResponse {
    std::string respondent_id;
    RiskId risk;
    std::array<int, kItemCount> answers{};  // answers[k] holds q(k+1)

    int item(int q) const { return answers[static_cast<std::size_t>(q - 1)]; }
    int impact() const { return item(kImpactItem); }
    int frequency() const { return item(kFrequencyItem); }

    bool operator==(const SurveyResponse&) const = default;
};

// Immutable after construction. The constructor enforces referential
// integrity and the one-record-per-(respondent, risk) rule.
class SurveyDataset {
public:
    SurveyDataset() = default;
    SurveyDataset(std::vector<SurveyResponse> responses, std::vector<RespondentProfile> profiles,
                  std::vector<RiskId> risk_catalog);

    const std::vector<SurveyResponse>& responses() const noexcept { return responses_; }
    const std::vector<RespondentProfile>& profiles() const noexcept { return profiles_; }
    const std::vector<RiskId>& risk_catalog() const noexcept { return risks_; }

    bool has_risk(const RiskId& risk) const;
    const RespondentProfile& profile(const std::string& respondent_id) const;

    std::size_t size() const noexcept { return responses_.size(); }
    bool empty() const noexcept { return responses_.empty(); }

    bool operator==(const SurveyDataset& other) const {
        return responses_ == other.responses_ && profiles_ == other.profiles_ &&
               risks_ == other.risks_;
    }

private:
    std::vector<SurveyResponse> responses_;
    std::vector<RespondentProfile> profiles_;
    std::vector<RiskId> risks_;
    std::map<std::string, std::size_t> profile_index_;
};

inline constexpr std::string_view kCsvHeader =
    "respondent_id,risk,q1,q2,q3,q4,q5,q6,q7,q8,q9,q10,q11,years_experience,employees_bucket,"
    "team_size_bucket,proc_development,proc_testing,proc_pm,proc_support,proc_research";

// Errors carry the 1-based line number (the header is line 1).
SurveyDataset parse_survey(std::string_view csv_text);
SurveyDataset read_survey_file(const std::string& path);
std::string read_text_file(const std::string& path);
std::string serialize_survey(const SurveyDataset& ds);

// Sub-dataset whose responses match every given filter. The risk catalog is
// kept whole so that filters commute.
SurveyDataset stratify(const SurveyDataset& ds, const std::optional<RiskId>& by_risk,
                       const std::optional<std::set<int>>& by_frequency);

struct CategoryCount {
    std::string label;
    std::size_t count = 0;
    double ratio = 0.0;
};

struct DescriptiveTable {
    std::size_t respondents = 0;
    std::vector<CategoryCount> employees;  // Under 300, 300..1000, over 1000
    std::vector<CategoryCount> team_size;  // Under 10, 10..50, over 50
    std::vector<CategoryCount> process;    // ratio = count / respondents
    double years_mean = 0.0;
    double years_median = 0.0;
    double years_min = 0.0;
    double years_max = 0.0;
};

DescriptiveTable attribute_summary(const SurveyDataset& ds);

}  // namespace riskcal
