#include "riskcal/survey_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>

#include "riskcal/error.hpp"

namespace riskcal {

std::string_view process_name(ProcessType t) {
    switch (t) {
        case ProcessType::Development: return "development";
        case ProcessType::Testing: return "testing";
        case ProcessType::ProjectManagement: return "project_management";
        case ProcessType::DevelopmentSupport: return "development_support";
        case ProcessType::Research: return "research";
    }
    return "unknown";
}

int parse_item(std::string_view label) {
    if (label.size() >= 2 && (label[0] == 'q' || label[0] == 'Q')) {
        int value = 0;
        const auto* first = label.data() + 1;
        const auto* last = label.data() + label.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec == std::errc{} && ptr == last && value >= 1 && value <= kItemCount) return value;
    }
    fail(ErrorKind::UnknownItem, fmt::format("unknown questionnaire item '{}'", label));
}

std::string item_label(int item) { return fmt::format("Q{}", item); }

SurveyDataset::SurveyDataset(std::vector<SurveyResponse> responses,
                             std::vector<RespondentProfile> profiles,
                             std::vector<RiskId> risk_catalog)
    : responses_(std::move(responses)), profiles_(std::move(profiles)), risks_(std::move(risk_catalog)) {
    std::set<RiskId> seen_risks;
    for (const auto& r : risks_) {
        if (r.str().empty()) fail(ErrorKind::InvalidArgument, "empty risk label in catalog");
        if (!seen_risks.insert(r).second)
            fail(ErrorKind::DuplicateKey, fmt::format("risk '{}' listed twice in catalog", r.str()));
    }
    for (std::size_t i = 0; i < profiles_.size(); ++i) {
        const auto& p = profiles_[i];
        if (p.respondent_id.empty()) fail(ErrorKind::InvalidArgument, "empty respondent id");
        if (!(p.years_experience >= 0.0) || !std::isfinite(p.years_experience))
            fail(ErrorKind::RangeViolation,
                 fmt::format("respondent '{}': years_experience must be non-negative",
                             p.respondent_id));
        if (!profile_index_.emplace(p.respondent_id, i).second)
            fail(ErrorKind::DuplicateKey,
                 fmt::format("respondent '{}' has two profiles", p.respondent_id));
    }
    std::set<std::pair<std::string, RiskId>> keys;
    for (const auto& resp : responses_) {
        if (!profile_index_.contains(resp.respondent_id))
            fail(ErrorKind::InvalidArgument,
                 fmt::format("response references unknown respondent '{}'", resp.respondent_id));
        if (!seen_risks.contains(resp.risk))
            fail(ErrorKind::UnknownRisk,
                 fmt::format("response references unknown risk '{}'", resp.risk.str()));
        if (!keys.emplace(resp.respondent_id, resp.risk).second)
            fail(ErrorKind::DuplicateKey, fmt::format("duplicate response for respondent '{}', risk '{}'",
                                                      resp.respondent_id, resp.risk.str()));
    }
}

bool SurveyDataset::has_risk(const RiskId& risk) const {
    return std::find(risks_.begin(), risks_.end(), risk) != risks_.end();
}

const RespondentProfile& SurveyDataset::profile(const std::string& respondent_id) const {
    auto it = profile_index_.find(respondent_id);
    if (it == profile_index_.end())
        fail(ErrorKind::InvalidArgument, fmt::format("unknown respondent '{}'", respondent_id));
    return profiles_[it->second];
}

namespace {

constexpr std::size_t kColumnCount = 21;
constexpr std::array<std::string_view, kColumnCount> kColumns = {
    "respondent_id", "risk", "q1", "q2", "q3", "q4", "q5", "q6", "q7", "q8", "q9",
    "q10", "q11", "years_experience", "employees_bucket", "team_size_bucket",
    "proc_development", "proc_testing", "proc_pm", "proc_support", "proc_research"};

constexpr std::size_t kYearsColumn = 13;
constexpr std::size_t kEmployeesColumn = 14;
constexpr std::size_t kTeamColumn = 15;
constexpr std::size_t kFirstProcessColumn = 16;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

[[noreturn]] void malformed(std::size_t line_no, std::string_view column, std::string_view why) {
    fail(ErrorKind::MalformedRow, fmt::format("line {}: column {}: {}", line_no, column, why));
}

int parse_int_cell(std::string_view cell, std::size_t line_no, std::size_t column, int lo, int hi) {
    if (cell.empty()) malformed(line_no, kColumns[column], "missing value");
    int value = 0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        malformed(line_no, kColumns[column], fmt::format("'{}' is not an integer", cell));
    if (value < lo || value > hi)
        fail(ErrorKind::RangeViolation,
             fmt::format("line {}: column {}: value {} outside [{},{}]", line_no, kColumns[column],
                         value, lo, hi));
    return value;
}

double parse_years_cell(std::string_view cell, std::size_t line_no) {
    if (cell.empty()) malformed(line_no, kColumns[kYearsColumn], "missing value");
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value,
                                     std::chars_format::fixed);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value))
        malformed(line_no, kColumns[kYearsColumn], fmt::format("'{}' is not a number", cell));
    if (value < 0.0)
        fail(ErrorKind::RangeViolation,
             fmt::format("line {}: column years_experience: value {} is negative", line_no, cell));
    return value;
}

void check_token(std::string_view cell, std::size_t line_no, std::size_t column) {
    if (cell.empty()) malformed(line_no, kColumns[column], "missing value");
    if (cell.find('"') != std::string_view::npos)
        malformed(line_no, kColumns[column], "quoted fields are not supported");
}

std::string format_years(double years) {
    // Shortest fixed-notation text that round-trips.
    std::array<char, 512> buf{};
    auto [ptr, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), years, std::chars_format::fixed);
    (void)ec;
    return std::string(buf.data(), ptr);
}

}  // namespace

SurveyDataset parse_survey(std::string_view text) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

    std::vector<SurveyResponse> responses;
    std::vector<RespondentProfile> profiles;
    std::vector<RiskId> risks;
    std::map<std::string, std::size_t> profile_at;
    std::map<std::string, std::size_t> first_line_of;
    std::set<std::pair<std::string, std::string>> keys;

    bool header_seen = false;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = trim(text.substr(start, end - start));
        ++line_no;
        start = end + 1;
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (!header_seen) {
            if (line != kCsvHeader)
                fail(ErrorKind::MalformedRow,
                     fmt::format("line {}: header does not match the expected column list", line_no));
            header_seen = true;
            continue;
        }
        const auto cells = split_commas(line);
        if (cells.size() != kColumnCount)
            fail(ErrorKind::MalformedRow, fmt::format("line {}: expected {} columns, found {}",
                                                      line_no, kColumnCount, cells.size()));

        check_token(cells[0], line_no, 0);
        check_token(cells[1], line_no, 1);

        SurveyResponse resp;
        resp.respondent_id = std::string(cells[0]);
        resp.risk = RiskId(std::string(cells[1]));
        resp.answers[0] = parse_int_cell(cells[2], line_no, 2, 1, 10);
        resp.answers[1] = parse_int_cell(cells[3], line_no, 3, 1, 3);
        for (int q = kFirstLikertItem; q <= kLastLikertItem; ++q) {
            const auto col = static_cast<std::size_t>(q + 1);
            resp.answers[static_cast<std::size_t>(q - 1)] = parse_int_cell(cells[col], line_no, col, 1, 5);
        }

        RespondentProfile prof;
        prof.respondent_id = resp.respondent_id;
        prof.years_experience = parse_years_cell(cells[kYearsColumn], line_no);
        prof.employees = static_cast<EmployeesBucket>(
            parse_int_cell(cells[kEmployeesColumn], line_no, kEmployeesColumn, 1, 3));
        prof.team_size =
            static_cast<TeamSizeBucket>(parse_int_cell(cells[kTeamColumn], line_no, kTeamColumn, 1, 3));
        for (std::size_t k = 0; k < kProcessTypes.size(); ++k) {
            const std::size_t col = kFirstProcessColumn + k;
            prof.process.engaged[k] = parse_int_cell(cells[col], line_no, col, 0, 1) == 1;
        }

        if (!keys.emplace(resp.respondent_id, resp.risk.str()).second)
            fail(ErrorKind::DuplicateKey,
                 fmt::format("line {}: duplicate record for respondent '{}' and risk '{}'", line_no,
                             resp.respondent_id, resp.risk.str()));

        if (auto it = profile_at.find(prof.respondent_id); it != profile_at.end()) {
            if (!(profiles[it->second] == prof))
                fail(ErrorKind::InconsistentProfile,
                     fmt::format("line {}: attributes of respondent '{}' differ from line {}", line_no,
                                 prof.respondent_id, first_line_of[prof.respondent_id]));
        } else {
            profile_at.emplace(prof.respondent_id, profiles.size());
            first_line_of.emplace(prof.respondent_id, line_no);
            profiles.push_back(prof);
        }
        if (std::find(risks.begin(), risks.end(), resp.risk) == risks.end()) risks.push_back(resp.risk);
        responses.push_back(std::move(resp));
        if (end == text.size()) break;
    }
    if (!header_seen) fail(ErrorKind::MalformedRow, "line 1: missing header");
    return SurveyDataset(std::move(responses), std::move(profiles), std::move(risks));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, fmt::format("cannot open '{}'", path));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail(ErrorKind::Io, fmt::format("error reading '{}'", path));
    return text;
}

SurveyDataset read_survey_file(const std::string& path) { return parse_survey(read_text_file(path)); }

std::string serialize_survey(const SurveyDataset& ds) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : ds.responses()) {
        const auto& p = ds.profile(r.respondent_id);
        out += fmt::format("{},{}", r.respondent_id, r.risk.str());
        for (int a : r.answers) out += fmt::format(",{}", a);
        out += fmt::format(",{},{},{}", format_years(p.years_experience), static_cast<int>(p.employees),
                           static_cast<int>(p.team_size));
        for (bool f : p.process.engaged) out += f ? ",1" : ",0";
        out += '\n';
    }
    return out;
}

SurveyDataset stratify(const SurveyDataset& ds, const std::optional<RiskId>& by_risk,
                       const std::optional<std::set<int>>& by_frequency) {
    if (by_risk && !ds.has_risk(*by_risk))
        fail(ErrorKind::UnknownRisk, fmt::format("unknown risk '{}'", by_risk->str()));
    if (by_frequency)
        for (int level : *by_frequency)
            if (level < 1 || level > 3)
                fail(ErrorKind::InvalidArgument,
                     fmt::format("frequency level {} is not one of 1, 2, 3", level));

    std::vector<SurveyResponse> kept;
    std::set<std::string> referenced;
    for (const auto& r : ds.responses()) {
        if (by_risk && r.risk != *by_risk) continue;
        if (by_frequency && !by_frequency->contains(r.frequency())) continue;
        referenced.insert(r.respondent_id);
        kept.push_back(r);
    }
    std::vector<RespondentProfile> profiles;
    for (const auto& p : ds.profiles())
        if (referenced.contains(p.respondent_id)) profiles.push_back(p);
    return SurveyDataset(std::move(kept), std::move(profiles), ds.risk_catalog());
}

namespace {

std::vector<CategoryCount> with_ratios(std::vector<CategoryCount> counts, std::size_t total) {
    for (auto& c : counts) c.ratio = static_cast<double>(c.count) / static_cast<double>(total);
    return counts;
}

}  // namespace

DescriptiveTable attribute_summary(const SurveyDataset& ds) {
    const auto& profiles = ds.profiles();
    if (profiles.empty()) fail(ErrorKind::EmptyDataset, "attribute summary of an empty dataset");
    DescriptiveTable t;
    t.respondents = profiles.size();

    std::vector<CategoryCount> employees = {{"under_300", 0, 0.0}, {"300_to_1000", 0, 0.0},
                                            {"over_1000", 0, 0.0}};
    std::vector<CategoryCount> team = {{"under_10", 0, 0.0}, {"10_to_50", 0, 0.0}, {"over_50", 0, 0.0}};
    std::vector<CategoryCount> process;
    for (auto pt : kProcessTypes) process.push_back({std::string(process_name(pt)), 0, 0.0});

    std::vector<double> years;
    years.reserve(profiles.size());
    for (const auto& p : profiles) {
        ++employees[static_cast<std::size_t>(p.employees) - 1].count;
        ++team[static_cast<std::size_t>(p.team_size) - 1].count;
        for (std::size_t k = 0; k < kProcessTypes.size(); ++k)
            if (p.process.engaged[k]) ++process[k].count;
        years.push_back(p.years_experience);
    }
    t.employees = with_ratios(std::move(employees), t.respondents);
    t.team_size = with_ratios(std::move(team), t.respondents);
    t.process = with_ratios(std::move(process), t.respondents);

    double sum = 0.0;
    for (double y : years) sum += y;
    t.years_mean = sum / static_cast<double>(years.size());
    std::sort(years.begin(), years.end());
    const std::size_t n = years.size();
    t.years_median = n % 2 == 1 ? years[n / 2] : 0.5 * (years[n / 2 - 1] + years[n / 2]);
    t.years_min = years.front();
    t.years_max = years.back();
    return t;
}

}  // namespace riskcal
