#include "riskcal/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "riskcal/rng.hpp"

namespace riskcal {

namespace {

constexpr std::size_t kRespondents = 69;

struct Stratum {
    int frequency;
    std::size_t count;
    double impact_mean;
    double impact_sd;
    double dread_mean;
    double dread_sd;
    double unknown_mean;
    double unknown_sd;
};

// Per risk, Q2 = 1, 2, 3.
constexpr std::array<std::array<Stratum, 3>, 2> kStrata = {{
    {{{1, 22, 6.4, 3.0, 4.1, 1.08, 2.5, 0.69},
      {2, 29, 7.7, 2.0, 4.4, 0.60, 2.4, 0.83},
      {3, 18, 8.6, 1.4, 4.3, 0.91, 2.7, 1.09}}},
    {{{1, 5, 8.4, 1.7, 4.6, 0.55, 3.2, 0.84},
      {2, 35, 8.3, 1.7, 4.1, 0.80, 2.8, 0.93},
      {3, 29, 8.0, 2.2, 3.9, 1.14, 2.8, 0.99}}},
}};

// Loadings of Q3..Q11 on (dread, unknown).
constexpr std::array<std::array<double, 2>, 9> kLoadings = {{
    {0.55, 0.05}, {0.84, 0.0}, {0.73, 0.0}, {0.50, 0.10}, {0.45, 0.05},
    {0.10, 0.50}, {0.0, 0.57}, {0.0, 0.77}, {0.05, 0.45},
}};
constexpr double kFactorCorrelation = 0.25;

class Source {
public:
    explicit Source(std::uint64_t seed) : rng_(splitmix64_mix(seed ^ 0x5eed5eed5eedULL)) {}

    double uniform() { return static_cast<double>(rng_.next() >> 11) * 0x1.0p-53; }

    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_.uniform_below(n)); }

    template <class T>
    void shuffle(std::vector<T>& v) {
        const auto perm = sample_without_replacement(rng_, v.size(), v.size());
        std::vector<T> out;
        out.reserve(v.size());
        for (auto i : perm) out.push_back(v[i]);
        v = std::move(out);
    }

private:
    CounterRng rng_;
};

int clamp_round(double x, int lo, int hi) {
    return std::clamp(static_cast<int>(std::lround(x)), lo, hi);
}

// Integer grades near N(mean, sd) whose sum is round(mean * n).
std::vector<int> grades_with_sum(Source& src, std::size_t n, double mean, double sd, int lo, int hi) {
    std::vector<int> v(n);
    for (auto& x : v) x = clamp_round(mean + sd * src.normal(), lo, hi);
    const long target = std::lround(mean * static_cast<double>(n));
    long sum = 0;
    for (int x : v) sum += x;
    while (sum != target) {
        auto& x = v[src.below(n)];
        if (sum < target && x < hi) {
            ++x;
            ++sum;
        } else if (sum > target && x > lo) {
            --x;
            --sum;
        }
    }
    return v;
}

std::vector<double> years_of_experience(Source& src) {
    // 34 values at or below the median, the median itself, 34 above; the
    // upper half is nudged until the total is 1263 (mean 18.30).
    std::vector<double> years;
    for (std::size_t i = 0; i < 34; ++i) years.push_back(static_cast<double>(3 + src.below(14)));
    years.push_back(16.0);
    std::vector<double> upper;
    for (std::size_t i = 0; i < 34; ++i) upper.push_back(static_cast<double>(16 + src.below(16)));
    double sum = 16.0;
    for (double y : years) sum += y;
    sum -= 16.0;
    for (double y : upper) sum += y;
    while (sum != 1263.0) {
        auto& y = upper[src.below(upper.size())];
        if (sum < 1263.0 && y < 45.0) {
            y += 1.0;
            sum += 1.0;
        } else if (sum > 1263.0 && y > 16.0) {
            y -= 1.0;
            sum -= 1.0;
        }
    }
    years.insert(years.end(), upper.begin(), upper.end());
    src.shuffle(years);
    return years;
}

template <class T>
std::vector<T> repeated(std::initializer_list<std::pair<T, std::size_t>> counts) {
    std::vector<T> out;
    for (const auto& [value, n] : counts) out.insert(out.end(), n, value);
    return out;
}

}  // namespace

SurveyDataset reference_dataset(std::uint64_t seed) {
    Source src(seed);

    auto employees = repeated<EmployeesBucket>(
        {{EmployeesBucket::Under300, 26}, {EmployeesBucket::From300To1000, 10}, {EmployeesBucket::Over1000, 33}});
    auto teams = repeated<TeamSizeBucket>(
        {{TeamSizeBucket::Under10, 27}, {TeamSizeBucket::From10To50, 22}, {TeamSizeBucket::Over50, 20}});
    auto process = repeated<ProcessType>({{ProcessType::Development, 19},
                                          {ProcessType::Testing, 17},
                                          {ProcessType::ProjectManagement, 13},
                                          {ProcessType::DevelopmentSupport, 14},
                                          {ProcessType::Research, 10}});
    src.shuffle(employees);
    src.shuffle(teams);
    src.shuffle(process);
    const auto years = years_of_experience(src);

    std::vector<RespondentProfile> profiles(kRespondents);
    for (std::size_t i = 0; i < kRespondents; ++i) {
        auto& p = profiles[i];
        p.respondent_id = fmt::format("R{:03d}", i + 1);
        p.years_experience = years[i];
        p.employees = employees[i];
        p.team_size = teams[i];
        p.process[process[i]] = true;
    }
    // The four flags beyond one per respondent go to the first respondents
    // that do not already carry them.
    for (std::size_t k = kRespondents, next = 0; k < process.size(); ++k) {
        while (profiles[next].process[process[k]]) ++next;
        profiles[next++].process[process[k]] = true;
    }

    const std::array<RiskId, 2> risks = {RiskId("A"), RiskId("B")};
    std::array<std::vector<std::array<int, kItemCount>>, 2> answers;
    for (std::size_t r = 0; r < 2; ++r) {
        for (const auto& s : kStrata[r]) {
            const auto impact = grades_with_sum(src, s.count, s.impact_mean, s.impact_sd, 1, 10);
            for (std::size_t j = 0; j < s.count; ++j) {
                const double dread = src.normal();
                const double unknown =
                    kFactorCorrelation * dread + std::sqrt(1.0 - kFactorCorrelation * kFactorCorrelation) * src.normal();
                std::array<int, kItemCount> a{};
                a[0] = impact[j];
                a[1] = s.frequency;
                for (std::size_t q = 0; q < kLoadings.size(); ++q) {
                    const auto& l = kLoadings[q];
                    const double common = l[0] * dread + l[1] * unknown;
                    const double unique = std::sqrt(std::max(0.0, 1.0 - l[0] * l[0] - l[1] * l[1]));
                    const double z = common + unique * src.normal();
                    const bool dread_item = q < 5;
                    const double mean = dread_item ? s.dread_mean : s.unknown_mean;
                    const double sd = dread_item ? s.dread_sd : s.unknown_sd;
                    a[q + 2] = clamp_round(mean + sd * z, 1, 5);
                }
                answers[r].push_back(a);
            }
        }
        src.shuffle(answers[r]);
    }

    std::vector<SurveyResponse> responses;
    for (std::size_t i = 0; i < kRespondents; ++i)
        for (std::size_t r = 0; r < 2; ++r)
            responses.push_back(SurveyResponse{profiles[i].respondent_id, risks[r], answers[r][i]});
    return SurveyDataset(std::move(responses), std::move(profiles), {risks.begin(), risks.end()});
}

}  // namespace riskcal
