#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace fixtures {

using namespace riskcal;

const std::vector<StratumMoments>& reference_strata() {
    static const std::vector<StratumMoments> strata = {
        {"A", 1, 22, 6.4, 3.0, 4.1, 1.08, 2.5, 0.69},
        {"A", 2, 29, 7.7, 2.0, 4.4, 0.60, 2.4, 0.83},
        {"A", 3, 18, 8.6, 1.4, 4.3, 0.91, 2.7, 1.09},
        {"B", 1, 5, 8.4, 1.7, 4.6, 0.55, 3.2, 0.84},
        {"B", 2, 35, 8.3, 1.7, 4.1, 0.80, 2.8, 0.93},
        {"B", 3, 29, 8.0, 2.2, 3.9, 1.14, 2.8, 0.99},
    };
    return strata;
}

std::vector<double> exact_moments(std::size_t n, double mean, double sd, std::mt19937_64& rng) {
    const std::size_t pairs = n / 2;
    const bool odd = n % 2 == 1;
    // With 2h deviations of +/- a (and a zero when n is odd) the sum of
    // squares is 2h a^2, so a = sd * sqrt((n - 1) / 2h).
    const double a = pairs == 0 ? 0.0 : sd * std::sqrt(static_cast<double>(n - 1) / (2.0 * pairs));
    std::vector<double> sign;
    for (std::size_t k = 0; k < pairs; ++k) {
        sign.push_back(1.0);
        sign.push_back(-1.0);
    }
    std::shuffle(sign.begin(), sign.end(), rng);
    std::vector<double> out;
    for (double s : sign) out.push_back(mean + s * a);
    if (odd) out.push_back(mean);
    return out;
}

CalibrationFrame moment_matched_frame(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    CalibrationFrame frame;
    for (const auto& s : reference_strata()) {
        const auto impact = exact_moments(s.count, s.impact_mean, s.impact_sd, rng);
        const auto dread = exact_moments(s.count, s.dread_mean, s.dread_sd, rng);
        const auto unknown = exact_moments(s.count, s.unknown_mean, s.unknown_sd, rng);
        for (std::size_t i = 0; i < s.count; ++i)
            frame.rows.push_back({RiskId(s.risk), s.frequency, impact[i], dread[i], unknown[i]});
        if (std::find(frame.risks.begin(), frame.risks.end(), RiskId(s.risk)) == frame.risks.end())
            frame.risks.emplace_back(s.risk);
    }
    return frame;
}

Matrix simulate_two_factor(const Matrix& loadings, double phi, std::size_t n, std::uint64_t seed) {
    const std::size_t p = loadings.rows();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Matrix data(n, p);
    for (std::size_t r = 0; r < n; ++r) {
        const double f1 = z(rng);
        const double f2 = phi * f1 + std::sqrt(1.0 - phi * phi) * z(rng);
        for (std::size_t i = 0; i < p; ++i) {
            const double l1 = loadings(i, 0), l2 = loadings(i, 1);
            const double common = l1 * l1 + l2 * l2 + 2.0 * phi * l1 * l2;
            data(r, i) = l1 * f1 + l2 * f2 + std::sqrt(1.0 - common) * z(rng);
        }
    }
    return data;
}

TwoFactorSample two_factor_sample(std::size_t n, double phi, std::uint64_t seed) {
    TwoFactorSample s;
    s.phi = phi;
    s.loadings = Matrix{{0.85, 0.05}, {0.80, -0.05}, {0.75, 0.10}, {0.70, 0.0},
                        {0.0, 0.85}, {0.10, 0.80}, {-0.05, 0.75}, {0.05, 0.70}};
    for (std::size_t i = 0; i < s.loadings.rows(); ++i) s.items.push_back("X" + std::to_string(i + 1));
    s.data = simulate_two_factor(s.loadings, phi, n, seed);
    return s;
}

CorrelationMatrix model_correlation(const Matrix& loadings) {
    Matrix r = loadings * loadings.transpose();
    std::vector<std::string> items;
    for (std::size_t i = 0; i < r.rows(); ++i) {
        r(i, i) = 1.0;
        items.push_back("X" + std::to_string(i + 1));
    }
    return make_correlation_matrix(r, items);
}

RespondentProfile plain_profile(const std::string& id, double years) {
    RespondentProfile p;
    p.respondent_id = id;
    p.years_experience = years;
    p.process[ProcessType::Development] = true;
    return p;
}

SurveyResponse response(const std::string& id, const std::string& risk, int q1, int q2, int likert) {
    SurveyResponse r;
    r.respondent_id = id;
    r.risk = RiskId(risk);
    r.answers.fill(likert);
    r.answers[0] = q1;
    r.answers[1] = q2;
    return r;
}

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "riskcal-tests";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw std::runtime_error("cannot write " + path);
}

}  // namespace fixtures
