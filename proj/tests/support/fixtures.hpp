// Shared test data: stratum-moment frames, a continuous two-factor
// simulator and small dataset builders.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "riskcal/calibration.hpp"
#include "riskcal/factor_engine.hpp"
#include "riskcal/linalg.hpp"
#include "riskcal/survey_data.hpp"

namespace fixtures {

struct StratumMoments {
    std::string risk;
    int frequency;
    std::size_t count;
    double impact_mean, impact_sd;
    double dread_mean, dread_sd;
    double unknown_mean, unknown_sd;
};

// Reference per-stratum counts, impact means/SDs and subscale means/SDs.
const std::vector<StratumMoments>& reference_strata();

// Values whose sample mean and SD equal (mean, sd) exactly: symmetric pairs
// mean +/- a, plus one value at the mean when n is odd. The order of the
// deviations is shuffled with `rng`.
std::vector<double> exact_moments(std::size_t n, double mean, double sd, std::mt19937_64& rng);

// A frame reproducing every reference stratum moment; the three variables
// use independent deviation orders so the pooled design keeps full rank.
riskcal::CalibrationFrame moment_matched_frame(std::uint64_t seed = 7);

struct TwoFactorSample {
    riskcal::Matrix data;      // n x p
    riskcal::Matrix loadings;  // true p x 2 pattern
    double phi = 0.0;
    std::vector<std::string> items;
};

// Continuous data from x = L f + e with corr(f1, f2) = phi for any p x 2
// pattern L.
riskcal::Matrix simulate_two_factor(const riskcal::Matrix& loadings, double phi, std::size_t n,
                                    std::uint64_t seed);

// Continuous data from x = L f + e with corr(f1, f2) = phi. Items 0..3 load
// on factor 1, items 4..7 on factor 2.
TwoFactorSample two_factor_sample(std::size_t n, double phi, std::uint64_t seed);

// R = L L^T + diag(1 - h^2).
riskcal::CorrelationMatrix model_correlation(const riskcal::Matrix& loadings);

// One respondent per response; all profile fields fixed.
riskcal::RespondentProfile plain_profile(const std::string& id, double years = 10.0);

riskcal::SurveyResponse response(const std::string& id, const std::string& risk, int q1, int q2,
                                 int likert = 3);

std::string temp_path(const std::string& name);
void write_text(const std::string& path, const std::string& text);

}  // namespace fixtures
