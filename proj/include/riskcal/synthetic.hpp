#pragma once

#include <cstdint>

#include "riskcal/survey_data.hpp"

namespace riskcal {

// A 69-respondent, two-risk (A, B) survey shaped like the reference
// summary tables: bucket and process counts, years of experience
// (mean 18.3, median 16), Q2 stratum counts per risk, Q1 stratum sums that
// round to the reported means, and Likert items driven by two correlated
// latent factors (Q3-Q7 dread, Q8-Q11 unknown). Deterministic in `seed`.
SurveyDataset reference_dataset(std::uint64_t seed = 1);

}  // namespace riskcal
