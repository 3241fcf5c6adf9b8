#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "riskcal/error.hpp"
#include "riskcal/factor_engine.hpp"
#include "riskcal/synthetic.hpp"
#include "support/fixtures.hpp"

using namespace riskcal;
using fixtures::model_correlation;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::Io;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

CorrelationMatrix equicorrelated(std::size_t p, double r) {
    Matrix m(p, p, r);
    std::vector<std::string> items;
    for (std::size_t i = 0; i < p; ++i) {
        m(i, i) = 1.0;
        items.push_back("X" + std::to_string(i + 1));
    }
    return make_correlation_matrix(m, items);
}

CorrelationMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(rows);
    std::vector<std::string> items;
    for (std::size_t i = 0; i < m.rows(); ++i) items.push_back("X" + std::to_string(i + 1));
    return make_correlation_matrix(m, items);
}

// Brute-force KMO from an independently computed dense inverse.
double kmo_oracle(const Matrix& r) {
    const Eigen::MatrixXd s = to_eigen(r).inverse();
    double num = 0.0, partial = 0.0;
    for (Eigen::Index i = 0; i < s.rows(); ++i)
        for (Eigen::Index j = 0; j < s.cols(); ++j)
            if (i != j) {
                const double q = -s(i, j) / std::sqrt(s(i, i) * s(j, j));
                num += r(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) *
                       r(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                partial += q * q;
            }
    return num / (num + partial);
}

FactorSolution pattern_solution(const Matrix& loadings, std::vector<std::string> items) {
    FactorSolution s;
    s.items = std::move(items);
    s.loadings = loadings;
    s.unrotated_loadings = loadings;
    s.rotation_matrix = Matrix::identity(loadings.cols());
    s.factor_correlation = Matrix::identity(loadings.cols());
    return s;
}

Matrix rotate2(const Matrix& l, double theta) {
    const Matrix t{{std::cos(theta), -std::sin(theta)}, {std::sin(theta), std::cos(theta)}};
    return l * t;
}

}  // namespace

TEST_CASE("correlation matrix from data") {
    Matrix twins{{1, 1, 3}, {2, 2, 1}, {3, 3, 2}, {5, 5, 1}};
    const auto r = correlation_matrix(twins, {"a", "b", "c"});
    CHECK(r.values(0, 1) == doctest::Approx(1.0));
    CHECK(r.values(0, 0) == 1.0);
    CHECK(r.observations == 4);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u;
    Matrix data(2000, 4);
    for (std::size_t i = 0; i < 2000; ++i)
        for (std::size_t j = 0; j < 4; ++j) data(i, j) = u(rng);
    const auto ind = correlation_matrix(data, {"a", "b", "c", "d"});
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            if (i != j) CHECK(std::abs(ind.values(i, j)) < 0.08);

    Matrix constant{{1, 2}, {1, 3}, {1, 5}};
    CHECK(kind_of([&] { correlation_matrix(constant, {"a", "b"}); }) == ErrorKind::ConstantItem);
}

TEST_CASE("correlation matrix over the questionnaire items") {
    const auto ds = reference_dataset();
    const std::vector<int> items{3, 4, 5, 6, 7, 8, 9, 10, 11};
    const auto r = correlation_matrix(ds, items);
    CHECK(r.size() == 9);
    CHECK(r.observations == 138);
    CHECK(r.items.front() == "Q3");
    for (std::size_t i = 0; i < 9; ++i) CHECK(r.values(i, i) == 1.0);
    CHECK(is_symmetric(r.values, 1e-12));
}

TEST_CASE("KMO") {
    CHECK(kind_of([] { kmo(equicorrelated(3, 0.0)); }) == ErrorKind::UndefinedKMO);
    CHECK(kmo(equicorrelated(3, 0.5)) == doctest::Approx(0.75 / (0.75 + 1.0 / 3.0)).epsilon(1e-12));

    const auto one = model_correlation(Matrix{{0.8}, {0.8}, {0.8}, {0.8}});
    CHECK(std::abs(kmo(one) - kmo_oracle(one.values)) < 1e-9);

    const auto r = model_correlation(Matrix{{0.7, 0.1}, {0.6, 0.2}, {0.1, 0.8}, {0.2, 0.5}, {0.4, 0.4}});
    const double k = kmo(r);
    CHECK(std::abs(k - kmo_oracle(r.values)) < 1e-9);
    CHECK(k >= 0.0);
    CHECK(k <= 1.0);
    // reorder items 0..4 -> 4,2,0,3,1
    const std::vector<std::size_t> perm{4, 2, 0, 3, 1};
    Matrix pm(5, 5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) pm(i, j) = r.values(perm[i], perm[j]);
    CHECK(kmo(make_correlation_matrix(pm, r.items)) == doctest::Approx(k).epsilon(1e-12));

    CHECK(kind_of([] { kmo(from_rows({{1, 1, 0.5}, {1, 1, 0.5}, {0.5, 0.5, 1}})); }) == ErrorKind::SingularMatrix);
}

TEST_CASE("Bartlett sphericity") {
    const auto id = bartlett_sphericity(equicorrelated(4, 0.0), 50);
    CHECK(id.chi2 == 0.0);
    CHECK(id.p_value == 1.0);
    CHECK(id.df == 6);

    const auto b = bartlett_sphericity(equicorrelated(2, 0.5), 10);
    CHECK(b.chi2 == doctest::Approx(7.5 * -std::log(0.75)).epsilon(1e-12));
    CHECK(b.chi2 == doctest::Approx(2.158).epsilon(1e-3));
    CHECK(b.df == 1);

    CHECK(bartlett_sphericity(equicorrelated(3, 0.001), 10000).p_value > 0.9);
    CHECK(kind_of([] { bartlett_sphericity(equicorrelated(3, 0.2), 3); }) == ErrorKind::SampleTooSmall);
    CHECK(kind_of([] { bartlett_sphericity(from_rows({{1, 1}, {1, 1}}), 10); }) == ErrorKind::NonPositiveDeterminant);
}

TEST_CASE("Kaiser count") {
    CHECK(kaiser_count(equicorrelated(5, 0.0)) == 5);

    const auto one = model_correlation(Matrix{{0.8}, {0.8}, {0.8}});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(one.values));
    CHECK(es.eigenvalues()(2) == doctest::Approx(2.28));
    CHECK(es.eigenvalues()(0) == doctest::Approx(0.36));
    CHECK(kaiser_count(one) == 1);

    const auto blocks = from_rows({{1, 0.9, 0, 0}, {0.9, 1, 0, 0}, {0, 0, 1, 0.9}, {0, 0, 0.9, 1}});
    CHECK(kaiser_count(blocks) == 2);
}

TEST_CASE("ULS recovers a one-factor model") {
    const auto r = model_correlation(Matrix{{0.8}, {0.7}, {0.6}});
    const auto sol = extract_uls(r, 1);
    CHECK(sol.extraction.converged);
    CHECK(std::abs(std::abs(sol.loadings(0, 0)) - 0.8) < 1e-4);
    CHECK(std::abs(std::abs(sol.loadings(1, 0)) - 0.7) < 1e-4);
    CHECK(std::abs(std::abs(sol.loadings(2, 0)) - 0.6) < 1e-4);
    CHECK_FALSE(sol.heywood());
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(sol.communalities[i] >= 0.0);
        CHECK(sol.communalities[i] <= 1.0);
        CHECK(sol.communalities[i] + sol.uniquenesses[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
    REQUIRE(sol.eigenvalues.size() == 3);
}

TEST_CASE("ULS on the identity has no common variance") {
    const auto sol = extract_uls(equicorrelated(4, 0.0), 1);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(sol.loadings(i, 0)) < 1e-6);
}

TEST_CASE("ULS objective never increases across iterations") {
    const auto sample = fixtures::two_factor_sample(300, 0.3, 5);
    const auto r = correlation_matrix(sample.data, sample.items);
    for (std::size_t m : {1u, 2u, 3u}) {
        const auto sol = extract_uls(r, m);
        const auto& trace = sol.extraction.objective_trace;
        REQUIRE(!trace.empty());
        for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] <= trace[k - 1] + 1e-12);
        CHECK(uls_objective(r.values, sol.loadings) == doctest::Approx(trace.back()).epsilon(1e-9));
    }
}

TEST_CASE("ULS column signs put the largest loading positive") {
    const auto r = model_correlation(Matrix{{-0.8}, {-0.7}, {0.3}});
    const auto sol = extract_uls(r, 1);
    CHECK(sol.loadings(0, 0) > 0.0);
}

TEST_CASE("a Heywood case is flagged, not thrown") {
    // Search small 4-item matrices with two strongly tied pairs and weak
    // cross-correlations for an improper two-factor solution.
    bool found = false;
    for (double a = 0.80; a <= 0.99 && !found; a += 0.01)
        for (double b = 0.05; b <= 0.6 && !found; b += 0.05)
            for (double c = 0.0; c <= 0.6 && !found; c += 0.05) {
                auto r = from_rows({{1, a, b, b}, {a, 1, c, b}, {b, c, 1, 0.1}, {b, b, 0.1, 1}});
                if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(to_eigen(r.values)).eigenvalues().minCoeff() <= 1e-6)
                    continue;
                try {
                    const auto sol = extract_uls(r, 2);
                    if (sol.heywood()) {
                        found = true;
                        CHECK(std::find(sol.heywood_flags.begin(), sol.heywood_flags.end(), true) !=
                              sol.heywood_flags.end());
                        CHECK(to_json(sol)["extraction"]["status"] == "heywood");
                    }
                } catch (const Error&) {
                }
            }
    CHECK(found);
}

TEST_CASE("extraction rejects impossible factor counts") {
    CHECK(kind_of([] { extract_uls(equicorrelated(3, 0.3), 3); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { extract_uls(equicorrelated(3, 0.3), 0); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("varimax fixed point on simple structure") {
    const Matrix simple{{0.8, 0.0}, {0.7, 0.0}, {0.6, 0.0}, {0.0, 0.8}, {0.0, 0.7}, {0.0, 0.5}};
    const auto vm = rotate_varimax(pattern_solution(simple, {"a", "b", "c", "d", "e", "f"}));
    const auto& t = vm.rotation_matrix;
    for (std::size_t i = 0; i < 2; ++i) {
        double big = 0.0, small = 1.0;
        for (std::size_t j = 0; j < 2; ++j) {
            big = std::max(big, std::abs(t(i, j)));
            small = std::min(small, std::abs(t(i, j)));
        }
        CHECK(big == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(small < 1e-6);
    }
    CHECK(vm.rotation.kind == RotationKind::Varimax);
    CHECK(vm.rotation.kaiser_normalization);
}

TEST_CASE("varimax separates a 30-degree mixture and matches a grid search") {
    const Matrix simple{{0.8, 0.0}, {0.75, 0.05}, {0.7, 0.0}, {0.05, 0.8}, {0.0, 0.7}, {0.0, 0.65}};
    const Matrix mixed = rotate2(simple, std::numbers::pi / 6);
    const auto base = pattern_solution(mixed, {"a", "b", "c", "d", "e", "f"});
    const auto vm = rotate_varimax(base);

    // |loadings| match the simple structure up to column order
    double direct = 0, swapped = 0;
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t k = 0; k < 2; ++k) {
            direct = std::max(direct, std::abs(std::abs(vm.loadings(i, k)) - simple(i, k)));
            swapped = std::max(swapped, std::abs(std::abs(vm.loadings(i, 1 - k)) - simple(i, k)));
        }
    CHECK(std::min(direct, swapped) < 0.02);

    const double ours = varimax_criterion(kaiser_normalized(vm.loadings));
    double best = -1.0;
    for (int s = 0; s <= 20000; ++s) {
        const double theta = std::numbers::pi / 2 * s / 20000.0;
        best = std::max(best, varimax_criterion(kaiser_normalized(rotate2(mixed, theta))));
    }
    CHECK(ours >= best - 1e-9);
    CHECK(ours >= varimax_criterion(kaiser_normalized(mixed)));
    CHECK(max_abs_diff(vm.loadings * vm.loadings.transpose(), mixed * mixed.transpose()) < 1e-9);
    CHECK(max_abs_diff(vm.rotation_matrix.transpose() * vm.rotation_matrix, Matrix::identity(2)) < 1e-9);
}

TEST_CASE("rotating a single factor returns it unchanged with a note") {
    const auto sol = extract_uls(model_correlation(Matrix{{0.8}, {0.7}, {0.6}}), 1);
    const auto vm = rotate_varimax(sol);
    CHECK(vm.loadings == sol.loadings);
    CHECK(!vm.rotation.note.empty());
    const auto pm = rotate_promax(sol);
    CHECK(pm.loadings == sol.loadings);
    CHECK(!pm.rotation.note.empty());
}

TEST_CASE("promax on orthogonal simple structure is the varimax solution") {
    const Matrix simple{{0.8, 0.0}, {0.7, 0.0}, {0.6, 0.0}, {0.0, 0.8}, {0.0, 0.7}, {0.0, 0.5}};
    const auto base = pattern_solution(simple, {"a", "b", "c", "d", "e", "f"});
    const auto pm = rotate_promax(base, 4);
    const auto vm = rotate_varimax(base);
    CHECK(max_abs_diff(pm.factor_correlation, Matrix::identity(2)) < 1e-4);
    CHECK(max_abs_diff(pm.loadings, vm.loadings) < 1e-4);
    CHECK(pm.rotation.kind == RotationKind::Promax);
    CHECK(pm.rotation.promax_power == 4);
}

TEST_CASE("promax recovers the factor correlation of nine-item data") {
    const Matrix truth{{0.80, 0.05}, {0.75, 0.0}, {0.70, -0.05}, {0.65, 0.10}, {0.70, 0.0},
                       {0.0, 0.80}, {0.05, 0.75}, {-0.05, 0.70}, {0.10, 0.65}};
    const auto data = fixtures::simulate_two_factor(truth, 0.2, 5000, 31);
    std::vector<std::string> items;
    for (int i = 3; i <= 11; ++i) items.push_back("Q" + std::to_string(i));
    const auto r = correlation_matrix(data, items);
    const auto pm = rotate_promax(extract_uls(r, 2), 4);
    CHECK(std::abs(pm.factor_correlation(0, 1) - 0.2) <= 0.1);
    CHECK(pm.factor_correlation(0, 1) == pm.factor_correlation(1, 0));

    const Matrix implied = pm.loadings * pm.factor_correlation * pm.loadings.transpose();
    const Matrix common = pm.unrotated_loadings * pm.unrotated_loadings.transpose();
    CHECK(max_abs_diff(implied, common) < 1e-6);
    CHECK(max_abs_diff(pm.unrotated_loadings * pm.rotation_matrix, pm.loadings) < 1e-9);
    // model-implied correlation has a unit diagonal
    for (std::size_t i = 0; i < 9; ++i) CHECK(implied(i, i) + pm.uniquenesses[i] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("variance explained") {
    const Matrix zero(3, 1);
    CHECK(variance_explained(pattern_solution(zero, {"a", "b", "c"})) == 0.0);
    CHECK(variance_explained(pattern_solution(Matrix{{0.8}, {0.8}, {0.8}}, {"a", "b", "c"})) ==
          doctest::Approx(0.64));

    const auto sample = fixtures::two_factor_sample(1000, 0.3, 12);
    const auto base = extract_uls(correlation_matrix(sample.data, sample.items), 2);
    const auto pm = rotate_promax(base, 4);
    CHECK(variance_explained(pm) == doctest::Approx(variance_explained(base)).epsilon(1e-9));
    CHECK(pm.variance_explained_ratio == doctest::Approx(base.variance_explained_ratio).epsilon(1e-9));
}

TEST_CASE("salient items") {
    // Reference promax pattern.
    const Matrix pattern{{0.84, -0.03}, {0.73, -0.01}, {0.31, 0.26}, {0.29, 0.19}, {0.15, 0.11},
                         {0.14, 0.02},  {0.09, 0.00},  {-0.13, 0.77}, {0.19, 0.57}};
    const auto sol = pattern_solution(pattern, {"Q4", "Q5", "Q8", "Q7", "Q3", "Q6", "Q11", "Q10", "Q9"});
    const auto s = salient_items(sol);
    REQUIRE(s.size() == 2);
    REQUIRE(s[0].size() == 2);
    CHECK(s[0][0].item == "Q4");
    CHECK(s[0][1].item == "Q5");
    REQUIRE(s[1].size() == 2);
    CHECK(s[1][0].item == "Q10");
    CHECK(s[1][1].item == "Q9");

    for (const auto& f : salient_items(sol, 1.1)) CHECK(f.empty());

    const auto boundary = pattern_solution(Matrix{{0.4}, {0.41}}, {"a", "b"});
    const auto b = salient_items(boundary);
    REQUIRE(b[0].size() == 1);
    CHECK(b[0][0].item == "b");

    Matrix flipped = pattern;
    for (std::size_t i = 0; i < flipped.rows(); ++i) flipped(i, 1) = -flipped(i, 1);
    const auto sf = salient_items(pattern_solution(flipped, sol.items));
    for (std::size_t k = 0; k < 2; ++k) {
        REQUIRE(sf[k].size() == s[k].size());
        for (std::size_t i = 0; i < s[k].size(); ++i) CHECK(sf[k][i].item == s[k][i].item);
    }
}

TEST_CASE("Cronbach's alpha") {
    Matrix twins{{1, 1}, {2, 2}, {4, 4}, {3, 3}};
    CHECK(cronbach_alpha_from_data(twins).alpha == doctest::Approx(1.0));
    CHECK(cronbach_alpha_from_covariance(Matrix{{1.0, 0.6}, {0.6, 1.0}}).alpha == doctest::Approx(0.75).epsilon(1e-12));
    const double r = 0.626;
    const auto a = cronbach_alpha_from_covariance(Matrix{{2.0, 2.0 * r}, {2.0 * r, 2.0}});
    CHECK(a.alpha == doctest::Approx(2 * r / (1 + r)).epsilon(1e-9));
    CHECK(std::round(a.alpha * 100) / 100 == doctest::Approx(0.77));
    CHECK(a.acceptable);
    CHECK_FALSE(cronbach_alpha_from_covariance(Matrix{{1.0, 0.2}, {0.2, 1.0}}).acceptable);

    Matrix opposite{{1, 5}, {2, 4}, {3, 3}};
    CHECK(kind_of([&] { cronbach_alpha_from_data(opposite); }) == ErrorKind::ConstantTotal);
    Matrix single{{1}, {2}};
    CHECK(kind_of([&] { cronbach_alpha_from_data(single); }) == ErrorKind::TooFewItems);

    const auto ds = reference_dataset();
    const std::vector<int> dread{4, 5};
    const auto rel = cronbach_alpha(ds, dread);
    CHECK(rel.k == 2);
    CHECK(rel.alpha <= 1.0);
}

TEST_CASE("subscale scores") {
    using fixtures::plain_profile;
    auto r = fixtures::response("a", "A", 5, 1, 3);
    r.answers[3] = 4;  // Q4
    r.answers[4] = 5;  // Q5
    SurveyDataset ds({r, fixtures::response("b", "A", 5, 1, 3)}, {plain_profile("a"), plain_profile("b")},
                     {RiskId("A")});
    const auto scores = subscale_scores(ds, SubscaleDefinition::dread());
    CHECK(scores == std::vector<double>{4.5, 3.0});
    CHECK(kind_of([] { make_subscale("x", {4, 12}); }) == ErrorKind::UnknownItem);
    CHECK(kind_of([] { make_subscale("x", {4}); }) == ErrorKind::TooFewItems);
}

TEST_CASE("stratified factor correlations") {
    const auto ds = reference_dataset();
    const auto rows = stratified_factor_correlations(ds, SubscaleDefinition::dread(), SubscaleDefinition::unknown());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].dread.n == 27);
    CHECK(rows[1].dread.n == 64);
    CHECK(rows[2].dread.n == 47);

    // Q1 = 2 * Q4 with Q4 = Q5 makes the dread correlation exactly 1.
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> likert(1, 5), freq(1, 3);
    std::vector<SurveyResponse> responses;
    std::vector<RespondentProfile> profiles;
    for (int i = 0; i < 90; ++i) {
        const auto id = "r" + std::to_string(i);
        auto resp = fixtures::response(id, "A", 1, 1 + i % 3, 3);
        for (auto& a : resp.answers) a = likert(rng);
        resp.answers[4] = resp.answers[3];
        resp.answers[0] = 2 * resp.answers[3];
        resp.answers[1] = 1 + i % 3;
        responses.push_back(resp);
        profiles.push_back(fixtures::plain_profile(id));
    }
    SurveyDataset affine(responses, profiles, {RiskId("A")});
    for (const auto& row : stratified_factor_correlations(affine, SubscaleDefinition::dread(), SubscaleDefinition::unknown()))
        CHECK(row.dread.r == doctest::Approx(1.0).epsilon(1e-12));

    // independent answers, 500 per stratum
    std::uniform_int_distribution<int> impact(1, 10);
    responses.clear();
    profiles.clear();
    for (int i = 0; i < 1500; ++i) {
        const auto id = "r" + std::to_string(i);
        auto resp = fixtures::response(id, "A", 1, 1, 3);
        for (auto& a : resp.answers) a = likert(rng);
        resp.answers[0] = impact(rng);
        resp.answers[1] = 1 + i % 3;
        responses.push_back(resp);
        profiles.push_back(fixtures::plain_profile(id));
    }
    SurveyDataset independent(responses, profiles, {RiskId("A")});
    for (const auto& row : stratified_factor_correlations(independent, SubscaleDefinition::dread(), SubscaleDefinition::unknown())) {
        CHECK(row.dread.n == 500);
        CHECK(std::abs(row.dread.r) < 0.15);
        CHECK(std::abs(row.unknown.r) < 0.15);
    }

    SurveyDataset sparse({fixtures::response("a", "A", 5, 1), fixtures::response("b", "A", 6, 2)},
                         {fixtures::plain_profile("a"), fixtures::plain_profile("b")}, {RiskId("A")});
    CHECK(kind_of([&] { stratified_factor_correlations(sparse, SubscaleDefinition::dread(), SubscaleDefinition::unknown()); }) ==
          ErrorKind::EmptyStratum);
}

TEST_CASE("factor-count search") {
    const auto sample = fixtures::two_factor_sample(5000, 0.2, 3);
    const auto search = search_factor_count(correlation_matrix(sample.data, sample.items));
    CHECK(search.kaiser == 2);
    CHECK(search.chosen == 2);
    REQUIRE(!search.candidates.empty());
    CHECK(search.candidates.front().salient.size() == 2);
}

TEST_CASE("solution JSON rounds loadings to six decimals") {
    const auto sample = fixtures::two_factor_sample(500, 0.2, 4);
    const auto pm = rotate_promax(extract_uls(correlation_matrix(sample.data, sample.items), 2), 4);
    const auto j = to_json(pm);
    CHECK(j["items"].size() == 8);
    CHECK(j["loadings"].size() == 8);
    const double v = j["loadings"][0][0].get<double>();
    CHECK(v == doctest::Approx(std::round(pm.loadings(0, 0) * 1e6) / 1e6).epsilon(1e-15));
    CHECK(j["rotation"]["kind"] == "promax");
    CHECK(j["rotation"]["promax_power"] == 4);
}
