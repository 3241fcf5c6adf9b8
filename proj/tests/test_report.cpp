#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "riskcal/error.hpp"
#include "riskcal/report.hpp"
#include "riskcal/synthetic.hpp"
#include "support/fixtures.hpp"

using namespace riskcal;

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

std::string reference_csv(std::uint64_t seed = 1) { return serialize_survey(reference_dataset(seed)); }

RunConfig config(const std::string& command) {
    RunConfig c;
    c.command = command;
    c.input = "memory.csv";
    return c;
}

int run_cli(const std::string& args, const std::string& stdout_path = "") {
    std::string cmd = std::string("\"") + RISKCAL_CLI + "\" " + args;
    cmd += stdout_path.empty() ? " >/dev/null" : " >\"" + stdout_path + "\"";
    cmd += " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// One response per respondent (risk A) so profile attributes can be set
// freely per response.
SurveyDataset one_risk_dataset(std::size_t n, std::uint64_t seed, bool years_is_q1) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> impact(1, 10), freq(1, 3), bucket(1, 3), flag(0, 1), likert(1, 5);
    std::uniform_real_distribution<double> years(0.0, 40.0);
    std::vector<SurveyResponse> responses;
    std::vector<RespondentProfile> profiles;
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = "r" + std::to_string(i);
        auto r = fixtures::response(id, "A", impact(rng), freq(rng));
        for (int q = 3; q <= 11; ++q) r.answers[static_cast<std::size_t>(q - 1)] = likert(rng);
        RespondentProfile p;
        p.respondent_id = id;
        p.years_experience = years_is_q1 ? r.impact() : years(rng);
        p.employees = static_cast<EmployeesBucket>(bucket(rng));
        p.team_size = static_cast<TeamSizeBucket>(bucket(rng));
        for (auto& e : p.process.engaged) e = flag(rng) == 1;
        responses.push_back(r);
        profiles.push_back(p);
    }
    return SurveyDataset(responses, profiles, {RiskId("A")});
}

// Likert answers cut from a continuous two-factor model: Q3..Q6 on one
// factor, Q7..Q10 on the other, Q11 noise.
SurveyDataset two_factor_survey(std::size_t n, std::uint64_t seed) {
    const auto sample = fixtures::two_factor_sample(n, 0.2, seed);
    std::mt19937_64 rng(seed + 1);
    std::uniform_int_distribution<int> impact(1, 10), freq(1, 3), likert(1, 5);
    std::vector<SurveyResponse> responses;
    std::vector<RespondentProfile> profiles;
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = "r" + std::to_string(i);
        auto r = fixtures::response(id, "A", impact(rng), freq(rng));
        for (std::size_t k = 0; k < 8; ++k) {
            const double v = std::round(3.0 + 1.1 * sample.data(i, k));
            r.answers[k + 2] = static_cast<int>(std::clamp(v, 1.0, 5.0));
        }
        r.answers[10] = likert(rng);
        responses.push_back(r);
        profiles.push_back(fixtures::plain_profile(id));
    }
    return SurveyDataset(responses, profiles, {RiskId("A")});
}

}  // namespace

TEST_CASE("item and size lists") {
    CHECK(parse_item_list("Q3..Q11") == std::vector<int>{3, 4, 5, 6, 7, 8, 9, 10, 11});
    CHECK(parse_item_list("3-5") == std::vector<int>{3, 4, 5});
    CHECK(parse_item_list("Q4,Q5") == std::vector<int>{4, 5});
    CHECK(parse_item_list("q4, q9..q10") == std::vector<int>{4, 9, 10});
    CHECK_THROWS_AS(parse_item_list("Q4,Q4"), Error);
    CHECK_THROWS_AS(parse_item_list("Q12"), Error);
    CHECK_THROWS_AS(parse_item_list("Q5..Q3"), Error);
    CHECK(parse_size_list("1..4") == std::vector<std::size_t>{1, 2, 3, 4});
    CHECK(parse_size_list("1,2,5") == std::vector<std::size_t>{1, 2, 5});
    CHECK_THROWS_AS(parse_size_list("0"), Error);
    CHECK_THROWS_AS(parse_size_list("x"), Error);
}

TEST_CASE("dataset digest is FNV-1a 64") {
    CHECK(dataset_digest("") == "fnv1a64:cbf29ce484222325");
    CHECK(dataset_digest("a") == "fnv1a64:af63dc4c8601ec8c");
    CHECK(dataset_digest("foobar") == "fnv1a64:85944171f73967e8");
}

TEST_CASE("sections are present iff their command ran") {
    const auto text = reference_csv();
    const auto d = run_on_text(config("describe"), text);
    CHECK(d.describe);
    CHECK_FALSE(d.screen);
    CHECK_FALSE(d.factor);
    CHECK_FALSE(d.calibrate);
    const auto all = run_on_text(config("report"), text);
    CHECK(all.describe);
    CHECK(all.screen);
    CHECK(all.factor);
    REQUIRE(all.calibrate);
    CHECK(all.calibrate->sweep);
    CHECK(all.config.sweep);
    CHECK(all.responses == 138);
    CHECK(all.respondents == 69);
    CHECK(kind_of([&] { run_on_text(config("plot"), text); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("describe tables") {
    const auto b = run_on_text(config("describe"), reference_csv());
    REQUIRE(b.describe->impact_by_frequency.size() == 2);
    const auto& a = b.describe->impact_by_frequency[0].impact;
    CHECK(a.groups[0].count == 22);
    CHECK(std::round(a.groups[0].mean * 10) / 10 == doctest::Approx(6.4));
    CHECK(b.describe->subscale_means.size() == 2);
    CHECK(b.describe->attributes.respondents == 69);
}

TEST_CASE("screening") {
    const auto ref = run_screen(reference_dataset(), config("screen"));
    REQUIRE(ref.size() == 8);
    CHECK(ref[0].attribute == "number_of_employees");
    CHECK(ref[1].method == "pearson");
    CHECK(ref[3].method == "correlation_ratio");

    const auto same = run_screen(one_risk_dataset(200, 1, true), config("screen"));
    CHECK(same[1].impact.value() == doctest::Approx(1.0));
    CHECK(same[1].flagged);

    for (const auto& row : run_screen(one_risk_dataset(500, 2, false), config("screen"))) {
        CHECK(std::abs(row.impact.value()) < 0.15);
        CHECK(std::abs(row.frequency.value()) < 0.15);
        CHECK_FALSE(row.flagged);
    }
}

TEST_CASE("screening reports undefined associations with a note") {
    // every respondent does development: the flag has a single group
    std::vector<SurveyResponse> r{fixtures::response("a", "A", 3, 1), fixtures::response("b", "A", 6, 2),
                                  fixtures::response("c", "A", 8, 3)};
    std::vector<RespondentProfile> p{fixtures::plain_profile("a", 1), fixtures::plain_profile("b", 5),
                                     fixtures::plain_profile("c", 9)};
    const auto rows = run_screen(SurveyDataset(r, p, {RiskId("A")}), config("screen"));
    CHECK_FALSE(rows[0].impact.has_value());
    CHECK(!rows[0].note.empty());
    CHECK_FALSE(rows[3].impact.has_value());
    CHECK(rows[1].impact.has_value());
}

TEST_CASE("factor command on two-factor survey data") {
    auto cfg = config("factor");
    cfg.items = {3, 4, 5, 6, 7, 8, 9, 10};
    cfg.dread_items = {3, 4};
    cfg.unknown_items = {7, 8};
    const auto f = run_factor(two_factor_survey(5000, 77), cfg);
    CHECK(f.gate_passed);
    REQUIRE(f.search);
    CHECK(f.search->chosen == 2);
    REQUIRE(f.salient.size() == 2);
    std::set<std::string> s0, s1;
    for (const auto& it : f.salient[0]) s0.insert(it.item);
    for (const auto& it : f.salient[1]) s1.insert(it.item);
    const std::set<std::string> first{"Q3", "Q4", "Q5", "Q6"}, second{"Q7", "Q8", "Q9", "Q10"};
    CHECK(((s0 == first && s1 == second) || (s0 == second && s1 == first)));
    CHECK(f.reliabilities.size() == 2);
    CHECK(f.stratified.size() == 3);
}

TEST_CASE("factor command gate") {
    auto cfg = config("factor");
    const auto noise = one_risk_dataset(300, 5, false);
    CHECK(kind_of([&] { run_factor(noise, cfg); }) == ErrorKind::SuitabilityGateFailed);
    cfg.force = true;
    const auto forced = run_factor(noise, cfg);
    CHECK(forced.forced);
    CHECK_FALSE(forced.gate_passed);
}

TEST_CASE("factor count override") {
    auto cfg = config("factor");
    cfg.factors = 3;
    const auto f = run_factor(reference_dataset(), cfg);
    CHECK(f.solution.factors() == 3);
    CHECK(f.salient.size() == 3);
    CHECK_FALSE(f.search);
}

TEST_CASE("calibrate without a held-out stratum") {
    std::vector<SurveyResponse> r;
    std::vector<RespondentProfile> p;
    for (int i = 0; i < 12; ++i) {
        const auto id = "r" + std::to_string(i);
        auto resp = fixtures::response(id, "A", 4 + i % 5, 1 + i % 2);
        resp.answers[3] = 1 + i % 5;
        resp.answers[8] = 1 + (i * 3) % 5;
        resp.answers[9] = 1 + (i * 7) % 5;
        r.push_back(resp);
        p.push_back(fixtures::plain_profile(id));
    }
    const SurveyDataset ds(r, p, {RiskId("A")});
    auto cfg = config("calibrate");
    try {
        run_calibrate(ds, cfg);
        FAIL("expected EmptyHoldout");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyHoldout);
        CHECK(std::string(e.what()).find("empty holdout stratum") != std::string::npos);
    }
    cfg.no_eval = true;
    const auto c = run_calibrate(ds, cfg);
    CHECK_FALSE(c.evaluated);
    CHECK(!c.results.rows.empty());
    for (const auto& row : c.results.rows) CHECK_FALSE(row.absolute_error.has_value());
}

TEST_CASE("calibrate on a subset of risks") {
    auto cfg = config("calibrate");
    cfg.risks = {"A"};
    const auto c = run_calibrate(reference_dataset(), cfg);
    for (const auto& row : c.results.rows) CHECK(row.risk == RiskId("A"));
    cfg.risks = {"Q"};
    CHECK(kind_of([&] { run_calibrate(reference_dataset(), cfg); }) == ErrorKind::UnknownRisk);
}

TEST_CASE("JSON envelope and determinism") {
    auto cfg = config("report");
    cfg.seed = 42;
    const auto text = reference_csv(2);
    const auto a = render_json(run_on_text(cfg, text));
    const auto b = render_json(run_on_text(cfg, text));
    CHECK(a == b);
    const auto j = nlohmann::json::parse(a);
    CHECK(j["toolkit"] == "riskcal");
    CHECK(j["version"] == std::string(toolkit_version()));
    CHECK(j["seed"] == 42);
    CHECK(j["config"]["seed"] == 42);
    CHECK(j["dataset"]["digest"] == dataset_digest(text));
    CHECK(j["dataset"]["responses"] == 138);
    for (const char* s : {"describe", "screen", "factor", "calibrate"}) CHECK(j["sections"].contains(s));
    CHECK(j["sections"]["calibrate"]["sweep"]["seed"] == 42);

    cfg.seed = 43;
    CHECK(render_json(run_on_text(cfg, text)) != a);
}

TEST_CASE("markdown agrees with JSON up to rounding") {
    const auto b = run_on_text(config("report"), reference_csv());
    const auto md = render_markdown(b);
    const auto j = nlohmann::json::parse(render_json(b));
    char buf[64];
    const double r1 = j["sections"]["calibrate"]["results"]["averages"][0]["mean_absolute_error"].get<double>();
    std::snprintf(buf, sizeof buf, "| R1 | %.2f |", r1);
    CHECK(md.find(buf) != std::string::npos);
    const double kmo = j["sections"]["factor"]["suitability"]["kmo"].get<double>();
    std::snprintf(buf, sizeof buf, "KMO = %.2f", kmo);
    CHECK(md.find(buf) != std::string::npos);
    const double mean = j["sections"]["describe"]["impact_by_frequency"][0]["groups"][0]["mean"].get<double>();
    std::snprintf(buf, sizeof buf, "| A | 1 (rarely) | %.1f |", mean);
    CHECK(md.find(buf) != std::string::npos);
}

TEST_CASE("CSV tables") {
    const auto files = render_csv(run_on_text(config("report"), reference_csv()));
    for (const char* name : {"impact_by_frequency.csv", "subscale_means.csv", "screening.csv", "factor_pattern.csv",
                             "predictions.csv", "model_errors.csv", "sweep.csv"})
        CHECK(files.count(name) == 1);
}

TEST_CASE("command-line exit codes") {
    const auto input = fixtures::temp_path("report-valid.csv");
    fixtures::write_text(input, reference_csv());
    const auto out = fixtures::temp_path("report-validate.txt");
    CHECK(run_cli("validate --input \"" + input + "\"", out) == 0);
    CHECK(slurp(out) == "138 responses, 69 respondents, 2 risks\n");

    auto bad = reference_csv();
    const auto line_end = bad.find('\n', bad.find('\n') + 1);
    auto second = bad.substr(bad.find('\n') + 1, line_end - bad.find('\n') - 1);
    // q2 is the fourth column
    std::size_t pos = 0;
    for (int k = 0; k < 3; ++k) pos = second.find(',', pos) + 1;
    second[pos] = '4';
    bad.replace(bad.find('\n') + 1, line_end - bad.find('\n') - 1, second);
    const auto bad_path = fixtures::temp_path("report-bad.csv");
    fixtures::write_text(bad_path, bad);
    CHECK(run_cli("validate --input \"" + bad_path + "\"") == 2);
    const std::string err = fixtures::temp_path("report-bad.err");
    CHECK(std::system((std::string("\"") + RISKCAL_CLI + "\" validate --input \"" + bad_path + "\" 2>\"" + err + "\"").c_str()) == 512);
    CHECK(slurp(err).find("line 2") != std::string::npos);

    CHECK(run_cli("validate --input /nonexistent/riskcal.csv") == 3);
    CHECK(run_cli("describe") == 1);
    CHECK(run_cli("describe --input \"" + input + "\" --format yaml") == 1);

    const auto noise = fixtures::temp_path("report-noise.csv");
    fixtures::write_text(noise, serialize_survey(one_risk_dataset(300, 5, false)));
    CHECK(run_cli("factor --input \"" + noise + "\"") == 4);
    CHECK(run_cli("factor --input \"" + noise + "\" --force") == 0);
}

TEST_CASE("missing input file is an IO failure") {
    RunConfig cfg = config("describe");
    cfg.input = "/nonexistent/riskcal.csv";
    CHECK(kind_of([&] { run_command(cfg); }) == ErrorKind::Io);
    CHECK(exit_code(ErrorKind::Io) == 3);
    CHECK(exit_code(ErrorKind::RangeViolation) == 2);
    CHECK(exit_code(ErrorKind::NoConvergence) == 4);
}

TEST_CASE("command-line output formats") {
    const auto input = fixtures::temp_path("report-formats.csv");
    fixtures::write_text(input, reference_csv());
    const auto md = fixtures::temp_path("report.md");
    CHECK(run_cli("describe --input \"" + input + "\" --format markdown --out \"" + md + "\"") == 0);
    CHECK(slurp(md).rfind("# riskcal describe report", 0) == 0);

    const auto dir = fixtures::temp_path("report-csv");
    std::filesystem::remove_all(dir);
    CHECK(run_cli("calibrate --input \"" + input + "\" --sweep --sweep-sizes 1..5 --format csv --out \"" + dir + "\"") == 0);
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / "sweep.csv"));
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / "model_errors.csv"));

    const auto synth = fixtures::temp_path("report-synth.csv");
    CHECK(std::system((std::string("\"") + RISKCAL_SYNTH + "\" --seed 1 --out \"" + synth + "\"").c_str()) == 0);
    CHECK(slurp(synth) == reference_csv(1));
}
