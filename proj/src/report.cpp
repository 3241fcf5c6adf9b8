#include "riskcal/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "riskcal/error.hpp"

#ifndef RISKCAL_VERSION
#define RISKCAL_VERSION "0.0.0"
#endif

namespace riskcal {

using ojson = nlohmann::ordered_json;

std::string_view toolkit_version() { return RISKCAL_VERSION; }

std::string_view to_string(OutputFormat f) {
    switch (f) {
        case OutputFormat::Json: return "json";
        case OutputFormat::Markdown: return "markdown";
        case OutputFormat::Csv: return "csv";
    }
    return "?";
}

namespace {

ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

std::vector<std::string> item_labels(const std::vector<int>& items) {
    std::vector<std::string> out;
    for (int q : items) out.push_back(item_label(q));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

// Splits "a..b" or "a-b"; returns false for a single token.
bool split_range(std::string_view tok, std::string_view& lo, std::string_view& hi) {
    auto pos = tok.find("..");
    std::size_t width = 2;
    if (pos == std::string_view::npos) {
        pos = tok.find('-');
        width = 1;
    }
    if (pos == std::string_view::npos || pos == 0) return false;
    lo = trim(tok.substr(0, pos));
    hi = trim(tok.substr(pos + width));
    return true;
}

int item_token(std::string_view tok) {
    if (!tok.empty() && tok.front() >= '0' && tok.front() <= '9') return parse_item("q" + std::string(tok));
    return parse_item(tok);
}

std::size_t size_token(std::string_view tok) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || v == 0)
        fail(ErrorKind::InvalidArgument, fmt::format("'{}' is not a positive integer", tok));
    return v;
}

}  // namespace

std::vector<int> parse_item_list(std::string_view text) {
    std::vector<int> out;
    for (auto tok : split(text, ',')) {
        if (tok.empty()) fail(ErrorKind::InvalidArgument, "empty entry in item list");
        std::string_view lo, hi;
        if (split_range(tok, lo, hi)) {
            const int a = item_token(lo);
            const int b = item_token(hi);
            if (b < a) fail(ErrorKind::InvalidArgument, fmt::format("descending item range '{}'", tok));
            for (int q = a; q <= b; ++q) out.push_back(q);
        } else {
            out.push_back(item_token(tok));
        }
    }
    if (std::set<int>(out.begin(), out.end()).size() != out.size())
        fail(ErrorKind::InvalidArgument, fmt::format("item list '{}' repeats an item", text));
    return out;
}

std::vector<std::size_t> parse_size_list(std::string_view text) {
    std::vector<std::size_t> out;
    for (auto tok : split(text, ',')) {
        std::string_view lo, hi;
        if (split_range(tok, lo, hi)) {
            const auto a = size_token(lo);
            const auto b = size_token(hi);
            if (b < a) fail(ErrorKind::InvalidArgument, fmt::format("descending size range '{}'", tok));
            for (auto n = a; n <= b; ++n) out.push_back(n);
        } else {
            out.push_back(size_token(tok));
        }
    }
    return out;
}

std::string dataset_digest(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("fnv1a64:{:016x}", h);
}

ojson to_json(const RunConfig& c) {
    ojson j;
    j["command"] = c.command;
    j["input"] = c.input;
    j["format"] = std::string(to_string(c.format));
    j["out"] = c.out;
    j["seed"] = c.seed;
    j["items"] = item_labels(c.items);
    j["factors"] = c.factors ? ojson(*c.factors) : ojson("auto");
    j["promax_power"] = c.promax_power;
    j["force"] = c.force;
    j["salient_threshold"] = c.salient_threshold;
    j["dread_items"] = item_labels(c.dread_items);
    j["unknown_items"] = item_labels(c.unknown_items);
    j["screen_flag_threshold"] = c.screen_flag_threshold;
    j["risks"] = c.risks;
    j["sweep"] = c.sweep;
    j["sweep_sizes"] = c.sweep_sizes;
    j["repetitions"] = c.repetitions;
    j["no_eval"] = c.no_eval;
    j["with_replacement"] = c.with_replacement;
    j["r4_stratum"] = c.r4_stratum == R4Stratum::Pooled ? "pooled" : "per-risk";
    j["sweep_scope"] = c.sweep_scope == SweepScope::Pooled ? "pooled" : "per-risk";
    return j;
}

DescribeSection run_describe(const SurveyDataset& ds, const RunConfig& cfg) {
    DescribeSection out;
    out.attributes = attribute_summary(ds);
    const auto dread = make_subscale("dread", cfg.dread_items);
    const auto unknown = make_subscale("unknown", cfg.unknown_items);
    for (const auto& risk : ds.risk_catalog()) {
        auto impact = group_stats(ds, risk, ValueSelector::impact());
        out.impact_by_frequency.push_back({risk, impact});
        out.subscale_means.push_back({risk, impact, group_stats(ds, risk, dread.selector()),
                                      group_stats(ds, risk, unknown.selector())});
    }
    return out;
}

std::vector<ScreenRow> run_screen(const SurveyDataset& ds, const RunConfig& cfg) {
    if (ds.empty()) fail(ErrorKind::EmptyDataset, "screening an empty dataset");
    std::vector<double> q1, q2;
    for (const auto& r : ds.responses()) {
        q1.push_back(r.impact());
        q2.push_back(r.frequency());
    }
    auto profile_series = [&](auto&& get) {
        std::vector<double> v;
        for (const auto& r : ds.responses()) v.push_back(get(ds.profile(r.respondent_id)));
        return v;
    };

    std::vector<ScreenRow> rows;
    auto finish = [&](ScreenRow row) {
        row.flagged = (row.impact && std::abs(*row.impact) >= cfg.screen_flag_threshold) ||
                      (row.frequency && std::abs(*row.frequency) >= cfg.screen_flag_threshold);
        rows.push_back(std::move(row));
    };
    auto pearson_row = [&](std::string name, const std::vector<double>& attr) {
        ScreenRow row{std::move(name), "pearson", std::nullopt, std::nullopt, false, ""};
        try {
            row.impact = pearson(attr, q1).r;
            row.frequency = pearson(attr, q2).r;
        } catch (const Error& e) {
            row.note = e.what();
        }
        finish(std::move(row));
    };

    pearson_row("number_of_employees",
                profile_series([](const RespondentProfile& p) { return static_cast<double>(p.employees); }));
    pearson_row("years_of_experience",
                profile_series([](const RespondentProfile& p) { return p.years_experience; }));
    pearson_row("average_team_size",
                profile_series([](const RespondentProfile& p) { return static_cast<double>(p.team_size); }));
    for (auto pt : kProcessTypes) {
        std::vector<int> groups;
        for (const auto& r : ds.responses()) groups.push_back(ds.profile(r.respondent_id).process[pt] ? 1 : 0);
        ScreenRow row{std::string(process_name(pt)), "correlation_ratio", std::nullopt, std::nullopt, false, ""};
        try {
            row.impact = correlation_ratio(groups, q1);
            row.frequency = correlation_ratio(groups, q2);
        } catch (const Error& e) {
            row.note = e.what();
        }
        finish(std::move(row));
    }
    return rows;
}

FactorSection run_factor(const SurveyDataset& ds, const RunConfig& cfg) {
    if (cfg.items.size() < 3) fail(ErrorKind::TooFewItems, "factor analysis needs at least three items");
    FactorSection out;
    const auto r = correlation_matrix(ds, cfg.items);
    out.suitability = suitability(r, ds.size());
    out.gate_passed = out.suitability.adequate();
    out.forced = cfg.force;
    if (!out.gate_passed && !cfg.force)
        fail(ErrorKind::SuitabilityGateFailed,
             fmt::format("factor analysis not applicable: KMO = {:.3f} (needs > 0.5), Bartlett p = {:.3g} "
                         "(needs < 0.05); pass --force to continue",
                         out.suitability.kmo, out.suitability.bartlett_p));

    std::size_t m = 0;
    if (cfg.factors) {
        m = *cfg.factors;
    } else {
        out.search = search_factor_count(r, cfg.promax_power, cfg.salient_threshold);
        m = out.search->chosen;
    }
    const auto unrotated = extract_uls(r, m);
    out.solution = m >= 2 ? rotate_promax(unrotated, cfg.promax_power) : unrotated;
    out.salient = salient_items(out.solution, cfg.salient_threshold);

    const auto dread = make_subscale("dread", cfg.dread_items);
    const auto unknown = make_subscale("unknown", cfg.unknown_items);
    out.reliabilities.emplace_back(dread, cronbach_alpha(ds, dread.items));
    out.reliabilities.emplace_back(unknown, cronbach_alpha(ds, unknown.items));
    out.stratified = stratified_factor_correlations(ds, dread, unknown);
    return out;
}

CalibrateSection run_calibrate(const SurveyDataset& ds, const RunConfig& cfg) {
    std::vector<RiskId> risks;
    if (cfg.risks.empty()) {
        risks = ds.risk_catalog();
    } else {
        for (const auto& s : cfg.risks) {
            RiskId id(s);
            if (!ds.has_risk(id)) fail(ErrorKind::UnknownRisk, fmt::format("unknown risk '{}'", s));
            risks.push_back(id);
        }
    }
    const auto dread = make_subscale("dread", cfg.dread_items);
    const auto unknown = make_subscale("unknown", cfg.unknown_items);
    CalibrationFrame frame = make_frame(ds, dread, unknown);
    // Restrict to the selected risks so pooled fits and sweeps see only them.
    {
        CalibrationFrame selected;
        selected.risks = risks;
        for (const auto& o : frame.rows)
            if (std::find(risks.begin(), risks.end(), o.risk) != risks.end()) selected.rows.push_back(o);
        frame = std::move(selected);
    }

    CalibrateSection out;
    out.models = fit_all(frame, risks, FitOptions{cfg.r4_stratum});
    std::vector<CalibrationRow> rows;
    for (const auto& risk : risks) {
        auto r = predict_impact(out.models, risk);
        rows.insert(rows.end(), r.begin(), r.end());
    }
    if (cfg.no_eval) {
        out.results.rows = std::move(rows);
        out.evaluated = false;
        return out;
    }
    out.results = evaluate(frame, std::move(rows));
    out.evaluated = true;
    if (cfg.sweep) {
        SweepOptions so;
        so.sizes = cfg.sweep_sizes;
        so.repetitions = cfg.repetitions;
        so.seed = cfg.seed;
        so.with_replacement = cfg.with_replacement;
        so.scope = cfg.sweep_scope;
        out.sweep = subset_mean_sweep(frame, so);
        out.rq2 = rq2_compare(*out.sweep, out.results);
    }
    return out;
}

std::string validation_summary(const SurveyDataset& ds) {
    return fmt::format("{} responses, {} respondents, {} risks", ds.size(), ds.profiles().size(),
                       ds.risk_catalog().size());
}

ReportBundle run_on_text(const RunConfig& input_cfg, std::string_view csv_text) {
    RunConfig cfg = input_cfg;
    static const std::set<std::string> kCommands = {"describe", "screen", "factor", "calibrate", "report"};
    if (!kCommands.contains(cfg.command))
        fail(ErrorKind::InvalidArgument, fmt::format("unknown command '{}'", cfg.command));
    if (cfg.command == "report" && !cfg.no_eval) cfg.sweep = true;

    const auto ds = parse_survey(csv_text);
    ReportBundle b;
    b.config = cfg;
    b.digest = dataset_digest(csv_text);
    b.responses = ds.size();
    b.respondents = ds.profiles().size();
    b.risks = ds.risk_catalog();

    const bool all = cfg.command == "report";
    if (all || cfg.command == "describe") b.describe = run_describe(ds, cfg);
    if (all || cfg.command == "screen") b.screen = run_screen(ds, cfg);
    if (all || cfg.command == "factor") b.factor = run_factor(ds, cfg);
    if (all || cfg.command == "calibrate") b.calibrate = run_calibrate(ds, cfg);
    return b;
}

ReportBundle run_command(const RunConfig& cfg) { return run_on_text(cfg, read_text_file(cfg.input)); }

namespace {

ojson group_json(const GroupStats& g) {
    ojson j;
    j["value"] = g.value_name;
    auto groups = ojson::array();
    auto row_json = [](const GroupRow& r) {
        return ojson{{"label", r.label}, {"mean", r.mean}, {"count", r.count}, {"sd", opt_json(r.sd)}};
    };
    for (const auto& r : g.groups) groups.push_back(row_json(r));
    j["groups"] = groups;
    j["total"] = row_json(g.overall);
    if (g.anova)
        j["anova"] = {{"f", g.anova->f},
                      {"df_between", g.anova->df_between},
                      {"df_within", g.anova->df_within},
                      {"p_value", g.anova->p_value}};
    else
        j["anova"] = nullptr;
    return j;
}

ojson categories_json(const std::vector<CategoryCount>& cats) {
    auto arr = ojson::array();
    for (const auto& c : cats) arr.push_back({{"label", c.label}, {"count", c.count}, {"ratio", c.ratio}});
    return arr;
}

ojson salient_json(const std::vector<std::vector<SalientItem>>& s) {
    auto arr = ojson::array();
    for (const auto& f : s) {
        auto items = ojson::array();
        for (const auto& it : f) items.push_back({{"item", it.item}, {"loading", it.loading}});
        arr.push_back(items);
    }
    return arr;
}

ojson correlation_json(const CorrelationResult& c) {
    return {{"r", c.r}, {"p_value", c.p_value}, {"n", c.n}};
}

ojson describe_json(const DescribeSection& d) {
    ojson j;
    const auto& a = d.attributes;
    j["attributes"] = {{"respondents", a.respondents},
                       {"employees", categories_json(a.employees)},
                       {"team_size", categories_json(a.team_size)},
                       {"process", categories_json(a.process)},
                       {"years_experience",
                        {{"mean", a.years_mean}, {"median", a.years_median}, {"min", a.years_min}, {"max", a.years_max}}}};
    auto impact = ojson::array();
    for (const auto& s : d.impact_by_frequency) {
        auto g = group_json(s.impact);
        g["risk"] = s.risk.str();
        impact.push_back(g);
    }
    j["impact_by_frequency"] = impact;
    auto sub = ojson::array();
    for (const auto& s : d.subscale_means)
        sub.push_back({{"risk", s.risk.str()},
                       {"impact", group_json(s.impact)},
                       {"dread", group_json(s.dread)},
                       {"unknown", group_json(s.unknown)}});
    j["subscale_means"] = sub;
    return j;
}

ojson screen_json(const std::vector<ScreenRow>& rows) {
    auto arr = ojson::array();
    for (const auto& r : rows)
        arr.push_back({{"attribute", r.attribute},
                       {"method", r.method},
                       {"impact", opt_json(r.impact)},
                       {"frequency", opt_json(r.frequency)},
                       {"flagged", r.flagged},
                       {"note", r.note}});
    return arr;
}

ojson factor_json(const FactorSection& f) {
    ojson j;
    j["suitability"] = {{"kmo", f.suitability.kmo},
                        {"bartlett_chi2", f.suitability.bartlett_chi2},
                        {"bartlett_df", f.suitability.bartlett_df},
                        {"bartlett_p", f.suitability.bartlett_p},
                        {"adequate", f.suitability.adequate()}};
    j["gate_passed"] = f.gate_passed;
    j["forced"] = f.forced;
    if (f.search) {
        auto cands = ojson::array();
        for (const auto& c : f.search->candidates)
            cands.push_back({{"factors", c.factors},
                             {"heywood", c.heywood},
                             {"note", c.note},
                             {"salient_items", salient_json(c.salient)}});
        j["factor_count_search"] = {{"kaiser", f.search->kaiser}, {"chosen", f.search->chosen}, {"candidates", cands}};
    } else {
        j["factor_count_search"] = nullptr;
    }
    j["solution"] = to_json(f.solution);
    j["salient_items"] = salient_json(f.salient);
    auto rel = ojson::array();
    for (const auto& [def, r] : f.reliabilities)
        rel.push_back({{"subscale", def.name},
                       {"items", item_labels(def.items)},
                       {"alpha", r.alpha},
                       {"k", r.k},
                       {"acceptable", r.acceptable}});
    j["reliability"] = rel;
    auto strat = ojson::array();
    for (const auto& s : f.stratified)
        strat.push_back(
            {{"frequency", s.frequency}, {"dread", correlation_json(s.dread)}, {"unknown", correlation_json(s.unknown)}});
    j["stratified_correlations"] = strat;
    return j;
}

ojson calibrate_json(const CalibrateSection& c) {
    ojson j;
    j["models"] = to_json(c.models);
    j["evaluated"] = c.evaluated;
    j["results"] = to_json(c.results);
    j["sweep"] = c.sweep ? to_json(*c.sweep) : ojson(nullptr);
    j["rq2"] = to_json(c.rq2);
    return j;
}

}  // namespace

std::string render_json(const ReportBundle& b) {
    ojson j;
    j["toolkit"] = "riskcal";
    j["version"] = std::string(toolkit_version());
    j["schema_version"] = 1;
    j["command"] = b.config.command;
    j["config"] = to_json(b.config);
    j["seed"] = b.config.seed;
    auto risks = ojson::array();
    for (const auto& r : b.risks) risks.push_back(r.str());
    j["dataset"] = {{"digest", b.digest}, {"responses", b.responses}, {"respondents", b.respondents}, {"risks", risks}};
    ojson sections = ojson::object();
    if (b.describe) sections["describe"] = describe_json(*b.describe);
    if (b.screen) sections["screen"] = screen_json(*b.screen);
    if (b.factor) sections["factor"] = factor_json(*b.factor);
    if (b.calibrate) sections["calibrate"] = calibrate_json(*b.calibrate);
    j["sections"] = sections;
    return j.dump(2) + "\n";
}

namespace {

std::string f1(double v) { return fmt::format("{:.1f}", v + 0.0); }
std::string f2(double v) { return fmt::format("{:.2f}", v + 0.0); }
std::string opt2(const std::optional<double>& v) { return v ? f2(*v) : "n/a"; }
std::string opt1(const std::optional<double>& v) { return v ? f1(*v) : "n/a"; }

std::string frequency_label(const std::string& level) {
    if (level == "1") return "1 (rarely)";
    if (level == "2") return "2 (occasionally)";
    if (level == "3") return "3 (often)";
    return level;
}

void markdown_describe(std::string& md, const DescribeSection& d) {
    const auto& a = d.attributes;
    md += "## Respondent attributes\n\n";
    md += fmt::format("Respondents: {}. Years of experience: mean {}, median {}.\n\n", a.respondents,
                      f1(a.years_mean), f1(a.years_median));
    auto cats = [&](const char* title, const std::vector<CategoryCount>& c) {
        md += fmt::format("| {} | Respondents | Ratio |\n|---|---|---|\n", title);
        for (const auto& x : c) md += fmt::format("| {} | {} | {} |\n", x.label, x.count, f2(x.ratio));
        md += "\n";
    };
    cats("Employees", a.employees);
    cats("Team size", a.team_size);
    cats("Process", a.process);

    md += "## Risk impact by frequency of experience\n\n";
    md += "| Risk | Frequency | Average | Respondents | SD |\n|---|---|---|---|---|\n";
    for (const auto& s : d.impact_by_frequency) {
        for (const auto& g : s.impact.groups)
            md += fmt::format("| {} | {} | {} | {} | {} |\n", s.risk.str(), frequency_label(g.label), f1(g.mean),
                              g.count, opt1(g.sd));
        md += fmt::format("| {} | total | {} | {} | {} |\n", s.risk.str(), f1(s.impact.overall.mean),
                          s.impact.overall.count, opt1(s.impact.overall.sd));
    }
    md += "\n";
    for (const auto& s : d.impact_by_frequency)
        if (s.impact.anova)
            md += fmt::format("Risk {}: one-way ANOVA F = {}, p = {}.\n", s.risk.str(), f2(s.impact.anova->f),
                              f2(s.impact.anova->p_value));
    md += "\n## Subscale scores by frequency of experience\n\n";
    md += "| Risk | Frequency | Respondents | Impact | Dread | Unknown |\n|---|---|---|---|---|---|\n";
    for (const auto& s : d.subscale_means)
        for (std::size_t k = 0; k < s.impact.groups.size(); ++k)
            md += fmt::format("| {} | {} | {} | {} | {} | {} |\n", s.risk.str(),
                              frequency_label(s.impact.groups[k].label), s.impact.groups[k].count,
                              f1(s.impact.groups[k].mean), f1(s.dread.groups[k].mean), f1(s.unknown.groups[k].mean));
    md += "\n";
}

void markdown_screen(std::string& md, const std::vector<ScreenRow>& rows) {
    md += "## Respondent attributes vs. impact and frequency\n\n";
    md += "| Attribute | Method | Impact (Q1) | Frequency (Q2) | Flag |\n|---|---|---|---|---|\n";
    for (const auto& r : rows)
        md += fmt::format("| {} | {} | {} | {} | {} |\n", r.attribute, r.method, opt2(r.impact), opt2(r.frequency),
                          r.flagged ? "check" : "");
    md += "\n";
}

void markdown_factor(std::string& md, const FactorSection& f, double threshold) {
    md += "## Factor analysis\n\n";
    md += fmt::format("KMO = {}, Bartlett chi2 = {} (df {}), p = {}.{}\n\n", f2(f.suitability.kmo),
                      f2(f.suitability.bartlett_chi2), f.suitability.bartlett_df, f2(f.suitability.bartlett_p),
                      f.gate_passed ? "" : " Suitability gate failed; continued with --force.");
    if (f.search) {
        md += fmt::format("Kaiser rule: {} factor(s). Chosen: {}.\n\n", f.search->kaiser, f.search->chosen);
        for (const auto& c : f.search->candidates) {
            md += fmt::format("- m = {}: {}", c.factors, c.heywood ? "rejected (" + c.note + ")" : "accepted");
            for (std::size_t k = 0; k < c.salient.size(); ++k) {
                std::vector<std::string> names;
                for (const auto& s : c.salient[k]) names.push_back(s.item);
                md += fmt::format("; factor {}: {{{}}}", k + 1, fmt::join(names, ", "));
            }
            md += "\n";
        }
        md += "\n";
    }
    const auto& s = f.solution;
    md += fmt::format("Factor pattern ({} rotation", to_string(s.rotation.kind));
    if (s.rotation.kind == RotationKind::Promax) md += fmt::format(", power {}", s.rotation.promax_power);
    md += "):\n\n| Item |";
    for (std::size_t k = 0; k < s.factors(); ++k) md += fmt::format(" F{} |", k + 1);
    md += " h2 |\n|---|";
    for (std::size_t k = 0; k <= s.factors(); ++k) md += "---|";
    md += "\n";
    for (std::size_t i = 0; i < s.items.size(); ++i) {
        md += fmt::format("| {} |", s.items[i]);
        for (std::size_t k = 0; k < s.factors(); ++k) {
            const double v = s.loadings(i, k);
            md += std::abs(v) > threshold ? fmt::format(" *{}* |", f2(v)) : fmt::format(" {} |", f2(v));
        }
        md += fmt::format(" {} |\n", f2(s.communalities[i]));
    }
    md += fmt::format("\nVariance explained: {}%.", fmt::format("{:.1f}", 100.0 * s.variance_explained_ratio));
    if (s.factors() >= 2) md += fmt::format(" Factor correlation (F1, F2): {}.", f2(s.factor_correlation(0, 1)));
    md += "\n\n";
    for (const auto& [def, r] : f.reliabilities)
        md += fmt::format("- Cronbach's alpha, {} ({}): {}{}\n", def.name, fmt::join(item_labels(def.items), ", "),
                          f2(r.alpha), r.acceptable ? "" : " (below 0.5)");
    md += "\n| Frequency | Dread r | Dread p | Unknown r | Unknown p | Respondents |\n|---|---|---|---|---|---|\n";
    for (const auto& st : f.stratified)
        md += fmt::format("| {} | {} | {} | {} | {} | {} |\n", frequency_label(std::to_string(st.frequency)),
                          f2(st.dread.r), f2(st.dread.p_value), f2(st.unknown.r), f2(st.unknown.p_value), st.dread.n);
    md += "\n";
}

void markdown_calibrate(std::string& md, const CalibrateSection& c) {
    md += "## Calibration\n\n";
    md += "| Model | Risk | Target | Prediction | Reference | Absolute error |\n|---|---|---|---|---|---|\n";
    for (const auto& r : c.results.rows)
        md += fmt::format("| {} | {} | {} | {} | {} | {} |\n", to_string(r.model), r.risk.str(), to_string(r.target),
                          f2(r.prediction), opt2(r.reference), opt2(r.absolute_error));
    md += "\n";
    if (c.evaluated) {
        md += "| Model | Average absolute error |\n|---|---|\n";
        for (const auto& a : c.results.averages)
            md += fmt::format("| {} | {} |\n", to_string(a.model), f2(a.mean_absolute_error));
        std::vector<std::string> ranking;
        for (auto id : c.results.ranking) ranking.emplace_back(to_string(id));
        md += fmt::format("\nRanking (lowest error first): {}.\n\n", fmt::join(ranking, ", "));
    }
    if (c.sweep) {
        md += fmt::format("Subset-mean sweep: {} repetitions, seed {}.\n\n", c.sweep->repetitions, c.sweep->seed);
        for (const auto& s : c.rq2) {
            md += fmt::format("### {}\n\n| Size | Subset-mean error |", s.risk ? "Risk " + s.risk->str() : "Pooled");
            const auto& labels = s.rows.empty() ? std::vector<std::pair<std::string, double>>{} : s.rows.front().model_errors;
            for (const auto& [l, e] : labels) {
                (void)e;
                md += fmt::format(" {} error |", l);
            }
            md += " Preferred |\n|---|---|";
            for (std::size_t k = 0; k < labels.size(); ++k) md += "---|";
            md += "---|\n";
            for (const auto& row : s.rows) {
                md += fmt::format("| {} | {} |", row.size, f2(row.sweep_error));
                for (const auto& [l, e] : row.model_errors) {
                    (void)l;
                    md += fmt::format(" {} |", f2(e));
                }
                md += fmt::format(" {} |\n", row.preferred);
            }
            md += "\n";
            for (const auto& x : s.crossovers)
                md += x.size ? fmt::format("- subset mean beats {} from size {}\n", x.model, *x.size)
                             : fmt::format("- subset mean never beats {}\n", x.model);
            md += "\n";
        }
    }
}

}  // namespace

std::string render_markdown(const ReportBundle& b) {
    std::string md = b.config.command == "report" ? std::string("# riskcal report\n\n")
                                                   : fmt::format("# riskcal {} report\n\n", b.config.command);
    md += fmt::format("- toolkit version: {}\n- dataset digest: {}\n- responses: {}, respondents: {}\n- seed: {}\n\n",
                      toolkit_version(), b.digest, b.responses, b.respondents, b.config.seed);
    md += "Effective configuration:\n\n```json\n" + to_json(b.config).dump(2) + "\n```\n\n";
    if (b.describe) markdown_describe(md, *b.describe);
    if (b.screen) markdown_screen(md, *b.screen);
    if (b.factor) markdown_factor(md, *b.factor, b.config.salient_threshold);
    if (b.calibrate) markdown_calibrate(md, *b.calibrate);
    return md;
}

std::map<std::string, std::string> render_csv(const ReportBundle& b) {
    std::map<std::string, std::string> files;
    auto num = [](double v) { return fmt::format("{}", v); };
    auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
    if (b.describe) {
        std::string t = "risk,frequency,mean,count,sd\n";
        for (const auto& s : b.describe->impact_by_frequency) {
            for (const auto& g : s.impact.groups)
                t += fmt::format("{},{},{},{},{}\n", s.risk.str(), g.label, num(g.mean), g.count, opt(g.sd));
            t += fmt::format("{},total,{},{},{}\n", s.risk.str(), num(s.impact.overall.mean), s.impact.overall.count,
                             opt(s.impact.overall.sd));
        }
        files["impact_by_frequency.csv"] = t;
        std::string u = "risk,frequency,count,impact_mean,dread_mean,unknown_mean\n";
        for (const auto& s : b.describe->subscale_means)
            for (std::size_t k = 0; k < s.impact.groups.size(); ++k)
                u += fmt::format("{},{},{},{},{},{}\n", s.risk.str(), s.impact.groups[k].label, s.impact.groups[k].count,
                                 num(s.impact.groups[k].mean), num(s.dread.groups[k].mean), num(s.unknown.groups[k].mean));
        files["subscale_means.csv"] = u;
    }
    if (b.screen) {
        std::string t = "attribute,method,impact,frequency,flagged\n";
        for (const auto& r : *b.screen)
            t += fmt::format("{},{},{},{},{}\n", r.attribute, r.method, opt(r.impact), opt(r.frequency), r.flagged ? 1 : 0);
        files["screening.csv"] = t;
    }
    if (b.factor) {
        const auto& s = b.factor->solution;
        std::string t = "item";
        for (std::size_t k = 0; k < s.factors(); ++k) t += fmt::format(",f{}", k + 1);
        t += ",communality\n";
        for (std::size_t i = 0; i < s.items.size(); ++i) {
            t += s.items[i];
            for (std::size_t k = 0; k < s.factors(); ++k) t += "," + num(s.loadings(i, k));
            t += "," + num(s.communalities[i]) + "\n";
        }
        files["factor_pattern.csv"] = t;
    }
    if (b.calibrate) {
        std::string t = "model,risk,target,prediction,reference,absolute_error\n";
        for (const auto& r : b.calibrate->results.rows)
            t += fmt::format("{},{},{},{},{},{}\n", to_string(r.model), r.risk.str(), to_string(r.target),
                             num(r.prediction), opt(r.reference), opt(r.absolute_error));
        files["predictions.csv"] = t;
        if (b.calibrate->evaluated) files["model_errors.csv"] = model_errors_csv(b.calibrate->results);
        if (b.calibrate->sweep) files["sweep.csv"] = sweep_csv(*b.calibrate->sweep, b.calibrate->rq2);
    }
    return files;
}

}  // namespace riskcal
