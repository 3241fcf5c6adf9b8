// Command-line front end: validate, describe, screen, factor, calibrate, report.
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "riskcal/error.hpp"
#include "riskcal/report.hpp"

namespace fs = std::filesystem;
using namespace riskcal;

namespace {

void write_file(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, fmt::format("cannot write '{}'", path.string()));
    out << text;
    if (!out) fail(ErrorKind::Io, fmt::format("failed writing '{}'", path.string()));
}

void emit(const ReportBundle& bundle, const RunConfig& cfg) {
    switch (cfg.format) {
        case OutputFormat::Json:
        case OutputFormat::Markdown: {
            const auto text = cfg.format == OutputFormat::Json ? render_json(bundle) : render_markdown(bundle);
            if (cfg.out.empty())
                std::cout << text;
            else
                write_file(cfg.out, text);
            return;
        }
        case OutputFormat::Csv: {
            const auto files = render_csv(bundle);
            if (cfg.out.empty()) {
                for (const auto& [name, body] : files) std::cout << "# " << name << "\n" << body << "\n";
                return;
            }
            std::error_code ec;
            fs::create_directories(cfg.out, ec);
            if (ec) fail(ErrorKind::Io, fmt::format("cannot create directory '{}': {}", cfg.out, ec.message()));
            for (const auto& [name, body] : files) write_file(fs::path(cfg.out) / name, body);
            return;
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Risk perception survey analysis and impact calibration"};
    app.set_version_flag("--version", std::string(toolkit_version()));
    app.require_subcommand(1);

    RunConfig cfg;
    std::string format = "json";
    std::string items, dread, unknown, risks, sizes, factors = "auto", r4 = "pooled", scope = "pooled";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-i,--input", cfg.input, "survey CSV file")->required();
        sub->add_option("-f,--format", format, "json, markdown or csv")
            ->check(CLI::IsMember({"json", "markdown", "md", "csv"}));
        sub->add_option("-o,--out", cfg.out, "output file (csv: directory); default stdout");
        sub->add_option("--seed", cfg.seed, "random seed for the subset sweep");
        sub->add_option("--dread-items", dread, "items of the dread subscale, e.g. Q4,Q5");
        sub->add_option("--unknown-items", unknown, "items of the unknown subscale, e.g. Q9,Q10");
    };
    auto add_factor = [&](CLI::App* sub) {
        sub->add_option("--items", items, "items to factor, e.g. Q3..Q11");
        sub->add_option("--factors", factors, "number of factors or 'auto'");
        sub->add_option("--promax-power", cfg.promax_power, "promax exponent")->check(CLI::Range(2, 16));
        sub->add_flag("--force", cfg.force, "continue when KMO or Bartlett rejects the data");
    };
    auto add_calibrate = [&](CLI::App* sub) {
        sub->add_option("--risks", risks, "comma-separated risk ids; default all");
        sub->add_flag("--sweep", cfg.sweep, "run the random subset-mean sweep");
        sub->add_option("--sweep-sizes", sizes, "subset sizes, e.g. 1..20 or 1,2,5");
        sub->add_option("--repetitions", cfg.repetitions, "draws per subset size")->check(CLI::PositiveNumber);
        sub->add_flag("--sweep-with-replacement", cfg.with_replacement, "draw subsets with replacement");
        sub->add_option("--sweep-scope", scope, "pooled or per-risk")->check(CLI::IsMember({"pooled", "per-risk"}));
        sub->add_option("--r4-stratum", r4, "pooled or per-risk")->check(CLI::IsMember({"pooled", "per-risk"}));
        sub->add_flag("--no-eval", cfg.no_eval, "predict only; skip the held-out comparison");
    };

    auto* validate = app.add_subcommand("validate", "check a survey file and print a summary");
    validate->add_option("-i,--input", cfg.input, "survey CSV file")->required();

    auto* describe = app.add_subcommand("describe", "respondent attributes and impact tables");
    add_common(describe);
    auto* screen = app.add_subcommand("screen", "attribute correlations with impact and frequency");
    add_common(screen);
    auto* factor = app.add_subcommand("factor", "exploratory factor analysis of the Likert items");
    add_common(factor);
    add_factor(factor);
    auto* calibrate = app.add_subcommand("calibrate", "fit calibration models and evaluate them");
    add_common(calibrate);
    add_calibrate(calibrate);
    auto* report = app.add_subcommand("report", "all analyses in one document");
    add_common(report);
    add_factor(report);
    add_calibrate(report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (validate->parsed()) {
            const auto ds = read_survey_file(cfg.input);
            std::cout << validation_summary(ds) << "\n";
            return 0;
        }
        for (auto* sub : {describe, screen, factor, calibrate, report})
            if (sub->parsed()) cfg.command = sub->get_name();

        cfg.format = format == "csv" ? OutputFormat::Csv
                     : format == "json" ? OutputFormat::Json
                                        : OutputFormat::Markdown;
        if (!items.empty()) cfg.items = parse_item_list(items);
        if (!dread.empty()) cfg.dread_items = parse_item_list(dread);
        if (!unknown.empty()) cfg.unknown_items = parse_item_list(unknown);
        if (!sizes.empty()) cfg.sweep_sizes = parse_size_list(sizes);
        if (!risks.empty()) {
            std::stringstream ss(risks);
            for (std::string r; std::getline(ss, r, ',');)
                if (!r.empty()) cfg.risks.push_back(r);
        }
        if (factors != "auto") {
            try {
                const long v = std::stol(factors);
                if (v < 1) throw std::out_of_range("factors");
                cfg.factors = static_cast<std::size_t>(v);
            } catch (const std::logic_error&) {
                std::cerr << "error: --factors expects a positive integer or 'auto'\n";
                return 1;
            }
        }
        cfg.r4_stratum = r4 == "per-risk" ? R4Stratum::PerRisk : R4Stratum::Pooled;
        cfg.sweep_scope = scope == "per-risk" ? SweepScope::PerRisk : SweepScope::Pooled;

        emit(run_command(cfg), cfg);
        return 0;
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
        return exit_code(e.kind());
    }
}
