#include "riskcal/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "riskcal/error.hpp"
#include "riskcal/rng.hpp"

namespace riskcal {

CalibrationFrame make_frame(const SurveyDataset& ds, const SubscaleDefinition& dread,
                            const SubscaleDefinition& unknown) {
    const auto d = subscale_scores(ds, dread);
    const auto u = subscale_scores(ds, unknown);
    CalibrationFrame f;
    f.risks = ds.risk_catalog();
    f.rows.reserve(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& r = ds.responses()[i];
        f.rows.push_back({r.risk, r.frequency(), static_cast<double>(r.impact()), d[i], u[i]});
    }
    return f;
}

std::string_view to_string(ModelId id) {
    switch (id) {
        case ModelId::R1: return "R1";
        case ModelId::M1: return "M1";
        case ModelId::R2: return "R2";
        case ModelId::M2: return "M2";
        case ModelId::R3: return "R3";
        case ModelId::M3: return "M3";
        case ModelId::R4R: return "R4R";
        case ModelId::R4M: return "R4M";
    }
    return "?";
}

std::string_view to_string(Variable v) {
    switch (v) {
        case Variable::Impact: return "q1";
        case Variable::Frequency: return "q2";
        case Variable::Dread: return "dread";
        case Variable::Unknown: return "unknown";
    }
    return "?";
}

std::string_view to_string(Method m) { return m == Method::Regression ? "regression" : "mean"; }

ModelId parse_model_id(std::string_view s) {
    for (auto id : kAllModels)
        if (to_string(id) == s) return id;
    fail(ErrorKind::InvalidArgument, fmt::format("unknown model '{}'", s));
}

std::string ModelSpec::label() const {
    return risk ? fmt::format("{}_{}", to_string(id), risk->str()) : std::string(to_string(id));
}

ModelSpec model_spec(ModelId id, std::optional<RiskId> risk) {
    ModelSpec s;
    s.id = id;
    s.risk = std::move(risk);
    switch (id) {
        case ModelId::R1:
            s = {id, s.risk, Variable::Impact, Method::Regression, {Variable::Frequency}, "q2=3"};
            break;
        case ModelId::M1: s = {id, s.risk, Variable::Impact, Method::Mean, {}, "-"}; break;
        case ModelId::R2:
            s = {id, s.risk, Variable::Dread, Method::Regression, {Variable::Frequency}, "q2=3"};
            break;
        case ModelId::M2: s = {id, s.risk, Variable::Dread, Method::Mean, {}, "-"}; break;
        case ModelId::R3:
            s = {id, s.risk, Variable::Unknown, Method::Regression, {Variable::Frequency}, "q2=3"};
            break;
        case ModelId::M3: s = {id, s.risk, Variable::Unknown, Method::Mean, {}, "-"}; break;
        case ModelId::R4R:
            s = {id, s.risk, Variable::Impact, Method::Regression,
                 {Variable::Frequency, Variable::Dread, Variable::Unknown}, "q2=3, dread=R2, unknown=R3"};
            break;
        case ModelId::R4M:
            s = {id, s.risk, Variable::Impact, Method::Regression,
                 {Variable::Frequency, Variable::Dread, Variable::Unknown}, "q2=3, dread=M2, unknown=M3"};
            break;
    }
    return s;
}

namespace {

double value_of(const Observation& o, Variable v) {
    switch (v) {
        case Variable::Impact: return o.impact;
        case Variable::Frequency: return static_cast<double>(o.frequency);
        case Variable::Dread: return o.dread;
        case Variable::Unknown: return o.unknown;
    }
    return 0.0;
}

bool is_r4(ModelId id) { return id == ModelId::R4R || id == ModelId::R4M; }

Variable target_of(ModelId id) { return model_spec(id, std::nullopt).dependent; }

}  // namespace

FittedCalibrationModel fit_model(const CalibrationFrame& frame, const ModelSpec& spec) {
    if (spec.risk && std::find(frame.risks.begin(), frame.risks.end(), *spec.risk) == frame.risks.end())
        fail(ErrorKind::UnknownRisk, fmt::format("unknown risk '{}'", spec.risk->str()));
    if (!spec.risk && !is_r4(spec.id))
        fail(ErrorKind::InvalidArgument, fmt::format("model {} needs a risk", to_string(spec.id)));

    FittedCalibrationModel out;
    out.spec = spec;
    out.fit_stratum =
        spec.risk ? fmt::format("risk={}, q2 in {{1,2}}", spec.risk->str()) : "pooled risks, q2 in {1,2}";

    std::vector<RegressionRow> rows;
    std::vector<double> dep;
    bool has_level1 = false, has_level2 = false;
    for (std::size_t i = 0; i < frame.rows.size(); ++i) {
        const auto& o = frame.rows[i];
        if (o.frequency == 3) continue;
        if (spec.risk && o.risk != *spec.risk) continue;
        out.training_rows.push_back(i);
        has_level1 |= o.frequency == 1;
        has_level2 |= o.frequency == 2;
        RegressionRow row;
        for (auto v : spec.independents) row.predictors.push_back(value_of(o, v));
        row.dependent = value_of(o, spec.dependent);
        dep.push_back(row.dependent);
        rows.push_back(std::move(row));
    }
    out.n_fit = rows.size();
    if (rows.size() < 3)
        fail(ErrorKind::TooFewRows,
             fmt::format("{}: {} responses with q2 in {{1,2}}, at least 3 needed", spec.label(), rows.size()));
    out.dependent_min = *std::min_element(dep.begin(), dep.end());
    out.dependent_max = *std::max_element(dep.begin(), dep.end());

    if (spec.method == Method::Mean) {
        out.mean = mean(dep);
        return out;
    }
    if (!(has_level1 && has_level2))
        fail(ErrorKind::DegenerateStratum,
             fmt::format("{}: q2 takes a single level in the fit stratum; regression on q2 is impossible",
                         spec.label()));
    std::vector<std::string> names;
    for (auto v : spec.independents) names.emplace_back(to_string(v));
    out.regression = ols_fit(rows, std::move(names), std::string(to_string(spec.dependent)));
    return out;
}

const FittedCalibrationModel* FittedModelSet::find(ModelId id, const std::optional<RiskId>& risk) const {
    for (const auto& m : models)
        if (m.spec.id == id && m.spec.risk == risk) return &m;
    return nullptr;
}

FittedModelSet fit_all(const CalibrationFrame& frame, std::span<const RiskId> risks,
                       const FitOptions& options) {
    FittedModelSet set;
    set.options = options;
    for (const auto& risk : risks)
        for (auto id : {ModelId::R1, ModelId::M1, ModelId::R2, ModelId::M2, ModelId::R3, ModelId::M3})
            set.models.push_back(fit_model(frame, model_spec(id, risk)));
    if (options.r4_stratum == R4Stratum::Pooled) {
        // Pooled over the selected risks only.
        CalibrationFrame pooled;
        pooled.risks.assign(risks.begin(), risks.end());
        std::vector<std::size_t> origin;
        for (std::size_t i = 0; i < frame.rows.size(); ++i)
            if (std::find(risks.begin(), risks.end(), frame.rows[i].risk) != risks.end()) {
                pooled.rows.push_back(frame.rows[i]);
                origin.push_back(i);
            }
        for (auto id : {ModelId::R4R, ModelId::R4M}) {
            auto fitted = fit_model(pooled, model_spec(id, std::nullopt));
            for (auto& idx : fitted.training_rows) idx = origin[idx];
            set.models.push_back(std::move(fitted));
        }
    } else {
        for (const auto& risk : risks)
            for (auto id : {ModelId::R4R, ModelId::R4M})
                set.models.push_back(fit_model(frame, model_spec(id, risk)));
    }
    return set;
}

namespace {

double predict_single(const FittedCalibrationModel& m) {
    if (m.mean) return *m.mean;
    return ols_predict(*m.regression, std::map<std::string, double>{{"q2", 3.0}});
}

const FittedCalibrationModel& require(const FittedModelSet& set, ModelId id, const RiskId& risk,
                                      ModelId needed_by) {
    const auto* m = set.find(id, risk);
    if (!m)
        fail(ErrorKind::MissingUpstreamModel,
             fmt::format("{} for risk {} needs {}_{}", to_string(needed_by), risk.str(), to_string(id),
                         risk.str()));
    return *m;
}

}  // namespace

std::vector<CalibrationRow> predict_impact(const FittedModelSet& set, const RiskId& risk) {
    std::vector<CalibrationRow> rows;
    for (auto id : kAllModels) {
        const FittedCalibrationModel* m = nullptr;
        if (is_r4(id)) {
            m = set.find(id, risk);
            if (!m) m = set.find(id, std::nullopt);
        } else {
            m = set.find(id, risk);
        }
        if (!m) continue;

        CalibrationRow row;
        row.model = id;
        row.risk = risk;
        row.target = target_of(id);
        if (!is_r4(id)) {
            row.prediction = predict_single(*m);
        } else {
            const bool regression_inputs = id == ModelId::R4R;
            const auto& dread = require(set, regression_inputs ? ModelId::R2 : ModelId::M2, risk, id);
            const auto& unknown = require(set, regression_inputs ? ModelId::R3 : ModelId::M3, risk, id);
            row.prediction = ols_predict(*m->regression, std::map<std::string, double>{
                                                             {"q2", 3.0},
                                                             {"dread", predict_single(dread)},
                                                             {"unknown", predict_single(unknown)}});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

const CalibrationRow* CalibrationResult::find(ModelId id, const RiskId& risk) const {
    for (const auto& r : rows)
        if (r.model == id && r.risk == risk) return &r;
    return nullptr;
}

std::optional<double> CalibrationResult::average(ModelId id) const {
    for (const auto& a : averages)
        if (a.model == id) return a.mean_absolute_error;
    return std::nullopt;
}

CalibrationResult evaluate(const CalibrationFrame& frame, std::vector<CalibrationRow> rows) {
    std::map<std::pair<RiskId, Variable>, double> references;
    for (auto& row : rows) {
        const auto key = std::make_pair(row.risk, row.target);
        auto it = references.find(key);
        if (it == references.end()) {
            std::vector<double> vals;
            for (const auto& o : frame.rows)
                if (o.risk == row.risk && o.frequency == 3) vals.push_back(value_of(o, row.target));
            if (vals.empty())
                fail(ErrorKind::EmptyHoldout,
                     fmt::format("empty holdout stratum: risk {} has no responses with q2 = 3",
                                 row.risk.str()));
            it = references.emplace(key, mean(vals)).first;
        }
        row.reference = it->second;
        row.absolute_error = std::abs(row.prediction - it->second);
    }

    CalibrationResult out;
    out.rows = std::move(rows);
    for (auto id : kAllModels) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : out.rows)
            if (r.model == id) {
                sum += *r.absolute_error;
                ++n;
            }
        if (n > 0) out.averages.push_back({id, sum / static_cast<double>(n)});
    }
    std::vector<ModelAverage> sorted = out.averages;
    std::stable_sort(sorted.begin(), sorted.end(), [](const ModelAverage& a, const ModelAverage& b) {
        return a.mean_absolute_error < b.mean_absolute_error;
    });
    for (const auto& a : sorted) out.ranking.push_back(a.model);
    return out;
}

SweepSeries sweep_values(std::span<const double> holdout, std::span<const std::size_t> sizes,
                         std::size_t repetitions, std::uint64_t seed, bool with_replacement) {
    if (holdout.empty()) fail(ErrorKind::EmptyHoldout, "empty holdout stratum: no responses with q2 = 3");
    if (repetitions < 1) fail(ErrorKind::InvalidArgument, "sweep needs at least one repetition");
    SweepSeries series;
    series.seed = seed;
    series.stratum_size = holdout.size();
    series.stratum_mean = mean(holdout);

    std::vector<std::size_t> all_sizes(sizes.begin(), sizes.end());
    if (all_sizes.empty())
        for (std::size_t n = 1; n <= holdout.size(); ++n) all_sizes.push_back(n);

    for (std::size_t n : all_sizes) {
        if (n < 1) fail(ErrorKind::InvalidArgument, "sweep sizes must be positive");
        if (n > holdout.size())
            fail(ErrorKind::SizeExceedsStratum,
                 fmt::format("sweep size {} exceeds the q2 = 3 stratum ({} responses)", n, holdout.size()));
        SweepCell cell;
        cell.size = n;
        for (std::size_t rep = 0; rep < repetitions; ++rep) {
            CounterRng rng(CounterRng::derive_key(seed, n, rep));
            const auto picks = with_replacement ? sample_with_replacement(rng, holdout.size(), n)
                                                : sample_without_replacement(rng, holdout.size(), n);
            // Summing in ingestion order makes the full-stratum subset reproduce
            // the stratum mean bit for bit.
            auto ordered = picks;
            std::sort(ordered.begin(), ordered.end());
            double s = 0.0;
            for (auto idx : ordered) s += holdout[idx];
            cell.errors.push_back(std::abs(s / static_cast<double>(n) - series.stratum_mean));
        }
        double total = 0.0;
        for (double e : cell.errors) total += e;
        cell.mean_absolute_error = total / static_cast<double>(repetitions);
        series.cells.push_back(std::move(cell));
    }
    return series;
}

SweepResult subset_mean_sweep(const CalibrationFrame& frame, const SweepOptions& options) {
    SweepResult out;
    out.seed = options.seed;
    out.repetitions = options.repetitions;
    out.with_replacement = options.with_replacement;
    out.scope = options.scope;

    auto holdout_of = [&](const std::optional<RiskId>& risk) {
        std::vector<double> v;
        for (const auto& o : frame.rows)
            if (o.frequency == 3 && (!risk || o.risk == *risk)) v.push_back(o.impact);
        return v;
    };

    if (options.scope == SweepScope::Pooled) {
        const auto holdout = holdout_of(std::nullopt);
        out.series.push_back(
            sweep_values(holdout, options.sizes, options.repetitions, options.seed, options.with_replacement));
    } else {
        for (std::size_t i = 0; i < frame.risks.size(); ++i) {
            const auto holdout = holdout_of(frame.risks[i]);
            if (holdout.empty())
                fail(ErrorKind::EmptyHoldout,
                     fmt::format("empty holdout stratum: risk {} has no responses with q2 = 3",
                                 frame.risks[i].str()));
            auto s = sweep_values(holdout, options.sizes, options.repetitions, options.seed + i,
                                  options.with_replacement);
            s.risk = frame.risks[i];
            out.series.push_back(std::move(s));
        }
    }
    return out;
}

Rq2Series rq2_compare_errors(const SweepSeries& series,
                             const std::vector<std::pair<std::string, double>>& model_errors) {
    Rq2Series out;
    out.risk = series.risk;
    for (const auto& [label, err] : model_errors) {
        (void)err;
        out.crossovers.push_back({label, std::nullopt});
    }
    for (const auto& cell : series.cells) {
        Rq2Row row;
        row.size = cell.size;
        row.sweep_error = cell.mean_absolute_error;
        row.model_errors = model_errors;
        std::string best = "subset_mean";
        double best_err = cell.mean_absolute_error;
        // A model ties with the subset mean in its favour; among models the
        // first listed wins.
        for (const auto& [label, err] : model_errors) {
            const bool better = best == "subset_mean" ? err <= best_err : err < best_err;
            if (better) {
                best = label;
                best_err = err;
            }
        }
        row.preferred = best;
        for (std::size_t k = 0; k < model_errors.size(); ++k)
            if (!out.crossovers[k].size && cell.mean_absolute_error < model_errors[k].second)
                out.crossovers[k].size = cell.size;
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::vector<Rq2Series> rq2_compare(const SweepResult& sweep, const CalibrationResult& results,
                                   std::span<const ModelId> models) {
    static constexpr std::array<ModelId, 2> kDefault = {ModelId::R4R, ModelId::M1};
    if (models.empty()) models = kDefault;
    std::vector<Rq2Series> out;
    for (const auto& series : sweep.series) {
        std::vector<std::pair<std::string, double>> errors;
        for (auto id : models) {
            std::optional<double> e;
            if (series.risk) {
                if (const auto* row = results.find(id, *series.risk); row && row->absolute_error)
                    e = *row->absolute_error;
            } else {
                e = results.average(id);
            }
            if (e) errors.emplace_back(std::string(to_string(id)), *e);
        }
        out.push_back(rq2_compare_errors(series, errors));
    }
    return out;
}

namespace {

nlohmann::ordered_json risk_json(const std::optional<RiskId>& r) {
    return r ? nlohmann::ordered_json(r->str()) : nlohmann::ordered_json(nullptr);
}

std::string_view scope_name(SweepScope s) { return s == SweepScope::Pooled ? "pooled" : "per-risk"; }

}  // namespace

nlohmann::ordered_json to_json(const FittedModelSet& set) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& m : set.models) {
        nlohmann::ordered_json j;
        j["model"] = m.spec.label();
        j["model_id"] = std::string(to_string(m.spec.id));
        j["risk"] = risk_json(m.spec.risk);
        j["dependent"] = std::string(to_string(m.spec.dependent));
        j["method"] = std::string(to_string(m.spec.method));
        auto indep = nlohmann::ordered_json::array();
        for (auto v : m.spec.independents) indep.push_back(std::string(to_string(v)));
        j["independents"] = indep;
        j["input_values"] = m.spec.input_values;
        j["fit_stratum"] = m.fit_stratum;
        j["n_fit"] = m.n_fit;
        if (m.regression) {
            nlohmann::ordered_json coef;
            coef["intercept"] = m.regression->intercept;
            for (const auto& [name, c] : m.regression->coefficients) coef[name] = c;
            j["coefficients"] = coef;
        } else {
            j["mean"] = *m.mean;
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

nlohmann::ordered_json to_json(const CalibrationResult& result) {
    nlohmann::ordered_json j;
    j["schema_version"] = kCalibrationSchemaVersion;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : result.rows) {
        nlohmann::ordered_json row;
        row["model"] = std::string(to_string(r.model));
        row["risk"] = r.risk.str();
        row["target"] = std::string(to_string(r.target));
        row["prediction"] = r.prediction;
        row["reference"] = r.reference ? nlohmann::ordered_json(*r.reference) : nlohmann::ordered_json(nullptr);
        row["absolute_error"] =
            r.absolute_error ? nlohmann::ordered_json(*r.absolute_error) : nlohmann::ordered_json(nullptr);
        rows.push_back(std::move(row));
    }
    j["rows"] = rows;
    auto avgs = nlohmann::ordered_json::array();
    for (const auto& a : result.averages)
        avgs.push_back({{"model", std::string(to_string(a.model))}, {"mean_absolute_error", a.mean_absolute_error}});
    j["averages"] = avgs;
    auto ranking = nlohmann::ordered_json::array();
    for (auto id : result.ranking) ranking.push_back(std::string(to_string(id)));
    j["ranking"] = ranking;
    return j;
}

nlohmann::ordered_json to_json(const SweepResult& sweep) {
    nlohmann::ordered_json j;
    j["schema_version"] = kCalibrationSchemaVersion;
    j["seed"] = sweep.seed;
    j["repetitions"] = sweep.repetitions;
    j["with_replacement"] = sweep.with_replacement;
    j["scope"] = std::string(scope_name(sweep.scope));
    j["generator"] = "splitmix64-counter; key = mix(mix(mix(seed) ^ size) ^ repetition)";
    auto series = nlohmann::ordered_json::array();
    for (const auto& s : sweep.series) {
        nlohmann::ordered_json sj;
        sj["risk"] = risk_json(s.risk);
        sj["seed"] = s.seed;
        sj["stratum_size"] = s.stratum_size;
        sj["stratum_mean"] = s.stratum_mean;
        auto cells = nlohmann::ordered_json::array();
        for (const auto& c : s.cells)
            cells.push_back({{"size", c.size}, {"mean_absolute_error", c.mean_absolute_error}, {"errors", c.errors}});
        sj["cells"] = cells;
        series.push_back(std::move(sj));
    }
    j["series"] = series;
    return j;
}

nlohmann::ordered_json to_json(const std::vector<Rq2Series>& rq2) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& s : rq2) {
        nlohmann::ordered_json sj;
        sj["risk"] = risk_json(s.risk);
        auto rows = nlohmann::ordered_json::array();
        for (const auto& r : s.rows) {
            nlohmann::ordered_json rj;
            rj["size"] = r.size;
            rj["sweep_error"] = r.sweep_error;
            nlohmann::ordered_json me;
            for (const auto& [label, e] : r.model_errors) me[label] = e;
            rj["model_errors"] = me;
            rj["preferred"] = r.preferred;
            rows.push_back(std::move(rj));
        }
        sj["rows"] = rows;
        auto cross = nlohmann::ordered_json::array();
        for (const auto& c : s.crossovers)
            cross.push_back({{"model", c.model},
                             {"size", c.size ? nlohmann::ordered_json(*c.size) : nlohmann::ordered_json(nullptr)}});
        sj["crossovers"] = cross;
        arr.push_back(std::move(sj));
    }
    return arr;
}

std::string model_errors_csv(const CalibrationResult& result) {
    std::string out = "model,average_absolute_error\n";
    for (const auto& a : result.averages)
        out += fmt::format("{},{}\n", to_string(a.model), a.mean_absolute_error);
    return out;
}

std::string sweep_csv(const SweepResult& sweep, const std::vector<Rq2Series>& rq2) {
    std::vector<std::string> labels;
    if (!rq2.empty() && !rq2.front().rows.empty())
        for (const auto& [label, e] : rq2.front().rows.front().model_errors) {
            (void)e;
            labels.push_back(label);
        }
    std::string out = "scope,size,sweep_error";
    for (const auto& l : labels) out += fmt::format(",{}_error", l);
    out += '\n';
    for (std::size_t s = 0; s < sweep.series.size(); ++s) {
        const auto& series = sweep.series[s];
        const std::string scope = series.risk ? series.risk->str() : "pooled";
        for (std::size_t c = 0; c < series.cells.size(); ++c) {
            out += fmt::format("{},{},{}", scope, series.cells[c].size, series.cells[c].mean_absolute_error);
            if (s < rq2.size() && c < rq2[s].rows.size())
                for (const auto& [label, e] : rq2[s].rows[c].model_errors) {
                    (void)label;
                    out += fmt::format(",{}", e);
                }
            out += '\n';
        }
    }
    return out;
}

}  // namespace riskcal
