#include "riskcal/factor_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "riskcal/distributions.hpp"
#include "riskcal/error.hpp"

namespace riskcal {

CorrelationMatrix make_correlation_matrix(Matrix values, std::vector<std::string> items,
                                          std::size_t observations) {
    const std::size_t p = values.rows();
    if (values.cols() != p) fail(ErrorKind::InvalidArgument, "correlation matrix must be square");
    if (items.size() != p)
        fail(ErrorKind::InvalidArgument, "correlation matrix labels do not match its size");
    if (!is_symmetric(values, 1e-12))
        fail(ErrorKind::InvalidArgument, "correlation matrix is not symmetric");
    for (std::size_t i = 0; i < p; ++i) {
        if (std::abs(values(i, i) - 1.0) > 1e-12)
            fail(ErrorKind::InvalidArgument, "correlation matrix needs a unit diagonal");
        for (std::size_t j = 0; j < p; ++j)
            if (!(std::abs(values(i, j)) <= 1.0 + 1e-12))
                fail(ErrorKind::InvalidArgument, "correlation entries must lie in [-1, 1]");
    }
    return {std::move(values), std::move(items), observations};
}

CorrelationMatrix correlation_matrix(const Matrix& data, std::vector<std::string> items) {
    const std::size_t n = data.rows();
    const std::size_t p = data.cols();
    if (p < 2) fail(ErrorKind::TooFewItems, "correlation matrix needs at least two items");
    if (items.size() != p) fail(ErrorKind::InvalidArgument, "item labels do not match data columns");
    if (n < 2) fail(ErrorKind::TooFewPoints, "correlation matrix needs at least two observations");

    std::vector<std::vector<double>> centered(p);
    std::vector<double> norms(p);
    for (std::size_t j = 0; j < p; ++j) {
        auto col = data.column(j);
        if (std::all_of(col.begin(), col.end(), [&](double v) { return v == col.front(); }))
            fail(ErrorKind::ConstantItem, fmt::format("item {} is constant across responses", items[j]));
        const double m = mean(col);
        double ss = 0.0;
        for (auto& v : col) {
            v -= m;
            ss += v * v;
        }
        norms[j] = std::sqrt(ss);
        centered[j] = std::move(col);
    }
    Matrix r = Matrix::identity(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += centered[i][k] * centered[j][k];
            const double v = std::clamp(s / (norms[i] * norms[j]), -1.0, 1.0);
            r(i, j) = v;
            r(j, i) = v;
        }
    return {std::move(r), std::move(items), n};
}

CorrelationMatrix correlation_matrix(const SurveyDataset& ds, std::span<const int> items) {
    if (items.size() < 2) fail(ErrorKind::TooFewItems, "correlation matrix needs at least two items");
    Matrix data(ds.size(), items.size());
    std::vector<std::string> labels;
    for (int q : items) {
        if (q < 1 || q > kItemCount) fail(ErrorKind::UnknownItem, fmt::format("unknown item q{}", q));
        labels.push_back(item_label(q));
    }
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t j = 0; j < items.size(); ++j)
            data(i, j) = ds.responses()[i].item(items[j]);
    return correlation_matrix(data, std::move(labels));
}

double kmo(const CorrelationMatrix& r) {
    const Matrix s = inverse_symmetric(r.values, 1e12);
    const std::size_t p = r.size();
    double sum_r2 = 0.0;
    double sum_q2 = 0.0;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            if (i == j) continue;
            const double rij = r.values(i, j);
            const double qij = -s(i, j) / std::sqrt(s(i, i) * s(j, j));
            sum_r2 += rij * rij;
            sum_q2 += qij * qij;
        }
    if (sum_r2 + sum_q2 == 0.0)
        fail(ErrorKind::UndefinedKMO, "KMO is undefined when every off-diagonal correlation is zero");
    return sum_r2 / (sum_r2 + sum_q2);
}

BartlettResult bartlett_sphericity(const CorrelationMatrix& r, std::size_t n) {
    const std::size_t p = r.size();
    const double factor =
        static_cast<double>(n) - 1.0 - (2.0 * static_cast<double>(p) + 5.0) / 6.0;
    if (n <= p || factor <= 0.0)
        fail(ErrorKind::SampleTooSmall,
             fmt::format("Bartlett's test needs more observations ({}) than items ({})", n, p));
    const auto eig = eigen_symmetric(r.values);
    double log_det = 0.0;
    for (double ev : eig.values) {
        if (!(ev > 0.0))
            fail(ErrorKind::NonPositiveDeterminant, "correlation matrix determinant is not positive");
        log_det += std::log(ev);
    }
    BartlettResult out;
    out.chi2 = std::max(0.0, -factor * log_det);
    out.df = p * (p - 1) / 2;
    out.p_value = std::clamp(dist::chi_square_upper_tail(out.chi2, static_cast<double>(out.df)), 0.0, 1.0);
    return out;
}

SuitabilityReport suitability(const CorrelationMatrix& r, std::size_t n) {
    const auto b = bartlett_sphericity(r, n);
    return {kmo(r), b.chi2, b.df, b.p_value};
}

std::size_t kaiser_count(const CorrelationMatrix& r) {
    const auto eig = eigen_symmetric(r.values);
    return static_cast<std::size_t>(
        std::count_if(eig.values.begin(), eig.values.end(), [](double ev) { return ev >= 1.0 - 1e-10; }));
}

std::string_view to_string(RotationKind kind) {
    switch (kind) {
        case RotationKind::None: return "none";
        case RotationKind::Varimax: return "varimax";
        case RotationKind::Promax: return "promax";
    }
    return "unknown";
}

bool FactorSolution::heywood() const {
    return std::any_of(heywood_flags.begin(), heywood_flags.end(), [](bool b) { return b; });
}

double uls_objective(const Matrix& r, const Matrix& loadings) {
    const std::size_t p = r.rows();
    double s = 0.0;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            if (i == j) continue;
            double implied = 0.0;
            for (std::size_t k = 0; k < loadings.cols(); ++k) implied += loadings(i, k) * loadings(j, k);
            const double d = r(i, j) - implied;
            s += d * d;
        }
    return s;
}

namespace {

std::vector<double> row_sums_of_squares(const Matrix& l) {
    std::vector<double> h(l.rows(), 0.0);
    for (std::size_t i = 0; i < l.rows(); ++i)
        for (std::size_t k = 0; k < l.cols(); ++k) h[i] += l(i, k) * l(i, k);
    return h;
}

// Flips columns so each column's largest-magnitude loading is positive, and
// mirrors the flips on the rotation matrix and factor correlation.
void normalize_signs(FactorSolution& sol) {
    const std::size_t p = sol.loadings.rows();
    const std::size_t m = sol.loadings.cols();
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < p; ++i)
            if (std::abs(sol.loadings(i, k)) > std::abs(sol.loadings(best, k))) best = i;
        if (sol.loadings(best, k) >= 0.0) continue;
        for (std::size_t i = 0; i < p; ++i) sol.loadings(i, k) = -sol.loadings(i, k);
        if (!sol.rotation_matrix.empty())
            for (std::size_t i = 0; i < sol.rotation_matrix.rows(); ++i)
                sol.rotation_matrix(i, k) = -sol.rotation_matrix(i, k);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == k) continue;
            sol.factor_correlation(k, j) = -sol.factor_correlation(k, j);
            sol.factor_correlation(j, k) = -sol.factor_correlation(j, k);
        }
    }
}

std::vector<double> implied_communalities(const Matrix& pattern, const Matrix& phi) {
    const std::size_t p = pattern.rows();
    const std::size_t m = pattern.cols();
    std::vector<double> h(p, 0.0);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) h[i] += pattern(i, a) * phi(a, b) * pattern(i, b);
    return h;
}

}  // namespace

FactorSolution extract_uls(const CorrelationMatrix& r, std::size_t m, const UlsOptions& options) {
    const std::size_t p = r.size();
    if (m < 1 || m >= p)
        fail(ErrorKind::InvalidArgument,
             fmt::format("factor count must satisfy 1 <= m < p (m = {}, p = {})", m, p));

    FactorSolution sol;
    sol.items = r.items;
    sol.eigenvalues = eigen_symmetric(r.values).values;
    sol.heywood_flags.assign(p, false);

    std::vector<double> h2(p);
    try {
        const Matrix s = inverse_symmetric(r.values, 1e12);
        for (std::size_t i = 0; i < p; ++i) h2[i] = 1.0 - 1.0 / s(i, i);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularMatrix) throw;
        sol.extraction.smc_fallback = true;
        for (std::size_t i = 0; i < p; ++i) {
            double best = 0.0;
            for (std::size_t j = 0; j < p; ++j)
                if (j != i) best = std::max(best, std::abs(r.values(i, j)));
            h2[i] = best;
        }
    }

    Matrix lambda(p, m);
    auto& diag = sol.extraction;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        Matrix reduced = r.values;
        for (std::size_t i = 0; i < p; ++i) reduced(i, i) = h2[i];
        const auto eig = eigen_symmetric(reduced);
        for (std::size_t k = 0; k < m; ++k) {
            const double root = std::sqrt(std::max(0.0, eig.values[k]));
            for (std::size_t i = 0; i < p; ++i) lambda(i, k) = eig.vectors(i, k) * root;
        }
        const auto next = row_sums_of_squares(lambda);
        double delta = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            delta = std::max(delta, std::abs(next[i] - h2[i]));
            if (next[i] > 1.0) sol.heywood_flags[i] = true;
        }
        diag.iterations = iter;
        diag.last_delta = delta;
        diag.objective_trace.push_back(uls_objective(r.values, lambda));
        h2 = next;
        if (delta < options.tolerance) {
            diag.converged = true;
            break;
        }
    }
    if (!diag.converged && !sol.heywood())
        fail(ErrorKind::NoConvergence,
             fmt::format("ULS extraction did not converge after {} iterations (last change {:.3g})",
                         diag.iterations, diag.last_delta));

    sol.loadings = lambda;
    sol.rotation_matrix = Matrix::identity(m);
    sol.factor_correlation = Matrix::identity(m);
    normalize_signs(sol);
    sol.unrotated_loadings = sol.loadings;
    sol.rotation_matrix = Matrix::identity(m);
    sol.communalities = row_sums_of_squares(sol.loadings);
    sol.uniquenesses.resize(p);
    for (std::size_t i = 0; i < p; ++i) sol.uniquenesses[i] = 1.0 - sol.communalities[i];
    sol.variance_explained_ratio = variance_explained(sol);
    return sol;
}

double varimax_criterion(const Matrix& l) {
    const double p = static_cast<double>(l.rows());
    double total = 0.0;
    for (std::size_t k = 0; k < l.cols(); ++k) {
        double s4 = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < l.rows(); ++i) {
            const double sq = l(i, k) * l(i, k);
            s2 += sq;
            s4 += sq * sq;
        }
        total += s4 / p - (s2 / p) * (s2 / p);
    }
    return total;
}

Matrix kaiser_normalized(const Matrix& l) {
    Matrix out = l;
    const auto h2 = row_sums_of_squares(l);
    for (std::size_t i = 0; i < l.rows(); ++i) {
        if (h2[i] <= 0.0) continue;
        const double h = std::sqrt(h2[i]);
        for (std::size_t k = 0; k < l.cols(); ++k) out(i, k) /= h;
    }
    return out;
}

FactorSolution rotate_varimax(const FactorSolution& sol, bool kaiser_normalize) {
    const std::size_t m = sol.factors();
    FactorSolution out = sol;
    if (m < 2) {
        out.rotation.note = "rotation is undefined for a single factor; loadings left unrotated";
        return out;
    }
    if (sol.rotation.kind != RotationKind::None)
        fail(ErrorKind::InvalidArgument, "varimax expects an unrotated solution");

    const std::size_t p = sol.loadings.rows();
    const auto h2 = row_sums_of_squares(sol.loadings);
    Matrix x = kaiser_normalize ? kaiser_normalized(sol.loadings) : sol.loadings;
    Matrix t = Matrix::identity(m);
    const double dp = static_cast<double>(p);

    constexpr int kMaxSweeps = 1000;
    double criterion = varimax_criterion(x);
    int sweeps = 0;
    bool converged = false;
    for (; sweeps < kMaxSweeps;) {
        ++sweeps;
        for (std::size_t a = 0; a + 1 < m; ++a) {
            for (std::size_t b = a + 1; b < m; ++b) {
                double sa = 0.0, sb = 0.0, sc = 0.0, sd = 0.0;
                for (std::size_t i = 0; i < p; ++i) {
                    const double u = x(i, a) * x(i, a) - x(i, b) * x(i, b);
                    const double v = 2.0 * x(i, a) * x(i, b);
                    sa += u;
                    sb += v;
                    sc += u * u - v * v;
                    sd += 2.0 * u * v;
                }
                const double num = sd - 2.0 * sa * sb / dp;
                const double den = sc - (sa * sa - sb * sb) / dp;
                const double phi = 0.25 * std::atan2(num, den);
                if (phi == 0.0) continue;
                const double c = std::cos(phi);
                const double s = std::sin(phi);
                for (std::size_t i = 0; i < p; ++i) {
                    const double xa = x(i, a);
                    const double xb = x(i, b);
                    x(i, a) = c * xa + s * xb;
                    x(i, b) = -s * xa + c * xb;
                }
                for (std::size_t i = 0; i < m; ++i) {
                    const double ta = t(i, a);
                    const double tb = t(i, b);
                    t(i, a) = c * ta + s * tb;
                    t(i, b) = -s * ta + c * tb;
                }
            }
        }
        const double next = varimax_criterion(x);
        const double gain = next - criterion;
        criterion = next;
        if (gain < 1e-10) {
            converged = true;
            break;
        }
    }

    if (kaiser_normalize)
        for (std::size_t i = 0; i < p; ++i) {
            if (h2[i] <= 0.0) continue;
            const double h = std::sqrt(h2[i]);
            for (std::size_t k = 0; k < m; ++k) x(i, k) *= h;
        }

    out.loadings = x;
    out.rotation_matrix = t;
    out.factor_correlation = Matrix::identity(m);
    out.rotation = {RotationKind::Varimax, 0, kaiser_normalize, sweeps, converged, ""};
    normalize_signs(out);
    out.communalities = implied_communalities(out.loadings, out.factor_correlation);
    out.uniquenesses.resize(p);
    for (std::size_t i = 0; i < p; ++i) out.uniquenesses[i] = 1.0 - out.communalities[i];
    out.variance_explained_ratio = variance_explained(out);
    return out;
}

FactorSolution rotate_promax(const FactorSolution& sol, int power) {
    const std::size_t m = sol.factors();
    if (power < 1) fail(ErrorKind::InvalidArgument, "promax power must be at least 1");
    if (m < 2) {
        FactorSolution out = sol;
        out.rotation.note = "rotation is undefined for a single factor; loadings left unrotated";
        return out;
    }
    const FactorSolution vm = rotate_varimax(sol, true);
    const Matrix& l = vm.loadings;
    const std::size_t p = l.rows();

    const Svd svd = svd_thin(l);
    if (!(svd.singular.back() > 0.0) || svd.singular.front() / svd.singular.back() > 1e10)
        fail(ErrorKind::IllConditionedTarget, "promax least-squares system is ill-conditioned");

    Matrix target(p, m);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t k = 0; k < m; ++k) {
            const double v = l(i, k);
            target(i, k) = (v < 0.0 ? -1.0 : 1.0) * std::pow(std::abs(v), power);
        }

    // U = (L^T L)^-1 L^T P, via the SVD: U = V diag(1/s) U_svd^T P
    Matrix u(m, m);
    {
        Matrix ut_p = svd.u.transpose() * target;
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t j = 0; j < m; ++j) ut_p(k, j) /= svd.singular[k];
        u = svd.v * ut_p;
    }
    const Matrix utu_inv = inverse(u.transpose() * u);
    for (std::size_t j = 0; j < m; ++j) {
        const double scale = std::sqrt(utu_inv(j, j));
        for (std::size_t i = 0; i < m; ++i) u(i, j) *= scale;
    }
    Matrix phi = inverse(u.transpose() * u);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
            const double v = 0.5 * (phi(a, b) + phi(b, a));
            phi(a, b) = v;
            phi(b, a) = v;
        }

    FactorSolution out = vm;
    out.loadings = l * u;
    out.rotation_matrix = vm.rotation_matrix * u;
    out.factor_correlation = phi;
    out.rotation = {RotationKind::Promax, power, true, vm.rotation.iterations, vm.rotation.converged, ""};
    normalize_signs(out);
    out.communalities = implied_communalities(out.loadings, out.factor_correlation);
    out.uniquenesses.resize(p);
    for (std::size_t i = 0; i < p; ++i) out.uniquenesses[i] = 1.0 - out.communalities[i];
    out.variance_explained_ratio = variance_explained(out);
    return out;
}

double variance_explained(const FactorSolution& sol) {
    const std::size_t p = sol.loadings.rows();
    if (p == 0) return 0.0;
    const Matrix phi =
        sol.factor_correlation.empty() ? Matrix::identity(sol.factors()) : sol.factor_correlation;
    const auto h = implied_communalities(sol.loadings, phi);
    return std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(p);
}

std::vector<std::vector<SalientItem>> salient_items(const FactorSolution& sol, double threshold) {
    std::vector<std::vector<SalientItem>> out(sol.factors());
    for (std::size_t k = 0; k < sol.factors(); ++k) {
        for (std::size_t i = 0; i < sol.loadings.rows(); ++i)
            if (std::abs(sol.loadings(i, k)) > threshold)
                out[k].push_back({sol.items[i], sol.loadings(i, k)});
        std::stable_sort(out[k].begin(), out[k].end(), [](const SalientItem& a, const SalientItem& b) {
            return std::abs(a.loading) > std::abs(b.loading);
        });
    }
    return out;
}

ReliabilityReport cronbach_alpha_from_covariance(const Matrix& c) {
    const std::size_t k = c.rows();
    if (c.cols() != k) fail(ErrorKind::InvalidArgument, "covariance matrix must be square");
    if (k < 2) fail(ErrorKind::TooFewItems, "Cronbach's alpha needs at least two items");
    double trace = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        trace += c(i, i);
        for (std::size_t j = 0; j < k; ++j) total += c(i, j);
    }
    if (!(total > 0.0)) fail(ErrorKind::ConstantTotal, "total score has zero variance");
    const double kd = static_cast<double>(k);
    ReliabilityReport out;
    out.k = k;
    out.alpha = kd / (kd - 1.0) * (1.0 - trace / total);
    out.acceptable = out.alpha > 0.5;
    return out;
}

ReliabilityReport cronbach_alpha_from_data(const Matrix& data) {
    const std::size_t n = data.rows();
    const std::size_t k = data.cols();
    if (k < 2) fail(ErrorKind::TooFewItems, "Cronbach's alpha needs at least two items");
    if (n < 2) fail(ErrorKind::TooFewPoints, "Cronbach's alpha needs at least two responses");
    std::vector<double> means(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) means[j] = mean(data.column(j));
    Matrix cov(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += (data(i, a) - means[a]) * (data(i, b) - means[b]);
            cov(a, b) = s / static_cast<double>(n - 1);
            cov(b, a) = cov(a, b);
        }
    std::vector<double> totals(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) totals[i] += data(i, j);
    if (std::all_of(totals.begin(), totals.end(), [&](double v) { return v == totals.front(); }))
        fail(ErrorKind::ConstantTotal, "total score is constant across responses");
    return cronbach_alpha_from_covariance(cov);
}

ReliabilityReport cronbach_alpha(const SurveyDataset& ds, std::span<const int> items) {
    if (items.size() < 2) fail(ErrorKind::TooFewItems, "Cronbach's alpha needs at least two items");
    Matrix data(ds.size(), items.size());
    for (int q : items)
        if (q < 1 || q > kItemCount) fail(ErrorKind::UnknownItem, fmt::format("unknown item q{}", q));
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t j = 0; j < items.size(); ++j) data(i, j) = ds.responses()[i].item(items[j]);
    return cronbach_alpha_from_data(data);
}

SubscaleDefinition make_subscale(std::string name, std::vector<int> items) {
    if (items.size() < 2) fail(ErrorKind::TooFewItems, fmt::format("subscale '{}' needs at least two items", name));
    for (int q : items)
        if (q < 1 || q > kItemCount) fail(ErrorKind::UnknownItem, fmt::format("unknown item q{}", q));
    return {std::move(name), std::move(items)};
}

std::vector<double> subscale_scores(const SurveyDataset& ds, const SubscaleDefinition& def) {
    if (def.items.empty()) fail(ErrorKind::TooFewItems, "subscale lists no items");
    for (int q : def.items)
        if (q < 1 || q > kItemCount) fail(ErrorKind::UnknownItem, fmt::format("unknown item q{}", q));
    const auto sel = def.selector();
    std::vector<double> out;
    out.reserve(ds.size());
    for (const auto& r : ds.responses()) out.push_back(sel(r));
    return out;
}

std::vector<StratumCorrelation> stratified_factor_correlations(const SurveyDataset& ds,
                                                               const SubscaleDefinition& dread,
                                                               const SubscaleDefinition& unknown) {
    const auto d = subscale_scores(ds, dread);
    const auto u = subscale_scores(ds, unknown);
    std::vector<StratumCorrelation> out;
    for (int level = 1; level <= 3; ++level) {
        std::vector<double> q1, ds_, us;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto& r = ds.responses()[i];
            if (r.frequency() != level) continue;
            q1.push_back(r.impact());
            ds_.push_back(d[i]);
            us.push_back(u[i]);
        }
        if (q1.size() < 3)
            fail(ErrorKind::EmptyStratum,
                 fmt::format("frequency stratum {} has {} responses; at least 3 are needed", level,
                             q1.size()));
        out.push_back({level, pearson(q1, ds_), pearson(q1, us)});
    }
    return out;
}

FactorCountSearch search_factor_count(const CorrelationMatrix& r, int promax_power,
                                      double salient_threshold) {
    FactorCountSearch out;
    out.kaiser = kaiser_count(r);
    const std::size_t start = std::clamp<std::size_t>(out.kaiser, 1, r.size() - 1);
    for (std::size_t m = start; m >= 1; --m) {
        FactorCountCandidate cand;
        cand.factors = m;
        try {
            auto sol = extract_uls(r, m);
            cand.heywood = sol.heywood();
            auto rotated = m >= 2 ? rotate_promax(sol, promax_power) : sol;
            cand.salient = salient_items(rotated, salient_threshold);
            if (cand.heywood) {
                std::vector<std::string> flagged;
                for (std::size_t i = 0; i < sol.items.size(); ++i)
                    if (sol.heywood_flags[i]) flagged.push_back(sol.items[i]);
                cand.note = fmt::format("communality exceeds 1 for {}", fmt::join(flagged, ", "));
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::IllConditionedTarget)
                throw;
            cand.heywood = true;
            cand.note = e.what();
        }
        const bool accept = !cand.heywood;
        out.candidates.push_back(std::move(cand));
        if (accept || m == 1) {
            out.chosen = m;
            break;
        }
    }
    return out;
}

namespace {

double round6(double v) { return std::round(v * 1e6) / 1e6 + 0.0; }

nlohmann::ordered_json matrix_json(const Matrix& m, bool round) {
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto row = nlohmann::ordered_json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(round ? round6(m(i, j)) : m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

nlohmann::ordered_json to_json(const FactorSolution& sol) {
    nlohmann::ordered_json j;
    j["items"] = sol.items;
    j["factors"] = sol.factors();
    j["loadings"] = matrix_json(sol.loadings, true);
    j["unrotated_loadings"] = matrix_json(sol.unrotated_loadings, true);
    j["communalities"] = sol.communalities;
    j["uniquenesses"] = sol.uniquenesses;
    j["factor_correlation"] = matrix_json(sol.factor_correlation, true);
    j["eigenvalues"] = sol.eigenvalues;
    j["variance_explained_ratio"] = sol.variance_explained_ratio;
    j["heywood_flags"] = sol.heywood_flags;
    j["rotation"] = {{"kind", std::string(to_string(sol.rotation.kind))},
                     {"promax_power", sol.rotation.promax_power},
                     {"kaiser_normalization", sol.rotation.kaiser_normalization},
                     {"iterations", sol.rotation.iterations},
                     {"converged", sol.rotation.converged},
                     {"note", sol.rotation.note}};
    j["extraction"] = {{"method", "uls"},
                       {"iterations", sol.extraction.iterations},
                       {"last_delta", sol.extraction.last_delta},
                       {"converged", sol.extraction.converged},
                       {"smc_fallback", sol.extraction.smc_fallback},
                       {"status", sol.heywood() ? "heywood" : "ok"},
                       {"objective",
                        sol.extraction.objective_trace.empty() ? 0.0 : sol.extraction.objective_trace.back()}};
    return j;
}

}  // namespace riskcal
