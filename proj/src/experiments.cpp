#include "rfa/experiments.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "rfa/errors.hpp"
#include "rfa/metrics.hpp"
#include "rfa/rng.hpp"

namespace rfa {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double safe_r2(const Vector& y, const Vector& pred) {
    try {
        return r_squared(y, pred);
    } catch (const NumericError&) {
        return kNaN;
    }
}

double safe_pearson(const Vector& y, const Vector& pred) {
    try {
        return pearson_r(y, pred);
    } catch (const NumericError&) {
        return kNaN;
    }
}

// Runs tasks 0..count-1 on `jobs` threads; tasks write into disjoint slots.
void parallel_cells(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(jobs, static_cast<int>(count));
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

double mean_ignoring_nan(const std::vector<FoldMetrics>& folds) {
    double sum = 0.0;
    int count = 0;
    for (const auto& f : folds) {
        if (!std::isnan(f.r2)) {
            sum += f.r2;
            ++count;
        }
    }
    return count > 0 ? sum / count : kNaN;
}

}  // namespace

FoldPlan FoldPlan::make(const std::vector<std::string>& ids, int n_folds, std::uint64_t seed) {
    if (n_folds < 2) throw DataError("FoldPlan: need at least 2 folds");
    if (static_cast<int>(ids.size()) < 2 * n_folds) {
        throw DataError("FoldPlan: every fold needs at least 2 instances");
    }
    FoldPlan plan;
    plan.n_folds = n_folds;
    plan.seed = seed;
    plan.ids = ids;
    std::vector<Index> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(seed, "fold-plan"));
    rng.shuffle(order);
    plan.fold_of_row.assign(ids.size(), 0);
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        plan.fold_of_row[order[pos]] = static_cast<int>(pos % n_folds);
    }
    return plan;
}

const ModelResult& ExperimentReport::model(const std::string& label) const {
    for (const auto& m : models) {
        if (m.label == label) return m;
    }
    throw DataError("ExperimentReport: no model labelled '" + label + "'");
}

ExperimentReport run_cv_generic(const Dataset& d, const std::vector<GenericModelSpec>& models,
                                const FoldPlan& plan, int jobs) {
    if (plan.ids != d.ids()) {
        throw DataError("run_cv: fold plan ids do not match the dataset");
    }
    const Index n = d.n();

    std::vector<std::vector<Index>> train_rows(plan.n_folds), test_rows(plan.n_folds);
    for (Index i = 0; i < n; ++i) {
        for (int f = 0; f < plan.n_folds; ++f) {
            (plan.fold_of_row[i] == f ? test_rows[f] : train_rows[f]).push_back(i);
        }
    }
    for (int f = 0; f < plan.n_folds; ++f) {
        if (test_rows[f].size() < 2 || train_rows[f].size() < 2) {
            throw DataError("run_cv: fold " + std::to_string(f) + " has fewer than 2 instances");
        }
    }

    ExperimentReport report;
    report.ids = d.ids();
    report.y_true = d.outcome.values;
    report.n_folds = plan.n_folds;
    report.seed = plan.seed;
    report.models.resize(models.size());

    struct Cell {
        std::size_t model;
        int fold;
    };
    std::vector<Cell> cells;
    for (std::size_t m = 0; m < models.size(); ++m) {
        report.models[m].label = models[m].label;
        report.models[m].folds.resize(plan.n_folds);
        report.models[m].pooled_predictions = Vector::Zero(n);
        for (int f = 0; f < plan.n_folds; ++f) cells.push_back({m, f});
    }

    parallel_cells(cells.size(), jobs, [&](std::size_t c) {
        const auto [m, f] = cells[c];
        const Dataset train = dataset_rows(d, train_rows[f]);
        const Dataset test = dataset_rows(d, test_rows[f]);
        FittedPredictor fitted = models[m].fit(train);
        const Vector pred = fitted.predict(test);
        if (pred.size() != static_cast<Index>(test_rows[f].size())) {
            throw NumericError("run_cv: prediction length mismatch");
        }
        auto& result = report.models[m];
        Vector y_fold(test_rows[f].size());
        for (std::size_t i = 0; i < test_rows[f].size(); ++i) {
            result.pooled_predictions[test_rows[f][i]] = pred[i];
            y_fold[i] = d.outcome.values[test_rows[f][i]];
        }
        result.folds[f] = {f, safe_r2(y_fold, pred), safe_pearson(y_fold, pred),
                           std::move(fitted.info)};
    });

    for (auto& result : report.models) {
        result.pooled_r2 = safe_r2(report.y_true, result.pooled_predictions);
        result.pooled_pearson = safe_pearson(report.y_true, result.pooled_predictions);
        result.mean_fold_r2 = mean_ignoring_nan(result.folds);
    }

    // Pairwise significance on per-instance absolute errors of the pooled
    // out-of-fold predictions.
    for (std::size_t a = 0; a < report.models.size(); ++a) {
        for (std::size_t b = a + 1; b < report.models.size(); ++b) {
            const Vector err_a =
                (report.y_true - report.models[a].pooled_predictions).cwiseAbs();
            const Vector err_b =
                (report.y_true - report.models[b].pooled_predictions).cwiseAbs();
            PairwiseT pt{report.models[a].label, report.models[b].label, kNaN, kNaN};
            try {
                const TTestResult tt = paired_t_test(err_a, err_b);
                pt.t = tt.t;
                pt.p = tt.p;
            } catch (const NumericError&) {
            }
            report.pairwise.push_back(std::move(pt));
        }
    }
    return report;
}

namespace {

// Fold-level fit details surfaced in reports: tuned penalties plus the
// selected factors and their provenance when adaptation ran.
nlohmann::ordered_json fit_info(const FittedModel& m) {
    nlohmann::ordered_json info;
    if (m.controls) info["stage1_penalty"] = m.controls->fit.penalty;
    if (m.language) {
        info["penalty"] = m.language->fit.penalty;
        if (m.language->adaptation) {
            info["selected_factors"] = m.language->adaptation->selected_names;
            info["factor_provenance"] = m.language->adaptation->provenance;
        }
    }
    return info;
}

}  // namespace

ExperimentReport run_cv(const Dataset& d, const std::vector<ModelRunConfig>& models,
                        const FoldPlan& plan, int jobs) {
    std::vector<GenericModelSpec> specs;
    specs.reserve(models.size());
    for (const auto& cfg : models) {
        specs.push_back({cfg.label, [cfg](const Dataset& train) -> FittedPredictor {
                             FittedModel fitted = fit_model(cfg.family, train, cfg.opts);
                             FittedPredictor out;
                             out.info = fit_info(fitted);
                             out.predict = [fitted = std::move(fitted)](const Dataset& test) {
                                 return predict(fitted, test);
                             };
                             return out;
                         }});
    }
    return run_cv_generic(d, specs, plan, jobs);
}

namespace {

// Shared sweep scaffolding: run one CV per grid value, keep per-run models
// under suffixed labels and summarize the curve.
ExperimentReport merge_sweep_runs(const Dataset& d, const FoldPlan& plan,
                                  std::vector<ExperimentReport> runs,
                                  std::vector<std::string> run_tags,
                                  const std::string& param,
                                  const std::vector<double>& values) {
    ExperimentReport merged;
    merged.ids = d.ids();
    merged.y_true = d.outcome.values;
    merged.n_folds = plan.n_folds;
    merged.seed = plan.seed;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        for (auto& model : runs[r].models) {
            merged.curves.push_back({param, values[r], model.label, model.mean_fold_r2});
            model.label += run_tags[r];
            merged.models.push_back(std::move(model));
        }
    }
    return merged;
}

}  // namespace

ExperimentReport sweep_kbest(const Dataset& d, const std::vector<int>& ks,
                             const std::vector<Family>& families, const ModelOptions& base,
                             const FoldPlan& plan, int jobs) {
    if (ks.empty()) throw ConfigError("sweep_kbest: empty k grid");
    std::vector<ExperimentReport> runs;
    std::vector<std::string> tags;
    std::vector<double> values;
    for (int k : ks) {
        ModelOptions opts = base;
        opts.reduce_defaults.k_best = k;
        std::vector<ModelRunConfig> cfgs;
        for (Family fam : families) cfgs.push_back({family_name(fam), fam, opts});
        runs.push_back(run_cv(d, cfgs, plan, jobs));
        tags.push_back("@k=" + std::to_string(k));
        values.push_back(static_cast<double>(k));
    }
    return merge_sweep_runs(d, plan, std::move(runs), std::move(tags), "k_best", values);
}

ExperimentReport sweep_factors(const Dataset& d, FactorSelectMethod method,
                               const std::vector<int>& counts,
                               const std::vector<Family>& families, bool use_interactions,
                               const ModelOptions& base, const FoldPlan& plan, int jobs) {
    if (counts.empty()) throw ConfigError("sweep_factors: empty factor-count grid");
    std::vector<ExperimentReport> runs;
    std::vector<std::string> tags;
    std::vector<double> values;
    for (int count : counts) {
        ModelOptions opts = base;
        opts.factor_policy.kind = method == FactorSelectMethod::Rfe ? FactorPolicy::Kind::Rfe
                                                                    : FactorPolicy::Kind::Pca;
        opts.factor_policy.k = count;
        opts.factor_policy.interactions = use_interactions;
        opts.restrict_stage1_to_selection = true;
        std::vector<ModelRunConfig> cfgs;
        for (Family fam : families) cfgs.push_back({family_name(fam), fam, opts});
        runs.push_back(run_cv(d, cfgs, plan, jobs));
        tags.push_back("@n=" + std::to_string(count));
        values.push_back(static_cast<double>(count));
    }
    return merge_sweep_runs(d, plan, std::move(runs), std::move(tags), "n_factors", values);
}

ExperimentReport compare_fs_strategies(const Dataset& d, const ModelOptions& base,
                                       const FoldPlan& plan, int jobs) {
    const FsStrategy strategies[] = {FsStrategy::NoFS, FsStrategy::SeparatedFS,
                                     FsStrategy::CombinedFS, FsStrategy::EarlyFS};
    std::vector<ExperimentReport> runs;
    std::vector<std::string> tags;
    std::vector<double> values;
    for (int s = 0; s < 4; ++s) {
        ModelOptions opts = base;
        opts.strategy = strategies[s];
        runs.push_back(run_cv(d, {{fs_strategy_name(strategies[s]), Family::Rfa, opts}},
                              plan, jobs));
        tags.push_back("");
        values.push_back(static_cast<double>(s));
    }
    return merge_sweep_runs(d, plan, std::move(runs), std::move(tags), "fs_strategy", values);
}

}  // namespace rfa
