#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rfa/feature_table.hpp"
#include "rfa/pipelines.hpp"

namespace rfa {

struct FoldPlan {
    int n_folds = 10;
    std::uint64_t seed = 0;
    std::vector<std::string> ids;
    std::vector<int> fold_of_row;  // aligned with ids

    // Seeded uniform shuffle then round-robin assignment; fold sizes differ
    // by at most one.
    static FoldPlan make(const std::vector<std::string>& ids, int n_folds,
                         std::uint64_t seed);
};

struct ModelRunConfig {
    std::string label;
    Family family = Family::Controls;
    ModelOptions opts;
};

struct FoldMetrics {
    int fold = 0;
    double r2 = 0.0;       // NaN when undefined on that fold
    double pearson = 0.0;  // NaN when undefined
    // Per-fit details: tuned penalties, selected factors and their
    // provenance when adaptation ran. Empty object for stub models.
    nlohmann::ordered_json info = nlohmann::ordered_json::object();
};

struct ModelResult {
    std::string label;
    std::vector<FoldMetrics> folds;
    Vector pooled_predictions;  // out-of-fold, aligned with dataset ids
    double pooled_r2 = 0.0;
    double pooled_pearson = 0.0;
    double mean_fold_r2 = 0.0;
};

struct PairwiseT {
    std::string a;
    std::string b;
    double t = 0.0;
    double p = 1.0;
};

struct CurvePoint {
    std::string param;  // "k_best", "n_factors", "fs_strategy"
    double value = 0.0;
    std::string label;  // family or strategy
    double mean_r2 = 0.0;
};

struct ExperimentReport {
    std::vector<std::string> ids;
    Vector y_true;
    int n_folds = 0;
    std::uint64_t seed = 0;
    std::vector<ModelResult> models;
    std::vector<PairwiseT> pairwise;  // per-instance |error| paired t-tests
    std::vector<CurvePoint> curves;
    std::string config_snapshot;

    const ModelResult& model(const std::string& label) const;
};

// A fitted predictor; run_cv_generic lets tests drive the harness with stubs.
using PredictFn = std::function<Vector(const Dataset&)>;

struct FittedPredictor {
    PredictFn predict;
    nlohmann::ordered_json info = nlohmann::ordered_json::object();
};

using FitFn = std::function<FittedPredictor(const Dataset& train)>;

struct GenericModelSpec {
    std::string label;
    FitFn fit;
};

ExperimentReport run_cv_generic(const Dataset& d, const std::vector<GenericModelSpec>& models,
                                const FoldPlan& plan, int jobs = 1);

ExperimentReport run_cv(const Dataset& d, const std::vector<ModelRunConfig>& models,
                        const FoldPlan& plan, int jobs = 1);

// One CV run per k, setting the default k_best (per-group overrides stay).
ExperimentReport sweep_kbest(const Dataset& d, const std::vector<int>& ks,
                             const std::vector<Family>& families, const ModelOptions& base,
                             const FoldPlan& plan, int jobs = 1);

enum class FactorSelectMethod { Rfe, Pca };

// One CV run per factor count; the selected factors drive adaptation and the
// stage-1 controls model. With use_interactions the pool is the 66-column
// interaction expansion.
ExperimentReport sweep_factors(const Dataset& d, FactorSelectMethod method,
                               const std::vector<int>& counts,
                               const std::vector<Family>& families, bool use_interactions,
                               const ModelOptions& base, const FoldPlan& plan, int jobs = 1);

// One CV run of rfa per feature-selection strategy.
ExperimentReport compare_fs_strategies(const Dataset& d, const ModelOptions& base,
                                       const FoldPlan& plan, int jobs = 1);

}  // namespace rfa
