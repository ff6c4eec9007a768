#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rfa/adaptation.hpp"
#include "rfa/feature_table.hpp"
#include "rfa/ridge.hpp"
#include "rfa/transforms.hpp"

namespace rfa {

enum class Family { Controls, Language, Added, Rc, Fa, Rfa };
enum class FsStrategy { NoFS, SeparatedFS, CombinedFS, EarlyFS };

std::string family_name(Family f);
Family family_from_name(const std::string& name);
std::string fs_strategy_name(FsStrategy s);
FsStrategy fs_strategy_from_name(const std::string& name);

struct FactorPolicy {
    enum class Kind { All, Manual, Rfe, Pca, None };
    Kind kind = Kind::All;
    std::vector<std::string> manual;  // Manual
    int k = 0;                        // Rfe / Pca
    bool interactions = false;
};

struct GroupReduce {
    int k_best = 10000;
    int n_components = 100;
};

struct ModelOptions {
    FsStrategy strategy = FsStrategy::SeparatedFS;
    FactorPolicy factor_policy;
    GroupReduce reduce_defaults;
    std::map<std::string, GroupReduce> reduce_overrides;  // by group name, incl. adapted-*
    PenaltySpec penalty = PenaltySpec::default_grid();
    std::uint64_t seed = 0;
    // Sweeps restrict the stage-1 controls model to the selected factors so
    // that "number of factors" means the same thing for every family; the
    // default keeps stage 1 on the full factor table.
    bool restrict_stage1_to_selection = false;
};

// Frozen recipe turning the raw factor table into the min-max scaled matrix
// used for adaptation: optional interaction construction, then selection
// (all / manual / RFE / PCA / none), then the final training-fold min-max.
struct FactorState {
    FactorPolicy policy;
    std::vector<std::string> input_names;
    std::vector<std::string> pool_names;
    std::optional<Transform> pool_minmax;     // present with interactions
    std::vector<std::pair<Index, Index>> pairs;
    std::optional<Transform> product_minmax;  // per-product renormalization
    std::vector<Index> selected;              // pool columns (non-PCA policies)
    std::optional<Transform> pca_zscore;
    std::optional<Transform> pca;
    std::optional<Transform> pca_minmax;
    Transform adapt_minmax;
    std::vector<std::string> selected_names;
    std::vector<std::string> provenance;

    Matrix build(const FeatureTable& factors) const;
    nlohmann::ordered_json to_json() const;
    static FactorState from_json(const nlohmann::ordered_json& j);
};

FactorState fit_factor_state(const FeatureTable& factors_train, const Vector& y,
                             const ModelOptions& opts);

struct GroupChain {
    std::string source;                        // language group name
    std::vector<std::string> source_features;  // expected raw feature names
    bool adapted = false;
    TransformChain pre;   // applied to the raw group before adaptation (EarlyFS)
    TransformChain post;  // applied to the (adapted) block
};

struct ControlsStage {
    std::optional<FactorState> selection;  // restrict_stage1_to_selection only
    Transform zscore;
    RidgeFit fit;
};

struct LanguageStage {
    FsStrategy strategy = FsStrategy::SeparatedFS;
    bool include_factors = false;  // added-controls appends z-scored factors
    std::optional<Transform> factor_zscore;
    std::optional<FactorState> adaptation;
    std::vector<GroupChain> groups;
    std::optional<TransformChain> pooled;  // CombinedFS reduction
    std::vector<std::string> input_names;
    RidgeFit fit;

    Matrix assemble(const Dataset& d) const;
};

struct FittedModel {
    Family family = Family::Controls;
    FsStrategy strategy = FsStrategy::SeparatedFS;
    std::uint64_t seed = 0;
    std::optional<ControlsStage> controls;
    std::optional<LanguageStage> language;

    nlohmann::ordered_json to_json() const;
    static FittedModel from_json(const nlohmann::ordered_json& j);
};

// Fits one model family on the given (training) dataset. Two-stage families
// (rc, rfa) train stage 2 on the in-sample residuals of stage 1.
FittedModel fit_model(Family family, const Dataset& train, const ModelOptions& opts);

Vector predict(const FittedModel& m, const Dataset& d);
Vector predict_stage1(const FittedModel& m, const Dataset& d);
Vector predict_stage2(const FittedModel& m, const Dataset& d);

}  // namespace rfa
