#include "rfa/pipelines.hpp"

#include <algorithm>
#include <numeric>

#include "rfa/errors.hpp"
#include "rfa/rng.hpp"

namespace rfa {

using nlohmann::ordered_json;

namespace {

const char* kFamilyNames[] = {"controls", "language", "added", "rc", "fa", "rfa"};
const char* kStrategyNames[] = {"NoFS", "SeparatedFS", "CombinedFS", "EarlyFS"};

void require_names(const std::vector<std::string>& got, const std::vector<std::string>& want,
                   const std::string& what) {
    if (got != want) {
        throw DataError(what + ": feature names do not match the fitted transform inputs");
    }
}

GroupReduce resolve_reduce(const ModelOptions& opts, const std::string& group, Index cols,
                           Index rows) {
    GroupReduce base = opts.reduce_defaults;
    if (const auto it = opts.reduce_overrides.find(group); it != opts.reduce_overrides.end()) {
        base = it->second;
    }
    if (cols < 1) throw NumericError("group '" + group + "' has no columns to reduce");
    GroupReduce r;
    r.k_best = std::min<Index>(base.k_best, cols);
    r.n_components = std::min<Index>({base.n_components, r.k_best, rows - 1});
    if (r.k_best < 1 || r.n_components < 1) {
        throw NumericError("group '" + group + "': reduction resolves to zero size");
    }
    return r;
}

Matrix products_for_pairs(const Matrix& scaled, const std::vector<std::pair<Index, Index>>& pairs) {
    Matrix out(scaled.rows(), pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        out.col(p) = scaled.col(pairs[p].first).cwiseProduct(scaled.col(pairs[p].second));
    }
    return out;
}

ordered_json optional_transform_json(const std::optional<Transform>& t) {
    return t ? t->to_json() : ordered_json(nullptr);
}

std::optional<Transform> optional_transform_from_json(const ordered_json& j) {
    if (j.is_null()) return std::nullopt;
    return Transform::from_json(j);
}

const char* kPolicyNames[] = {"all", "manual", "rfe", "pca", "none"};

}  // namespace

std::string family_name(Family f) { return kFamilyNames[static_cast<int>(f)]; }

Family family_from_name(const std::string& name) {
    for (int i = 0; i < 6; ++i) {
        if (name == kFamilyNames[i]) return static_cast<Family>(i);
    }
    throw ConfigError("unknown model family '" + name + "'");
}

std::string fs_strategy_name(FsStrategy s) { return kStrategyNames[static_cast<int>(s)]; }

FsStrategy fs_strategy_from_name(const std::string& name) {
    for (int i = 0; i < 4; ++i) {
        if (name == kStrategyNames[i]) return static_cast<FsStrategy>(i);
    }
    throw ConfigError("unknown feature-selection strategy '" + name + "'");
}

Matrix FactorState::build(const FeatureTable& factors) const {
    require_names(factors.feature_names, input_names, "factor table");
    Matrix pool = factors.values;
    if (pool_minmax) {
        pool = pool_minmax->apply(pool);
        Matrix prods = product_minmax->apply(products_for_pairs(pool, pairs));
        pool = hconcat({pool, prods});
    }
    Matrix selected_matrix;
    if (pca) {
        selected_matrix = pca_minmax->apply(pca->apply(pca_zscore->apply(pool)));
    } else {
        selected_matrix.resize(pool.rows(), selected.size());
        for (std::size_t j = 0; j < selected.size(); ++j) {
            selected_matrix.col(j) = pool.col(selected[j]);
        }
    }
    if (selected_matrix.cols() == 0) return selected_matrix;
    return adapt_minmax.apply(selected_matrix);
}

FactorState fit_factor_state(const FeatureTable& factors_train, const Vector& y,
                             const ModelOptions& opts) {
    FactorState s;
    s.policy = opts.factor_policy;
    s.input_names = factors_train.feature_names;
    s.pool_names = factors_train.feature_names;

    Matrix pool = factors_train.values;
    std::vector<std::string> pool_provenance(pool.cols(), "original");
    if (opts.factor_policy.interactions) {
        s.pool_minmax = minmax_fit(pool, s.pool_names);
        pool = s.pool_minmax->apply(pool);
        s.pairs = interaction_pairs(pool.cols());
        Matrix prods = products_for_pairs(pool, s.pairs);
        std::vector<std::string> prod_names;
        for (const auto& [i, j] : s.pairs) {
            prod_names.push_back(s.pool_names[i] + "x" + s.pool_names[j]);
            pool_provenance.push_back("interaction(" + s.pool_names[i] + "," +
                                      s.pool_names[j] + ")");
        }
        s.product_minmax = minmax_fit(prods, prod_names);
        prods = s.product_minmax->apply(prods);
        pool = hconcat({pool, prods});
        s.pool_names.insert(s.pool_names.end(), prod_names.begin(), prod_names.end());
    }

    Matrix selected_matrix;
    switch (opts.factor_policy.kind) {
        case FactorPolicy::Kind::All: {
            s.selected.resize(pool.cols());
            std::iota(s.selected.begin(), s.selected.end(), 0);
            break;
        }
        case FactorPolicy::Kind::None:
            break;
        case FactorPolicy::Kind::Manual: {
            for (const auto& name : opts.factor_policy.manual) {
                const auto it = std::find(s.pool_names.begin(), s.pool_names.end(), name);
                if (it == s.pool_names.end()) {
                    throw DataError("manual factor '" + name + "' not found");
                }
                s.selected.push_back(it - s.pool_names.begin());
            }
            break;
        }
        case FactorPolicy::Kind::Rfe: {
            s.selected = rfe_indices(pool, y, opts.factor_policy.k, s.pool_names, opts.penalty,
                                     mix_seed(opts.seed, "factor-rfe"));
            break;
        }
        case FactorPolicy::Kind::Pca: {
            s.pca_zscore = zscore_fit(pool, s.pool_names);
            const Matrix z = s.pca_zscore->apply(pool);
            s.pca = pca_step_fit(z, opts.factor_policy.k, PcaMethod::Randomized,
                                 mix_seed(opts.seed, "factor-pca"), s.pool_names, "factor");
            Matrix scores = s.pca->apply(z);
            s.pca_minmax = minmax_fit(scores, s.pca->output_names);
            selected_matrix = s.pca_minmax->apply(scores);
            s.selected_names = s.pca->output_names;
            for (int j = 1; j <= opts.factor_policy.k; ++j) {
                s.provenance.push_back("pca-component(" + std::to_string(j) + ")");
            }
            break;
        }
    }

    if (!s.pca) {
        selected_matrix.resize(pool.rows(), s.selected.size());
        for (std::size_t j = 0; j < s.selected.size(); ++j) {
            selected_matrix.col(j) = pool.col(s.selected[j]);
            s.selected_names.push_back(s.pool_names[s.selected[j]]);
            s.provenance.push_back(pool_provenance[s.selected[j]]);
        }
    }

    if (selected_matrix.cols() > 0) {
        s.adapt_minmax = minmax_fit(selected_matrix, s.selected_names);
    } else {
        s.adapt_minmax = Transform{Transform::Kind::MinMax, {}, {}, MinMaxParams{Vector(0), Vector(0)}};
    }
    return s;
}

ordered_json FactorState::to_json() const {
    ordered_json j;
    j["policy"] = kPolicyNames[static_cast<int>(policy.kind)];
    j["k"] = policy.k;
    j["manual"] = policy.manual;
    j["interactions"] = policy.interactions;
    j["input_names"] = input_names;
    j["pool_names"] = pool_names;
    j["pool_minmax"] = optional_transform_json(pool_minmax);
    ordered_json pj = ordered_json::array();
    for (const auto& [a, b] : pairs) pj.push_back(ordered_json::array({a, b}));
    j["pairs"] = std::move(pj);
    j["product_minmax"] = optional_transform_json(product_minmax);
    j["selected"] = selected;
    j["pca_zscore"] = optional_transform_json(pca_zscore);
    j["pca"] = optional_transform_json(pca);
    j["pca_minmax"] = optional_transform_json(pca_minmax);
    j["adapt_minmax"] = adapt_minmax.to_json();
    j["selected_names"] = selected_names;
    j["provenance"] = provenance;
    return j;
}

FactorState FactorState::from_json(const ordered_json& j) {
    FactorState s;
    const std::string policy = j.at("policy").get<std::string>();
    for (int i = 0; i < 5; ++i) {
        if (policy == kPolicyNames[i]) s.policy.kind = static_cast<FactorPolicy::Kind>(i);
    }
    s.policy.k = j.at("k").get<int>();
    s.policy.manual = j.at("manual").get<std::vector<std::string>>();
    s.policy.interactions = j.at("interactions").get<bool>();
    s.input_names = j.at("input_names").get<std::vector<std::string>>();
    s.pool_names = j.at("pool_names").get<std::vector<std::string>>();
    s.pool_minmax = optional_transform_from_json(j.at("pool_minmax"));
    for (const auto& pair : j.at("pairs")) {
        s.pairs.emplace_back(pair[0].get<Index>(), pair[1].get<Index>());
    }
    s.product_minmax = optional_transform_from_json(j.at("product_minmax"));
    s.selected = j.at("selected").get<std::vector<Index>>();
    s.pca_zscore = optional_transform_from_json(j.at("pca_zscore"));
    s.pca = optional_transform_from_json(j.at("pca"));
    s.pca_minmax = optional_transform_from_json(j.at("pca_minmax"));
    s.adapt_minmax = Transform::from_json(j.at("adapt_minmax"));
    s.selected_names = j.at("selected_names").get<std::vector<std::string>>();
    s.provenance = j.at("provenance").get<std::vector<std::string>>();
    return s;
}

namespace {

ControlsStage fit_controls_stage(const Dataset& train, const ModelOptions& opts) {
    ControlsStage stage;
    Matrix input = train.factors.values;
    std::vector<std::string> names = train.factors.feature_names;
    if (opts.restrict_stage1_to_selection &&
        opts.factor_policy.kind != FactorPolicy::Kind::All) {
        stage.selection = fit_factor_state(train.factors, train.outcome.values, opts);
        input = stage.selection->build(train.factors);
        names = stage.selection->selected_names;
    }
    stage.zscore = zscore_fit(input, names);
    const Matrix z = stage.zscore.apply(input);
    stage.fit = ridge_fit_tuned(z, train.outcome.values, opts.penalty,
                                mix_seed(opts.seed, "ridge-controls"));
    return stage;
}

Vector controls_stage_predict(const ControlsStage& stage, const Dataset& d) {
    Matrix input;
    if (stage.selection) {
        input = stage.selection->build(d.factors);
    } else {
        require_names(d.factors.feature_names, stage.zscore.input_names, "factor table");
        input = d.factors.values;
    }
    return ridge_predict(stage.fit, stage.zscore.apply(input));
}

struct StagePart {
    Matrix values;
    std::vector<std::string> names;
};

LanguageStage fit_language_stage(const Dataset& train, const Vector& target,
                                 const ModelOptions& opts, bool with_adaptation,
                                 bool include_factors, FsStrategy strategy) {
    LanguageStage stage;
    stage.strategy = strategy;
    stage.include_factors = include_factors;

    const Index n = train.n();
    Matrix adapted_factors;  // n x k, min-max scaled
    if (with_adaptation) {
        stage.adaptation = fit_factor_state(train.factors, train.outcome.values, opts);
        adapted_factors = stage.adaptation->build(train.factors);
    }
    const bool any_adapted = with_adaptation && adapted_factors.cols() > 0;

    std::vector<StagePart> parts;
    // Language groups, dataset order.
    for (const auto& table : train.language) {
        GroupChain gc;
        gc.source = table.group;
        gc.source_features = table.feature_names;
        StagePart part;
        if (strategy == FsStrategy::NoFS || strategy == FsStrategy::CombinedFS) {
            part.values = table.values;
            part.names = table.feature_names;
        } else {  // SeparatedFS and EarlyFS reduce each language group
            const GroupReduce r = resolve_reduce(opts, table.group, table.cols(), n);
            ReduceResult rr = reduce_group(table.values, target, r.k_best, r.n_components,
                                           mix_seed(opts.seed, "pca:" + table.group),
                                           table.feature_names, table.group);
            part.values = std::move(rr.reduced);
            part.names = rr.chain.output_names();
            gc.post = std::move(rr.chain);
        }
        parts.push_back(std::move(part));
        stage.groups.push_back(std::move(gc));
    }
    // Adapted groups, dataset order.
    if (any_adapted) {
        for (std::size_t g = 0; g < train.language.size(); ++g) {
            const auto& table = train.language[g];
            const std::string adapted_group = "adapted-" + table.group;
            GroupChain gc;
            gc.source = table.group;
            gc.source_features = table.feature_names;
            gc.adapted = true;

            Matrix base = table.values;
            std::vector<std::string> base_names = table.feature_names;
            if (strategy == FsStrategy::EarlyFS) {
                // Adapt the already-reduced language features.
                gc.pre = stage.groups[g].post;
                base = gc.pre.apply(base);
                base_names = gc.pre.output_names();
            }
            Matrix block = adapt(base, adapted_factors);
            std::vector<std::string> block_names =
                adapted_names(stage.adaptation->selected_names, base_names);

            if (strategy == FsStrategy::SeparatedFS) {
                // Selection before standardization; |Pearson r| is scale
                // invariant, so this matches z-scoring the full block first.
                const GroupReduce r = resolve_reduce(opts, adapted_group, block.cols(), n);
                Transform kb = kbest_fit(block, target, r.k_best, block_names);
                block = kb.apply(block);
                block_names = kb.output_names;
                gc.post.steps.push_back(std::move(kb));

                Transform zs = zscore_fit(block, block_names);
                block = zs.apply(block);
                gc.post.steps.push_back(std::move(zs));

                Transform pc = pca_step_fit(block, r.n_components, PcaMethod::Randomized,
                                            mix_seed(opts.seed, "pca:" + adapted_group),
                                            block_names, adapted_group);
                block = pc.apply(block);
                block_names = pc.output_names;
                gc.post.steps.push_back(std::move(pc));
            } else {
                Transform zs = zscore_fit(block, block_names);
                block = zs.apply(block);
                gc.post.steps.push_back(std::move(zs));
            }
            parts.push_back({std::move(block), std::move(block_names)});
            stage.groups.push_back(std::move(gc));
        }
    }

    std::vector<Matrix> blocks;
    std::vector<std::string> names;
    for (auto& part : parts) {
        blocks.push_back(std::move(part.values));
        names.insert(names.end(), part.names.begin(), part.names.end());
    }
    Matrix x = blocks.empty() ? Matrix(n, 0) : hconcat(blocks);

    if (strategy == FsStrategy::CombinedFS && x.cols() > 0) {
        // Pooled reduction with the summed per-group budgets.
        long k_sum = 0;
        long c_sum = 0;
        for (const auto& table : train.language) {
            const GroupReduce r = resolve_reduce(opts, table.group, table.cols(), n);
            k_sum += r.k_best;
            c_sum += r.n_components;
            if (any_adapted) {
                const GroupReduce ra = resolve_reduce(opts, "adapted-" + table.group,
                                                      table.cols() * adapted_factors.cols(), n);
                k_sum += ra.k_best;
                c_sum += ra.n_components;
            }
        }
        const int k = static_cast<int>(std::min<long>(k_sum, x.cols()));
        const int c = static_cast<int>(std::min<long>({c_sum, k, n - 1}));
        ReduceResult rr = reduce_group(x, target, k, c, mix_seed(opts.seed, "pca:combined"),
                                       names, "combined");
        x = std::move(rr.reduced);
        names = rr.chain.output_names();
        stage.pooled = std::move(rr.chain);
    }

    if (include_factors) {
        stage.factor_zscore = zscore_fit(train.factors.values, train.factors.feature_names);
        x = hconcat({x, stage.factor_zscore->apply(train.factors.values)});
        names.insert(names.end(), train.factors.feature_names.begin(),
                     train.factors.feature_names.end());
    }

    stage.input_names = std::move(names);
    stage.fit = ridge_fit_tuned(x, target, opts.penalty, mix_seed(opts.seed, "ridge-main"));
    return stage;
}

}  // namespace

Matrix LanguageStage::assemble(const Dataset& d) const {
    Matrix adapted_factors;
    if (adaptation) adapted_factors = adaptation->build(d.factors);

    std::vector<Matrix> blocks;
    for (const auto& gc : groups) {
        const FeatureTable& table = d.language_group(gc.source);
        require_names(table.feature_names, gc.source_features, "group '" + gc.source + "'");
        Matrix base = gc.pre.steps.empty() ? table.values : gc.pre.apply(table.values);
        if (gc.adapted) base = adapt(base, adapted_factors);
        blocks.push_back(gc.post.steps.empty() ? std::move(base) : gc.post.apply(base));
    }
    Matrix x = blocks.empty() ? Matrix(d.n(), 0) : hconcat(blocks);
    if (pooled) x = pooled->apply(x);
    if (include_factors) {
        require_names(d.factors.feature_names, factor_zscore->input_names, "factor table");
        x = hconcat({x, factor_zscore->apply(d.factors.values)});
    }
    return x;
}

FittedModel fit_model(Family family, const Dataset& train, const ModelOptions& opts) {
    if (train.n() < 2) throw DataError("fit_model: need at least 2 training instances");
    FittedModel m;
    m.family = family;
    m.seed = opts.seed;
    const Vector& y = train.outcome.values;

    switch (family) {
        case Family::Controls: {
            m.strategy = FsStrategy::SeparatedFS;
            m.controls = fit_controls_stage(train, opts);
            break;
        }
        case Family::Language: {
            m.strategy = FsStrategy::SeparatedFS;
            m.language = fit_language_stage(train, y, opts, false, false,
                                            FsStrategy::SeparatedFS);
            break;
        }
        case Family::Added: {
            m.strategy = FsStrategy::SeparatedFS;
            m.language = fit_language_stage(train, y, opts, false, true,
                                            FsStrategy::SeparatedFS);
            break;
        }
        case Family::Rc: {
            m.strategy = FsStrategy::SeparatedFS;
            m.controls = fit_controls_stage(train, opts);
            const Vector residual = y - controls_stage_predict(*m.controls, train);
            m.language = fit_language_stage(train, residual, opts, false, false,
                                            FsStrategy::SeparatedFS);
            break;
        }
        case Family::Fa: {
            m.strategy = opts.strategy;
            m.language = fit_language_stage(train, y, opts, true, false, opts.strategy);
            break;
        }
        case Family::Rfa: {
            m.strategy = opts.strategy;
            m.controls = fit_controls_stage(train, opts);
            const Vector residual = y - controls_stage_predict(*m.controls, train);
            m.language = fit_language_stage(train, residual, opts, true, false, opts.strategy);
            break;
        }
    }
    return m;
}

Vector predict_stage1(const FittedModel& m, const Dataset& d) {
    if (!m.controls) throw NumericError("model has no controls stage");
    return controls_stage_predict(*m.controls, d);
}

Vector predict_stage2(const FittedModel& m, const Dataset& d) {
    if (!m.language) throw NumericError("model has no language stage");
    return ridge_predict(m.language->fit, m.language->assemble(d));
}

Vector predict(const FittedModel& m, const Dataset& d) {
    Vector out = Vector::Zero(d.n());
    if (m.controls) out += predict_stage1(m, d);
    if (m.language) out += predict_stage2(m, d);
    return out;
}

namespace {

ordered_json ridge_to_json(const RidgeFit& fit) {
    ordered_json j;
    ordered_json w = ordered_json::array();
    for (Index i = 0; i < fit.weights.size(); ++i) w.push_back(fit.weights[i]);
    j["weights"] = std::move(w);
    j["bias"] = fit.bias;
    j["penalty"] = fit.penalty;
    return j;
}

RidgeFit ridge_from_json(const ordered_json& j) {
    RidgeFit fit;
    const auto& w = j.at("weights");
    fit.weights.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) fit.weights[i] = w[i].get<double>();
    fit.bias = j.at("bias").get<double>();
    fit.penalty = j.at("penalty").get<double>();
    return fit;
}

ordered_json chain_to_json(const TransformChain& c) { return c.to_json(); }

}  // namespace

ordered_json FittedModel::to_json() const {
    ordered_json j;
    j["schema_version"] = 1;
    j["family"] = family_name(family);
    j["fs_strategy"] = fs_strategy_name(strategy);
    j["seed"] = seed;
    if (controls) {
        ordered_json c;
        c["selection"] = controls->selection ? controls->selection->to_json()
                                             : ordered_json(nullptr);
        c["zscore"] = controls->zscore.to_json();
        c["fit"] = ridge_to_json(controls->fit);
        j["controls"] = std::move(c);
    } else {
        j["controls"] = nullptr;
    }
    if (language) {
        ordered_json l;
        l["strategy"] = fs_strategy_name(language->strategy);
        l["include_factors"] = language->include_factors;
        l["factor_zscore"] = optional_transform_json(language->factor_zscore);
        l["adaptation"] =
            language->adaptation ? language->adaptation->to_json() : ordered_json(nullptr);
        ordered_json groups = ordered_json::array();
        for (const auto& gc : language->groups) {
            ordered_json g;
            g["source"] = gc.source;
            g["source_features"] = gc.source_features;
            g["adapted"] = gc.adapted;
            g["pre"] = chain_to_json(gc.pre);
            g["post"] = chain_to_json(gc.post);
            groups.push_back(std::move(g));
        }
        l["groups"] = std::move(groups);
        l["pooled"] = language->pooled ? language->pooled->to_json() : ordered_json(nullptr);
        l["input_names"] = language->input_names;
        l["fit"] = ridge_to_json(language->fit);
        j["language"] = std::move(l);
    } else {
        j["language"] = nullptr;
    }
    return j;
}

FittedModel FittedModel::from_json(const ordered_json& j) {
    if (j.at("schema_version").get<int>() != 1) {
        throw DataError("FittedModel: unsupported schema_version");
    }
    FittedModel m;
    m.family = family_from_name(j.at("family").get<std::string>());
    m.strategy = fs_strategy_from_name(j.at("fs_strategy").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("controls").is_null()) {
        const auto& c = j.at("controls");
        ControlsStage stage;
        if (!c.at("selection").is_null()) {
            stage.selection = FactorState::from_json(c.at("selection"));
        }
        stage.zscore = Transform::from_json(c.at("zscore"));
        stage.fit = ridge_from_json(c.at("fit"));
        m.controls = std::move(stage);
    }
    if (!j.at("language").is_null()) {
        const auto& l = j.at("language");
        LanguageStage stage;
        stage.strategy = fs_strategy_from_name(l.at("strategy").get<std::string>());
        stage.include_factors = l.at("include_factors").get<bool>();
        stage.factor_zscore = optional_transform_from_json(l.at("factor_zscore"));
        if (!l.at("adaptation").is_null()) {
            stage.adaptation = FactorState::from_json(l.at("adaptation"));
        }
        for (const auto& g : l.at("groups")) {
            GroupChain gc;
            gc.source = g.at("source").get<std::string>();
            gc.source_features = g.at("source_features").get<std::vector<std::string>>();
            gc.adapted = g.at("adapted").get<bool>();
            gc.pre = TransformChain::from_json(g.at("pre"));
            gc.post = TransformChain::from_json(g.at("post"));
            stage.groups.push_back(std::move(gc));
        }
        if (!l.at("pooled").is_null()) {
            stage.pooled = TransformChain::from_json(l.at("pooled"));
        }
        stage.input_names = l.at("input_names").get<std::vector<std::string>>();
        stage.fit = ridge_from_json(l.at("fit"));
        m.language = std::move(stage);
    }
    return m;
}

}  // namespace rfa
