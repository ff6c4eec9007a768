#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "rfa/errors.hpp"
#include "rfa/experiments.hpp"
#include "rfa/metrics.hpp"
#include "rfa/report_io.hpp"
#include "rfa/synthetic.hpp"

using namespace rfa;

namespace {

Dataset small_synth(std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n_instances = 120;
    spec.n_language_features = 60;
    spec.n_factors = 5;
    spec.seed = seed;
    return generate_synthetic(spec).dataset;
}

ModelOptions small_opts(std::uint64_t seed) {
    ModelOptions opts;
    opts.seed = seed;
    opts.reduce_defaults = {40, 8};
    return opts;
}

}  // namespace

TEST_CASE("FoldPlan partitions ids with balanced sizes and is seed-reproducible") {
    std::vector<std::string> ids;
    for (int i = 0; i < 23; ++i) ids.push_back("i" + std::to_string(i));
    const FoldPlan a = FoldPlan::make(ids, 5, 42);
    const FoldPlan b = FoldPlan::make(ids, 5, 42);
    CHECK(a.fold_of_row == b.fold_of_row);

    std::vector<int> sizes(5, 0);
    for (int f : a.fold_of_row) ++sizes[f];
    const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    CHECK(*hi - *lo <= 1);

    const FoldPlan c = FoldPlan::make(ids, 5, 43);
    CHECK(a.fold_of_row != c.fold_of_row);

    CHECK_THROWS_AS(FoldPlan::make(ids, 1, 0), DataError);
    CHECK_THROWS_AS(FoldPlan::make({"a", "b", "c"}, 2, 0), DataError);  // fold of size 1
}

TEST_CASE("run_cv_generic: perfect and mean stubs bracket pooled R^2") {
    const Dataset ds = small_synth(3);
    const FoldPlan plan = FoldPlan::make(ds.ids(), 5, 7);

    const GenericModelSpec perfect{
        "perfect", [](const Dataset&) -> FittedPredictor {
            return {[](const Dataset& test) { return test.outcome.values; }, {}};
        }};
    const GenericModelSpec mean_stub{
        "mean", [](const Dataset& train) -> FittedPredictor {
            const double mean = train.outcome.values.mean();
            return {[mean](const Dataset& test) {
                        return Vector(Vector::Constant(test.n(), mean));
                    },
                    {}};
        }};

    const ExperimentReport report = run_cv_generic(ds, {perfect, mean_stub}, plan);
    CHECK(report.model("perfect").pooled_r2 == doctest::Approx(1.0));
    CHECK(report.model("mean").pooled_r2 <= 0.0);

    // Identical error vectors: t = 0, p = 1 against itself is skipped, but the
    // perfect model's errors are all zero, so perfect-vs-perfect never occurs;
    // instead check the recorded pair is present and finite.
    REQUIRE(report.pairwise.size() == 1);
    CHECK(report.pairwise[0].a == "perfect");
    CHECK(std::isfinite(report.pairwise[0].p));
}

TEST_CASE("run_cv pooled predictions match two hand-fit ridge models on 4 instances") {
    // Factor x = [0,1,2,3], y = [0,1,2,3], folds {0,2} and {1,3}, penalty 1.
    // Fit on {1,3}: z-scored x -> w = sqrt(2)/2, bias = 2; predictions on
    // {0,2} are [1, 2]. Fit on {0,2}: bias = 1; predictions on {1,3} are
    // [1, 2]. Pooled vector: [1, 1, 2, 2].
    const std::vector<std::string> ids = {"a", "b", "c", "d"};
    Matrix fx(4, 1);
    fx << 0, 1, 2, 3;
    Vector y(4);
    y << 0, 1, 2, 3;
    Dataset ds;
    ds.factors = FeatureTable::make("factors", ids, {"x"}, fx);
    ds.outcome = OutcomeVector::make("y", ids, y);

    FoldPlan plan;
    plan.n_folds = 2;
    plan.seed = 0;
    plan.ids = ids;
    plan.fold_of_row = {0, 1, 0, 1};

    ModelOptions opts;
    opts.penalty = PenaltySpec::fixed_value(1.0);
    const ExperimentReport report =
        run_cv(ds, {{"controls", Family::Controls, opts}}, plan);

    const Vector pooled = report.model("controls").pooled_predictions;
    CHECK(pooled[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pooled[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pooled[2] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(pooled[3] == doctest::Approx(2.0).epsilon(1e-12));
    // Pooled metrics from the hand numbers: R^2 = 1 - 2/5, r = 2/sqrt(5).
    CHECK(report.model("controls").pooled_r2 == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(report.model("controls").pooled_pearson ==
          doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("run_cv covers every instance exactly once and is jobs-invariant") {
    const Dataset ds = small_synth(5);
    const FoldPlan plan = FoldPlan::make(ds.ids(), 4, 11);
    const std::vector<ModelRunConfig> cfgs = {
        {"controls", Family::Controls, small_opts(1)},
        {"language", Family::Language, small_opts(1)},
    };
    const ExperimentReport seq = run_cv(ds, cfgs, plan, 1);
    const ExperimentReport par = run_cv(ds, cfgs, plan, 4);
    for (std::size_t m = 0; m < cfgs.size(); ++m) {
        CHECK(seq.models[m].pooled_predictions == par.models[m].pooled_predictions);
        CHECK(seq.models[m].folds.size() == 4);
    }
}

TEST_CASE("generate_synthetic is deterministic and shape-correct") {
    const SyntheticSpec spec = SyntheticSpec::bench_default(3);
    SyntheticSpec small = spec;
    small.n_instances = 100;
    small.n_language_features = 40;
    const SyntheticData a = generate_synthetic(small);
    const SyntheticData b = generate_synthetic(small);
    CHECK(a.dataset.outcome.values == b.dataset.outcome.values);
    CHECK(a.dataset.language[0].values == b.dataset.language[0].values);
    CHECK(a.truth == b.truth);

    CHECK(a.dataset.language.size() == 2);
    CHECK(a.dataset.language[0].group == "ngrams");
    CHECK(a.dataset.language[1].group == "topics");
    CHECK(a.dataset.language[0].cols() == 40);
    CHECK(a.dataset.factors.cols() == 11);
    CHECK(a.dataset.n() == 100);

    // Counts are nonnegative and sparse-ish.
    CHECK(a.dataset.language[0].values.minCoeff() >= 0.0);
    const double zero_fraction =
        double((a.dataset.language[0].values.array() == 0.0).count()) / (100.0 * 40.0);
    CHECK(zero_fraction > 0.2);
}

TEST_CASE("synthetic with only control signal: language models cannot win") {
    SyntheticSpec spec;
    spec.n_instances = 150;
    spec.n_language_features = 50;
    spec.n_factors = 5;
    spec.language_signal = 0.0;
    spec.interaction_signal = 0.0;
    spec.control_signal = 1.0;
    spec.noise_sd = 0.3;
    spec.seed = 9;
    const Dataset ds = generate_synthetic(spec).dataset;
    const FoldPlan plan = FoldPlan::make(ds.ids(), 5, 1);
    const ExperimentReport report = run_cv(
        ds,
        {{"controls", Family::Controls, small_opts(2)},
         {"language", Family::Language, small_opts(2)}},
        plan);
    CHECK(report.model("controls").pooled_r2 >=
          report.model("language").pooled_r2 - 0.03);
    CHECK(report.model("controls").pooled_r2 > 0.5);
}

TEST_CASE("noiseless realizable synthetic: rfa training fit approaches 1") {
    SyntheticSpec spec;
    spec.n_instances = 90;
    spec.n_language_features = 50;
    spec.n_factors = 4;
    spec.noise_sd = 0.0;
    spec.seed = 13;
    const Dataset ds = generate_synthetic(spec).dataset;

    ModelOptions opts;
    opts.seed = 3;
    opts.strategy = FsStrategy::NoFS;
    opts.penalty = PenaltySpec::fixed_value(1e-6);
    const FittedModel m = fit_model(Family::Rfa, ds, opts);
    CHECK(r_squared(ds.outcome.values, predict(m, ds)) > 0.99);
}

TEST_CASE("sweep_kbest emits one curve point per (k, family)") {
    const Dataset ds = small_synth(21);
    const FoldPlan plan = FoldPlan::make(ds.ids(), 4, 2);
    const ExperimentReport report =
        sweep_kbest(ds, {10, 20, 40}, {Family::Fa, Family::Rfa}, small_opts(4), plan);
    CHECK(report.curves.size() == 6);
    CHECK(report.curves[0].param == "k_best");
    CHECK(report.models.size() == 6);
    std::set<std::string> labels;
    for (const auto& c : report.curves) labels.insert(c.label);
    CHECK(labels == std::set<std::string>{"fa", "rfa"});
}

TEST_CASE("sweep_factors runs both methods and honors the interaction pool") {
    const Dataset ds = small_synth(22);
    const FoldPlan plan = FoldPlan::make(ds.ids(), 4, 3);
    const ExperimentReport pca_report = sweep_factors(
        ds, FactorSelectMethod::Pca, {1, 3}, {Family::Rfa}, false, small_opts(5), plan);
    CHECK(pca_report.curves.size() == 2);

    const ExperimentReport rfe_report = sweep_factors(
        ds, FactorSelectMethod::Rfe, {2}, {Family::Rc, Family::Rfa}, true, small_opts(5), plan);
    CHECK(rfe_report.curves.size() == 2);
    for (const auto& c : rfe_report.curves) CHECK(std::isfinite(c.mean_r2));
}

TEST_CASE("compare_fs_strategies produces all four strategies") {
    const Dataset ds = small_synth(23);
    const FoldPlan plan = FoldPlan::make(ds.ids(), 4, 4);
    const ExperimentReport report = compare_fs_strategies(ds, small_opts(6), plan);
    REQUIRE(report.curves.size() == 4);
    std::set<std::string> labels;
    for (const auto& c : report.curves) labels.insert(c.label);
    CHECK(labels == std::set<std::string>{"NoFS", "SeparatedFS", "CombinedFS", "EarlyFS"});
}

TEST_CASE("reports carry factor provenance and tuned penalties per fold") {
    const Dataset ds = small_synth(37);
    const FoldPlan plan = FoldPlan::make(ds.ids(), 3, 6);
    ModelOptions opts = small_opts(8);
    opts.factor_policy.kind = FactorPolicy::Kind::Rfe;
    opts.factor_policy.k = 2;
    const ExperimentReport report = run_cv(ds, {{"rfa", Family::Rfa, opts}}, plan);
    for (const auto& fold : report.model("rfa").folds) {
        REQUIRE(fold.info.contains("factor_provenance"));
        CHECK(fold.info.at("factor_provenance").size() == 2);
        CHECK(fold.info.at("selected_factors").size() == 2);
        CHECK(fold.info.at("penalty").get<double>() > 0.0);
        CHECK(fold.info.at("stage1_penalty").get<double>() > 0.0);
    }
    const auto j = report_to_json(report);
    CHECK(j["models"][0]["folds"][0]["fit"].contains("factor_provenance"));
}

TEST_CASE("report JSON carries every fold cell and is deterministic modulo timestamp") {
    const Dataset ds = small_synth(31);
    const FoldPlan plan = FoldPlan::make(ds.ids(), 3, 5);
    ExperimentReport report = run_cv(ds, {{"controls", Family::Controls, small_opts(7)}}, plan);
    report.config_snapshot = "snapshot";
    auto a = report_to_json(report);
    auto b = report_to_json(report);
    a.erase("generated_at");
    b.erase("generated_at");
    CHECK(a == b);
    CHECK(a["models"][0]["folds"].size() == 3);
    CHECK(a["config"] == "snapshot");
    const std::string table = report_table(report);
    CHECK(table.find("controls") != std::string::npos);
}
