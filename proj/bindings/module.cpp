#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rfa/adaptation.hpp"
#include "rfa/config.hpp"
#include "rfa/errors.hpp"
#include "rfa/experiments.hpp"
#include "rfa/metrics.hpp"
#include "rfa/pca.hpp"
#include "rfa/pipelines.hpp"
#include "rfa/report_io.hpp"
#include "rfa/ridge.hpp"
#include "rfa/synthetic.hpp"
#include "rfa/transforms.hpp"

namespace py = pybind11;
using namespace rfa;

namespace {

std::vector<std::string> default_names(Index n, const std::string& prefix) {
    std::vector<std::string> out;
    for (Index i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

PcaMethod method_from_string(const std::string& method) {
    if (method == "exact") return PcaMethod::Exact;
    if (method == "randomized") return PcaMethod::Randomized;
    throw ConfigError("pca method must be 'exact' or 'randomized'");
}

Dataset dataset_from_arrays(const std::map<std::string, Matrix>& language,
                            const Matrix& factors, const Vector& outcome) {
    const Index n = outcome.size();
    const auto ids = default_names(n, "i");
    Dataset ds;
    for (const auto& [group, values] : language) {
        ds.language.push_back(FeatureTable::make(
            group, ids, default_names(values.cols(), group + "_"), values));
    }
    ds.factors = FeatureTable::make("factors", ids,
                                    default_names(factors.cols(), "f"), factors);
    ds.outcome = OutcomeVector::make("y", ids, outcome);
    return ds;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Community-outcome regression with residualized factor adaptation";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    m.def(
        "ridge_fit",
        [](const Matrix& x, const Vector& y, double penalty) {
            const RidgeFit fit = ridge_fit(x, y, penalty);
            return py::make_tuple(fit.weights, fit.bias);
        },
        py::arg("x"), py::arg("y"), py::arg("penalty"),
        "Closed-form ridge with an unpenalized intercept; returns (weights, bias).");

    m.def(
        "ridge_predict",
        [](const Vector& weights, double bias, const Matrix& x) {
            RidgeFit fit;
            fit.weights = weights;
            fit.bias = bias;
            return ridge_predict(fit, x);
        },
        py::arg("weights"), py::arg("bias"), py::arg("x"));

    m.def(
        "pca_fit",
        [](const Matrix& x, int k, const std::string& method, std::uint64_t seed) {
            const PcaModel model = pca_fit(x, k, method_from_string(method), seed);
            py::dict out;
            out["mean"] = model.mean;
            out["components"] = model.basis;
            out["explained_variance"] = model.explained_variance;
            return out;
        },
        py::arg("x"), py::arg("k"), py::arg("method") = "randomized", py::arg("seed") = 0);

    m.def(
        "pca_transform",
        [](const Matrix& x, const Vector& mean, const Matrix& components) {
            PcaModel model;
            model.mean = mean;
            model.basis = components;
            model.explained_variance = Vector::Zero(components.cols());
            return pca_transform(model, x);
        },
        py::arg("x"), py::arg("mean"), py::arg("components"));

    m.def("r_squared", &r_squared, py::arg("y_true"), py::arg("y_pred"));
    m.def("pearson_r", &pearson_r, py::arg("a"), py::arg("b"));
    m.def(
        "paired_t_test",
        [](const Vector& a, const Vector& b) {
            const TTestResult r = paired_t_test(a, b);
            return py::make_tuple(r.t, r.p);
        },
        py::arg("errors_a"), py::arg("errors_b"));

    m.def("adapt", &adapt, py::arg("language"), py::arg("factors"),
          "Factor-wise Hadamard copies of the language block (width d*l).");
    m.def("interaction_factors", &interaction_factors, py::arg("factors_scaled"));

    m.def(
        "select_factors_rfe",
        [](const Matrix& factors, const Vector& y, int k, std::uint64_t seed) {
            return rfe_indices(factors, y, k, default_names(factors.cols(), "f"),
                               PenaltySpec::default_grid(), seed);
        },
        py::arg("factors"), py::arg("y"), py::arg("k"), py::arg("seed") = 0,
        "Indices of the k factors surviving recursive elimination.");

    m.def(
        "generate_synthetic",
        [](Index n_instances, Index n_language_features, Index n_factors,
           double control_signal, double language_signal, double interaction_signal,
           double noise_sd, double sparsity, std::uint64_t seed) {
            SyntheticSpec spec;
            spec.n_instances = n_instances;
            spec.n_language_features = n_language_features;
            spec.n_factors = n_factors;
            spec.control_signal = control_signal;
            spec.language_signal = language_signal;
            spec.interaction_signal = interaction_signal;
            spec.noise_sd = noise_sd;
            spec.sparsity = sparsity;
            spec.seed = seed;
            const SyntheticData data = generate_synthetic(spec);
            py::dict out;
            for (const auto& table : data.dataset.language) {
                out[table.group.c_str()] = table.values;
            }
            out["factors"] = data.dataset.factors.values;
            out["y"] = data.dataset.outcome.values;
            out["truth"] = data.truth.dump();
            return out;
        },
        py::arg("n_instances") = 800, py::arg("n_language_features") = 500,
        py::arg("n_factors") = 11, py::arg("control_signal") = 1.0,
        py::arg("language_signal") = 0.8, py::arg("interaction_signal") = 0.9,
        py::arg("noise_sd") = 0.6, py::arg("sparsity") = 0.3, py::arg("seed") = 7);

    m.def(
        "run_experiment",
        [](const std::map<std::string, Matrix>& language, const Matrix& factors,
           const Vector& outcome, const std::vector<std::string>& families, int folds,
           std::uint64_t seed, int k_best, int n_components, const std::string& fs_strategy,
           int jobs) {
            const Dataset ds = dataset_from_arrays(language, factors, outcome);
            ModelOptions opts;
            opts.seed = seed;
            opts.reduce_defaults = {k_best, n_components};
            opts.strategy = fs_strategy_from_name(fs_strategy);
            std::vector<ModelRunConfig> cfgs;
            for (const auto& name : families) {
                cfgs.push_back({name, family_from_name(name), opts});
            }
            const FoldPlan plan = FoldPlan::make(ds.ids(), folds, seed);
            ExperimentReport rep = run_cv(ds, cfgs, plan, jobs);
            rep.config_snapshot = "python-api";
            return report_to_json(rep).dump();
        },
        py::arg("language"), py::arg("factors"), py::arg("y"), py::arg("families"),
        py::arg("folds") = 10, py::arg("seed") = 42, py::arg("k_best") = 300,
        py::arg("n_components") = 20, py::arg("fs_strategy") = "SeparatedFS",
        py::arg("jobs") = 1,
        "Cross-validated comparison of model families; returns the report JSON.");

    m.def(
        "fit_predict",
        [](const std::map<std::string, Matrix>& language, const Matrix& factors,
           const Vector& outcome, const std::string& family, int k_best, int n_components,
           std::uint64_t seed) {
            const Dataset ds = dataset_from_arrays(language, factors, outcome);
            ModelOptions opts;
            opts.seed = seed;
            opts.reduce_defaults = {k_best, n_components};
            const FittedModel model = fit_model(family_from_name(family), ds, opts);
            return predict(model, ds);
        },
        py::arg("language"), py::arg("factors"), py::arg("y"), py::arg("family"),
        py::arg("k_best") = 300, py::arg("n_components") = 20, py::arg("seed") = 42,
        "Fits one family on the full data and returns in-sample predictions.");
}
