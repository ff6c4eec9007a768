#include "rfa/synthetic.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "rfa/errors.hpp"
#include "rfa/rng.hpp"

namespace rfa {
namespace {

// Language latent space: the leading dims carry the main language effect,
// the trailing dims carry factor-modulated (interaction) effects only. A
// slice of the features loads on the interaction dims; those features have
// no marginal correlation with the outcome, so their signal is reachable
// only through adaptation.
constexpr Index kLanguageLatentDims = 12;
constexpr Index kMainLatentDims = 8;
constexpr Index kFactorLatentDims = 5;
constexpr Index kInteractionFactors = 3;
constexpr double kMainCoupling = 0.35;
constexpr double kInteractionCoupling = 0.8;
// One feature in kInteractionFeatureStride loads on the interaction dims.
constexpr Index kInteractionFeatureStride = 4;

Matrix gaussian(Index rows, Index cols, Rng& rng) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
    }
    return m;
}

Vector unit_sd(Vector v) {
    const double mean = v.mean();
    v.array() -= mean;
    const double sd = std::sqrt(v.squaredNorm() / static_cast<double>(v.size() - 1));
    if (sd > 0.0) v /= sd;
    return v;
}

std::string padded(const char* prefix, Index i, int width) {
    std::string digits = std::to_string(i);
    std::string out(prefix);
    out.append(width - static_cast<int>(digits.size()), '0');
    out += digits;
    return out;
}

nlohmann::ordered_json vec_json(const Vector& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

}  // namespace

SyntheticSpec SyntheticSpec::bench_default(std::uint64_t seed) {
    SyntheticSpec spec;
    spec.seed = seed;
    return spec;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    const Index n = spec.n_instances;
    const Index d = spec.n_factors;
    const Index p = spec.n_language_features;
    if (n < 4 || d < 1 || p < 1) throw DataError("generate_synthetic: spec too small");
    if (spec.sparsity < 0.0 || spec.sparsity > 1.0) {
        throw DataError("generate_synthetic: sparsity must be in [0, 1]");
    }
    if (spec.control_signal < 0.0 || spec.language_signal < 0.0 ||
        spec.interaction_signal < 0.0) {
        throw DataError("generate_synthetic: signal weights must be nonnegative");
    }

    std::vector<std::string> ids;
    for (Index i = 1; i <= n; ++i) ids.push_back(padded("c", i, 4));

    // Factors: low-rank Gaussian mixtures with idiosyncratic noise, winsorized
    // (bounded attributes, like percentages) and mapped through arbitrary
    // per-column affine ranges.
    Rng frng(mix_seed(spec.seed, "factors"));
    const Matrix factor_latent = gaussian(n, kFactorLatentDims, frng);
    const Matrix mixing = gaussian(kFactorLatentDims, d, frng);
    Matrix factors = factor_latent * mixing / std::sqrt(double(kFactorLatentDims)) +
                     0.35 * gaussian(n, d, frng);
    std::vector<std::string> factor_names;
    for (Index j = 0; j < d; ++j) {
        const double sd = std::sqrt(factors.col(j).squaredNorm() / double(n));
        const double cap = 1.2 * sd;
        factors.col(j) = factors.col(j).cwiseMax(-cap).cwiseMin(cap);
        const double scale = frng.uniform(0.5, 20.0);
        const double offset = frng.uniform(-5.0, 5.0);
        factors.col(j) = factors.col(j).array() * scale + offset;
        factor_names.push_back(padded("f", j + 1, 2));
    }

    // Language latent space shared by both groups.
    Rng lrng(mix_seed(spec.seed, "language-latent"));
    const Matrix latent = gaussian(n, kLanguageLatentDims, lrng);

    // Outcome components, each normalized to unit sd so the signal weights
    // are a variance decomposition.
    Rng yrng(mix_seed(spec.seed, "outcome"));
    Vector beta(d);
    for (Index j = 0; j < d; ++j) beta[j] = yrng.normal();
    Vector gamma = Vector::Zero(kLanguageLatentDims);
    for (Index j = 0; j < kMainLatentDims; ++j) gamma[j] = yrng.normal();

    Matrix factors_z = factors;
    for (Index j = 0; j < d; ++j) factors_z.col(j) = unit_sd(factors_z.col(j));
    const Vector control_part = unit_sd(factors_z * beta);
    const Vector language_part = unit_sd(latent * gamma);

    const Index n_int = std::min<Index>(kInteractionFactors, d);
    Matrix delta = Matrix::Zero(kLanguageLatentDims, n_int);
    for (Index c = 0; c < n_int; ++c) {
        for (Index r = kMainLatentDims; r < kLanguageLatentDims; ++r) {
            delta(r, c) = yrng.normal();
        }
    }
    Vector interaction_raw = Vector::Zero(n);
    for (Index c = 0; c < n_int; ++c) {
        Vector v = factors.col(c);
        const double lo = v.minCoeff();
        const double hi = v.maxCoeff();
        v = (v.array() - lo) / (hi - lo);
        v.array() -= v.mean();  // centered so the term carries no main effect
        interaction_raw += v.cwiseProduct(latent * delta.col(c));
    }
    const Vector interaction_part =
        spec.interaction_signal > 0.0 ? unit_sd(interaction_raw) : Vector(Vector::Zero(n));

    Vector y = spec.control_signal * control_part + spec.language_signal * language_part +
               spec.interaction_signal * interaction_part;
    for (Index i = 0; i < n; ++i) y[i] += spec.noise_sd * yrng.normal();

    // Count features: Poisson rates proportional to exp of a latent loading,
    // with a sparsity mask.
    Dataset dataset;
    const char* group_names[2] = {"ngrams", "topics"};
    const char* feature_prefix[2] = {"ng", "tp"};
    for (int g = 0; g < 2; ++g) {
        Rng grng(mix_seed(spec.seed, std::string("group-") + group_names[g]));
        Matrix values(n, p);
        std::vector<std::string> names;
        for (Index j = 0; j < p; ++j) {
            names.push_back(padded(feature_prefix[g], j + 1, 4));
            const bool interaction_feature = (j % kInteractionFeatureStride) ==
                                             (kInteractionFeatureStride - 1);
            const Index span = interaction_feature
                                   ? kLanguageLatentDims - kMainLatentDims
                                   : kMainLatentDims;
            const Index offset = interaction_feature ? kMainLatentDims : 0;
            Vector w = Vector::Zero(kLanguageLatentDims);
            const Index first = offset + ((j + g) % span);
            const Index second = offset + static_cast<Index>(grng.below(span));
            w[first] = grng.uniform(0.5, 1.5) * (grng.uniform() < 0.5 ? -1.0 : 1.0);
            w[second] += grng.uniform(0.5, 1.5) * (grng.uniform() < 0.5 ? -1.0 : 1.0);
            w /= w.norm();
            const double coupling = interaction_feature ? kInteractionCoupling : kMainCoupling;
            const double base = interaction_feature
                                    ? std::exp(grng.uniform(std::log(1.0), std::log(4.0)))
                                    : std::exp(grng.uniform(std::log(0.5), std::log(6.0)));
            for (Index i = 0; i < n; ++i) {
                if (grng.uniform() < spec.sparsity) {
                    values(i, j) = 0.0;
                    continue;
                }
                const double rate = base * std::exp(coupling * latent.row(i).dot(w));
                values(i, j) = static_cast<double>(grng.poisson(rate));
            }
        }
        dataset.language.push_back(
            FeatureTable::make(group_names[g], ids, std::move(names), std::move(values)));
    }

    dataset.factors = FeatureTable::make("factors", ids, factor_names, std::move(factors));
    dataset.outcome = OutcomeVector::make("y", ids, std::move(y));

    nlohmann::ordered_json truth;
    truth["seed"] = spec.seed;
    truth["control_signal"] = spec.control_signal;
    truth["language_signal"] = spec.language_signal;
    truth["interaction_signal"] = spec.interaction_signal;
    truth["noise_sd"] = spec.noise_sd;
    truth["sparsity"] = spec.sparsity;
    truth["beta"] = vec_json(beta);
    truth["gamma"] = vec_json(gamma);
    nlohmann::ordered_json deltas = nlohmann::ordered_json::array();
    for (Index c = 0; c < n_int; ++c) deltas.push_back(vec_json(delta.col(c)));
    truth["delta"] = std::move(deltas);
    truth["interaction_factor_names"] =
        std::vector<std::string>(factor_names.begin(), factor_names.begin() + n_int);
    truth["language_latent_dims"] = kLanguageLatentDims;
    truth["factor_latent_dims"] = kFactorLatentDims;

    return SyntheticData{std::move(dataset), std::move(truth)};
}

}  // namespace rfa
