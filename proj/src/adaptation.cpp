#include "rfa/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rfa/errors.hpp"
#include "rfa/rng.hpp"
#include "rfa/transforms.hpp"

namespace rfa {

Matrix adapt(const Matrix& language, const Matrix& factors) {
    if (language.rows() != factors.rows()) {
        throw NumericError("adapt: language and factor row counts differ");
    }
    const Index l = language.cols();
    const Index d = factors.cols();
    Matrix out(language.rows(), d * l);
    for (Index j = 0; j < d; ++j) {
        out.middleCols(j * l, l) = language.array().colwise() * factors.col(j).array();
    }
    return out;
}

std::vector<std::string> adapted_names(const std::vector<std::string>& factor_names,
                                       const std::vector<std::string>& feature_names) {
    std::vector<std::string> out;
    out.reserve(factor_names.size() * feature_names.size());
    for (const auto& f : factor_names) {
        for (const auto& x : feature_names) {
            out.push_back(f + "*" + x);
        }
    }
    return out;
}

std::vector<std::pair<Index, Index>> interaction_pairs(Index d) {
    std::vector<std::pair<Index, Index>> pairs;
    for (Index i = 0; i < d; ++i) {
        for (Index j = i + 1; j < d; ++j) pairs.emplace_back(i, j);
    }
    return pairs;
}

Matrix interaction_factors(const Matrix& factors_scaled) {
    const Index d = factors_scaled.cols();
    if (d < 2) throw NumericError("interaction_factors: need at least 2 factors");
    const auto pairs = interaction_pairs(d);
    Matrix out(factors_scaled.rows(), d + static_cast<Index>(pairs.size()));
    out.leftCols(d) = factors_scaled;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        Vector prod =
            factors_scaled.col(pairs[p].first).cwiseProduct(factors_scaled.col(pairs[p].second));
        const double lo = prod.minCoeff();
        const double hi = prod.maxCoeff();
        if (hi > lo) {
            prod = (prod.array() - lo) / (hi - lo);
        } else {
            prod.setConstant(0.5);  // constant product, scaler convention
        }
        out.col(d + static_cast<Index>(p)) = prod;
    }
    return out;
}

std::vector<std::string> interaction_names(const std::vector<std::string>& factor_names) {
    std::vector<std::string> out = factor_names;
    for (const auto& [i, j] : interaction_pairs(static_cast<Index>(factor_names.size()))) {
        out.push_back(factor_names[i] + "x" + factor_names[j]);
    }
    return out;
}

std::vector<Index> rfe_indices(const Matrix& factors, const Vector& y, int k,
                               const std::vector<std::string>& names,
                               const PenaltySpec& penalty, std::uint64_t seed) {
    const Index d = factors.cols();
    if (k < 1 || k > d) throw NumericError("rfe: k out of range");
    const Matrix z = zscore_fit(factors, names).apply(factors);

    std::vector<Index> survivors(d);
    std::iota(survivors.begin(), survivors.end(), 0);
    int round = 0;
    while (static_cast<int>(survivors.size()) > k) {
        Matrix sub(z.rows(), survivors.size());
        for (std::size_t c = 0; c < survivors.size(); ++c) sub.col(c) = z.col(survivors[c]);
        const RidgeFit fit = ridge_fit_tuned(
            sub, y, penalty, mix_seed(seed, "rfe-round-" + std::to_string(round)));
        std::size_t weakest = 0;
        for (std::size_t c = 1; c < survivors.size(); ++c) {
            const double a = std::fabs(fit.weights[c]);
            const double b = std::fabs(fit.weights[weakest]);
            if (a < b || (a == b && names[survivors[c]] > names[survivors[weakest]])) {
                weakest = c;
            }
        }
        survivors.erase(survivors.begin() + weakest);
        ++round;
    }
    return survivors;
}

FactorSet select_factors_rfe(const FeatureTable& factors, const Vector& y, int k,
                             const PenaltySpec& penalty, std::uint64_t seed) {
    const auto kept = rfe_indices(factors.values, y, k, factors.feature_names, penalty, seed);
    std::vector<std::string> names;
    Matrix values(factors.rows(), kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) {
        names.push_back(factors.feature_names[kept[j]]);
        values.col(j) = factors.values.col(kept[j]);
    }
    FactorSet out;
    out.table = FeatureTable::make("factors", factors.instance_ids, std::move(names),
                                   std::move(values));
    out.provenance.assign(kept.size(), "original");
    return out;
}

FactorSet select_factors_pca(const FeatureTable& factors, int k, std::uint64_t seed) {
    const Matrix z = zscore_fit(factors.values, factors.feature_names).apply(factors.values);
    const PcaModel model = pca_fit(z, k, PcaMethod::Randomized, seed);
    Matrix scores = pca_transform(model, z);

    std::vector<std::string> names;
    std::vector<std::string> provenance;
    for (int j = 1; j <= k; ++j) {
        names.push_back("factor-pc" + std::to_string(j));
        provenance.push_back("pca-component(" + std::to_string(j) + ")");
    }
    scores = minmax_fit(scores, names).apply(scores);

    FactorSet out;
    out.table = FeatureTable::make("factors", factors.instance_ids, std::move(names),
                                   std::move(scores));
    out.provenance = std::move(provenance);
    return out;
}

}  // namespace rfa
