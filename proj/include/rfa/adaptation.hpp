#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rfa/feature_table.hpp"
#include "rfa/ridge.hpp"

namespace rfa {

// Factor-wise copies of the language block: block j holds the language matrix
// with row i scaled by factors(i, j). Output width = factors.cols() * language.cols(),
// blocks in factor-column order. Factors are expected min-max scaled.
Matrix adapt(const Matrix& language, const Matrix& factors);

// Column names of the adapted matrix: "<factor>*<feature>" in block order.
std::vector<std::string> adapted_names(const std::vector<std::string>& factor_names,
                                       const std::vector<std::string>& feature_names);

// Pairwise products of min-max scaled factor columns, each re-normalized to
// [0, 1]; output = the d original columns followed by the d(d-1)/2 products
// in (i, j), i < j lexicographic pair order.
Matrix interaction_factors(const Matrix& factors_scaled);
std::vector<std::string> interaction_names(const std::vector<std::string>& factor_names);
std::vector<std::pair<Index, Index>> interaction_pairs(Index d);

struct FactorSet {
    FeatureTable table;                    // group = "factors"
    std::vector<std::string> provenance;   // per-column label
};

// Recursive elimination: ridge-fit the z-scored surviving factors to y and
// drop the one with the smallest |weight| until k remain. Returns the
// surviving original (untransformed) columns.
FactorSet select_factors_rfe(const FeatureTable& factors, const Vector& y, int k,
                             const PenaltySpec& penalty, std::uint64_t seed);
std::vector<Index> rfe_indices(const Matrix& factors, const Vector& y, int k,
                               const std::vector<std::string>& names,
                               const PenaltySpec& penalty, std::uint64_t seed);

// k principal-component scores of the z-scored factor matrix, each min-max
// renormalized; provenance "pca-component(j)".
FactorSet select_factors_pca(const FeatureTable& factors, int k, std::uint64_t seed);

}  // namespace rfa
