#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "rfa/matrix.hpp"
#include "rfa/pca.hpp"

namespace rfa {

struct MinMaxParams {
    Vector min;
    Vector range;  // max - min; 0 marks a constant column (maps to 0.5)
};

struct ZScoreParams {
    Vector mean;
    Vector sd;  // sample sd; 0 marks a constant column (maps to 0)
};

struct KBestParams {
    std::vector<Index> indices;  // selected input columns, ascending
};

struct PcaParams {
    PcaModel model;
};

// One frozen preprocessing step. Parameters are learned from training rows
// only; apply() validates the input width and never recomputes statistics.
struct Transform {
    enum class Kind { MinMax, ZScore, KBest, Pca };

    Kind kind;
    std::vector<std::string> input_names;
    std::vector<std::string> output_names;
    std::variant<MinMaxParams, ZScoreParams, KBestParams, PcaParams> params;

    Matrix apply(const Matrix& x) const;
    nlohmann::ordered_json to_json() const;
    static Transform from_json(const nlohmann::ordered_json& j);
};

struct TransformChain {
    std::vector<Transform> steps;

    Matrix apply(Matrix x) const;
    const std::vector<std::string>& output_names() const;
    const std::vector<std::string>& input_names() const;
    nlohmann::ordered_json to_json() const;
    static TransformChain from_json(const nlohmann::ordered_json& j);
};

Transform minmax_fit(const Matrix& train, std::vector<std::string> names);
Transform zscore_fit(const Matrix& train, std::vector<std::string> names);

// Selects the k features with the largest |Pearson r| against y on the
// training rows. Constant features score 0; ties break lexicographically by
// feature name; output keeps the input column order.
Transform kbest_fit(const Matrix& train, const Vector& y, int k,
                    const std::vector<std::string>& names);

// PCA step whose outputs are named "<prefix>:pc001", ... (always randomized
// in pipeline use; exact available for oracles).
Transform pca_step_fit(const Matrix& train, int k, PcaMethod method, std::uint64_t seed,
                       std::vector<std::string> input_names, const std::string& prefix);

// The per-group reduction used throughout: k-best selection then randomized
// PCA. k_best and n_components must satisfy 1 <= n_components <= k_best <= cols.
struct ReduceResult {
    TransformChain chain;
    Matrix reduced;
};
ReduceResult reduce_group(const Matrix& train, const Vector& y, int k_best, int n_components,
                          std::uint64_t seed, const std::vector<std::string>& names,
                          const std::string& prefix);

// |Pearson r| of each column against y; constant columns score 0.
Vector abs_correlations(const Matrix& x, const Vector& y);

}  // namespace rfa
