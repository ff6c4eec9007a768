#pragma once

#include <cstdint>

#include <json.hpp>

#include "rfa/feature_table.hpp"

namespace rfa {

// Planted-signal regression benchmark: correlated Gaussian factors, sparse
// nonnegative count features whose expected values load on latent topics,
// and an outcome mixing a factor effect, a latent-language effect and
// factor-modulated (interaction) language effects plus Gaussian noise.
struct SyntheticSpec {
    Index n_instances = 800;
    Index n_language_features = 500;  // per group; groups are "ngrams" and "topics"
    Index n_factors = 11;
    double control_signal = 1.0;
    double language_signal = 0.8;
    double interaction_signal = 0.9;
    double noise_sd = 0.6;
    double sparsity = 0.3;  // fraction of count cells forced to zero
    std::uint64_t seed = 7;

    // The committed benchmark configuration used by the experiment suite.
    static SyntheticSpec bench_default(std::uint64_t seed = 7);
};

struct SyntheticData {
    Dataset dataset;
    nlohmann::ordered_json truth;  // planted coefficients, for oracle checks
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace rfa
