#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfa/experiments.hpp"
#include "rfa/pipelines.hpp"
#include "rfa/synthetic.hpp"

namespace rfa {

// Run configuration parsed from a sectioned key/value file. Unknown keys and
// malformed values raise ConfigError naming the field path. The raw text is
// retained so reports can embed a replayable snapshot.
struct RunConfig {
    struct LanguageSource {
        std::string group;
        std::string path;
        bool long_format = false;
    };

    // [data]
    std::vector<LanguageSource> language;
    std::string factors_path;
    std::string outcome_path;
    std::string wordcounts_path;  // optional
    std::string synthetic;        // "bench-default" or "spec" to generate instead of load

    // [preprocess]
    double coverage_fraction = 0.0;
    double wordcount_min = 0.0;
    GroupReduce reduce_defaults;
    std::map<std::string, GroupReduce> reduce_overrides;

    // [factors]
    FactorPolicy factor_policy;

    // [model]
    std::vector<Family> families = {Family::Controls, Family::Language, Family::Added,
                                    Family::Rc,       Family::Fa,       Family::Rfa};
    FsStrategy fs_strategy = FsStrategy::SeparatedFS;
    PenaltySpec penalty = PenaltySpec::default_grid();

    // [cv]
    int folds = 10;
    std::uint64_t seed = 42;

    // [synth]
    SyntheticSpec synth;

    // [sweep]
    std::vector<int> sweep_k_grid;
    std::vector<int> sweep_counts;  // empty = 1..n_factors
    FactorSelectMethod sweep_method = FactorSelectMethod::Pca;
    bool sweep_interactions = false;
    std::vector<Family> sweep_families;  // empty = kind-specific default

    std::string raw;  // verbatim file contents

    static RunConfig parse_file(const std::string& path);
    static RunConfig parse_text(const std::string& text, const std::string& origin);

    ModelOptions model_options() const;
};

// Loads CSV sources (or generates synthetic data), aligns, applies the word
// count threshold and coverage pruning. Prints nothing; throws DataError.
Dataset load_dataset(const RunConfig& cfg);

}  // namespace rfa
