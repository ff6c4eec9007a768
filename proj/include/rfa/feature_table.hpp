#pragma once

#include <string>
#include <vector>

#include "rfa/matrix.hpp"

namespace rfa {

// Closed set of table group labels.
bool is_valid_group(const std::string& group);
bool is_language_group(const std::string& group);

// Row-aligned matrix of instances x named features. Instance ids and feature
// names are unique; values are finite. Immutable by convention after build.
struct FeatureTable {
    std::string group;
    std::vector<std::string> instance_ids;
    std::vector<std::string> feature_names;
    Matrix values;  // instance_ids.size() x feature_names.size()

    static FeatureTable make(std::string group, std::vector<std::string> instance_ids,
                             std::vector<std::string> feature_names, Matrix values);

    Index rows() const { return values.rows(); }
    Index cols() const { return values.cols(); }
};

struct OutcomeVector {
    std::string name;
    std::vector<std::string> instance_ids;
    Vector values;

    static OutcomeVector make(std::string name, std::vector<std::string> instance_ids,
                              Vector values);
};

struct Dataset {
    std::vector<FeatureTable> language;
    FeatureTable factors;
    OutcomeVector outcome;

    const std::vector<std::string>& ids() const { return outcome.instance_ids; }
    Index n() const { return outcome.values.size(); }
    const FeatureTable& language_group(const std::string& group) const;
};

struct AlignResult {
    Dataset dataset;
    // Dropped-id counts per source: one entry per language table, then
    // factors, then outcome, in that order.
    std::vector<Index> dropped;
};

// Intersects instance ids across all sources, sorts them lexicographically
// and reorders every table consistently. Throws DataError on empty overlap.
AlignResult align(std::vector<FeatureTable> language, FeatureTable factors,
                  OutcomeVector outcome);

// Keeps features with a nonzero value in at least min_fraction of instances.
FeatureTable prune_by_coverage(const FeatureTable& table, double min_fraction);

// Removes instances whose word count falls below min_count from every table.
Dataset drop_low_wordcount(const Dataset& d, const OutcomeVector& counts, double min_count);

// Row subset (by position) of a table / dataset, preserving order.
FeatureTable table_rows(const FeatureTable& t, const std::vector<Index>& rows);
Dataset dataset_rows(const Dataset& d, const std::vector<Index>& rows);

}  // namespace rfa
