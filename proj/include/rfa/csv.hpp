#pragma once

#include <string>

#include "rfa/feature_table.hpp"

namespace rfa {

// Long format: header `group_id,feature,value`, one cell per row. Absent
// (id, feature) cells are 0; feature order is lexicographic, id order is
// first appearance. Duplicate (id, feature) pairs are an error naming the
// line. Files ending in .gz are read through gzip.
FeatureTable load_long_csv(const std::string& path, const std::string& group);

// Wide format: header `group_id,<feat1>,<feat2>,...`, one instance per row,
// kept in file order.
FeatureTable load_wide_csv(const std::string& path, const std::string& group);

// Two-column file `group_id,<name>`; the header's second field names the outcome.
OutcomeVector load_outcome_csv(const std::string& path);

void save_wide_csv(const FeatureTable& table, const std::string& path);
void save_outcome_csv(const OutcomeVector& outcome, const std::string& path);

}  // namespace rfa
