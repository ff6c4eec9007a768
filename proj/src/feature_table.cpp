#include "rfa/feature_table.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "rfa/errors.hpp"

namespace rfa {
namespace {

void require_unique(const std::vector<std::string>& items, const std::string& what) {
    std::unordered_set<std::string> seen;
    for (const auto& s : items) {
        if (!seen.insert(s).second) {
            throw DataError(what + ": duplicate entry '" + s + "'");
        }
    }
}

std::unordered_map<std::string, Index> index_of(const std::vector<std::string>& ids) {
    std::unordered_map<std::string, Index> m;
    m.reserve(ids.size());
    for (Index i = 0; i < static_cast<Index>(ids.size()); ++i) m.emplace(ids[i], i);
    return m;
}

}  // namespace

bool is_valid_group(const std::string& group) {
    return group == "ngrams" || group == "topics" || group == "factors" ||
           group == "adapted-ngrams" || group == "adapted-topics";
}

bool is_language_group(const std::string& group) {
    return group == "ngrams" || group == "topics";
}

FeatureTable FeatureTable::make(std::string group, std::vector<std::string> instance_ids,
                                std::vector<std::string> feature_names, Matrix values) {
    if (!is_valid_group(group)) {
        throw DataError("FeatureTable: unknown group label '" + group + "'");
    }
    if (values.rows() != static_cast<Index>(instance_ids.size()) ||
        values.cols() != static_cast<Index>(feature_names.size())) {
        throw DataError("FeatureTable: matrix dimensions do not match id/name counts");
    }
    require_unique(instance_ids, "FeatureTable instance ids");
    require_unique(feature_names, "FeatureTable feature names");
    ensure_finite(values, "FeatureTable '" + group + "'");
    FeatureTable t;
    t.group = std::move(group);
    t.instance_ids = std::move(instance_ids);
    t.feature_names = std::move(feature_names);
    t.values = std::move(values);
    return t;
}

OutcomeVector OutcomeVector::make(std::string name, std::vector<std::string> instance_ids,
                                  Vector values) {
    if (values.size() != static_cast<Index>(instance_ids.size())) {
        throw DataError("OutcomeVector: value count does not match id count");
    }
    require_unique(instance_ids, "OutcomeVector instance ids");
    ensure_finite(values, "OutcomeVector '" + name + "'");
    OutcomeVector o;
    o.name = std::move(name);
    o.instance_ids = std::move(instance_ids);
    o.values = std::move(values);
    return o;
}

const FeatureTable& Dataset::language_group(const std::string& group) const {
    for (const auto& t : language) {
        if (t.group == group) return t;
    }
    throw DataError("Dataset: no language table with group '" + group + "'");
}

AlignResult align(std::vector<FeatureTable> language, FeatureTable factors,
                  OutcomeVector outcome) {
    if (language.empty() && factors.rows() == 0) {
        throw DataError("align: need at least one feature table");
    }

    // Intersection of all id sets, then lexicographic order.
    std::unordered_map<std::string, int> hits;
    const int sources = static_cast<int>(language.size()) + 2;
    auto tally = [&hits](const std::vector<std::string>& ids) {
        for (const auto& id : ids) ++hits[id];
    };
    for (const auto& t : language) tally(t.instance_ids);
    tally(factors.instance_ids);
    tally(outcome.instance_ids);

    std::vector<std::string> kept;
    for (const auto& [id, count] : hits) {
        if (count == sources) kept.push_back(id);
    }
    if (kept.empty()) throw DataError("align: empty instance-id intersection");
    std::sort(kept.begin(), kept.end());

    AlignResult out;
    auto reorder_table = [&kept](const FeatureTable& t) {
        const auto idx = index_of(t.instance_ids);
        Matrix values(kept.size(), t.cols());
        for (Index r = 0; r < static_cast<Index>(kept.size()); ++r) {
            values.row(r) = t.values.row(idx.at(kept[r]));
        }
        return FeatureTable::make(t.group, kept, t.feature_names, std::move(values));
    };

    for (const auto& t : language) {
        out.dropped.push_back(static_cast<Index>(t.instance_ids.size() - kept.size()));
        out.dataset.language.push_back(reorder_table(t));
    }
    out.dropped.push_back(static_cast<Index>(factors.instance_ids.size() - kept.size()));
    out.dataset.factors = reorder_table(factors);

    const auto oidx = index_of(outcome.instance_ids);
    Vector values(kept.size());
    for (Index r = 0; r < static_cast<Index>(kept.size()); ++r) {
        values[r] = outcome.values[oidx.at(kept[r])];
    }
    out.dropped.push_back(static_cast<Index>(outcome.instance_ids.size() - kept.size()));
    out.dataset.outcome = OutcomeVector::make(outcome.name, kept, std::move(values));
    return out;
}

FeatureTable prune_by_coverage(const FeatureTable& table, double min_fraction) {
    if (min_fraction < 0.0 || min_fraction > 1.0) {
        throw DataError("prune_by_coverage: min_fraction must be in [0, 1]");
    }
    const Index n = table.rows();
    const double needed = min_fraction * static_cast<double>(n);
    std::vector<Index> kept;
    for (Index c = 0; c < table.cols(); ++c) {
        const Index nonzero = (table.values.col(c).array() != 0.0).count();
        if (static_cast<double>(nonzero) >= needed) kept.push_back(c);
    }
    if (kept.empty()) {
        throw DataError("prune_by_coverage: every feature fell below the coverage threshold");
    }
    std::vector<std::string> names;
    Matrix values(n, kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) {
        names.push_back(table.feature_names[kept[j]]);
        values.col(j) = table.values.col(kept[j]);
    }
    return FeatureTable::make(table.group, table.instance_ids, std::move(names),
                              std::move(values));
}

Dataset drop_low_wordcount(const Dataset& d, const OutcomeVector& counts, double min_count) {
    const auto cidx = index_of(counts.instance_ids);
    std::vector<Index> kept;
    for (Index r = 0; r < d.n(); ++r) {
        const auto it = cidx.find(d.ids()[r]);
        if (it == cidx.end()) {
            throw DataError("drop_low_wordcount: no count for instance '" + d.ids()[r] + "'");
        }
        if (counts.values[it->second] >= min_count) kept.push_back(r);
    }
    if (kept.empty()) throw DataError("drop_low_wordcount: all instances dropped");
    return dataset_rows(d, kept);
}

FeatureTable table_rows(const FeatureTable& t, const std::vector<Index>& rows) {
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    Matrix values(rows.size(), t.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        ids.push_back(t.instance_ids[rows[r]]);
        values.row(r) = t.values.row(rows[r]);
    }
    return FeatureTable::make(t.group, std::move(ids), t.feature_names, std::move(values));
}

Dataset dataset_rows(const Dataset& d, const std::vector<Index>& rows) {
    Dataset out;
    for (const auto& t : d.language) out.language.push_back(table_rows(t, rows));
    out.factors = table_rows(d.factors, rows);
    std::vector<std::string> ids;
    Vector values(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        ids.push_back(d.outcome.instance_ids[rows[r]]);
        values[r] = d.outcome.values[rows[r]];
    }
    out.outcome = OutcomeVector::make(d.outcome.name, std::move(ids), std::move(values));
    return out;
}

}  // namespace rfa
