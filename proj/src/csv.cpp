#include "rfa/csv.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>
#include <vector>

#include "rfa/errors.hpp"

namespace rfa {
namespace {

// Reads the whole file line by line; .gz (and plain files, which the zlib
// gz* API passes through) are both handled by one path.
std::vector<std::string> read_lines(const std::string& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) throw DataError("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string current;
    char buf[1 << 16];
    int got = 0;
    while ((got = gzread(f, buf, sizeof(buf))) > 0) {
        for (int i = 0; i < got; ++i) {
            if (buf[i] == '\n') {
                if (!current.empty() && current.back() == '\r') current.pop_back();
                lines.push_back(std::move(current));
                current.clear();
            } else {
                current.push_back(buf[i]);
            }
        }
    }
    const bool read_error = got < 0;
    gzclose(f);
    if (read_error) throw DataError("read error in file: " + path);
    if (!current.empty()) {
        if (current.back() == '\r') current.pop_back();
        lines.push_back(std::move(current));
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

double parse_value(const std::string& token, const std::string& path, std::size_t line_no) {
    double v = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc() || res.ptr != end || token.empty() || !std::isfinite(v)) {
        throw DataError(path + ":" + std::to_string(line_no) + ": non-numeric value '" +
                        token + "'");
    }
    return v;
}

[[noreturn]] void fail_line(const std::string& path, std::size_t line_no,
                            const std::string& msg) {
    throw DataError(path + ":" + std::to_string(line_no) + ": " + msg);
}

}  // namespace

FeatureTable load_long_csv(const std::string& path, const std::string& group) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw DataError(path + ": empty file");
    if (split_csv(lines[0]) != std::vector<std::string>{"group_id", "feature", "value"}) {
        fail_line(path, 1, "expected header 'group_id,feature,value'");
    }

    std::vector<std::string> ids;                       // first-appearance order
    std::unordered_map<std::string, Index> id_index;
    std::map<std::string, Index> feature_index;         // lexicographic
    struct Cell {
        Index row;
        std::string feature;
        double value;
        std::size_t line_no;
    };
    std::vector<Cell> cells;

    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv(lines[i]);
        if (fields.size() != 3) fail_line(path, i + 1, "expected 3 fields");
        if (fields[0].empty()) fail_line(path, i + 1, "empty group_id");
        if (fields[1].empty()) fail_line(path, i + 1, "empty feature name");
        const auto [it, inserted] =
            id_index.try_emplace(fields[0], static_cast<Index>(ids.size()));
        if (inserted) ids.push_back(fields[0]);
        feature_index.try_emplace(fields[1], 0);
        cells.push_back({it->second, fields[1], parse_value(fields[2], path, i + 1), i + 1});
    }
    if (cells.empty()) throw DataError(path + ": no data rows");

    Index next = 0;
    for (auto& [name, idx] : feature_index) idx = next++;

    std::vector<std::string> names;
    names.reserve(feature_index.size());
    for (const auto& [name, idx] : feature_index) names.push_back(name);

    Matrix values = Matrix::Zero(ids.size(), names.size());
    Matrix seen = Matrix::Zero(ids.size(), names.size());
    for (const auto& cell : cells) {
        const Index c = feature_index.at(cell.feature);
        if (seen(cell.row, c) != 0.0) {
            fail_line(path, cell.line_no,
                      "duplicate cell (" + ids[cell.row] + ", " + cell.feature + ")");
        }
        seen(cell.row, c) = 1.0;
        values(cell.row, c) = cell.value;
    }
    return FeatureTable::make(group, std::move(ids), std::move(names), std::move(values));
}

FeatureTable load_wide_csv(const std::string& path, const std::string& group) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw DataError(path + ": empty file");
    const auto header = split_csv(lines[0]);
    if (header.size() < 2 || header[0] != "group_id") {
        fail_line(path, 1, "expected header 'group_id,<feature>,...'");
    }
    const std::vector<std::string> names(header.begin() + 1, header.end());

    std::vector<std::string> ids;
    std::vector<Vector> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv(lines[i]);
        if (fields.size() != header.size()) {
            fail_line(path, i + 1, "ragged row: expected " + std::to_string(header.size()) +
                                       " fields, got " + std::to_string(fields.size()));
        }
        ids.push_back(fields[0]);
        Vector row(names.size());
        for (std::size_t c = 1; c < fields.size(); ++c) {
            row[c - 1] = parse_value(fields[c], path, i + 1);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path + ": no data rows");

    Matrix values(rows.size(), names.size());
    for (std::size_t r = 0; r < rows.size(); ++r) values.row(r) = rows[r];
    return FeatureTable::make(group, std::move(ids), names, std::move(values));
}

OutcomeVector load_outcome_csv(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw DataError(path + ": empty file");
    const auto header = split_csv(lines[0]);
    if (header.size() != 2 || header[0] != "group_id" || header[1].empty()) {
        fail_line(path, 1, "expected header 'group_id,<name>'");
    }
    std::vector<std::string> ids;
    std::vector<double> values;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto fields = split_csv(lines[i]);
        if (fields.size() != 2) fail_line(path, i + 1, "expected 2 fields");
        ids.push_back(fields[0]);
        values.push_back(parse_value(fields[1], path, i + 1));
    }
    if (ids.empty()) throw DataError(path + ": no data rows");
    return OutcomeVector::make(header[1], std::move(ids),
                               Eigen::Map<Vector>(values.data(), values.size()));
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out.precision(17);
    return out;
}

}  // namespace

void save_wide_csv(const FeatureTable& table, const std::string& path) {
    auto out = open_out(path);
    out << "group_id";
    for (const auto& name : table.feature_names) out << ',' << name;
    out << '\n';
    for (Index r = 0; r < table.rows(); ++r) {
        out << table.instance_ids[r];
        for (Index c = 0; c < table.cols(); ++c) out << ',' << table.values(r, c);
        out << '\n';
    }
}

void save_outcome_csv(const OutcomeVector& outcome, const std::string& path) {
    auto out = open_out(path);
    out << "group_id," << outcome.name << '\n';
    for (Index r = 0; r < static_cast<Index>(outcome.instance_ids.size()); ++r) {
        out << outcome.instance_ids[r] << ',' << outcome.values[r] << '\n';
    }
}

}  // namespace rfa
