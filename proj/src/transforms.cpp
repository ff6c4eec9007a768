#include "rfa/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rfa/errors.hpp"

namespace rfa {
namespace {

using nlohmann::ordered_json;

ordered_json vector_to_json(const Vector& v) {
    ordered_json arr = ordered_json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector vector_from_json(const ordered_json& j) {
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
    return v;
}

ordered_json matrix_to_json(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        ordered_json row = ordered_json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const ordered_json& j) {
    const Index rows = static_cast<Index>(j.size());
    const Index cols = rows > 0 ? static_cast<Index>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

void check_width(const Matrix& x, const std::vector<std::string>& names, const char* kind) {
    if (x.cols() != static_cast<Index>(names.size())) {
        throw DataError(std::string(kind) + " transform: input has " +
                        std::to_string(x.cols()) + " columns, expected " +
                        std::to_string(names.size()));
    }
}

}  // namespace

Matrix Transform::apply(const Matrix& x) const {
    switch (kind) {
        case Kind::MinMax: {
            check_width(x, input_names, "minmax");
            const auto& p = std::get<MinMaxParams>(params);
            Matrix out(x.rows(), x.cols());
            for (Index c = 0; c < x.cols(); ++c) {
                if (p.range[c] == 0.0) {
                    out.col(c).setConstant(0.5);
                } else {
                    out.col(c) = (x.col(c).array() - p.min[c]) / p.range[c];
                }
            }
            return out;
        }
        case Kind::ZScore: {
            check_width(x, input_names, "zscore");
            const auto& p = std::get<ZScoreParams>(params);
            Matrix out(x.rows(), x.cols());
            for (Index c = 0; c < x.cols(); ++c) {
                if (p.sd[c] == 0.0) {
                    out.col(c).setZero();
                } else {
                    out.col(c) = (x.col(c).array() - p.mean[c]) / p.sd[c];
                }
            }
            return out;
        }
        case Kind::KBest: {
            check_width(x, input_names, "kbest");
            const auto& p = std::get<KBestParams>(params);
            Matrix out(x.rows(), p.indices.size());
            for (std::size_t j = 0; j < p.indices.size(); ++j) {
                out.col(j) = x.col(p.indices[j]);
            }
            return out;
        }
        case Kind::Pca: {
            check_width(x, input_names, "pca");
            return pca_transform(std::get<PcaParams>(params).model, x);
        }
    }
    throw NumericError("Transform::apply: unknown kind");
}

ordered_json Transform::to_json() const {
    ordered_json j;
    j["input"] = input_names;
    j["output"] = output_names;
    switch (kind) {
        case Kind::MinMax: {
            const auto& p = std::get<MinMaxParams>(params);
            j["kind"] = "minmax";
            j["min"] = vector_to_json(p.min);
            j["range"] = vector_to_json(p.range);
            break;
        }
        case Kind::ZScore: {
            const auto& p = std::get<ZScoreParams>(params);
            j["kind"] = "zscore";
            j["mean"] = vector_to_json(p.mean);
            j["sd"] = vector_to_json(p.sd);
            break;
        }
        case Kind::KBest: {
            const auto& p = std::get<KBestParams>(params);
            j["kind"] = "kbest";
            j["indices"] = p.indices;
            break;
        }
        case Kind::Pca: {
            const auto& p = std::get<PcaParams>(params);
            j["kind"] = "pca";
            j["mean"] = vector_to_json(p.model.mean);
            j["basis"] = matrix_to_json(p.model.basis);
            j["explained_variance"] = vector_to_json(p.model.explained_variance);
            break;
        }
    }
    return j;
}

Transform Transform::from_json(const ordered_json& j) {
    Transform t;
    t.input_names = j.at("input").get<std::vector<std::string>>();
    t.output_names = j.at("output").get<std::vector<std::string>>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "minmax") {
        t.kind = Kind::MinMax;
        t.params = MinMaxParams{vector_from_json(j.at("min")), vector_from_json(j.at("range"))};
    } else if (kind == "zscore") {
        t.kind = Kind::ZScore;
        t.params = ZScoreParams{vector_from_json(j.at("mean")), vector_from_json(j.at("sd"))};
    } else if (kind == "kbest") {
        t.kind = Kind::KBest;
        t.params = KBestParams{j.at("indices").get<std::vector<Index>>()};
    } else if (kind == "pca") {
        t.kind = Kind::Pca;
        PcaModel m;
        m.mean = vector_from_json(j.at("mean"));
        m.basis = matrix_from_json(j.at("basis"));
        m.explained_variance = vector_from_json(j.at("explained_variance"));
        t.params = PcaParams{std::move(m)};
    } else {
        throw DataError("Transform::from_json: unknown kind '" + kind + "'");
    }
    return t;
}

Matrix TransformChain::apply(Matrix x) const {
    for (const auto& step : steps) x = step.apply(x);
    return x;
}

const std::vector<std::string>& TransformChain::output_names() const {
    static const std::vector<std::string> empty;
    return steps.empty() ? empty : steps.back().output_names;
}

const std::vector<std::string>& TransformChain::input_names() const {
    static const std::vector<std::string> empty;
    return steps.empty() ? empty : steps.front().input_names;
}

ordered_json TransformChain::to_json() const {
    ordered_json j;
    j["kind"] = "chain";
    ordered_json arr = ordered_json::array();
    for (const auto& step : steps) arr.push_back(step.to_json());
    j["steps"] = std::move(arr);
    return j;
}

TransformChain TransformChain::from_json(const ordered_json& j) {
    TransformChain chain;
    for (const auto& step : j.at("steps")) chain.steps.push_back(Transform::from_json(step));
    return chain;
}

Transform minmax_fit(const Matrix& train, std::vector<std::string> names) {
    check_width(train, names, "minmax");
    if (train.rows() < 1) throw NumericError("minmax_fit: empty training matrix");
    MinMaxParams p;
    p.min = train.colwise().minCoeff();
    p.range = Vector(train.colwise().maxCoeff()) - p.min;
    Transform t;
    t.kind = Transform::Kind::MinMax;
    t.input_names = names;
    t.output_names = std::move(names);
    t.params = std::move(p);
    return t;
}

Transform zscore_fit(const Matrix& train, std::vector<std::string> names) {
    check_width(train, names, "zscore");
    if (train.rows() < 2) throw NumericError("zscore_fit: need at least 2 training rows");
    ZScoreParams p;
    p.mean = train.colwise().mean();
    p.sd = Vector(train.cols());
    const double denom = static_cast<double>(train.rows() - 1);
    for (Index c = 0; c < train.cols(); ++c) {
        p.sd[c] = std::sqrt((train.col(c).array() - p.mean[c]).square().sum() / denom);
    }
    Transform t;
    t.kind = Transform::Kind::ZScore;
    t.input_names = names;
    t.output_names = std::move(names);
    t.params = std::move(p);
    return t;
}

Vector abs_correlations(const Matrix& x, const Vector& y) {
    if (x.rows() != y.size()) throw NumericError("abs_correlations: row mismatch");
    const Index n = x.rows();
    if (n < 2) throw NumericError("abs_correlations: need at least 2 rows");
    const Vector yc = y.array() - y.mean();
    const double y_ss = yc.squaredNorm();
    Vector out = Vector::Zero(x.cols());
    if (y_ss <= 0.0) return out;  // constant target: everything scores 0
    const Vector means = x.colwise().mean();
    const Vector cross = x.transpose() * yc;  // == Xc^T yc since sum(yc) = 0
    for (Index c = 0; c < x.cols(); ++c) {
        const double col_ss = x.col(c).squaredNorm() -
                              static_cast<double>(n) * means[c] * means[c];
        if (col_ss <= 0.0) continue;
        out[c] = std::min(1.0, std::fabs(cross[c]) / std::sqrt(col_ss * y_ss));
    }
    return out;
}

Transform kbest_fit(const Matrix& train, const Vector& y, int k,
                    const std::vector<std::string>& names) {
    check_width(train, names, "kbest");
    if (k < 1 || k > train.cols()) throw NumericError("kbest_fit: k out of range");
    const Vector scores = abs_correlations(train, y);

    std::vector<Index> order(train.cols());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return names[a] < names[b];
    });
    std::vector<Index> selected(order.begin(), order.begin() + k);
    std::sort(selected.begin(), selected.end());  // keep input column order

    Transform t;
    t.kind = Transform::Kind::KBest;
    t.input_names = names;
    for (Index idx : selected) t.output_names.push_back(names[idx]);
    t.params = KBestParams{std::move(selected)};
    return t;
}

Transform pca_step_fit(const Matrix& train, int k, PcaMethod method, std::uint64_t seed,
                       std::vector<std::string> input_names, const std::string& prefix) {
    check_width(train, input_names, "pca");
    PcaParams p{pca_fit(train, k, method, seed)};
    Transform t;
    t.kind = Transform::Kind::Pca;
    t.input_names = std::move(input_names);
    for (int j = 1; j <= k; ++j) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), ":pc%03d", j);
        t.output_names.push_back(prefix + buf);
    }
    t.params = std::move(p);
    return t;
}

ReduceResult reduce_group(const Matrix& train, const Vector& y, int k_best, int n_components,
                          std::uint64_t seed, const std::vector<std::string>& names,
                          const std::string& prefix) {
    if (n_components < 1 || n_components > k_best || k_best > train.cols()) {
        throw NumericError("reduce_group: need 1 <= n_components <= k_best <= cols");
    }
    ReduceResult out;
    Transform kb = kbest_fit(train, y, k_best, names);
    Matrix selected = kb.apply(train);
    Transform pca = pca_step_fit(selected, n_components, PcaMethod::Randomized, seed,
                                 kb.output_names, prefix);
    out.reduced = pca.apply(selected);
    out.chain.steps.push_back(std::move(kb));
    out.chain.steps.push_back(std::move(pca));
    return out;
}

}  // namespace rfa
