#include "rfa/report_io.hpp"

#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "rfa/errors.hpp"

namespace rfa {

using nlohmann::ordered_json;

namespace {

ordered_json finite_or_null(double v) {
    if (std::isnan(v) || std::isinf(v)) return nullptr;
    return v;
}

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    return out;
}

}  // namespace

ordered_json report_to_json(const ExperimentReport& report) {
    ordered_json j;
    j["schema_version"] = 1;
    j["generated_at"] = timestamp_utc();
    j["seed"] = report.seed;
    j["n_folds"] = report.n_folds;
    j["config"] = report.config_snapshot;
    j["instance_ids"] = report.ids;

    ordered_json models = ordered_json::array();
    for (const auto& m : report.models) {
        ordered_json mj;
        mj["label"] = m.label;
        ordered_json folds = ordered_json::array();
        for (const auto& f : m.folds) {
            ordered_json fj;
            fj["fold"] = f.fold;
            fj["r2"] = finite_or_null(f.r2);
            fj["pearson"] = finite_or_null(f.pearson);
            fj["fit"] = f.info;
            folds.push_back(std::move(fj));
        }
        mj["folds"] = std::move(folds);
        mj["pooled_r2"] = finite_or_null(m.pooled_r2);
        mj["pooled_pearson"] = finite_or_null(m.pooled_pearson);
        mj["mean_fold_r2"] = finite_or_null(m.mean_fold_r2);
        ordered_json preds = ordered_json::array();
        for (Index i = 0; i < m.pooled_predictions.size(); ++i) {
            preds.push_back(m.pooled_predictions[i]);
        }
        mj["pooled_predictions"] = std::move(preds);
        models.push_back(std::move(mj));
    }
    j["models"] = std::move(models);

    ordered_json pairs = ordered_json::array();
    for (const auto& p : report.pairwise) {
        ordered_json pj;
        pj["a"] = p.a;
        pj["b"] = p.b;
        pj["t"] = finite_or_null(p.t);
        pj["p"] = finite_or_null(p.p);
        pairs.push_back(std::move(pj));
    }
    j["pairwise_t"] = std::move(pairs);

    ordered_json curves = ordered_json::array();
    for (const auto& c : report.curves) {
        ordered_json cj;
        cj["param"] = c.param;
        cj["value"] = c.value;
        cj["label"] = c.label;
        cj["mean_r2"] = finite_or_null(c.mean_r2);
        curves.push_back(std::move(cj));
    }
    j["curves"] = std::move(curves);
    return j;
}

void write_report_json(const ExperimentReport& report, const std::string& path) {
    auto out = open_out(path);
    out << report_to_json(report).dump(2) << '\n';
}

std::string report_table(const ExperimentReport& report) {
    std::ostringstream out;
    std::size_t label_width = 5;
    for (const auto& m : report.models) label_width = std::max(label_width, m.label.size());

    out << std::left << std::setw(static_cast<int>(label_width) + 2) << "model"
        << std::right << std::setw(12) << "pooled_r2" << std::setw(12) << "pooled_r"
        << std::setw(12) << "mean_r2" << '\n';
    out << std::string(label_width + 2 + 36, '-') << '\n';
    out << std::fixed << std::setprecision(4);
    for (const auto& m : report.models) {
        out << std::left << std::setw(static_cast<int>(label_width) + 2) << m.label
            << std::right << std::setw(12) << m.pooled_r2 << std::setw(12) << m.pooled_pearson
            << std::setw(12) << m.mean_fold_r2 << '\n';
    }
    if (!report.pairwise.empty()) {
        out << '\n'
            << std::left << std::setw(static_cast<int>(2 * label_width) + 7) << "paired t (|err|)"
            << std::right << std::setw(12) << "t" << std::setw(12) << "p" << '\n';
        for (const auto& p : report.pairwise) {
            out << std::left << std::setw(static_cast<int>(2 * label_width) + 7)
                << (p.a + " vs " + p.b) << std::right << std::setw(12) << p.t << std::setw(12)
                << p.p << '\n';
        }
    }
    return out.str();
}

void write_report_table(const ExperimentReport& report, const std::string& path) {
    auto out = open_out(path);
    out << report_table(report);
}

void write_curves_csv(const ExperimentReport& report, const std::string& path) {
    auto out = open_out(path);
    out.precision(17);
    out << "param,value,label,mean_r2\n";
    for (const auto& c : report.curves) {
        out << c.param << ',' << c.value << ',' << c.label << ',' << c.mean_r2 << '\n';
    }
}

}  // namespace rfa
