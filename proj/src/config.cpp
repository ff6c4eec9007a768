#include "rfa/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rfa/csv.hpp"
#include "rfa/errors.hpp"

namespace rfa {
namespace {

struct Value {
    enum class Type { Str, Num, Bool, StrList, NumList };
    Type type = Type::Str;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<std::string> str_list;
    std::vector<double> num_list;
    int line = 0;
};

using Section = std::map<std::string, Value>;
using Doc = std::map<std::string, Section>;

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

bool parse_number(const std::string& token, double& out) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc() && res.ptr == end && !token.empty();
}

Value parse_scalar(const std::string& token, const std::string& origin, int line) {
    Value v;
    v.line = line;
    if (token.size() >= 2 && token.front() == '"' && token.back() == '"') {
        v.type = Value::Type::Str;
        v.str = token.substr(1, token.size() - 2);
        return v;
    }
    if (token == "true" || token == "false") {
        v.type = Value::Type::Bool;
        v.boolean = token == "true";
        return v;
    }
    if (parse_number(token, v.num)) {
        v.type = Value::Type::Num;
        return v;
    }
    fail(origin, line, "cannot parse value '" + token + "' (strings need quotes)");
}

Value parse_value(const std::string& token, const std::string& origin, int line) {
    if (token.empty()) fail(origin, line, "empty value");
    if (token.front() != '[') return parse_scalar(token, origin, line);
    if (token.back() != ']') fail(origin, line, "unterminated array");
    Value v;
    v.line = line;
    const std::string body = trim(token.substr(1, token.size() - 2));
    if (body.empty()) {
        v.type = Value::Type::StrList;
        return v;
    }
    std::vector<std::string> items;
    std::string current;
    bool in_quotes = false;
    for (char c : body) {
        if (c == '"') in_quotes = !in_quotes;
        if (c == ',' && !in_quotes) {
            items.push_back(trim(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    items.push_back(trim(current));
    bool all_strings = true;
    bool all_numbers = true;
    for (const auto& item : items) {
        const Value s = parse_scalar(item, origin, line);
        if (s.type == Value::Type::Str) {
            v.str_list.push_back(s.str);
            all_numbers = false;
        } else if (s.type == Value::Type::Num) {
            v.num_list.push_back(s.num);
            all_strings = false;
        } else {
            fail(origin, line, "arrays may hold strings or numbers only");
        }
    }
    if (!all_strings && !all_numbers) fail(origin, line, "mixed array types");
    v.type = all_strings ? Value::Type::StrList : Value::Type::NumList;
    return v;
}

Doc parse_doc(const std::string& text, const std::string& origin) {
    Doc doc;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            // Only treat # as a comment outside quotes.
            bool in_quotes = false;
            for (std::size_t i = 0; i < line.size(); ++i) {
                if (line[i] == '"') in_quotes = !in_quotes;
                if (line[i] == '#' && !in_quotes) {
                    line = line.substr(0, i);
                    break;
                }
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(origin, line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(origin, line_no, "empty section name");
            doc[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(origin, line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) fail(origin, line_no, "empty key");
        if (doc[section].count(key)) {
            fail(origin, line_no, "duplicate key '" + key + "'");
        }
        doc[section][key] = parse_value(trim(line.substr(eq + 1)), origin, line_no);
    }
    return doc;
}

class SectionReader {
public:
    SectionReader(const Doc& doc, std::string section, const std::string& origin)
        : origin_(origin), section_(std::move(section)) {
        const auto it = doc.find(section_);
        if (it != doc.end()) values_ = &it->second;
    }

    bool present() const { return values_ != nullptr; }
    bool has(const std::string& key) const { return values_ && values_->count(key); }

    std::string path(const std::string& key) const {
        return section_.empty() ? key : section_ + "." + key;
    }

    const Value& get(const std::string& key) const {
        const auto it = values_->find(key);
        if (it == values_->end()) {
            throw ConfigError(origin_ + ": missing required key '" + path(key) + "'");
        }
        return it->second;
    }

    std::string str(const std::string& key) const {
        const Value& v = get(key);
        if (v.type != Value::Type::Str) type_error(key, "string", v);
        return v.str;
    }
    double number(const std::string& key) const {
        const Value& v = get(key);
        if (v.type != Value::Type::Num) type_error(key, "number", v);
        return v.num;
    }
    bool boolean(const std::string& key) const {
        const Value& v = get(key);
        if (v.type != Value::Type::Bool) type_error(key, "boolean", v);
        return v.boolean;
    }
    std::vector<std::string> str_list(const std::string& key) const {
        const Value& v = get(key);
        if (v.type != Value::Type::StrList) type_error(key, "string array", v);
        return v.str_list;
    }
    std::vector<double> num_list(const std::string& key) const {
        const Value& v = get(key);
        if (v.type != Value::Type::NumList) type_error(key, "number array", v);
        return v.num_list;
    }

    void reject_unknown(const std::set<std::string>& allowed) const {
        if (!values_) return;
        for (const auto& [key, value] : *values_) {
            if (!allowed.count(key)) {
                fail(origin_, value.line, "unknown key '" + path(key) + "'");
            }
        }
    }

private:
    [[noreturn]] void type_error(const std::string& key, const char* want,
                                 const Value& v) const {
        fail(origin_, v.line, "'" + path(key) + "' must be a " + want);
    }

    std::string origin_;
    std::string section_;
    const Section* values_ = nullptr;
};

int positive_int(const SectionReader& r, const std::string& key, double v) {
    if (v < 1 || v != std::floor(v)) {
        throw ConfigError("'" + r.path(key) + "' must be a positive integer");
    }
    return static_cast<int>(v);
}

std::vector<int> int_list(const SectionReader& r, const std::string& key) {
    std::vector<int> out;
    for (double v : r.num_list(key)) out.push_back(positive_int(r, key, v));
    return out;
}

std::vector<Family> family_list(const std::vector<std::string>& names) {
    std::vector<Family> out;
    for (const auto& name : names) out.push_back(family_from_name(name));
    return out;
}

const std::set<std::string> kGroupKeys = {"ngrams", "topics"};

}  // namespace

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

RunConfig RunConfig::parse_text(const std::string& text, const std::string& origin) {
    const Doc doc = parse_doc(text, origin);
    const std::set<std::string> known_sections = {"",     "data",  "preprocess", "factors",
                                                  "model", "cv",    "synth",      "sweep"};
    for (const auto& [name, section] : doc) {
        if (!known_sections.count(name)) {
            throw ConfigError(origin + ": unknown section [" + name + "]");
        }
    }
    SectionReader top(doc, "", origin);
    top.reject_unknown({});

    RunConfig cfg;
    cfg.raw = text;

    SectionReader data(doc, "data", origin);
    data.reject_unknown({"ngrams", "ngrams_format", "topics", "topics_format", "factors",
                         "outcome", "wordcounts", "synthetic"});
    if (data.has("synthetic")) {
        cfg.synthetic = data.str("synthetic");
        if (cfg.synthetic != "bench-default" && cfg.synthetic != "spec") {
            throw ConfigError("'data.synthetic' must be \"bench-default\" or \"spec\"");
        }
    }
    for (const auto& group : kGroupKeys) {
        if (!data.has(group)) continue;
        LanguageSource src;
        src.group = group;
        src.path = data.str(group);
        if (data.has(group + "_format")) {
            const std::string fmt = data.str(group + "_format");
            if (fmt != "wide" && fmt != "long") {
                throw ConfigError("'data." + group + "_format' must be \"wide\" or \"long\"");
            }
            src.long_format = fmt == "long";
        }
        cfg.language.push_back(std::move(src));
    }
    if (data.has("factors")) cfg.factors_path = data.str("factors");
    if (data.has("outcome")) cfg.outcome_path = data.str("outcome");
    if (data.has("wordcounts")) cfg.wordcounts_path = data.str("wordcounts");
    if (cfg.synthetic.empty()) {
        if (cfg.language.empty() || cfg.factors_path.empty() || cfg.outcome_path.empty()) {
            throw ConfigError(origin +
                              ": [data] needs ngrams/topics, factors and outcome paths "
                              "(or data.synthetic)");
        }
    }

    SectionReader pre(doc, "preprocess", origin);
    pre.reject_unknown({"preset", "coverage_fraction", "wordcount_min", "k_best",
                        "k_best_ngrams", "k_best_topics", "k_best_adapted_ngrams",
                        "k_best_adapted_topics", "n_components", "n_components_ngrams",
                        "n_components_topics", "n_components_adapted_ngrams",
                        "n_components_adapted_topics"});
    // Paper-style presets; explicit keys below override them.
    if (pre.has("preset")) {
        const std::string preset = pre.str("preset");
        if (preset == "health") {
            cfg.coverage_fraction = 0.95;
            cfg.wordcount_min = 20000;
            cfg.reduce_defaults = {10000, 100};
            cfg.reduce_overrides["topics"] = {2000, 100};
        } else if (preset == "economy") {
            cfg.coverage_fraction = 0.10;
            cfg.wordcount_min = 10000;
            cfg.reduce_defaults = {8000, 100};
            cfg.reduce_overrides["topics"] = {1500, 100};
        } else {
            throw ConfigError("'preprocess.preset' must be \"health\" or \"economy\"");
        }
    }
    if (pre.has("coverage_fraction")) {
        cfg.coverage_fraction = pre.number("coverage_fraction");
        if (cfg.coverage_fraction < 0.0 || cfg.coverage_fraction > 1.0) {
            throw ConfigError("'preprocess.coverage_fraction' must be in [0, 1]");
        }
    }
    if (pre.has("wordcount_min")) cfg.wordcount_min = pre.number("wordcount_min");
    if (pre.has("k_best")) {
        cfg.reduce_defaults.k_best = positive_int(pre, "k_best", pre.number("k_best"));
    }
    if (pre.has("n_components")) {
        cfg.reduce_defaults.n_components =
            positive_int(pre, "n_components", pre.number("n_components"));
    }
    const std::pair<std::string, std::string> group_keys[] = {
        {"ngrams", "ngrams"},
        {"topics", "topics"},
        {"adapted_ngrams", "adapted-ngrams"},
        {"adapted_topics", "adapted-topics"}};
    for (const auto& [suffix, group] : group_keys) {
        if (pre.has("k_best_" + suffix)) {
            auto& entry = cfg.reduce_overrides.try_emplace(group, cfg.reduce_defaults)
                              .first->second;
            entry.k_best =
                positive_int(pre, "k_best_" + suffix, pre.number("k_best_" + suffix));
        }
        if (pre.has("n_components_" + suffix)) {
            auto& entry = cfg.reduce_overrides.try_emplace(group, cfg.reduce_defaults)
                              .first->second;
            entry.n_components = positive_int(pre, "n_components_" + suffix,
                                              pre.number("n_components_" + suffix));
        }
    }

    SectionReader fac(doc, "factors", origin);
    fac.reject_unknown({"policy", "manual", "k", "interactions"});
    if (fac.has("policy")) {
        const std::string policy = fac.str("policy");
        if (policy == "all") {
            cfg.factor_policy.kind = FactorPolicy::Kind::All;
        } else if (policy == "manual") {
            cfg.factor_policy.kind = FactorPolicy::Kind::Manual;
            cfg.factor_policy.manual = fac.str_list("manual");
            if (cfg.factor_policy.manual.empty()) {
                throw ConfigError("'factors.manual' must name at least one factor");
            }
        } else if (policy == "rfe") {
            cfg.factor_policy.kind = FactorPolicy::Kind::Rfe;
            cfg.factor_policy.k = positive_int(fac, "k", fac.number("k"));
        } else if (policy == "pca") {
            cfg.factor_policy.kind = FactorPolicy::Kind::Pca;
            cfg.factor_policy.k = positive_int(fac, "k", fac.number("k"));
        } else if (policy == "none") {
            cfg.factor_policy.kind = FactorPolicy::Kind::None;
        } else {
            throw ConfigError("'factors.policy' must be all|manual|rfe|pca|none");
        }
    }
    if (fac.has("interactions")) cfg.factor_policy.interactions = fac.boolean("interactions");

    SectionReader model(doc, "model", origin);
    model.reject_unknown({"families", "fs_strategy", "penalty", "penalty_grid"});
    if (model.has("families")) {
        cfg.families = family_list(model.str_list("families"));
        if (cfg.families.empty()) throw ConfigError("'model.families' must not be empty");
    }
    if (model.has("fs_strategy")) {
        cfg.fs_strategy = fs_strategy_from_name(model.str("fs_strategy"));
    }
    if (model.has("penalty")) {
        const Value& v = model.get("penalty");
        if (v.type == Value::Type::Num) {
            if (v.num < 0.0) throw ConfigError("'model.penalty' must be nonnegative");
            cfg.penalty = PenaltySpec::fixed_value(v.num);
        } else if (v.type == Value::Type::Str && v.str == "grid") {
            cfg.penalty = PenaltySpec::default_grid();
        } else {
            throw ConfigError("'model.penalty' must be a number or \"grid\"");
        }
    }
    if (model.has("penalty_grid")) {
        cfg.penalty.grid = model.num_list("penalty_grid");
        cfg.penalty.fixed.reset();
        for (double v : cfg.penalty.grid) {
            if (v <= 0.0) throw ConfigError("'model.penalty_grid' values must be positive");
        }
        if (cfg.penalty.grid.empty()) throw ConfigError("'model.penalty_grid' is empty");
        std::sort(cfg.penalty.grid.begin(), cfg.penalty.grid.end());
    }

    SectionReader cv(doc, "cv", origin);
    cv.reject_unknown({"folds", "seed"});
    if (cv.has("folds")) cfg.folds = positive_int(cv, "folds", cv.number("folds"));
    if (cfg.folds < 2) throw ConfigError("'cv.folds' must be at least 2");
    if (cv.has("seed")) {
        const double s = cv.number("seed");
        if (s < 0 || s != std::floor(s)) throw ConfigError("'cv.seed' must be a nonnegative integer");
        cfg.seed = static_cast<std::uint64_t>(s);
    }

    SectionReader synth(doc, "synth", origin);
    synth.reject_unknown({"n_instances", "n_language_features", "n_factors", "control_signal",
                          "language_signal", "interaction_signal", "noise_sd", "sparsity",
                          "seed"});
    if (synth.has("n_instances")) {
        cfg.synth.n_instances = positive_int(synth, "n_instances", synth.number("n_instances"));
    }
    if (synth.has("n_language_features")) {
        cfg.synth.n_language_features =
            positive_int(synth, "n_language_features", synth.number("n_language_features"));
    }
    if (synth.has("n_factors")) {
        cfg.synth.n_factors = positive_int(synth, "n_factors", synth.number("n_factors"));
    }
    if (synth.has("control_signal")) cfg.synth.control_signal = synth.number("control_signal");
    if (synth.has("language_signal")) cfg.synth.language_signal = synth.number("language_signal");
    if (synth.has("interaction_signal")) {
        cfg.synth.interaction_signal = synth.number("interaction_signal");
    }
    if (synth.has("noise_sd")) cfg.synth.noise_sd = synth.number("noise_sd");
    if (synth.has("sparsity")) cfg.synth.sparsity = synth.number("sparsity");
    if (synth.has("seed")) {
        cfg.synth.seed = static_cast<std::uint64_t>(synth.number("seed"));
    }

    SectionReader sweep(doc, "sweep", origin);
    sweep.reject_unknown({"k_grid", "counts", "method", "interactions", "families"});
    if (sweep.has("k_grid")) cfg.sweep_k_grid = int_list(sweep, "k_grid");
    if (sweep.has("counts")) cfg.sweep_counts = int_list(sweep, "counts");
    if (sweep.has("method")) {
        const std::string method = sweep.str("method");
        if (method == "rfe") {
            cfg.sweep_method = FactorSelectMethod::Rfe;
        } else if (method == "pca") {
            cfg.sweep_method = FactorSelectMethod::Pca;
        } else {
            throw ConfigError("'sweep.method' must be \"rfe\" or \"pca\"");
        }
    }
    if (sweep.has("interactions")) cfg.sweep_interactions = sweep.boolean("interactions");
    if (sweep.has("families")) cfg.sweep_families = family_list(sweep.str_list("families"));

    return cfg;
}

ModelOptions RunConfig::model_options() const {
    ModelOptions opts;
    opts.strategy = fs_strategy;
    opts.factor_policy = factor_policy;
    opts.reduce_defaults = reduce_defaults;
    opts.reduce_overrides = reduce_overrides;
    opts.penalty = penalty;
    opts.seed = seed;
    return opts;
}

Dataset load_dataset(const RunConfig& cfg) {
    if (!cfg.synthetic.empty()) {
        SyntheticSpec spec = cfg.synth;
        if (cfg.synthetic == "bench-default") spec = SyntheticSpec::bench_default(cfg.synth.seed);
        return generate_synthetic(spec).dataset;
    }

    std::vector<FeatureTable> language;
    for (const auto& src : cfg.language) {
        language.push_back(src.long_format ? load_long_csv(src.path, src.group)
                                           : load_wide_csv(src.path, src.group));
    }
    FeatureTable factors = load_wide_csv(cfg.factors_path, "factors");
    OutcomeVector outcome = load_outcome_csv(cfg.outcome_path);

    Dataset dataset = align(std::move(language), std::move(factors), std::move(outcome)).dataset;
    if (!cfg.wordcounts_path.empty()) {
        const OutcomeVector counts = load_outcome_csv(cfg.wordcounts_path);
        dataset = drop_low_wordcount(dataset, counts, cfg.wordcount_min);
    }
    if (cfg.coverage_fraction > 0.0) {
        for (auto& table : dataset.language) {
            table = prune_by_coverage(table, cfg.coverage_fraction);
        }
    }
    return dataset;
}

}  // namespace rfa
