#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "rfa/config.hpp"
#include "rfa/csv.hpp"
#include "rfa/errors.hpp"
#include "rfa/report_io.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kDataError = 3, kNumericError = 4 };

bool verbose_logging() {
    const char* level = std::getenv("RFA_LOG");
    return level && std::string(level) == "debug";
}

void log_line(const std::string& msg) {
    if (verbose_logging()) std::cerr << "[rfa] " << msg << '\n';
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    long long seed_override = -1;
    std::vector<std::string> families;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool families_flag = true) {
    cmd->add_option("--config", args.config_path, "Config file")->required();
    cmd->add_option("--out", args.out_dir, "Output directory")->required();
    cmd->add_option("--jobs", args.jobs, "Worker threads for fold x model cells");
    cmd->add_option("--seed", args.seed_override, "Override the config seed");
    if (families_flag) {
        cmd->add_option("--families", args.families, "Override the config family list");
    }
}

rfa::RunConfig load_config(const CommonArgs& args) {
    rfa::RunConfig cfg = rfa::RunConfig::parse_file(args.config_path);
    if (args.seed_override >= 0) {
        cfg.seed = static_cast<std::uint64_t>(args.seed_override);
    }
    if (!args.families.empty()) {
        cfg.families.clear();
        for (const auto& name : args.families) {
            cfg.families.push_back(rfa::family_from_name(name));
        }
    }
    return cfg;
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw rfa::DataError("cannot create output directory: " + dir);
}

std::vector<rfa::ModelRunConfig> model_configs(const rfa::RunConfig& cfg) {
    std::vector<rfa::ModelRunConfig> out;
    const rfa::ModelOptions opts = cfg.model_options();
    for (rfa::Family fam : cfg.families) {
        out.push_back({rfa::family_name(fam), fam, opts});
    }
    return out;
}

void write_run_outputs(const rfa::ExperimentReport& report, const std::string& out_dir) {
    rfa::write_report_json(report, out_dir + "/report.json");
    rfa::write_report_table(report, out_dir + "/table.txt");
    if (!report.curves.empty()) {
        rfa::write_curves_csv(report, out_dir + "/curves.csv");
    }
}

int cmd_run(const CommonArgs& args) {
    const rfa::RunConfig cfg = load_config(args);
    const rfa::Dataset dataset = rfa::load_dataset(cfg);
    log_line("dataset: " + std::to_string(dataset.n()) + " instances");
    const rfa::FoldPlan plan = rfa::FoldPlan::make(dataset.ids(), cfg.folds, cfg.seed);
    rfa::ExperimentReport report = rfa::run_cv(dataset, model_configs(cfg), plan, args.jobs);
    report.config_snapshot = cfg.raw;
    ensure_out_dir(args.out_dir);
    write_run_outputs(report, args.out_dir);
    std::cout << rfa::report_table(report);
    return kOk;
}

int cmd_synth(const CommonArgs& args) {
    rfa::RunConfig cfg = load_config(args);
    if (args.seed_override >= 0) cfg.synth.seed = static_cast<std::uint64_t>(args.seed_override);
    const rfa::SyntheticData data = rfa::generate_synthetic(cfg.synth);
    ensure_out_dir(args.out_dir);
    for (const auto& table : data.dataset.language) {
        rfa::save_wide_csv(table, args.out_dir + "/" + table.group + ".csv");
    }
    rfa::save_wide_csv(data.dataset.factors, args.out_dir + "/factors.csv");
    rfa::save_outcome_csv(data.dataset.outcome, args.out_dir + "/outcome.csv");
    std::ofstream truth(args.out_dir + "/metadata.json");
    if (!truth) throw rfa::DataError("cannot write metadata.json");
    truth << data.truth.dump(2) << '\n';
    std::cout << "wrote synthetic dataset (" << data.dataset.n() << " instances) to "
              << args.out_dir << '\n';
    return kOk;
}

int cmd_sweep(const CommonArgs& args, const std::string& kind) {
    const rfa::RunConfig cfg = load_config(args);
    const rfa::Dataset dataset = rfa::load_dataset(cfg);
    const rfa::FoldPlan plan = rfa::FoldPlan::make(dataset.ids(), cfg.folds, cfg.seed);
    const rfa::ModelOptions base = cfg.model_options();

    rfa::ExperimentReport report;
    if (kind == "kbest") {
        if (cfg.sweep_k_grid.empty()) {
            throw rfa::ConfigError("sweep kbest needs 'sweep.k_grid'");
        }
        std::vector<rfa::Family> families = cfg.sweep_families;
        if (families.empty()) families = {rfa::Family::Fa, rfa::Family::Rfa};
        report = rfa::sweep_kbest(dataset, cfg.sweep_k_grid, families, base, plan, args.jobs);
    } else if (kind == "factors") {
        std::vector<int> counts = cfg.sweep_counts;
        if (counts.empty()) {
            counts.resize(dataset.factors.cols());
            std::iota(counts.begin(), counts.end(), 1);
        }
        std::vector<rfa::Family> families = cfg.sweep_families;
        if (families.empty()) {
            families = {rfa::Family::Rc, rfa::Family::Fa, rfa::Family::Rfa};
        }
        report = rfa::sweep_factors(dataset, cfg.sweep_method, counts, families,
                                    cfg.sweep_interactions, base, plan, args.jobs);
    } else {  // fs
        report = rfa::compare_fs_strategies(dataset, base, plan, args.jobs);
    }
    report.config_snapshot = cfg.raw;
    ensure_out_dir(args.out_dir);
    write_run_outputs(report, args.out_dir);
    rfa::write_curves_csv(report, args.out_dir + "/curves.csv");
    std::cout << rfa::report_table(report);
    return kOk;
}

int cmd_fit(const CommonArgs& args, const std::string& family_name) {
    const rfa::RunConfig cfg = load_config(args);
    const rfa::Dataset dataset = rfa::load_dataset(cfg);
    const rfa::Family family = family_name.empty()
                                   ? cfg.families.front()
                                   : rfa::family_from_name(family_name);
    const rfa::FittedModel model = rfa::fit_model(family, dataset, cfg.model_options());
    ensure_out_dir(args.out_dir);
    std::ofstream out(args.out_dir + "/model.json");
    if (!out) throw rfa::DataError("cannot write model.json");
    out << model.to_json().dump(2) << '\n';
    std::cout << "fitted " << rfa::family_name(family) << " on " << dataset.n()
              << " instances\n";
    return kOk;
}

int cmd_predict(const CommonArgs& args, const std::string& model_path) {
    const rfa::RunConfig cfg = load_config(args);
    const rfa::Dataset dataset = rfa::load_dataset(cfg);
    std::ifstream in(model_path);
    if (!in) throw rfa::DataError("cannot open model file: " + model_path);
    nlohmann::ordered_json j;
    in >> j;
    const rfa::FittedModel model = rfa::FittedModel::from_json(j);
    const rfa::Vector pred = rfa::predict(model, dataset);
    ensure_out_dir(args.out_dir);
    std::ofstream out(args.out_dir + "/predictions.csv");
    if (!out) throw rfa::DataError("cannot write predictions.csv");
    out.precision(17);
    out << "group_id,prediction\n";
    for (rfa::Index i = 0; i < dataset.n(); ++i) {
        out << dataset.ids()[i] << ',' << pred[i] << '\n';
    }
    std::cout << "wrote " << dataset.n() << " predictions\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Community-outcome regression toolkit (residualized factor adaptation)"};
    app.require_subcommand(1);

    CommonArgs run_args, synth_args, sweep_args, fit_args, predict_args;
    std::string sweep_kind;
    std::string fit_family;
    std::string model_path;

    CLI::App* run = app.add_subcommand("run", "Cross-validated model comparison");
    add_common(run, run_args);

    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic benchmark dataset");
    add_common(synth, synth_args, false);

    CLI::App* sweep = app.add_subcommand("sweep", "Parameter sweeps (kbest | factors | fs)");
    add_common(sweep, sweep_args, false);
    sweep->add_option("--kind", sweep_kind, "kbest | factors | fs")
        ->required()
        ->check(CLI::IsMember({"kbest", "factors", "fs"}));

    CLI::App* fit = app.add_subcommand("fit", "Fit one model on the full dataset");
    add_common(fit, fit_args, false);
    fit->add_option("--family", fit_family, "Model family (default: first in config)");

    CLI::App* predict = app.add_subcommand("predict", "Predict with a saved model");
    add_common(predict, predict_args, false);
    predict->add_option("--model", model_path, "Fitted model JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfigError;
    }

    try {
        if (run->parsed()) return cmd_run(run_args);
        if (synth->parsed()) return cmd_synth(synth_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_kind);
        if (fit->parsed()) return cmd_fit(fit_args, fit_family);
        if (predict->parsed()) return cmd_predict(predict_args, model_path);
    } catch (const rfa::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const rfa::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const rfa::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kOk;
}
