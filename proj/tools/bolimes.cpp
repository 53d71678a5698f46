// bolimes: Boruta filtering, LIME ranking and top-k sweep for
// high-dimensional tabular classification.
//
// Subcommands: run (full pipeline), boruta / rank / sweep (resumable stages
// composed through file artifacts), synth (ground-truth-known generator).
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bolimes/boruta.hpp"
#include "bolimes/dataset.hpp"
#include "bolimes/errors.hpp"
#include "bolimes/pipeline.hpp"
#include "bolimes/report.hpp"
#include "bolimes/rng.hpp"

namespace {

using namespace bolimes;

struct CliConfig {
    std::string input;
    std::string label = "label";
    std::string out_dir = ".";
    std::string boruta_file;
    std::string ranking_file;
    std::string classifier = "forest";
    std::string aggregation = "mean";
    bool standardize = false;
    int run_id = 1;
    int verbosity = 0;
    PipelineConfig pipeline;
};

CLI::Validator in_open_interval(double lo, double hi, bool include_hi = false) {
    const std::string desc = include_hi ? "FLOAT in (" + std::to_string(lo) + ", " +
                                              std::to_string(hi) + "]"
                                        : "FLOAT in (" + std::to_string(lo) + ", " +
                                              std::to_string(hi) + ")";
    return CLI::Validator(
        [lo, hi, include_hi](std::string& s) -> std::string {
            double v = 0.0;
            try {
                v = std::stod(s);
            } catch (...) {
                return "not a number: " + s;
            }
            const bool ok = v > lo && (include_hi ? v <= hi : v < hi);
            return ok ? "" : "value " + s + " out of range";
        },
        desc);
}

void log_line(const CliConfig& cli, const std::string& msg) {
    if (cli.verbosity >= 0) std::cerr << "[bolimes] " << msg << "\n";
}

void add_data_options(CLI::App* cmd, CliConfig& cli) {
    cmd->add_option("--input", cli.input, "Input CSV (header row, one label column)")
        ->required();
    cmd->add_option("--label", cli.label, "Name of the label column")
        ->capture_default_str();
    cmd->add_option("--out", cli.out_dir, "Output directory for artifacts")
        ->capture_default_str();
    cmd->add_option("--seed", cli.pipeline.seed, "Master seed")->capture_default_str();
    cmd->add_option("--threads", cli.pipeline.n_threads,
                    "Worker threads for parallel sections (0 = hardware)")
        ->envname("BOLIMES_THREADS")
        ->capture_default_str();
    cmd->add_option("--run-id", cli.run_id, "Numeric id written to CSV rows")
        ->capture_default_str();
    cmd->add_flag("--standardize", cli.standardize,
                  "Z-score all features before the pipeline (trees do not need it; "
                  "the explanation stage always standardizes internally)");
    cmd->add_flag("-v,--verbose", cli.verbosity, "More progress output");
}

Dataset load_input(const CliConfig& cli) {
    Dataset ds = load_csv(cli.input, cli.label);
    if (cli.standardize) ds.x = Standardizer::fit(ds.x).transform(ds.x);
    return ds;
}

void add_boruta_options(CLI::App* cmd, CliConfig& cli) {
    cmd->add_option("--boruta-estimators", cli.pipeline.boruta.n_estimators,
                    "Trees in the Boruta forest")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--boruta-max-iter", cli.pipeline.boruta.max_iter,
                    "Maximum Boruta iterations")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--alpha", cli.pipeline.boruta.alpha, "Significance level")
        ->check(in_open_interval(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--percentile", cli.pipeline.boruta.percentile,
                    "Shadow reference percentile")
        ->check(CLI::Range(1.0, 100.0))
        ->capture_default_str();
    cmd->add_flag("--two-step,!--no-two-step", cli.pipeline.boruta.two_step,
                  "FDR plus Bonferroni correction (default on)");
    cmd->add_option("--boruta-depth", cli.pipeline.boruta.tree.max_depth,
                    "Max depth of Boruta forest trees")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--boruta-min-leaf", cli.pipeline.boruta.tree.min_samples_leaf,
                    "Min samples per leaf in Boruta forest trees")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--selection-on-train-only", cli.pipeline.selection_on_train_only,
                  "Run feature selection on the training rows only");
}

void add_lime_options(CLI::App* cmd, CliConfig& cli) {
    cmd->add_option("--lime-samples", cli.pipeline.lime.n_perturbations,
                    "Perturbations per explained instance")
        ->check(CLI::Range(10, 10000000))
        ->capture_default_str();
    cmd->add_option("--kernel-width", cli.pipeline.lime.kernel_width,
                    "Proximity kernel width (0 = 0.75*sqrt(p))")
        ->capture_default_str();
    cmd->add_option("--ridge", cli.pipeline.lime.ridge, "Surrogate ridge penalty")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--aggregation", cli.aggregation,
                    "Aggregation of |coefficients|: mean, sum or median")
        ->check(CLI::IsMember({"mean", "sum", "median"}))
        ->capture_default_str();
}

void add_sweep_options(CLI::App* cmd, CliConfig& cli) {
    cmd->add_option("--classifier", cli.classifier, "Evaluation classifier")
        ->check(CLI::IsMember({"forest", "gbt"}))
        ->capture_default_str();
    cmd->add_option("--forest-estimators", cli.pipeline.classifier.forest.n_estimators,
                    "Trees in the evaluation forest")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--forest-depth", cli.pipeline.classifier.forest.tree.max_depth,
                    "Max depth of evaluation forest trees")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--gbt-estimators", cli.pipeline.classifier.gbt.n_estimators,
                    "Boosting stages")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--gbt-depth", cli.pipeline.classifier.gbt.max_depth,
                    "Max depth of boosted trees")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--learning-rate", cli.pipeline.classifier.gbt.learning_rate,
                    "Boosting learning rate")
        ->check(in_open_interval(0.0, 1.0, /*include_hi=*/true))
        ->capture_default_str();
    cmd->add_option("--k-min", cli.pipeline.k_min, "Smallest k in the sweep")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--k-step", cli.pipeline.k_step, "Sweep stride")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--test-fraction", cli.pipeline.protocol.holdout_fraction,
                    "Held-out fraction for the evaluation split")
        ->check(in_open_interval(0.0, 0.5))
        ->capture_default_str();
    cmd->add_option("--cv-folds", cli.pipeline.protocol.cv_folds,
                    "Stratified CV folds (0 = holdout)")
        ->check(CLI::Validator(
            [](std::string& s) -> std::string {
                int v = 0;
                try {
                    v = std::stoi(s);
                } catch (...) {
                    return "not an integer: " + s;
                }
                return v == 0 || (v >= 2 && v <= 1000) ? "" : "must be 0 or in [2, 1000]";
            },
            "0 or [2,1000]"))
        ->capture_default_str();
}

void finalize_config(CliConfig& cli) {
    cli.pipeline.classifier.kind = classifier_kind_from_string(cli.classifier);
    cli.pipeline.lime.aggregation = aggregation_from_string(cli.aggregation);
    cli.pipeline.validate();
}

int cmd_boruta(CliConfig& cli) {
    finalize_config(cli);
    const Dataset ds = load_input(cli);
    log_line(cli, "loaded " + ds.name + ": " + std::to_string(ds.n_samples()) + " samples, " +
                      std::to_string(ds.n_features()) + " features, " +
                      std::to_string(ds.n_classes()) + " classes");
    const BorutaResult result = run_boruta_stage(ds, cli.pipeline);
    emit_boruta(result, ds, cli.pipeline.boruta, cli.out_dir, cli.run_id);
    log_line(cli, "boruta: " + std::to_string(result.count(FeatureStatus::Confirmed)) +
                      " confirmed, " + std::to_string(result.count(FeatureStatus::Tentative)) +
                      " tentative, " + std::to_string(result.count(FeatureStatus::Rejected)) +
                      " rejected in " + std::to_string(result.iterations_run) + " iterations");
    return 0;
}

int cmd_rank(CliConfig& cli) {
    finalize_config(cli);
    const Dataset ds = load_input(cli);
    const std::string boruta_path =
        cli.boruta_file.empty() ? cli.out_dir + "/boruta.json" : cli.boruta_file;
    const BorutaResult boruta = load_boruta(boruta_path);
    if (boruta.status.size() != ds.n_features())
        throw Error("boruta stage file does not match the dataset feature count");
    const auto confirmed = boruta.confirmed_indices();
    if (confirmed.empty()) throw NoRelevantFeatures(boruta);
    const GlobalRanking ranking = rank_features(ds, confirmed, cli.pipeline);
    emit_ranking(ranking, confirmed, ds, cli.out_dir + "/ranking.csv");
    log_line(cli, "ranked " + std::to_string(confirmed.size()) + " confirmed features");
    return 0;
}

int cmd_sweep(CliConfig& cli) {
    finalize_config(cli);
    const Dataset ds = load_input(cli);
    const std::string boruta_path =
        cli.boruta_file.empty() ? cli.out_dir + "/boruta.json" : cli.boruta_file;
    const std::string ranking_path =
        cli.ranking_file.empty() ? cli.out_dir + "/ranking.csv" : cli.ranking_file;
    const BorutaResult boruta = load_boruta(boruta_path);
    const LoadedRanking loaded = load_ranking(ranking_path, ds);
    SelectionResult result = sweep_stage(ds, loaded.ranking, loaded.confirmed, cli.pipeline);
    result.boruta_s = boruta.elapsed_s;
    emit_report(result, boruta, ds.meta(), cli.pipeline, cli.out_dir, cli.run_id);
    log_line(cli, "sweep: k*=" + std::to_string(result.k_star) +
                      ", accuracy=" + std::to_string(result.best_accuracy));
    return 0;
}

int cmd_run(CliConfig& cli) {
    finalize_config(cli);
    const Dataset ds = load_input(cli);
    log_line(cli, "loaded " + ds.name + ": " + std::to_string(ds.n_samples()) + " samples, " +
                      std::to_string(ds.n_features()) + " features, " +
                      std::to_string(ds.n_classes()) + " classes");

    // The monolithic run is exactly the staged composition, artifacts included.
    const BorutaResult boruta = run_boruta_stage(ds, cli.pipeline);
    emit_boruta(boruta, ds, cli.pipeline.boruta, cli.out_dir, cli.run_id);
    const auto confirmed = boruta.confirmed_indices();
    if (confirmed.empty()) throw NoRelevantFeatures(boruta);
    log_line(cli, "boruta: " + std::to_string(confirmed.size()) + " confirmed in " +
                      std::to_string(boruta.iterations_run) + " iterations");

    const auto lime_start = std::chrono::steady_clock::now();
    const GlobalRanking ranking = rank_features(ds, confirmed, cli.pipeline);
    const double lime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - lime_start).count();
    emit_ranking(ranking, confirmed, ds, cli.out_dir + "/ranking.csv");

    SelectionResult result = sweep_stage(ds, ranking, confirmed, cli.pipeline);
    result.boruta_s = boruta.elapsed_s;
    result.lime_s = lime_s;
    emit_report(result, boruta, ds.meta(), cli.pipeline, cli.out_dir, cli.run_id);
    log_line(cli, "done: k*=" + std::to_string(result.k_star) +
                      ", accuracy=" + std::to_string(result.best_accuracy));
    return 0;
}

struct SynthCli {
    SyntheticSpec spec;
    std::string out = "synthetic.csv";
};

int cmd_synth(SynthCli& synth) {
    auto [ds, informative] = synthesize(synth.spec);
    save_csv(ds, synth.out);
    emit_truth_sidecar(synth.spec, informative, synth.out + ".truth.json");
    std::cerr << "[bolimes] wrote " << synth.out << " (" << ds.n_samples() << "x"
              << ds.n_features() << ") and " << synth.out << ".truth.json\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BOLIMES feature selection: Boruta filtering, LIME ranking, top-k sweep"};
    app.require_subcommand(1);

    CliConfig cli;
    SynthCli synth;

    auto* run = app.add_subcommand("run", "Full pipeline: boruta, rank and sweep");
    add_data_options(run, cli);
    add_boruta_options(run, cli);
    add_lime_options(run, cli);
    add_sweep_options(run, cli);

    auto* boruta = app.add_subcommand("boruta", "All-relevant filtering only");
    add_data_options(boruta, cli);
    add_boruta_options(boruta, cli);

    auto* rank = app.add_subcommand("rank", "LIME ranking of a prior boruta stage");
    add_data_options(rank, cli);
    add_boruta_options(rank, cli);
    add_lime_options(rank, cli);
    rank->add_option("--boruta", cli.boruta_file, "boruta.json from the boruta stage");
    // The holdout split feeds the black-box training set, so sweep options
    // apply here too.
    add_sweep_options(rank, cli);

    auto* sweep = app.add_subcommand("sweep", "Top-k sweep from a prior ranking");
    add_data_options(sweep, cli);
    add_boruta_options(sweep, cli);
    add_lime_options(sweep, cli);
    add_sweep_options(sweep, cli);
    sweep->add_option("--boruta", cli.boruta_file, "boruta.json from the boruta stage");
    sweep->add_option("--ranking", cli.ranking_file, "ranking.csv from the rank stage");

    auto* synth_cmd = app.add_subcommand("synth", "Generate a ground-truth-known dataset");
    synth_cmd->add_option("--n", synth.spec.n_samples, "Samples")->capture_default_str();
    synth_cmd->add_option("--informative", synth.spec.n_informative, "Informative features")
        ->capture_default_str();
    synth_cmd->add_option("--noise", synth.spec.n_noise, "Noise features")
        ->capture_default_str();
    synth_cmd->add_option("--classes", synth.spec.n_classes, "Classes")
        ->check(CLI::Range(2, 1000))
        ->capture_default_str();
    synth_cmd->add_option("--sep", synth.spec.class_separation, "Class separation in sigmas")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth.spec.seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--out", synth.out, "Output CSV path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return cmd_run(cli);
        if (boruta->parsed()) return cmd_boruta(cli);
        if (rank->parsed()) return cmd_rank(cli);
        if (sweep->parsed()) return cmd_sweep(cli);
        if (synth_cmd->parsed()) return cmd_synth(synth);
    } catch (const NoRelevantFeatures& e) {
        std::cerr << "{\"error\":\"no relevant features\",\"detail\":\"" << e.what()
                  << "\",\"confirmed\":0,\"tentative\":" << e.boruta.count(FeatureStatus::Tentative)
                  << ",\"rejected\":" << e.boruta.count(FeatureStatus::Rejected) << "}\n";
        return 1;
    } catch (const std::exception& e) {
        std::string detail = e.what();
        for (auto& c : detail)
            if (c == '"') c = '\'';
        std::cerr << "{\"error\":\"runtime failure\",\"detail\":\"" << detail << "\"}\n";
        return 1;
    }
    return 2;
}
