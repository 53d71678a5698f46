#include "bolimes/report.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "bolimes/errors.hpp"

namespace bolimes {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string format_full(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path);
    out << text;
    if (!out) throw Error("write failed: " + path);
}

ordered_json config_json(const PipelineConfig& config) {
    ordered_json j;
    j["seed"] = config.seed;
    j["boruta"] = {{"n_estimators", config.boruta.n_estimators},
                   {"max_iter", config.boruta.max_iter},
                   {"alpha", config.boruta.alpha},
                   {"percentile", config.boruta.percentile},
                   {"two_step", config.boruta.two_step},
                   {"tree_max_depth", config.boruta.tree.max_depth},
                   {"tree_min_samples_leaf", config.boruta.tree.min_samples_leaf}};
    j["lime"] = {{"n_perturbations", config.lime.n_perturbations},
                 {"kernel_width", config.lime.kernel_width},
                 {"ridge", config.lime.ridge},
                 {"aggregation", to_string(config.lime.aggregation)}};
    if (config.classifier.kind == ClassifierKind::Forest) {
        j["classifier"] = {{"kind", "forest"},
                           {"n_estimators", config.classifier.forest.n_estimators},
                           {"max_depth", config.classifier.forest.tree.max_depth}};
    } else {
        j["classifier"] = {{"kind", "gbt"},
                           {"n_estimators", config.classifier.gbt.n_estimators},
                           {"max_depth", config.classifier.gbt.max_depth},
                           {"learning_rate", config.classifier.gbt.learning_rate}};
    }
    j["protocol"] = {{"holdout_fraction", config.protocol.holdout_fraction},
                     {"cv_folds", config.protocol.cv_folds}};
    j["k_min"] = config.k_min;
    j["k_step"] = config.k_step;
    j["selection_on_train_only"] = config.selection_on_train_only;
    return j;
}

}  // namespace

void emit_report(const SelectionResult& result, const BorutaResult& boruta,
                 const DatasetMeta& meta, const PipelineConfig& config,
                 const std::string& out_dir, int run_id) {
    std::filesystem::create_directories(out_dir);

    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["dataset"] = {{"name", meta.name},
                    {"samples", meta.n_samples},
                    {"features", meta.n_features},
                    {"classes", meta.n_classes}};
    j["config"] = config_json(config);
    j["boruta"] = {{"confirmed", boruta.count(FeatureStatus::Confirmed)},
                   {"tentative", boruta.count(FeatureStatus::Tentative)},
                   {"rejected", boruta.count(FeatureStatus::Rejected)},
                   {"iterations", boruta.iterations_run},
                   {"confirmed_indices", boruta.confirmed_indices()}};

    ordered_json ranking = ordered_json::array();
    for (std::size_t i = 0; i < result.ranking.order.size(); ++i) {
        const std::size_t original = result.confirmed_indices[result.ranking.order[i]];
        ranking.push_back({{"rank", i + 1},
                           {"index", original},
                           {"score", result.ranking.scores[i]}});
    }
    j["ranking"] = std::move(ranking);

    ordered_json sweep = ordered_json::array();
    for (const KPoint& point : result.curve)
        sweep.push_back({{"k", point.k},
                         {"accuracy", point.metrics.accuracy},
                         {"precision", point.metrics.precision},
                         {"recall", point.metrics.recall},
                         {"f1", point.metrics.f1}});
    j["sweep"] = std::move(sweep);

    j["selection"] = {{"k_star", result.k_star},
                      {"best_accuracy", result.best_accuracy},
                      {"indices", result.selected_indices},
                      {"names", result.selected_names}};

    // Summary of the winning model over the selected features.
    if (result.best_model.kind() == ModelKind::Forest) {
        const auto& forest = result.best_model.forest();
        int max_depth = 0;
        for (const auto& tree : forest.trees()) {
            int depth = 0;
            std::function<void(int, int)> walk = [&](int node, int level) {
                depth = std::max(depth, level);
                const auto& n = tree.nodes()[static_cast<std::size_t>(node)];
                if (n.feature < 0) return;
                walk(n.left, level + 1);
                walk(n.right, level + 1);
            };
            walk(0, 0);
            max_depth = std::max(max_depth, depth);
        }
        j["model"] = {{"kind", "forest"},
                      {"trees", forest.trees().size()},
                      {"max_depth", max_depth},
                      {"importances", forest.feature_importances().values}};
    } else if (result.best_model.kind() == ModelKind::Gbt) {
        const auto& gbt = result.best_model.gbt();
        j["model"] = {{"kind", "gbt"},
                      {"stages", gbt.n_stages()},
                      {"final_train_log_loss", gbt.stage_losses().back()}};
    }

    write_text(out_dir + "/report.json", j.dump(2) + "\n");

    const std::size_t best = pick_best(result.curve);
    const MetricsReport& metrics = result.curve[best].metrics;
    std::ostringstream csv;
    csv << kResultsCsvHeader << '\n'
        << run_id << ',' << meta.name << ',' << meta.n_classes << ','
        << to_string(config.classifier.kind) << ',' << meta.n_samples << ',' << result.k_star
        << ',' << format_fixed3(metrics.accuracy) << ',' << format_fixed3(metrics.precision)
        << ',' << format_fixed3(metrics.recall) << ',' << format_fixed3(metrics.f1) << ','
        << format_fixed3(result.curve[best].train_s) << ','
        << format_fixed3(result.boruta_s + result.lime_s) << '\n';
    write_text(out_dir + "/results.csv", csv.str());
}

void emit_boruta(const BorutaResult& result, const Dataset& ds, const BorutaParams& params,
                 const std::string& out_dir, int run_id) {
    std::filesystem::create_directories(out_dir);

    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["dataset"] = ds.name;
    j["params"] = {{"n_estimators", params.n_estimators}, {"max_iter", params.max_iter},
                   {"alpha", params.alpha},               {"percentile", params.percentile},
                   {"two_step", params.two_step},         {"tree_max_depth", params.tree.max_depth}};
    j["iterations_run"] = result.iterations_run;
    j["elapsed_s"] = result.elapsed_s;
    j["shadow_thresholds"] = result.shadow_thresholds;
    ordered_json features = ordered_json::array();
    for (std::size_t i = 0; i < result.status.size(); ++i)
        features.push_back({{"index", i},
                            {"name", ds.feature_names[i]},
                            {"status", to_string(result.status[i])},
                            {"hits", result.hits[i]},
                            {"trials", result.trials[i]}});
    j["features"] = std::move(features);
    write_text(out_dir + "/boruta.json", j.dump(2) + "\n");

    std::ostringstream csv;
    csv << kBorutaCsvHeader << '\n'
        << run_id << ',' << ds.name << ',' << result.count(FeatureStatus::Confirmed) << ','
        << result.count(FeatureStatus::Tentative) << ','
        << result.count(FeatureStatus::Rejected) << ',' << format_fixed3(result.elapsed_s)
        << '\n';
    write_text(out_dir + "/boruta.csv", csv.str());
}

BorutaResult load_boruta(const std::string& json_path) {
    std::ifstream in(json_path);
    if (!in) throw Error("cannot open boruta stage file: " + json_path);
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error("invalid boruta stage file " + json_path + ": " + e.what());
    }
    BorutaResult result;
    result.iterations_run = j.at("iterations_run").get<int>();
    result.elapsed_s = j.at("elapsed_s").get<double>();
    result.shadow_thresholds = j.at("shadow_thresholds").get<std::vector<double>>();
    for (const auto& f : j.at("features")) {
        result.status.push_back(feature_status_from_string(f.at("status").get<std::string>()));
        result.hits.push_back(f.at("hits").get<int>());
        result.trials.push_back(f.at("trials").get<int>());
    }
    return result;
}

void emit_ranking(const GlobalRanking& ranking, std::span<const std::size_t> confirmed,
                  const Dataset& ds, const std::string& path) {
    std::ostringstream csv;
    csv << "feature_name,score,rank\n";
    for (std::size_t i = 0; i < ranking.order.size(); ++i) {
        const std::size_t original = confirmed[ranking.order[i]];
        csv << ds.feature_names[original] << ',' << format_full(ranking.scores[i]) << ','
            << i + 1 << '\n';
    }
    write_text(path, csv.str());
}

LoadedRanking load_ranking(const std::string& path, const Dataset& ds) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open ranking file: " + path);

    std::unordered_map<std::string, std::size_t> by_name;
    for (std::size_t j = 0; j < ds.feature_names.size(); ++j)
        by_name.emplace(ds.feature_names[j], j);

    LoadedRanking out;
    std::string line;
    if (!std::getline(in, line) || line.rfind("feature_name,score,rank", 0) != 0)
        throw Error(path + ": missing ranking header");
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.rfind(',');
        if (c1 == std::string::npos || c2 == c1)
            throw Error(path + ": malformed ranking row: " + line);
        const std::string name = line.substr(0, c1);
        const std::string score_text = line.substr(c1 + 1, c2 - c1 - 1);
        double score = 0.0;
        const auto* b = score_text.data();
        auto [ptr, ec] = std::from_chars(b, b + score_text.size(), score);
        if (ec != std::errc{} || ptr != b + score_text.size())
            throw Error(path + ": bad score '" + score_text + "'");
        const auto it = by_name.find(name);
        if (it == by_name.end())
            throw Error(path + ": feature '" + name + "' not present in dataset");
        out.confirmed.push_back(it->second);
        out.ranking.scores.push_back(score);
    }
    if (out.confirmed.empty()) throw Error(path + ": empty ranking");
    out.ranking.order.resize(out.confirmed.size());
    for (std::size_t i = 0; i < out.ranking.order.size(); ++i) out.ranking.order[i] = i;
    return out;
}

void emit_truth_sidecar(const SyntheticSpec& spec, std::span<const std::size_t> informative,
                        const std::string& path) {
    ordered_json j;
    j["schema_version"] = kReportSchemaVersion;
    j["spec"] = {{"n_samples", spec.n_samples},
                 {"n_informative", spec.n_informative},
                 {"n_noise", spec.n_noise},
                 {"n_classes", spec.n_classes},
                 {"class_separation", spec.class_separation},
                 {"seed", spec.seed}};
    j["informative_indices"] = std::vector<std::size_t>(informative.begin(), informative.end());
    write_text(path, j.dump(2) + "\n");
}

}  // namespace bolimes
