#pragma once

#include <string>
#include <vector>

#include "bolimes/boruta.hpp"
#include "bolimes/dataset.hpp"
#include "bolimes/lime.hpp"
#include "bolimes/pipeline.hpp"

namespace bolimes {

/// results.csv column contract. Metrics render with 3 decimals; report.json
/// keeps full precision.
inline constexpr const char* kResultsCsvHeader =
    "id,dataset,classes,method,samples,top_k,acc,prec,rec,f1,train_s,select_s";

inline constexpr const char* kBorutaCsvHeader =
    "id,dataset,confirmed,tentative,rejected,select_s";

inline constexpr int kReportSchemaVersion = 1;

/// Write report.json and results.csv into `out_dir`. report.json carries the
/// deterministic run record (wall-clock timings live only in the CSVs, so two
/// runs with the same seed produce byte-identical JSON).
void emit_report(const SelectionResult& result, const BorutaResult& boruta,
                 const DatasetMeta& meta, const PipelineConfig& config,
                 const std::string& out_dir, int run_id = 1);

/// Table-2-shaped record: boruta.csv plus the boruta.json stage file that
/// `rank` and `sweep` resume from.
void emit_boruta(const BorutaResult& result, const Dataset& ds, const BorutaParams& params,
                 const std::string& out_dir, int run_id = 1);
BorutaResult load_boruta(const std::string& json_path);

/// ranking.csv: feature_name,score,rank with full-precision scores, one row
/// per confirmed feature in rank order.
void emit_ranking(const GlobalRanking& ranking, std::span<const std::size_t> confirmed,
                  const Dataset& ds, const std::string& path);
struct LoadedRanking {
    GlobalRanking ranking;
    std::vector<std::size_t> confirmed;  // original feature ids, ranking order applied
};
LoadedRanking load_ranking(const std::string& path, const Dataset& ds);

/// Ground-truth sidecar for synthesized datasets.
void emit_truth_sidecar(const SyntheticSpec& spec, std::span<const std::size_t> informative,
                        const std::string& path);

}  // namespace bolimes
