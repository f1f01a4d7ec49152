#pragma once

#include <mgcn/trainer.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace mgcn {

/// `epoch,objective,val_acc,test_acc` header plus one row per history entry.
std::string convergence_csv(const RunResult& run);

/// Header plus one row per node: id, embedding values, true class, predicted class.
std::string embeddings_tsv(const TrainOutput& output, const Dataset& dataset);

/// {dataset, config, per_run, mean, std}. Timings are kept out so that
/// identical runs produce identical bytes; see timing_json.
std::string metrics_json(std::string_view dataset_name, const TrainConfig& config, const RepeatedResult& result);
std::string timing_json(const RepeatedResult& result);

/// Writes metrics.json, timing.json, convergence.csv, embeddings.tsv and
/// checkpoint.bin for a single run.
void export_artifacts(const TrainOutput& output, const Dataset& dataset, const TrainConfig& config,
                      const std::filesystem::path& out_dir);

/// Writes metrics.json and timing.json for repeated runs.
void write_metrics(const std::filesystem::path& out_dir, std::string_view dataset_name, const TrainConfig& config,
                   const RepeatedResult& result);

}  // namespace mgcn
