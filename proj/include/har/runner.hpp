#pragma once

#include <filesystem>
#include <string>

#include "har/config.hpp"

namespace har {

inline constexpr const char* kProjectVersion = "0.1.0";

// Exit codes shared by the library-level runner and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitDataError = 3;

struct RunOutcome {
    std::vector<AggregateReport> cells;
    std::filesystem::path out_dir;
};

// Executes every (method, mode) cell of the configured grid and writes
// grid.csv, results.csv, per-cell scene/confusion CSVs, report.json and
// manifest.json under the output directory.
RunOutcome run_grid(const ExperimentConfig& config, Warnings* warnings = nullptr);

// Loads the corpus a config describes (synthetic spec or path).
Corpus corpus_from_config(const ExperimentConfig& config, Warnings* warnings = nullptr);

// Human-readable corpus summary (the `inspect` subcommand body).
std::string describe_corpus(const Corpus& corpus);

}  // namespace har
