#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "quenchxy/config.hpp"
#include "quenchxy/sampler.hpp"

namespace quenchxy {

struct RunSummary {
    std::vector<std::string> files;  // CSV files written, relative to the output directory
    double wall_seconds = 0;
};

// Chain settings from the [chain] section; the seed is stream `tag` of the master seed.
ChainSchedule schedule_from(const ExperimentConfig& cfg, const char* tag);

// Writes <experiment>.csv (plus extra CSVs for some experiments), config.ini
// with the normalized config and manifest.json into `out_dir`. Numeric error
// if any CSV would contain a non-finite value.
RunSummary run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// Version string compiled into the manifest.
const char* code_version();

}  // namespace quenchxy
