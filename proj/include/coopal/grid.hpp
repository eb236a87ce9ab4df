#pragma once

#include <string>
#include <vector>

#include "coopal/config.hpp"

namespace coopal {

// Runs every (mode, method, policy) cell over all seeds. Writes one
// seed-averaged CSV per cell plus the combined long-format CSV, and returns
// the paths written (combined last). Cells run on a worker pool bounded by
// COOPAL_THREADS; outputs are byte-identical across reruns.
std::vector<std::string> run_grid(const RunConfig& config, const std::string& output_dir);

// Long-format schema shared by the combined CSV and tests.
extern const char* const kCombinedCsvHeader;

std::string format_metrics_row(const MetricsRow& row);

}  // namespace coopal
