#pragma once

#include <string>
#include <vector>

#include "occsel/run_config.hpp"

namespace occsel {

inline constexpr const char* kOccselVersion = "0.1.0";

// Executes the configured command and writes its artifacts under
// config.out_dir. Returns the artifact file names (relative to out_dir);
// the run manifest, written last, is always among them.
std::vector<std::string> run_pipeline(const RunConfig& config);

}  // namespace occsel
