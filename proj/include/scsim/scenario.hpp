#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace scsim {

struct RunOptions {
    std::optional<std::uint64_t> seed;  // overrides the spec's seed
    std::filesystem::path out_dir = ".";
    int threads = 0;  // 0 = auto; never affects results
};

struct RunOutcome {
    std::string summary;  // one line, key metric first
    std::vector<std::filesystem::path> outputs;
};

/// Schema and physical-sanity checks without executing. Returns every
/// violation found, not just the first; empty means runnable.
std::vector<std::string> validate_scenario_text(const std::string& json_text);
std::vector<std::string> validate_scenario_file(const std::filesystem::path& path);

/// Executes a scenario spec and writes its declared outputs.
/// Throws SchemaError for malformed specs, scsim::Error subtypes or
/// std::domain_error/invalid_argument for numerical contract violations,
/// and std::ios_base::failure / filesystem errors for I/O.
RunOutcome run_scenario_file(const std::filesystem::path& path, const RunOptions& options);

std::string version_string();

}  // namespace scsim
