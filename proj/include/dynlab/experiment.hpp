#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace dynlab {

inline constexpr const char* kVersion = "0.1.0";

struct CliOptions {
    std::string config_path;
    std::optional<uint64_t> seed;       // overrides the config value
    std::optional<std::string> out_prefix;
    std::optional<std::string> workers;  // decimal count or "auto"
};

// Loads the config, runs the named experiment and writes <prefix>.csv,
// <prefix>.manifest and (for cloud-producing experiments) <prefix>.cloud.
// Returns the process exit code: 0 success, 2 invalid config or input,
// 3 numerical failure. Partial outputs are removed on failure; CSV bodies
// are byte-identical for a fixed config + seed regardless of worker count.
int run_experiment(const CliOptions& opts, std::ostream& err);

}  // namespace dynlab
