#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace hetmed::cli {

inline constexpr const char* kArtifactVersion = HETMED_VERSION;

// Entry point shared by main() and the tests. `args` excludes the program
// name. Returns the process exit code; never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// {command, config, seed, artifact_version, started, finished}
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& config, const nlohmann::json& seed,
                             const std::string& started, const std::string& finished);

std::string utc_timestamp();

}  // namespace hetmed::cli
