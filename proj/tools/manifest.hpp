#pragma once

#include "json.hpp"

#include <string>
#include <vector>

namespace refcast::cli {

// SHA-256 of a file's bytes, lowercase hex.
std::string sha256_file(const std::string& path);

// Writes `<output>.manifest.json` describing how the output was produced:
// tool version, subcommand, effective configuration and input digests.
void write_manifest(const std::string& output_path, const std::string& subcommand,
                    const nlohmann::json& config, const std::vector<std::string>& inputs);

}  // namespace refcast::cli
