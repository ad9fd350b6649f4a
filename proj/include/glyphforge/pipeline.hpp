#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "glyphforge/config.hpp"

namespace glyphforge {

std::string sha256_hex(const void* data, std::size_t n);
std::string sha256_hex(const std::string& text);
std::string sha256_file(const std::filesystem::path& path);

struct PipelineResult {
    std::filesystem::path manifest_path;
    std::vector<std::pair<std::string, std::string>> manifest; // key, sha256
};

// corpus -> family split -> 7 discriminators -> multi-letter generator ->
// protocol report -> homogeneity -> manifest.  Every artifact lands in
// workdir; failures are rethrown with the stage name prefixed.
PipelineResult run_pipeline(const RunConfig& cfg, const std::filesystem::path& fonts_dir,
                            const std::filesystem::path& workdir,
                            const std::function<void(const std::string&)>& progress = {});

} // namespace glyphforge
