#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace hsl {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kResultSchema = "hsl-result-v1";

// Stable result envelope: config echoed verbatim, payload separate from
// wall-clock so payloads can be compared byte-for-byte across runs.
nlohmann::json make_envelope(const std::string& command, const nlohmann::json& config,
                             const nlohmann::json& payload, double wall_clock_s,
                             std::optional<bool> pass = std::nullopt);

// Write via temp file + rename in the target directory.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace hsl
