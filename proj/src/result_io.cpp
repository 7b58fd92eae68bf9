#include "hsl/result_io.hpp"

#include <fstream>

#include "hsl/errors.hpp"

namespace hsl {

nlohmann::json make_envelope(const std::string& command, const nlohmann::json& config,
                             const nlohmann::json& payload, double wall_clock_s,
                             std::optional<bool> pass) {
  nlohmann::json env{{"schema", kResultSchema},
                     {"tool_version", kToolVersion},
                     {"command", command},
                     {"config", config},
                     {"wall_clock_s", wall_clock_s},
                     {"payload", payload}};
  if (pass) env["pass"] = *pass;
  return env;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  auto dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open output file: " + tmp.string());
    out << content;
    if (!out.good()) throw ValidationError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace hsl
