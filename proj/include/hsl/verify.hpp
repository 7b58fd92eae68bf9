#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hsl/field.hpp"

namespace hsl {

struct VerifyOptions {
  enum class Level { fast, full };
  Level level = Level::full;
  std::uint64_t seed = 1;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double limit_seconds = 0.0;  // 0 = no budget pinned
  nlohmann::json details;
};

// Runs the named checks (the acceptance criteria, including the determinism
// re-run at thread counts 1 and 8).
std::vector<CheckResult> run_verify(const VerifyOptions& opts);

// The checks minus the determinism re-run; what that re-run itself executes.
std::vector<CheckResult> run_core_checks(const VerifyOptions& opts);

// Deterministic projection: names, pass flags, and details only (no timing).
nlohmann::json verify_payload(const std::vector<CheckResult>& results);

// Core comparison of the Salie acceptance check, with an injectable
// perturbation of the closed form so tests can confirm the check would catch
// a broken formula.
double salie_closed_vs_brute_max_error(const FieldCtx& ctx, double perturbation = 0.0);

}  // namespace hsl
