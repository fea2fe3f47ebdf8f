#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sn/manifest.hpp"

namespace sn {

// Flat, string-typed scenario description. The CLI fills it from flags; the
// replay path fills it from a manifest. Unknown keys are rejected rather than
// silently defaulted.
struct ScenarioConfig {
  std::string scenario;  // materials | kernel | spectrum | trap | dispersion | replay
  std::map<std::string, std::string> params;
  std::filesystem::path output_dir = ".";
  int jobs = 0;  // 0 = hardware concurrency
};

struct Diagnostic {
  enum class Severity { error, warning };
  Severity severity = Severity::error;
  std::string code;
  std::string message;
};

// Full validation without executing: unknown keys, parse failures, range
// violations, step-size guards, kernel applicability warnings.
std::vector<Diagnostic> validate(const ScenarioConfig& cfg);

struct RunResult {
  RunManifest manifest;
  std::vector<Diagnostic> diagnostics;  // warnings raised while running
};

// Validates, executes, writes CSV outputs plus manifest.json in output_dir.
// Throws ValidationError / NumericalError / IoError (CLI exit codes 2/3/4).
RunResult run(const ScenarioConfig& cfg);

}  // namespace sn
