#pragma once

#include <stdexcept>
#include <string>

namespace impedukt {

/// Bad physical or numerical argument (out of the documented domain).
struct DomainError : std::invalid_argument {
  explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Mesh generation or validation failure.
struct MeshError : std::runtime_error {
  explicit MeshError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input file; carries a 1-based line number when known.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, long line = 0)
      : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
        line_number(line) {}
  long line_number;
};

/// Inconsistent run configuration (bad probe placement, missing source, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Assembly-time failure (degenerate element and the like).
struct AssemblyError : std::runtime_error {
  explicit AssemblyError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Time integration blew up; reports the offending step.
struct InstabilityError : std::runtime_error {
  InstabilityError(const std::string& msg, long step)
      : std::runtime_error(msg + " at step " + std::to_string(step)), step_index(step) {}
  long step_index;
};

}  // namespace impedukt
