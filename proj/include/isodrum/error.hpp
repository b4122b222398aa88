#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace isodrum {

// Machine-parsable error codes. The CLI prints exactly one line per failure,
// "<code>: <message>", and exits nonzero; library callers catch Error.
enum class ErrorCode {
  Usage,          // bad command line
  Syntax,         // malformed input file (carries a line number)
  Involution,     // a color glues some tile twice / asymmetrically / to itself
  Disconnected,   // gluing graph is not connected
  Range,          // tile or vertex index out of range
  Duplicate,      // duplicate (tile, color) entry
  Missing,        // unlisted (tile, color) combination
  UnknownFamily,  // family id not in the catalog
  Shape,          // matrix dimension mismatch
  Geometry,       // degenerate base tile / inconsistent reflection
  Overlap,        // overlapping assembly fed to the raster pipeline
  EmptyDomain,    // rasterization produced no interior nodes
  Solver,         // eigensolver failed to converge
  Io,             // file could not be read or written
  Format,         // unsupported output format
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Usage: return "E_USAGE";
    case ErrorCode::Syntax: return "E_SYNTAX";
    case ErrorCode::Involution: return "E_INVOLUTION";
    case ErrorCode::Disconnected: return "E_DISCONNECTED";
    case ErrorCode::Range: return "E_RANGE";
    case ErrorCode::Duplicate: return "E_DUPLICATE";
    case ErrorCode::Missing: return "E_MISSING";
    case ErrorCode::UnknownFamily: return "E_UNKNOWN_FAMILY";
    case ErrorCode::Shape: return "E_SHAPE";
    case ErrorCode::Geometry: return "E_GEOMETRY";
    case ErrorCode::Overlap: return "E_OVERLAP";
    case ErrorCode::EmptyDomain: return "E_EMPTY_DOMAIN";
    case ErrorCode::Solver: return "E_SOLVER";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Format: return "E_FORMAT";
  }
  return "E_UNKNOWN";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const { return code_; }

  // One-line rendering used by the CLI: "<CODE>: <message>".
  std::string render() const {
    return std::string(error_code_name(code_)) + ": " + what();
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

// Streamed variant: fail(code, "tile ", i, " is degenerate").
template <typename... Parts>
[[noreturn]] void fail(ErrorCode code, const Parts&... parts) {
  std::ostringstream ss;
  (ss << ... << parts);
  throw Error(code, ss.str());
}

}  // namespace isodrum
