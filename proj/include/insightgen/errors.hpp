#pragma once

#include <stdexcept>
#include <string>

namespace insightgen {

enum class ErrorCode {
  Contract,
  Io,
  EmptyCollection,
  Provider,
  Protocol,
  Parse,
  GenerationParse,
  EmptyGeneration,
  JudgeParse,
  DegenerateBudget,
  DegenerateSample,
  Cache,
  Checksum,
  Locked,
  Config,
  Usage,
  Unimplemented,
};

constexpr const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Contract: return "contract";
    case ErrorCode::Io: return "io";
    case ErrorCode::EmptyCollection: return "empty_collection";
    case ErrorCode::Provider: return "provider";
    case ErrorCode::Protocol: return "protocol";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::GenerationParse: return "generation_parse";
    case ErrorCode::EmptyGeneration: return "empty_generation";
    case ErrorCode::JudgeParse: return "judge_parse";
    case ErrorCode::DegenerateBudget: return "degenerate_budget";
    case ErrorCode::DegenerateSample: return "degenerate_sample";
    case ErrorCode::Cache: return "cache";
    case ErrorCode::Checksum: return "checksum";
    case ErrorCode::Locked: return "locked";
    case ErrorCode::Config: return "config";
    case ErrorCode::Usage: return "usage";
    case ErrorCode::Unimplemented: return "unimplemented";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) raise(code, message);
}

}  // namespace insightgen
