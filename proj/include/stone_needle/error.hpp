// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stone_needle {

enum class ErrorCode {
  UnsupportedMediaType,
  EmptyPayload,
  InvalidQuery,
  EmptyRegistry,
  DuplicateModelId,
  UnknownModel,
  AdapterTimeout,
  AdapterProtocolError,
  AdapterUnavailable,
  KbParseError,
  KbAliasConflict,
  BudgetTooSmall,
  MlmTimeout,
  MlmProtocolError,
  MlmUnavailable,
  PersistenceError,
  SessionNotFound,
  UnknownResource,
  ConfigError,
  FixtureParseError,
  UnknownLabel,
  EmptyMatrix,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure the library raises carries one of the codes above so callers
// (HTTP layer, orchestrator degradation) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stone_needle
