// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/error.hpp"

namespace stone_needle {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnsupportedMediaType: return "UnsupportedMediaType";
    case ErrorCode::EmptyPayload: return "EmptyPayload";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::EmptyRegistry: return "EmptyRegistry";
    case ErrorCode::DuplicateModelId: return "DuplicateModelId";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::AdapterTimeout: return "AdapterTimeout";
    case ErrorCode::AdapterProtocolError: return "AdapterProtocolError";
    case ErrorCode::AdapterUnavailable: return "AdapterUnavailable";
    case ErrorCode::KbParseError: return "KbParseError";
    case ErrorCode::KbAliasConflict: return "KbAliasConflict";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::MlmTimeout: return "MlmTimeout";
    case ErrorCode::MlmProtocolError: return "MlmProtocolError";
    case ErrorCode::MlmUnavailable: return "MlmUnavailable";
    case ErrorCode::PersistenceError: return "PersistenceError";
    case ErrorCode::SessionNotFound: return "SessionNotFound";
    case ErrorCode::UnknownResource: return "UnknownResource";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::FixtureParseError: return "FixtureParseError";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
  }
  return "Unknown";
}

}  // namespace stone_needle
