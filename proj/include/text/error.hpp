#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace text {

enum class ErrorCode {
  EmptyCorpus,
  UnreadableImage,
  PageTooSmall,
  IoFailure,
  SchemaMismatch,
  InvalidParams,
  OutOfPage,
  EmptyTemplate,
  DimensionMismatch,
  UnknownProject,
  UnknownPage,
  UnknownQuery,
  UnknownMatch,
  IllegalTransition,
  EmptyTranscription,
  ParseError,
  SchemaError,
  Cancelled,
  CursorGone,
};

std::string_view to_string(ErrorCode code);

/// Every failure surfaced by the engine carries one of the codes above; the
/// service maps codes onto HTTP statuses, the CLI onto exit messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace text
