#include "text/error.hpp"

namespace text {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::UnreadableImage: return "UnreadableImage";
    case ErrorCode::PageTooSmall: return "PageTooSmall";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::OutOfPage: return "OutOfPage";
    case ErrorCode::EmptyTemplate: return "EmptyTemplate";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownProject: return "UnknownProject";
    case ErrorCode::UnknownPage: return "UnknownPage";
    case ErrorCode::UnknownQuery: return "UnknownQuery";
    case ErrorCode::UnknownMatch: return "UnknownMatch";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::EmptyTranscription: return "EmptyTranscription";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::Cancelled: return "Cancelled";
    case ErrorCode::CursorGone: return "CursorGone";
  }
  return "Unknown";
}

}  // namespace text
