#include "reuse/blocks.hpp"
#include "reuse/error.hpp"

namespace reuse {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidId: return "invalid-id";
    case ErrorCode::kInvalidSpan: return "invalid-span";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kUnsupportedMath: return "unsupported-math";
    case ErrorCode::kUnsupportedFormat: return "unsupported-format";
    case ErrorCode::kConversionFailed: return "conversion-failed";
    case ErrorCode::kPersistentStore: return "persistent-store";
  }
  return "unknown";
}

std::string_view to_string(SourceFormat format) {
  switch (format) {
    case SourceFormat::kLatex: return "latex";
    case SourceFormat::kHtml: return "html";
    case SourceFormat::kTxt: return "txt";
  }
  return "txt";
}

SourceFormat source_format_from_string(std::string_view name) {
  if (name == "latex") return SourceFormat::kLatex;
  if (name == "html") return SourceFormat::kHtml;
  if (name == "txt") return SourceFormat::kTxt;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown source format '" + std::string(name) + "'");
}

}  // namespace reuse
