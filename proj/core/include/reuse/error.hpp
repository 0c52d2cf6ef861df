#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace reuse {

enum class ErrorCode {
  kInvalidId,
  kInvalidSpan,
  kInvalidArgument,
  kNotFound,
  kParseError,
  kUnsupportedMath,
  kUnsupportedFormat,
  kConversionFailed,
  kPersistentStore,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by resolve_span when the selection does not occur in the text.
/// `closest_offset` is where the longest partial match starts.
class SelectionNotFound : public Error {
 public:
  SelectionNotFound(const std::string& message, std::size_t closest_offset,
                    std::size_t matched_chars)
      : Error(ErrorCode::kNotFound, message),
        closest_offset_(closest_offset),
        matched_chars_(matched_chars) {}

  std::size_t closest_offset() const noexcept { return closest_offset_; }
  std::size_t matched_chars() const noexcept { return matched_chars_; }

 private:
  std::size_t closest_offset_;
  std::size_t matched_chars_;
};

class UnsupportedMath : public Error {
 public:
  UnsupportedMath(std::string token, std::size_t offset)
      : Error(ErrorCode::kUnsupportedMath,
              "unsupported math token '" + token + "' at offset " +
                  std::to_string(offset)),
        token_(std::move(token)),
        offset_(offset) {}

  const std::string& token() const noexcept { return token_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string token_;
  std::size_t offset_;
};

}  // namespace reuse
