#pragma once

// UTF-8 / code point helpers. Offsets everywhere in this library count
// Unicode scalar values.

#include <cstddef>
#include <string>
#include <string_view>

namespace reuse::unicode {

/// Decodes arbitrary bytes as UTF-8, substituting U+FFFD for each invalid
/// sequence. `invalid_count`, when given, receives the number of
/// substitutions.
std::string decode_lossy(std::string_view bytes,
                         std::size_t* invalid_count = nullptr);

bool is_valid_utf8(std::string_view bytes);

/// Input must be valid UTF-8.
std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view text);
std::string to_utf8(char32_t cp);

std::size_t length(std::string_view utf8);

std::string nfc(std::string_view utf8);
std::u32string nfc(std::u32string_view text);

char32_t simple_fold(char32_t cp);
std::u32string simple_fold(std::u32string_view text);

bool is_whitespace(char32_t cp);
bool is_punctuation(char32_t cp);

/// "\r\n" and lone "\r" become "\n".
std::string normalize_newlines(std::string_view text);

}  // namespace reuse::unicode
