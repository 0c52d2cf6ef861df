#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace reuse {

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

std::string base64_encode(std::string_view data);
std::optional<std::string> base64_decode(std::string_view text);

std::string html_escape(std::string_view text);

}  // namespace reuse
