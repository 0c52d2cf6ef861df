#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace reuse {

enum class SourceFormat { kLatex, kHtml, kTxt };

std::string_view to_string(SourceFormat format);
SourceFormat source_format_from_string(std::string_view name);

struct TextBlock {
  std::string content;
  friend bool operator==(const TextBlock&, const TextBlock&) = default;
};

struct MathBlock {
  std::string mathml;  // canonical presentation MathML
  bool display = false;
  friend bool operator==(const MathBlock&, const MathBlock&) = default;
};

struct ImageBlock {
  std::string bytes;  // raw image data; empty when the source was unresolvable
  std::string media_type;
  std::string source_ref;
  friend bool operator==(const ImageBlock&, const ImageBlock&) = default;
};

using Block = std::variant<TextBlock, MathBlock, ImageBlock>;

/// Non-fatal ingest diagnostic. `source_offset` is a byte offset into the
/// decoded source.
struct Warning {
  std::string code;
  std::string message;
  std::size_t source_offset = 0;
  friend bool operator==(const Warning&, const Warning&) = default;
};

struct Document {
  std::vector<Block> blocks;
  std::string display_name;
  SourceFormat source_format = SourceFormat::kTxt;
  std::vector<Warning> warnings;

  friend bool operator==(const Document&, const Document&) = default;
};

}  // namespace reuse
