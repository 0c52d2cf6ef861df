#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reuse/blocks.hpp"
#include "reuse/span.hpp"

namespace reuse {

inline constexpr char32_t kPlaceholderOpen = 0x27EA;   // ⟪
inline constexpr char32_t kPlaceholderClose = 0x27EB;  // ⟫

struct FormulaEntry {
  std::string formula_id;  // "F1", "F2", ...
  std::string mathml;
  Span placeholder_span;
  std::size_t symbol_count = 0;
  bool display = false;

  friend bool operator==(const FormulaEntry&, const FormulaEntry&) = default;
};

struct ImageEntry {
  std::string image_id;  // "I1", "I2", ...
  std::string content_hash;
  std::string media_type;
  Span placeholder_span;
  std::string bytes;  // not part of the canonical serialization

  friend bool operator==(const ImageEntry&, const ImageEntry&) = default;
};

struct CaseContent {
  std::string excerpt;
  std::vector<std::string> formula_ids;
  std::vector<std::string> image_ids;

  friend bool operator==(const CaseContent&, const CaseContent&) = default;
};

/// Offset-stable plain text with formulas and images replaced by fenced
/// placeholders. Immutable once built; all spans count code points of
/// plain_text().
class NormalizedDocument {
 public:
  NormalizedDocument() = default;
  NormalizedDocument(std::string doc_id, std::string display_name,
                     SourceFormat source_format, std::string plain_text,
                     std::vector<FormulaEntry> formulas,
                     std::vector<ImageEntry> images);

  const std::string& doc_id() const noexcept { return doc_id_; }
  const std::string& display_name() const noexcept { return display_name_; }
  SourceFormat source_format() const noexcept { return source_format_; }
  const std::string& plain_text() const noexcept { return plain_text_; }
  const std::u32string& chars() const noexcept { return chars_; }
  std::size_t length() const noexcept { return chars_.size(); }
  const std::vector<FormulaEntry>& formulas() const noexcept { return formulas_; }
  const std::vector<ImageEntry>& images() const noexcept { return images_; }
  const std::string& fingerprint() const noexcept { return fingerprint_; }

  const FormulaEntry* find_formula(std::string_view formula_id) const;
  const ImageEntry* find_image(std::string_view image_id) const;

  std::string text(Span span) const;

  NormalizedDocument with_identity(std::string doc_id,
                                   std::string display_name) const;

  friend bool operator==(const NormalizedDocument& a,
                         const NormalizedDocument& b) {
    return a.doc_id_ == b.doc_id_ && a.display_name_ == b.display_name_ &&
           a.source_format_ == b.source_format_ &&
           a.plain_text_ == b.plain_text_ && a.formulas_ == b.formulas_ &&
           a.images_ == b.images_ && a.fingerprint_ == b.fingerprint_;
  }

 private:
  std::string doc_id_;
  std::string display_name_;
  SourceFormat source_format_ = SourceFormat::kTxt;
  std::string plain_text_;
  std::u32string chars_;
  std::vector<FormulaEntry> formulas_;
  std::vector<ImageEntry> images_;
  std::string fingerprint_;
};

/// "⟪" + id + "⟫"; throws Error(kInvalidId) unless id matches F\d+ or I\d+.
std::string render_placeholder(std::string_view id);
std::u32string render_placeholder_u32(std::string_view id);

/// Replaces the placeholder delimiters in ingested text so they can never
/// be confused with real placeholders (⟪ → ⟨, ⟫ → ⟩).
std::string escape_placeholder_delimiters(std::string_view text);

/// Lowercase hex SHA-256 over plain_text, each formula's MathML, then each
/// image hash, joined by U+0000.
std::string compute_fingerprint(std::string_view plain_text,
                                const std::vector<std::string>& mathml,
                                const std::vector<std::string>& image_hashes);

NormalizedDocument normalize(const Document& document);

/// Locates `selected_text` in the document. Whitespace runs compare equal
/// to a single space. Among several occurrences the one starting nearest to
/// `hint_offset` wins (ties: smaller start); without a hint the first one.
/// Throws SelectionNotFound or Error(kInvalidArgument) for an empty needle.
Span resolve_span(const NormalizedDocument& nd, std::string_view selected_text,
                  std::optional<std::size_t> hint_offset = std::nullopt);

/// Throws Error(kInvalidSpan) when the span does not fit the text.
CaseContent slice(const NormalizedDocument& nd, Span span);

std::string to_canonical_json(const NormalizedDocument& nd);
/// Inverse of to_canonical_json. Image bytes are not restored.
NormalizedDocument from_canonical_json(std::string_view json);

}  // namespace reuse
