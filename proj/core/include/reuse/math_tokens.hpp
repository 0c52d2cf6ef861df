#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "reuse/document_model.hpp"

namespace reuse {

enum class MathTokenKind { kIdentifier, kOperator, kNumber };

std::string_view to_string(MathTokenKind kind);

struct MathToken {
  MathTokenKind kind = MathTokenKind::kIdentifier;
  std::string value;
  std::string formula_id;
  std::size_t ordinal = 0;

  friend bool operator==(const MathToken&, const MathToken&) = default;
};

struct TokenStream {
  std::vector<MathToken> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  const MathToken& operator[](std::size_t i) const { return tokens[i]; }
};

/// Pre-order mi/mo/mn leaves. mtext, mspace, ms and annotation subtrees are
/// skipped. Throws Error(kParseError) on malformed MathML.
std::vector<MathToken> tokenize_mathml(std::string_view mathml,
                                       std::string_view formula_id);

/// Identifier tokens of every formula, in document order.
TokenStream identifier_stream(const NormalizedDocument& nd);

inline std::size_t symbol_count(const std::vector<MathToken>& tokens) {
  return tokens.size();
}

}  // namespace reuse
