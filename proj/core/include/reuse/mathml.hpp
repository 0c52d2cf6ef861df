#pragma once

// Minimal XML reader/writer for presentation MathML.
//
// Canonical form: lowercase local names without namespace prefixes, xmlns
// attributes dropped, remaining attributes sorted by name, whitespace-only
// text dropped, other text trimmed with inner whitespace runs collapsed and
// NFC-normalized, no self-closing tags. serialize(parse(x)) is a fixed point.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace reuse::mathml {

struct Node {
  std::string name;  // empty for a text node
  std::string text;  // text node content
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Node> children;

  bool is_text() const noexcept { return name.empty(); }

  static Node element(std::string name, std::vector<Node> children = {});
  static Node leaf(std::string name, std::string text);

  friend bool operator==(const Node&, const Node&) = default;
};

/// Parses a MathML document whose root element is <math>. Throws
/// reuse::Error(kParseError) on malformed input.
Node parse(std::string_view source);

std::string serialize(const Node& node);

inline std::string canonicalize(std::string_view source) {
  return serialize(parse(source));
}

/// Concatenated text of all descendant text nodes, separated by spaces.
std::string text_content(const Node& node);

/// Decodes one entity reference body (without '&' and ';'). Returns false
/// for unknown names.
bool decode_entity(std::string_view name, std::string& out);

}  // namespace reuse::mathml
