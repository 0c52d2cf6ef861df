#include "reuse/math_tokens.hpp"

#include "reuse/mathml.hpp"

namespace reuse {
namespace {

bool is_ignored_subtree(const std::string& name) {
  return name == "mtext" || name == "mspace" || name == "ms" ||
         name == "annotation" || name == "annotation-xml";
}

void collect(const mathml::Node& node, std::string_view formula_id,
             std::vector<MathToken>& out) {
  if (node.is_text() || is_ignored_subtree(node.name)) return;
  MathTokenKind kind;
  if (node.name == "mi") {
    kind = MathTokenKind::kIdentifier;
  } else if (node.name == "mo") {
    kind = MathTokenKind::kOperator;
  } else if (node.name == "mn") {
    kind = MathTokenKind::kNumber;
  } else {
    for (const auto& child : node.children) collect(child, formula_id, out);
    return;
  }
  std::string value = mathml::text_content(node);
  if (value.empty()) return;
  out.push_back(MathToken{kind, std::move(value), std::string(formula_id),
                          out.size()});
}

}  // namespace

std::string_view to_string(MathTokenKind kind) {
  switch (kind) {
    case MathTokenKind::kIdentifier: return "identifier";
    case MathTokenKind::kOperator: return "operator";
    case MathTokenKind::kNumber: return "number";
  }
  return "identifier";
}

std::vector<MathToken> tokenize_mathml(std::string_view mathml,
                                       std::string_view formula_id) {
  std::vector<MathToken> tokens;
  collect(mathml::parse(mathml), formula_id, tokens);
  return tokens;
}

TokenStream identifier_stream(const NormalizedDocument& nd) {
  TokenStream stream;
  for (const FormulaEntry& f : nd.formulas()) {
    for (MathToken& t : tokenize_mathml(f.mathml, f.formula_id)) {
      if (t.kind == MathTokenKind::kIdentifier) {
        stream.tokens.push_back(std::move(t));
      }
    }
  }
  return stream;
}

}  // namespace reuse
