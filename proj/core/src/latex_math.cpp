#include "reuse/latex_math.hpp"

#include <unicode/uchar.h>

#include <optional>
#include <unordered_map>

#include "reuse/error.hpp"
#include "reuse/unicode.hpp"

namespace reuse {
namespace {

using mathml::Node;

const std::unordered_map<std::u32string, char32_t>& greek() {
  static const std::unordered_map<std::u32string, char32_t> table{
      {U"alpha", 0x03B1},   {U"beta", 0x03B2},      {U"gamma", 0x03B3},
      {U"delta", 0x03B4},   {U"epsilon", 0x03F5},   {U"varepsilon", 0x03B5},
      {U"zeta", 0x03B6},    {U"eta", 0x03B7},       {U"theta", 0x03B8},
      {U"vartheta", 0x03D1}, {U"iota", 0x03B9},     {U"kappa", 0x03BA},
      {U"lambda", 0x03BB},  {U"mu", 0x03BC},        {U"nu", 0x03BD},
      {U"xi", 0x03BE},      {U"omicron", 0x03BF},   {U"pi", 0x03C0},
      {U"varpi", 0x03D6},   {U"rho", 0x03C1},       {U"varrho", 0x03F1},
      {U"sigma", 0x03C3},   {U"varsigma", 0x03C2},  {U"tau", 0x03C4},
      {U"upsilon", 0x03C5}, {U"phi", 0x03D5},       {U"varphi", 0x03C6},
      {U"chi", 0x03C7},     {U"psi", 0x03C8},       {U"omega", 0x03C9},
      {U"Gamma", 0x0393},   {U"Delta", 0x0394},     {U"Theta", 0x0398},
      {U"Lambda", 0x039B},  {U"Xi", 0x039E},        {U"Pi", 0x03A0},
      {U"Sigma", 0x03A3},   {U"Upsilon", 0x03A5},   {U"Phi", 0x03A6},
      {U"Psi", 0x03A8},     {U"Omega", 0x03A9},     {U"infty", 0x221E},
  };
  return table;
}

const std::unordered_map<std::u32string, char32_t>& operator_commands() {
  static const std::unordered_map<std::u32string, char32_t> table{
      {U"times", 0x00D7}, {U"cdot", 0x22C5}, {U"leq", 0x2264},
      {U"le", 0x2264},    {U"geq", 0x2265},  {U"ge", 0x2265},
      {U"neq", 0x2260},   {U"ne", 0x2260},   {U"in", 0x2208},
      {U"sum", 0x2211},   {U"int", 0x222B},  {U"pm", 0x00B1},
      {U"to", 0x2192},
  };
  return table;
}

bool is_function_name(std::u32string_view name) {
  static constexpr std::u32string_view kNames[] = {
      U"sin", U"cos", U"tan", U"log", U"ln", U"exp",
      U"lim", U"max", U"min", U"det", U"sup", U"inf"};
  for (auto n : kNames) {
    if (n == name) return true;
  }
  return false;
}

bool is_spacing_command(std::u32string_view name) {
  return name == U"," || name == U";" || name == U":" || name == U"!" ||
         name == U" " || name == U"quad" || name == U"qquad" ||
         name == U"left" || name == U"right";
}

bool is_ascii_operator(char32_t c) {
  switch (c) {
    case U'+': case U'-': case U'=': case U'<': case U'>': case U'/':
    case U',': case U'(': case U')': case U'[': case U']': case U'|':
    case U'!': case U':':
      return true;
    default:
      return false;
  }
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_letter(char32_t c) {
  return u_isalpha(static_cast<UChar32>(c)) != 0;
}

class MathParser {
 public:
  explicit MathParser(std::u32string_view src) : src_(src) {}

  Node parse() {
    Node root = Node::element("math", parse_sequence(false));
    skip_insignificant();
    if (pos_ < src_.size()) unsupported(pos_, 1);  // stray '}'
    return root;
  }

 private:
  [[noreturn]] void unsupported(std::size_t at, std::size_t len) const {
    throw UnsupportedMath(unicode::to_utf8(src_.substr(at, len)), at);
  }

  bool at_end() const { return pos_ >= src_.size(); }
  char32_t peek() const { return src_[pos_]; }

  std::u32string read_command_name() {
    // pos_ is just past the backslash.
    const std::size_t begin = pos_;
    if (at_end()) return {};
    if (!is_letter(peek()) || peek() > 0x7F) {
      ++pos_;
      return std::u32string(src_.substr(begin, 1));
    }
    while (!at_end() && peek() < 0x80 && is_letter(peek())) ++pos_;
    return std::u32string(src_.substr(begin, pos_ - begin));
  }

  void skip_insignificant() {
    for (;;) {
      while (!at_end() && unicode::is_whitespace(peek())) ++pos_;
      if (at_end() || peek() != U'\\') return;
      const std::size_t save = pos_;
      ++pos_;
      const std::u32string name = read_command_name();
      if (!is_spacing_command(name)) {
        pos_ = save;
        return;
      }
      if (name == U"left" || name == U"right") {
        while (!at_end() && unicode::is_whitespace(peek())) ++pos_;
        if (!at_end() && peek() == U'.') ++pos_;
      }
    }
  }

  std::vector<Node> parse_sequence(bool in_group) {
    std::vector<Node> items;
    for (;;) {
      skip_insignificant();
      if (at_end()) {
        if (in_group) unsupported(src_.size() == 0 ? 0 : src_.size() - 1, 1);
        return items;
      }
      if (peek() == U'}') {
        if (!in_group) return items;
        ++pos_;
        return items;
      }
      items.push_back(parse_item());
    }
  }

  Node parse_item() {
    std::optional<Node> base;
    const char32_t c = peek();
    if (c == U'^' || c == U'_') {
      base = Node::element("mrow");
    } else {
      base = parse_atom(false);
    }
    std::optional<Node> sup;
    std::optional<Node> sub;
    for (;;) {
      skip_insignificant();
      if (at_end()) break;
      const char32_t s = peek();
      if (s != U'^' && s != U'_') break;
      const std::size_t at = pos_;
      ++pos_;
      skip_insignificant();
      if (at_end()) unsupported(at, 1);
      auto& slot = s == U'^' ? sup : sub;
      if (slot) unsupported(at, 1);  // double script
      slot = parse_atom(true);
    }
    if (sup && sub) {
      return Node::element("msubsup", {std::move(*base), std::move(*sub),
                                       std::move(*sup)});
    }
    if (sup) return Node::element("msup", {std::move(*base), std::move(*sup)});
    if (sub) return Node::element("msub", {std::move(*base), std::move(*sub)});
    return std::move(*base);
  }

  Node group_node(std::vector<Node> children) {
    if (children.size() == 1) return std::move(children.front());
    return Node::element("mrow", std::move(children));
  }

  Node parse_argument() {
    skip_insignificant();
    if (at_end()) unsupported(src_.size() == 0 ? 0 : src_.size() - 1, 1);
    return parse_atom(true);
  }

  // `single` restricts digit runs to one digit, as in x^23 or \frac12.
  Node parse_atom(bool single) {
    const std::size_t at = pos_;
    const char32_t c = peek();
    if (c == U'{') {
      ++pos_;
      return group_node(parse_sequence(true));
    }
    if (is_digit(c)) {
      ++pos_;
      if (!single) {
        while (!at_end() && is_digit(peek())) ++pos_;
        if (pos_ + 1 < src_.size() && peek() == U'.' &&
            is_digit(src_[pos_ + 1])) {
          ++pos_;
          while (!at_end() && is_digit(peek())) ++pos_;
        }
      }
      return Node::leaf("mn", unicode::to_utf8(src_.substr(at, pos_ - at)));
    }
    if (is_ascii_operator(c)) {
      ++pos_;
      return Node::leaf("mo", unicode::to_utf8(c));
    }
    if (c == U'\\') {
      ++pos_;
      const std::u32string name = read_command_name();
      if (name.empty()) unsupported(at, 1);
      if (auto it = greek().find(name); it != greek().end()) {
        return Node::leaf("mi", unicode::to_utf8(it->second));
      }
      if (auto it = operator_commands().find(name);
          it != operator_commands().end()) {
        return Node::leaf("mo", unicode::to_utf8(it->second));
      }
      if (is_function_name(name)) {
        return Node::leaf("mi", unicode::to_utf8(name));
      }
      if (name == U"frac") {
        Node numerator = parse_argument();
        Node denominator = parse_argument();
        return Node::element("mfrac",
                             {std::move(numerator), std::move(denominator)});
      }
      if (name == U"sqrt") {
        skip_insignificant();
        if (!at_end() && peek() == U'[') unsupported(at, pos_ - at + 1);
        Node radicand = parse_argument();
        // msqrt takes an inferred mrow; a single child is kept as is.
        return Node::element("msqrt", {std::move(radicand)});
      }
      unsupported(at, pos_ - at);
    }
    if (is_letter(c)) {
      ++pos_;
      return Node::leaf("mi", unicode::nfc(unicode::to_utf8(c)));
    }
    unsupported(at, 1);
  }

  std::u32string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

mathml::Node latex_math_to_tree(std::string_view latex_math) {
  const std::u32string src = unicode::to_u32(latex_math);
  return MathParser(src).parse();
}

std::string latex_math_to_mathml(std::string_view latex_math) {
  return mathml::serialize(latex_math_to_tree(latex_math));
}

}  // namespace reuse
