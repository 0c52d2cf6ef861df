#include "reuse/mathml.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

#include "reuse/error.hpp"
#include "reuse/unicode.hpp"

namespace reuse::mathml {
namespace {

constexpr std::size_t kMaxDepth = 256;

struct NamedEntity {
  std::string_view name;
  char32_t cp;
};

// XML predefined entities plus the HTML and MathML names converters
// commonly emit.
constexpr NamedEntity kEntities[] = {
    {"alpha", 0x03B1},
    {"beta", 0x03B2},
    {"gamma", 0x03B3},
    {"delta", 0x03B4},
    {"epsilon", 0x03B5},
    {"zeta", 0x03B6},
    {"eta", 0x03B7},
    {"theta", 0x03B8},
    {"iota", 0x03B9},
    {"kappa", 0x03BA},
    {"lambda", 0x03BB},
    {"mu", 0x03BC},
    {"nu", 0x03BD},
    {"xi", 0x03BE},
    {"omicron", 0x03BF},
    {"pi", 0x03C0},
    {"rho", 0x03C1},
    {"sigmaf", 0x03C2},
    {"sigma", 0x03C3},
    {"tau", 0x03C4},
    {"upsilon", 0x03C5},
    {"phi", 0x03C6},
    {"chi", 0x03C7},
    {"psi", 0x03C8},
    {"omega", 0x03C9},
    {"Alpha", 0x0391},
    {"Beta", 0x0392},
    {"Gamma", 0x0393},
    {"Delta", 0x0394},
    {"Epsilon", 0x0395},
    {"Zeta", 0x0396},
    {"Eta", 0x0397},
    {"Theta", 0x0398},
    {"Iota", 0x0399},
    {"Kappa", 0x039A},
    {"Lambda", 0x039B},
    {"Mu", 0x039C},
    {"Nu", 0x039D},
    {"Xi", 0x039E},
    {"Omicron", 0x039F},
    {"Pi", 0x03A0},
    {"Rho", 0x03A1},
    {"Sigma", 0x03A3},
    {"Tau", 0x03A4},
    {"Upsilon", 0x03A5},
    {"Phi", 0x03A6},
    {"Chi", 0x03A7},
    {"Psi", 0x03A8},
    {"Omega", 0x03A9},
    {"amp", U'&'},
    {"lt", U'<'},
    {"gt", U'>'},
    {"quot", U'"'},
    {"apos", U'\''},
    {"nbsp", 0x00A0},
    {"ensp", 0x2002},
    {"emsp", 0x2003},
    {"thinsp", 0x2009},
    {"ndash", 0x2013},
    {"mdash", 0x2014},
    {"hellip", 0x2026},
    {"lsquo", 0x2018},
    {"rsquo", 0x2019},
    {"ldquo", 0x201C},
    {"rdquo", 0x201D},
    {"laquo", 0x00AB},
    {"raquo", 0x00BB},
    {"copy", 0x00A9},
    {"reg", 0x00AE},
    {"deg", 0x00B0},
    {"sect", 0x00A7},
    {"para", 0x00B6},
    {"bull", 0x2022},
    {"prime", 0x2032},
    {"minus", 0x2212},
    {"times", 0x00D7},
    {"divide", 0x00F7},
    {"middot", 0x00B7},
    {"sdot", 0x22C5},
    {"plusmn", 0x00B1},
    {"PlusMinus", 0x00B1},
    {"le", 0x2264},
    {"ge", 0x2265},
    {"ne", 0x2260},
    {"equiv", 0x2261},
    {"asymp", 0x2248},
    {"approx", 0x2248},
    {"isin", 0x2208},
    {"notin", 0x2209},
    {"sub", 0x2282},
    {"sup", 0x2283},
    {"cap", 0x2229},
    {"cup", 0x222A},
    {"forall", 0x2200},
    {"exist", 0x2203},
    {"empty", 0x2205},
    {"nabla", 0x2207},
    {"partial", 0x2202},
    {"infin", 0x221E},
    {"sum", 0x2211},
    {"prod", 0x220F},
    {"int", 0x222B},
    {"radic", 0x221A},
    {"rarr", 0x2192},
    {"larr", 0x2190},
    {"harr", 0x2194},
    {"rArr", 0x21D2},
    {"lArr", 0x21D0},
    {"hArr", 0x21D4},
    {"lang", 0x27E8},
    {"rang", 0x27E9},
    {"InvisibleTimes", 0x2062},
    {"it", 0x2062},
    {"ApplyFunction", 0x2061},
    {"af", 0x2061},
    {"InvisibleComma", 0x2063},
    {"ic", 0x2063},
};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
         c == '_' || c == ':' || c == '.' ||
         static_cast<unsigned char>(c) >= 0x80;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string local_name(std::string_view qualified) {
  const auto colon = qualified.rfind(':');
  if (colon != std::string_view::npos) qualified.remove_prefix(colon + 1);
  return lower(qualified);
}

std::string collapse(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return unicode::nfc(out);
}

[[noreturn]] void fail(const std::string& what, std::size_t pos) {
  throw Error(ErrorCode::kParseError,
              "malformed MathML: " + what + " at byte " + std::to_string(pos));
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Node parse_document() {
    skip_misc();
    if (!lookahead("<")) fail("expected root element", pos_);
    Node root = parse_element(0);
    skip_misc();
    if (pos_ != src_.size()) fail("trailing content", pos_);
    if (root.name != "math") fail("root element is not <math>", 0);
    return root;
  }

 private:
  bool lookahead(std::string_view s) const {
    return src_.substr(pos_, s.size()) == s;
  }

  void skip_spaces() {
    while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
  }

  // Skips whitespace, comments, processing instructions and doctype.
  void skip_misc() {
    for (;;) {
      skip_spaces();
      if (lookahead("<!--")) {
        skip_comment();
      } else if (lookahead("<?")) {
        const auto end = src_.find("?>", pos_);
        if (end == std::string_view::npos) fail("unterminated PI", pos_);
        pos_ = end + 2;
      } else if (lookahead("<!DOCTYPE") || lookahead("<!doctype")) {
        const auto end = src_.find('>', pos_);
        if (end == std::string_view::npos) fail("unterminated doctype", pos_);
        pos_ = end + 1;
      } else {
        return;
      }
    }
  }

  void skip_comment() {
    const auto end = src_.find("-->", pos_ + 4);
    if (end == std::string_view::npos) fail("unterminated comment", pos_);
    pos_ = end + 3;
  }

  std::string read_name() {
    const std::size_t begin = pos_;
    while (pos_ < src_.size() && is_name_char(src_[pos_])) ++pos_;
    if (begin == pos_) fail("expected name", pos_);
    return std::string(src_.substr(begin, pos_ - begin));
  }

  void decode_reference(std::string& out) {
    const std::size_t amp = pos_;
    const auto semi = src_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 40) {
      fail("bad entity reference", amp);
    }
    const std::string_view body = src_.substr(pos_ + 1, semi - pos_ - 1);
    if (!decode_entity(body, out)) {
      fail("unknown entity '&" + std::string(body) + ";'", amp);
    }
    pos_ = semi + 1;
  }

  std::string read_attribute_value() {
    if (pos_ >= src_.size() || (src_[pos_] != '"' && src_[pos_] != '\'')) {
      fail("expected quoted attribute value", pos_);
    }
    const char quote = src_[pos_++];
    std::string value;
    while (pos_ < src_.size() && src_[pos_] != quote) {
      if (src_[pos_] == '&') {
        decode_reference(value);
      } else if (src_[pos_] == '<') {
        fail("'<' in attribute value", pos_);
      } else {
        value.push_back(src_[pos_++]);
      }
    }
    if (pos_ >= src_.size()) fail("unterminated attribute value", pos_);
    ++pos_;
    return value;
  }

  Node parse_element(std::size_t depth) {
    if (depth > kMaxDepth) fail("nesting too deep", pos_);
    ++pos_;  // '<'
    const std::string qualified = read_name();
    Node node;
    node.name = local_name(qualified);
    for (;;) {
      skip_spaces();
      if (pos_ >= src_.size()) fail("unterminated start tag", pos_);
      if (lookahead("/>")) {
        pos_ += 2;
        finish(node);
        return node;
      }
      if (src_[pos_] == '>') {
        ++pos_;
        break;
      }
      const std::string attr = read_name();
      skip_spaces();
      if (pos_ >= src_.size() || src_[pos_] != '=') fail("expected '='", pos_);
      ++pos_;
      skip_spaces();
      std::string value = read_attribute_value();
      if (attr == "xmlns" || attr.rfind("xmlns:", 0) == 0) continue;
      node.attributes.emplace_back(local_name(attr), std::move(value));
    }

    std::string text;
    auto flush_text = [&] {
      if (text.empty()) return;
      std::string collapsed = collapse(text);
      text.clear();
      if (collapsed.empty()) return;
      if (!node.children.empty() && node.children.back().is_text()) {
        node.children.back().text += " " + collapsed;
      } else {
        Node t;
        t.text = std::move(collapsed);
        node.children.push_back(std::move(t));
      }
    };

    for (;;) {
      if (pos_ >= src_.size()) fail("missing </" + qualified + ">", pos_);
      const char c = src_[pos_];
      if (c == '<') {
        if (lookahead("</")) {
          pos_ += 2;
          const std::string closing = read_name();
          if (closing != qualified) {
            fail("mismatched </" + closing + "> for <" + qualified + ">",
                 pos_);
          }
          skip_spaces();
          if (pos_ >= src_.size() || src_[pos_] != '>') {
            fail("expected '>'", pos_);
          }
          ++pos_;
          break;
        }
        if (lookahead("<!--")) {
          skip_comment();
          continue;
        }
        if (lookahead("<![CDATA[")) {
          const auto end = src_.find("]]>", pos_);
          if (end == std::string_view::npos) fail("unterminated CDATA", pos_);
          text += src_.substr(pos_ + 9, end - pos_ - 9);
          pos_ = end + 3;
          continue;
        }
        if (lookahead("<?")) {
          const auto end = src_.find("?>", pos_);
          if (end == std::string_view::npos) fail("unterminated PI", pos_);
          pos_ = end + 2;
          continue;
        }
        flush_text();
        node.children.push_back(parse_element(depth + 1));
        continue;
      }
      if (c == '&') {
        decode_reference(text);
        continue;
      }
      text.push_back(c);
      ++pos_;
    }
    flush_text();
    finish(node);
    return node;
  }

  static void finish(Node& node) {
    std::stable_sort(node.attributes.begin(), node.attributes.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

void escape_into(std::string& out, std::string_view text, bool attribute) {
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
        } else {
          out.push_back(c);
        }
        break;
      default: out.push_back(c);
    }
  }
}

void serialize_into(std::string& out, const Node& node) {
  if (node.is_text()) {
    escape_into(out, node.text, false);
    return;
  }
  out.push_back('<');
  out += node.name;
  for (const auto& [key, value] : node.attributes) {
    out.push_back(' ');
    out += key;
    out += "=\"";
    escape_into(out, value, true);
    out.push_back('"');
  }
  out.push_back('>');
  for (const Node& child : node.children) serialize_into(out, child);
  out += "</";
  out += node.name;
  out.push_back('>');
}

void text_into(std::string& out, const Node& node) {
  if (node.is_text()) {
    if (!out.empty()) out.push_back(' ');
    out += node.text;
    return;
  }
  for (const Node& child : node.children) text_into(out, child);
}

}  // namespace

Node Node::element(std::string name, std::vector<Node> children) {
  Node n;
  n.name = std::move(name);
  n.children = std::move(children);
  return n;
}

Node Node::leaf(std::string name, std::string text) {
  Node n;
  n.name = std::move(name);
  Node t;
  t.text = std::move(text);
  n.children.push_back(std::move(t));
  return n;
}

bool decode_entity(std::string_view name, std::string& out) {
  if (name.size() >= 2 && name[0] == '#') {
    unsigned long value = 0;
    const bool hex = name[1] == 'x' || name[1] == 'X';
    const char* first = name.data() + (hex ? 2 : 1);
    const char* last = name.data() + name.size();
    if (first == last) return false;
    const auto [ptr, ec] = std::from_chars(first, last, value, hex ? 16 : 10);
    if (ec != std::errc() || ptr != last) return false;
    if (value == 0 || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) {
      return false;
    }
    out += unicode::to_utf8(static_cast<char32_t>(value));
    return true;
  }
  for (const auto& e : kEntities) {
    if (e.name == name) {
      out += unicode::to_utf8(e.cp);
      return true;
    }
  }
  return false;
}

Node parse(std::string_view source) { return Parser(source).parse_document(); }

std::string serialize(const Node& node) {
  std::string out;
  serialize_into(out, node);
  return out;
}

std::string text_content(const Node& node) {
  std::string out;
  text_into(out, node);
  return out;
}

}  // namespace reuse::mathml
