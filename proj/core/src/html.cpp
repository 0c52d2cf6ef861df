#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "block_builder.hpp"
#include "reuse/encoding.hpp"
#include "reuse/error.hpp"
#include "reuse/ingest.hpp"
#include "reuse/mathml.hpp"
#include "reuse/unicode.hpp"

namespace reuse {
namespace {

struct Tag {
  std::string name;  // lowercase, without namespace prefix
  std::vector<std::pair<std::string, std::string>> attributes;
  bool closing = false;
  bool self_closing = false;
  std::size_t begin = 0;
  std::size_t end = 0;  // one past '>'

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f';
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

bool is_block_element(std::string_view name) {
  static constexpr std::string_view kBlocks[] = {
      "p",  "div", "h1", "h2", "h3",  "h4",      "h5",      "h6",
      "li", "br",  "tr", "ul", "ol",  "table",   "section", "article",
      "blockquote", "pre", "hr", "figure", "figcaption", "header", "footer"};
  return std::find(std::begin(kBlocks), std::end(kBlocks), name) !=
         std::end(kBlocks);
}

bool is_raw_text_element(std::string_view name) {
  return name == "script" || name == "style" || name == "head" ||
         name == "template" || name == "noscript";
}

// Decodes character references; unknown names are kept verbatim.
std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '&') {
      const auto semi = s.find(';', i + 1);
      if (semi != std::string_view::npos && semi - i <= 32) {
        if (mathml::decode_entity(s.substr(i + 1, semi - i - 1), out)) {
          i = semi;
          continue;
        }
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size() &&
        std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
        std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
      out.push_back(static_cast<char>(
          std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

std::optional<Resource> decode_data_uri(std::string_view uri) {
  if (lower(uri.substr(0, 5)) != "data:") return std::nullopt;
  const auto comma = uri.find(',');
  if (comma == std::string_view::npos) return std::nullopt;
  std::string meta = lower(uri.substr(5, comma - 5));
  const std::string_view payload = uri.substr(comma + 1);
  bool base64 = false;
  if (meta.size() >= 7 && meta.compare(meta.size() - 7, 7, ";base64") == 0) {
    base64 = true;
    meta.resize(meta.size() - 7);
  }
  std::string media = meta.substr(0, meta.find(';'));
  if (media.empty()) media = "text/plain";
  if (base64) {
    auto bytes = base64_decode(payload);
    if (!bytes) return std::nullopt;
    return Resource{std::move(*bytes), media};
  }
  return Resource{percent_decode(payload), media};
}

class HtmlParser {
 public:
  HtmlParser(std::string_view src, const ResourceResolver& resolver,
             std::vector<Warning>& warnings)
      : s_(src), resolver_(resolver), warnings_(warnings) {}

  std::vector<Block> run() {
    std::size_t i = 0;
    while (i < s_.size()) {
      if (s_[i] == '<') {
        i = markup(i);
      } else {
        const auto next = s_.find('<', i);
        const std::size_t end = next == std::string_view::npos ? s_.size() : next;
        text(decode_entities(s_.substr(i, end - i)));
        i = end;
      }
    }
    return out_.finish();
  }

 private:
  void warn(std::string code, std::string message, std::size_t at) {
    warnings_.push_back(Warning{std::move(code), std::move(message), at});
  }

  void text(std::string_view t) {
    for (char c : t) {
      if (is_space(c)) {
        pending_space_ = true;
        continue;
      }
      separate();
      out_.buffer().push_back(c);
    }
  }

  // Emits the separator owed before new content.
  void separate() {
    if (out_.has_output()) {
      std::string& buf = out_.buffer();
      const bool at_line_start = !buf.empty() && buf.back() == '\n';
      if (pending_break_) {
        if (!at_line_start) buf.push_back('\n');
      } else if (pending_space_ && !at_line_start) {
        buf.push_back(' ');
      }
    }
    pending_break_ = false;
    pending_space_ = false;
  }

  static bool parse_tag(std::string_view s, std::size_t i, Tag& tag) {
    std::size_t j = i + 1;
    if (j < s.size() && s[j] == '/') {
      tag.closing = true;
      ++j;
    }
    const std::size_t name_begin = j;
    while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) ||
                            s[j] == ':' || s[j] == '-' || s[j] == '_')) {
      ++j;
    }
    if (j == name_begin || !std::isalpha(static_cast<unsigned char>(s[name_begin]))) {
      return false;
    }
    std::string_view qualified = s.substr(name_begin, j - name_begin);
    if (const auto colon = qualified.rfind(':'); colon != std::string_view::npos) {
      qualified.remove_prefix(colon + 1);
    }
    tag.name = lower(qualified);
    tag.begin = i;
    while (j < s.size()) {
      while (j < s.size() && is_space(s[j])) ++j;
      if (j >= s.size()) break;
      if (s[j] == '>') {
        tag.end = j + 1;
        return true;
      }
      if (s[j] == '/' && j + 1 < s.size() && s[j + 1] == '>') {
        tag.self_closing = true;
        tag.end = j + 2;
        return true;
      }
      const std::size_t key_begin = j;
      while (j < s.size() && !is_space(s[j]) && s[j] != '=' && s[j] != '>' &&
             !(s[j] == '/' && j + 1 < s.size() && s[j + 1] == '>')) {
        ++j;
      }
      std::string key = lower(s.substr(key_begin, j - key_begin));
      while (j < s.size() && is_space(s[j])) ++j;
      std::string value;
      if (j < s.size() && s[j] == '=') {
        ++j;
        while (j < s.size() && is_space(s[j])) ++j;
        if (j < s.size() && (s[j] == '"' || s[j] == '\'')) {
          const char quote = s[j];
          const auto close = s.find(quote, j + 1);
          if (close == std::string_view::npos) return false;
          value = decode_entities(s.substr(j + 1, close - j - 1));
          j = close + 1;
        } else {
          const std::size_t v = j;
          while (j < s.size() && !is_space(s[j]) && s[j] != '>') ++j;
          value = decode_entities(s.substr(v, j - v));
        }
      }
      if (key.empty()) {
        ++j;
        continue;
      }
      tag.attributes.emplace_back(std::move(key), std::move(value));
    }
    return false;
  }

  // Finds the end of the <math> element opened by `tag`, honoring nesting.
  std::size_t math_end(const Tag& open) const {
    int depth = 1;
    std::size_t i = open.end;
    while (i < s_.size()) {
      const auto lt = s_.find('<', i);
      if (lt == std::string_view::npos) return std::string_view::npos;
      Tag t;
      if (!parse_tag(s_, lt, t)) {
        i = lt + 1;
        continue;
      }
      if (t.name == "math") {
        if (t.closing) {
          if (--depth == 0) return t.end;
        } else if (!t.self_closing) {
          ++depth;
        }
      }
      i = t.end;
    }
    return std::string_view::npos;
  }

  static std::string strip_tags(std::string_view s) {
    std::string out;
    bool in_tag = false;
    for (char c : s) {
      if (c == '<') {
        in_tag = true;
        out.push_back(' ');
      } else if (c == '>') {
        in_tag = false;
      } else if (!in_tag) {
        out.push_back(c);
      }
    }
    return decode_entities(out);
  }

  std::size_t math(const Tag& open) {
    std::size_t end = open.self_closing ? open.end : math_end(open);
    if (end == std::string_view::npos) end = s_.size();
    const std::string_view raw = s_.substr(open.begin, end - open.begin);
    const std::string* display = open.attribute("display");
    try {
      std::string canonical = mathml::canonicalize(raw);
      emit_separator_before_object();
      out_.math(std::move(canonical), display != nullptr && *display == "block");
    } catch (const Error& e) {
      warn("malformed-mathml", e.what(), open.begin);
      text(strip_tags(raw));
    }
    return end;
  }

  void emit_separator_before_object() {
    separate();
  }

  void image(const Tag& tag) {
    ImageBlock block;
    const std::string* src = tag.attribute("src");
    block.source_ref = src ? *src : std::string();
    std::optional<Resource> resource;
    if (src != nullptr) {
      if (lower(std::string_view(*src).substr(0, 5)) == "data:") {
        resource = decode_data_uri(*src);
      } else if (resolver_) {
        resource = resolver_(*src);
      }
    }
    if (resource) {
      block.bytes = std::move(resource->bytes);
      block.media_type = std::move(resource->media_type);
    } else {
      block.media_type = src ? media_type_for(*src) : "application/octet-stream";
      if (src != nullptr && lower(std::string_view(*src).substr(0, 5)) == "data:") {
        block.media_type = "application/octet-stream";
      }
      warn("unresolved-image",
           "could not resolve image '" + block.source_ref.substr(0, 80) + "'",
           tag.begin);
    }
    emit_separator_before_object();
    out_.image(std::move(block));
  }

  std::size_t skip_raw_text(const Tag& open) {
    if (open.self_closing) return open.end;
    const std::string close = "</" + open.name;
    std::size_t i = open.end;
    for (;;) {
      const auto lt = s_.find("</", i);
      if (lt == std::string_view::npos) return s_.size();
      if (lower(s_.substr(lt, close.size())) == close) {
        const auto gt = s_.find('>', lt);
        return gt == std::string_view::npos ? s_.size() : gt + 1;
      }
      i = lt + 2;
    }
  }

  std::size_t markup(std::size_t i) {
    if (s_.compare(i, 4, "<!--") == 0) {
      const auto end = s_.find("-->", i + 4);
      return end == std::string_view::npos ? s_.size() : end + 3;
    }
    if (i + 1 < s_.size() && (s_[i + 1] == '!' || s_[i + 1] == '?')) {
      const auto end = s_.find('>', i);
      return end == std::string_view::npos ? s_.size() : end + 1;
    }
    Tag tag;
    if (!parse_tag(s_, i, tag)) {
      text("<");
      return i + 1;
    }
    if (!tag.closing) {
      if (tag.name == "math") return math(tag);
      if (tag.name == "img") {
        image(tag);
        return tag.end;
      }
      if (is_raw_text_element(tag.name)) return skip_raw_text(tag);
    }
    if (is_block_element(tag.name)) {
      pending_break_ = true;
    } else if (tag.name == "td" || tag.name == "th") {
      pending_space_ = true;
    }
    return tag.end;
  }

  std::string_view s_;
  const ResourceResolver& resolver_;
  std::vector<Warning>& warnings_;
  detail::BlockBuilder out_;
  bool pending_space_ = false;
  bool pending_break_ = false;
};

}  // namespace

Document parse_html(std::string_view source, std::string name,
                    const ResourceResolver& resolver) {
  Document doc;
  doc.display_name = std::move(name);
  doc.source_format = SourceFormat::kHtml;
  std::size_t invalid = 0;
  const std::string decoded = unicode::decode_lossy(source, &invalid);
  if (invalid > 0) {
    doc.warnings.push_back(Warning{
        "invalid-utf8",
        std::to_string(invalid) + " invalid UTF-8 sequence(s) replaced", 0});
  }
  HtmlParser parser(decoded, resolver, doc.warnings);
  doc.blocks = parser.run();
  return doc;
}

}  // namespace reuse
