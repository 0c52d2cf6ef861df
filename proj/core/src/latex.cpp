#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "block_builder.hpp"
#include "reuse/error.hpp"
#include "reuse/ingest.hpp"
#include "reuse/latex_math.hpp"
#include "reuse/unicode.hpp"

namespace reuse {
namespace {

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n'; }

bool in_list(std::string_view name, std::initializer_list<std::string_view> list) {
  for (auto n : list) {
    if (n == name) return true;
  }
  return false;
}

bool is_math_environment(std::string_view env) {
  return in_list(env, {"equation", "equation*", "align", "align*", "displaymath",
                       "math", "eqnarray", "eqnarray*", "gather", "gather*",
                       "multline", "multline*"});
}

// Commands removed together with their arguments.
bool is_dropped_with_arguments(std::string_view name) {
  return in_list(name, {"cite", "citep", "citet", "ref", "eqref", "pageref",
                        "label", "bibliography", "bibliographystyle",
                        "usepackage", "documentclass", "vspace", "hspace"});
}

struct StrippedSource {
  std::string text;
  std::vector<std::size_t> origin;  // byte offset in the decoded source

  std::size_t origin_of(std::size_t i) const {
    if (origin.empty()) return 0;
    return i < origin.size() ? origin[i] : origin.back() + 1;
  }
};

bool escaped_at(std::string_view s, std::size_t i) {
  std::size_t backslashes = 0;
  while (i > backslashes && s[i - backslashes - 1] == '\\') ++backslashes;
  return backslashes % 2 == 1;
}

// Removes "%..." to end of line together with the newline and the next
// line's leading blanks, as TeX does.
StrippedSource strip_comments(std::string_view src) {
  StrippedSource out;
  out.text.reserve(src.size());
  out.origin.reserve(src.size());
  std::size_t i = 0;
  while (i < src.size()) {
    if (src[i] == '%' && !escaped_at(src, i)) {
      while (i < src.size() && src[i] != '\n') ++i;
      if (i < src.size()) ++i;
      while (i < src.size() && (src[i] == ' ' || src[i] == '\t')) ++i;
      continue;
    }
    out.text.push_back(src[i]);
    out.origin.push_back(i);
    ++i;
  }
  return out;
}

class LatexParser {
 public:
  LatexParser(const StrippedSource& src, const ResourceResolver& resolver,
              std::vector<Warning>& warnings)
      : src_(src), s_(src.text), resolver_(resolver), warnings_(warnings) {}

  std::vector<Block> run() {
    std::size_t begin = 0;
    std::size_t end = s_.size();
    constexpr std::string_view kBegin = "\\begin{document}";
    constexpr std::string_view kEnd = "\\end{document}";
    if (const auto b = s_.find(kBegin); b != std::string_view::npos) {
      begin = b + kBegin.size();
      if (const auto e = s_.find(kEnd, begin); e != std::string_view::npos) end = e;
    }
    scan(begin, end);
    return trim_outer(out_.finish());
  }

 private:
  void warn(std::string code, std::string message, std::size_t at) {
    warnings_.push_back(Warning{std::move(code), std::move(message),
                                src_.origin_of(at)});
  }

  static std::vector<Block> trim_outer(std::vector<Block> blocks) {
    if (auto* first = std::get_if<TextBlock>(&blocks.front())) {
      std::size_t lead = 0;
      while (lead < first->content.size() && is_space(first->content[lead])) ++lead;
      first->content.erase(0, lead);
    }
    if (auto* last = std::get_if<TextBlock>(&blocks.back())) {
      while (!last->content.empty() && is_space(last->content.back())) {
        last->content.pop_back();
      }
    }
    std::vector<Block> kept;
    for (auto& b : blocks) {
      if (const auto* t = std::get_if<TextBlock>(&b); t && t->content.empty()) continue;
      kept.push_back(std::move(b));
    }
    if (kept.empty()) kept.emplace_back(TextBlock{});
    return kept;
  }

  // Index just past the brace group starting at `open` (which must be '{'),
  // or npos when unbalanced within `limit`.
  std::size_t match_brace(std::size_t open, std::size_t limit) const {
    int depth = 0;
    for (std::size_t i = open; i < limit; ++i) {
      if (s_[i] == '\\') {
        ++i;
        continue;
      }
      if (s_[i] == '{') ++depth;
      if (s_[i] == '}' && --depth == 0) return i + 1;
    }
    return std::string_view::npos;
  }

  std::size_t skip_blanks(std::size_t i, std::size_t limit) const {
    while (i < limit && is_space(s_[i])) ++i;
    return i;
  }

  std::size_t skip_optional(std::size_t i, std::size_t limit) const {
    const std::size_t j = skip_blanks(i, limit);
    if (j < limit && s_[j] == '[') {
      const auto close = s_.find(']', j);
      if (close != std::string_view::npos && close < limit) return close + 1;
    }
    return i;
  }

  // Reads "{...}" at or after i. Returns [content_begin, content_end) and
  // sets `next`; returns false when no group follows.
  bool read_group(std::size_t i, std::size_t limit, std::size_t& content_begin,
                  std::size_t& content_end, std::size_t& next) const {
    const std::size_t j = skip_blanks(i, limit);
    if (j >= limit || s_[j] != '{') return false;
    const std::size_t after = match_brace(j, limit);
    if (after == std::string_view::npos) return false;
    content_begin = j + 1;
    content_end = after - 1;
    next = after;
    return true;
  }

  void emit_math(std::string_view content, std::string_view raw, bool display,
                 std::size_t at) {
    try {
      out_.math(latex_math_to_mathml(content), display);
    } catch (const UnsupportedMath& e) {
      warn("unsupported-math", e.what(), at);
      out_.text(raw);
    }
  }

  static std::string clean_environment_math(std::string_view content) {
    std::string out;
    for (std::size_t i = 0; i < content.size(); ++i) {
      const char c = content[i];
      if (c == '&') {
        out.push_back(' ');
        continue;
      }
      if (c == '\\' && i + 1 < content.size()) {
        if (content[i + 1] == '\\') {
          out.push_back(' ');
          ++i;
          continue;
        }
        std::size_t j = i + 1;
        while (j < content.size() && is_alpha(content[j])) ++j;
        const std::string_view name = content.substr(i + 1, j - i - 1);
        if (name == "label" && j < content.size() && content[j] == '{') {
          const auto close = content.find('}', j);
          if (close != std::string_view::npos) {
            i = close;
            continue;
          }
        }
        if (name == "nonumber" || name == "notag") {
          i = j - 1;
          continue;
        }
      }
      out.push_back(c);
    }
    return out;
  }

  // Literal remainder of the line after an unbalanced delimiter.
  std::size_t recover_line(std::size_t at, std::size_t limit,
                           std::string_view delimiter) {
    warn("unbalanced-math", "unbalanced math delimiter '" +
                                std::string(delimiter) + "'", at);
    std::size_t eol = s_.find('\n', at);
    if (eol == std::string_view::npos || eol > limit) eol = limit;
    out_.text(s_.substr(at, eol - at));
    return eol;
  }

  std::size_t inline_dollar(std::size_t i, std::size_t limit) {
    // Inline math may not run across a paragraph break.
    std::size_t j = i + 1;
    while (j < limit) {
      if (s_[j] == '$' && !escaped_at(s_, j)) break;
      if (s_[j] == '\n' && j + 1 < limit) {
        std::size_t k = j + 1;
        while (k < limit && (s_[k] == ' ' || s_[k] == '\t')) ++k;
        if (k < limit && s_[k] == '\n') {
          j = limit;
          break;
        }
      }
      ++j;
    }
    if (j >= limit) return recover_line(i, limit, "$");
    emit_math(s_.substr(i + 1, j - i - 1), s_.substr(i, j + 1 - i), false, i);
    return j + 1;
  }

  std::size_t delimited_math(std::size_t i, std::size_t limit,
                             std::string_view open, std::string_view close,
                             bool display) {
    const std::size_t content = i + open.size();
    std::size_t j = s_.find(close, content);
    while (j != std::string_view::npos && j < limit && escaped_at(s_, j) &&
           close.front() == '$') {
      j = s_.find(close, j + 1);
    }
    if (j == std::string_view::npos || j + close.size() > limit) {
      return recover_line(i, limit, open);
    }
    emit_math(s_.substr(content, j - content),
              s_.substr(i, j + close.size() - i), display, i);
    return j + close.size();
  }

  std::size_t environment(std::size_t i, std::size_t limit, std::size_t after_cmd) {
    std::size_t b = 0, e = 0, next = 0;
    if (!read_group(after_cmd, limit, b, e, next)) return after_cmd;
    const std::string env(s_.substr(b, e - b));
    if (!is_math_environment(env)) return next;
    const std::string end_tag = "\\end{" + env + "}";
    const auto close = s_.find(end_tag, next);
    if (close == std::string_view::npos || close >= limit) {
      return recover_line(i, limit, "\\begin{" + env + "}");
    }
    emit_math(clean_environment_math(s_.substr(next, close - next)),
              s_.substr(i, close + end_tag.size() - i), true, i);
    return close + end_tag.size();
  }

  std::size_t include_graphics(std::size_t i, std::size_t limit, std::size_t after_cmd) {
    std::size_t j = skip_optional(after_cmd, limit);
    std::size_t b = 0, e = 0, next = 0;
    if (!read_group(j, limit, b, e, next)) return j;
    std::string ref(s_.substr(b, e - b));
    while (!ref.empty() && is_space(ref.back())) ref.pop_back();
    while (!ref.empty() && is_space(ref.front())) ref.erase(0, 1);
    ImageBlock image;
    image.source_ref = ref;
    std::optional<Resource> resource;
    if (resolver_) resource = resolver_(ref);
    if (resource) {
      image.bytes = std::move(resource->bytes);
      image.media_type = std::move(resource->media_type);
    } else {
      image.media_type = media_type_for(ref);
      warn("unresolved-image", "could not resolve image '" + ref + "'", i);
    }
    out_.image(std::move(image));
    return next;
  }

  std::size_t command(std::size_t i, std::size_t limit) {
    const std::size_t name_begin = i + 1;
    if (name_begin >= limit) return limit;
    const char first = s_[name_begin];
    if (!is_alpha(first)) {
      switch (first) {
        case '(': return delimited_math(i, limit, "\\(", "\\)", false);
        case '[': return delimited_math(i, limit, "\\[", "\\]", true);
        case '\\': out_.text("\n"); return skip_optional(name_begin + 1, limit);
        case ' ': case ',': case ';': case ':': case '!': case '\n':
          out_.text(" ");
          return name_begin + 1;
        default:
          // \% \$ \& \# \_ \{ \} and other escaped symbols
          out_.text(s_.substr(name_begin, 1));
          return name_begin + 1;
      }
    }
    std::size_t j = name_begin;
    while (j < limit && is_alpha(s_[j])) ++j;
    const std::string name(s_.substr(name_begin, j - name_begin));
    if (j < limit && s_[j] == '*') ++j;

    if (name == "begin") return environment(i, limit, j);
    if (name == "end") {
      std::size_t b = 0, e = 0, next = 0;
      return read_group(j, limit, b, e, next) ? next : j;
    }
    if (name == "includegraphics") return include_graphics(i, limit, j);
    if (is_dropped_with_arguments(name)) {
      std::size_t k = skip_optional(j, limit);
      std::size_t b = 0, e = 0, next = 0;
      while (read_group(k, limit, b, e, next)) k = skip_optional(next, limit);
      return k;
    }
    // Decoration and unknown commands: drop the name and any optional
    // argument; brace arguments are scanned as ordinary text.
    const std::size_t k = skip_optional(j, limit);
    if (k == j) {
      const std::size_t after = skip_blanks(j, limit);
      if (after < limit && s_[after] == '{') return after;
      // TeX swallows blanks after a control word, but not a paragraph break.
      std::size_t m = j;
      while (m < limit && (s_[m] == ' ' || s_[m] == '\t')) ++m;
      return m;
    }
    return k;
  }

  void scan(std::size_t begin, std::size_t end) {
    std::size_t i = begin;
    while (i < end) {
      const char c = s_[i];
      if (c == '\\') {
        i = command(i, end);
      } else if (c == '$') {
        if (i + 1 < end && s_[i + 1] == '$') {
          i = delimited_math(i, end, "$$", "$$", true);
        } else {
          i = inline_dollar(i, end);
        }
      } else if (c == '{' || c == '}') {
        ++i;
      } else if (c == '~') {
        out_.text(" ");
        ++i;
      } else {
        std::size_t j = i + 1;
        while (j < end && s_[j] != '\\' && s_[j] != '$' && s_[j] != '{' &&
               s_[j] != '}' && s_[j] != '~') {
          ++j;
        }
        out_.text(s_.substr(i, j - i));
        i = j;
      }
    }
  }

  const StrippedSource& src_;
  std::string_view s_;
  const ResourceResolver& resolver_;
  std::vector<Warning>& warnings_;
  detail::BlockBuilder out_;
};

}  // namespace

Document parse_latex(std::string_view source, std::string name,
                     const ResourceResolver& resolver) {
  Document doc;
  doc.display_name = std::move(name);
  doc.source_format = SourceFormat::kLatex;
  std::size_t invalid = 0;
  const std::string decoded =
      unicode::normalize_newlines(unicode::decode_lossy(source, &invalid));
  if (invalid > 0) {
    doc.warnings.push_back(Warning{
        "invalid-utf8",
        std::to_string(invalid) + " invalid UTF-8 sequence(s) replaced", 0});
  }
  const StrippedSource stripped = strip_comments(decoded);
  LatexParser parser(stripped, resolver, doc.warnings);
  doc.blocks = parser.run();
  return doc;
}

}  // namespace reuse
