#include "reuse/document_model.hpp"

#include <algorithm>
#include <limits>

#include "json.hpp"
#include "reuse/encoding.hpp"
#include "reuse/error.hpp"
#include "reuse/math_tokens.hpp"
#include "reuse/mathml.hpp"
#include "reuse/unicode.hpp"

namespace reuse {
namespace {

using ordered_json = nlohmann::ordered_json;

bool valid_id(std::string_view id) {
  if (id.size() < 2 || (id[0] != 'F' && id[0] != 'I')) return false;
  return std::all_of(id.begin() + 1, id.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

bool is_horizontal_space(char32_t c) {
  return c != U'\n' && unicode::is_whitespace(c);
}

// Appends one block's contribution. A "\n" separates blocks unless the text
// so far already ends in whitespace or the piece starts with a newline; the
// separator absorbs the piece's leading horizontal whitespace.
void append_piece(std::u32string& out, std::u32string_view piece) {
  if (piece.empty()) return;
  if (out.empty() || unicode::is_whitespace(out.back()) ||
      piece.front() == U'\n') {
    out += piece;
    return;
  }
  out.push_back(U'\n');
  std::size_t skip = 0;
  while (skip < piece.size() && is_horizontal_space(piece[skip])) ++skip;
  out += piece.substr(skip);
}

std::u32string prepare_text(std::string_view content) {
  return unicode::to_u32(unicode::nfc(
      escape_placeholder_delimiters(unicode::normalize_newlines(content))));
}

ordered_json span_json(Span s) {
  ordered_json j;
  j["start"] = s.start;
  j["end"] = s.end;
  return j;
}

Span span_from_json(const nlohmann::json& j) {
  return Span{j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()};
}

struct WhitespaceFolded {
  std::u32string text;
  std::vector<std::size_t> start;  // original offset of each folded char
  std::vector<std::size_t> end;    // original end offset of each folded char
};

WhitespaceFolded fold_whitespace(std::u32string_view text) {
  WhitespaceFolded f;
  f.text.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (unicode::is_whitespace(text[i])) {
      const std::size_t run = i;
      while (i < text.size() && unicode::is_whitespace(text[i])) ++i;
      f.text.push_back(U' ');
      f.start.push_back(run);
      f.end.push_back(i);
    } else {
      f.text.push_back(text[i]);
      f.start.push_back(i);
      f.end.push_back(i + 1);
      ++i;
    }
  }
  return f;
}

std::u32string trim(std::u32string s) {
  while (!s.empty() && s.back() == U' ') s.pop_back();
  std::size_t lead = 0;
  while (lead < s.size() && s[lead] == U' ') ++lead;
  return s.substr(lead);
}

}  // namespace

NormalizedDocument::NormalizedDocument(std::string doc_id,
                                       std::string display_name,
                                       SourceFormat source_format,
                                       std::string plain_text,
                                       std::vector<FormulaEntry> formulas,
                                       std::vector<ImageEntry> images)
    : doc_id_(std::move(doc_id)),
      display_name_(std::move(display_name)),
      source_format_(source_format),
      plain_text_(std::move(plain_text)),
      chars_(unicode::to_u32(plain_text_)),
      formulas_(std::move(formulas)),
      images_(std::move(images)) {
  std::vector<std::string> mathml;
  mathml.reserve(formulas_.size());
  for (const auto& f : formulas_) mathml.push_back(f.mathml);
  std::vector<std::string> hashes;
  hashes.reserve(images_.size());
  for (const auto& img : images_) hashes.push_back(img.content_hash);
  fingerprint_ = compute_fingerprint(plain_text_, mathml, hashes);
}

const FormulaEntry* NormalizedDocument::find_formula(
    std::string_view formula_id) const {
  for (const auto& f : formulas_) {
    if (f.formula_id == formula_id) return &f;
  }
  return nullptr;
}

const ImageEntry* NormalizedDocument::find_image(
    std::string_view image_id) const {
  for (const auto& img : images_) {
    if (img.image_id == image_id) return &img;
  }
  return nullptr;
}

std::string NormalizedDocument::text(Span span) const {
  if (!span.valid_for(chars_.size())) {
    throw Error(ErrorCode::kInvalidSpan,
                "span [" + std::to_string(span.start) + "," +
                    std::to_string(span.end) + ") outside document of length " +
                    std::to_string(chars_.size()));
  }
  return unicode::to_utf8(
      std::u32string_view(chars_).substr(span.start, span.length()));
}

NormalizedDocument NormalizedDocument::with_identity(
    std::string doc_id, std::string display_name) const {
  NormalizedDocument copy = *this;
  copy.doc_id_ = std::move(doc_id);
  copy.display_name_ = std::move(display_name);
  return copy;
}

std::string render_placeholder(std::string_view id) {
  if (!valid_id(id)) {
    throw Error(ErrorCode::kInvalidId,
                "invalid placeholder id '" + std::string(id) + "'");
  }
  std::string out = unicode::to_utf8(kPlaceholderOpen);
  out += id;
  out += unicode::to_utf8(kPlaceholderClose);
  return out;
}

std::u32string render_placeholder_u32(std::string_view id) {
  return unicode::to_u32(render_placeholder(id));
}

std::string escape_placeholder_delimiters(std::string_view text) {
  static const std::string open = unicode::to_utf8(kPlaceholderOpen);
  static const std::string close = unicode::to_utf8(kPlaceholderClose);
  static const std::string open_sub = unicode::to_utf8(char32_t{0x27E8});
  static const std::string close_sub = unicode::to_utf8(char32_t{0x27E9});
  if (text.find(open) == std::string_view::npos &&
      text.find(close) == std::string_view::npos) {
    return std::string(text);
  }
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text.compare(i, open.size(), open) == 0) {
      out += open_sub;
      i += open.size();
    } else if (text.compare(i, close.size(), close) == 0) {
      out += close_sub;
      i += close.size();
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

std::string compute_fingerprint(std::string_view plain_text,
                                const std::vector<std::string>& mathml,
                                const std::vector<std::string>& image_hashes) {
  std::string payload(plain_text);
  for (const auto& m : mathml) {
    payload.push_back('\0');
    payload += m;
  }
  for (const auto& h : image_hashes) {
    payload.push_back('\0');
    payload += h;
  }
  return sha256_hex(payload);
}

NormalizedDocument normalize(const Document& document) {
  std::u32string out;
  std::vector<FormulaEntry> formulas;
  std::vector<ImageEntry> images;

  for (const Block& block : document.blocks) {
    if (const auto* text = std::get_if<TextBlock>(&block)) {
      append_piece(out, prepare_text(text->content));
    } else if (const auto* math = std::get_if<MathBlock>(&block)) {
      FormulaEntry f;
      f.formula_id = "F" + std::to_string(formulas.size() + 1);
      f.mathml = mathml::canonicalize(math->mathml);
      f.symbol_count = symbol_count(tokenize_mathml(f.mathml, f.formula_id));
      f.display = math->display;
      const std::u32string placeholder = render_placeholder_u32(f.formula_id);
      append_piece(out, placeholder);
      f.placeholder_span = Span{out.size() - placeholder.size(), out.size()};
      formulas.push_back(std::move(f));
    } else {
      const auto& image = std::get<ImageBlock>(block);
      ImageEntry entry;
      entry.image_id = "I" + std::to_string(images.size() + 1);
      entry.content_hash = sha256_hex(image.bytes);
      entry.media_type = image.media_type;
      entry.bytes = image.bytes;
      const std::u32string placeholder = render_placeholder_u32(entry.image_id);
      append_piece(out, placeholder);
      entry.placeholder_span = Span{out.size() - placeholder.size(), out.size()};
      images.push_back(std::move(entry));
    }
  }

  return NormalizedDocument(std::string(), document.display_name,
                            document.source_format, unicode::to_utf8(out),
                            std::move(formulas), std::move(images));
}

Span resolve_span(const NormalizedDocument& nd, std::string_view selected_text,
                  std::optional<std::size_t> hint_offset) {
  const std::u32string raw =
      unicode::to_u32(unicode::nfc(unicode::normalize_newlines(
          unicode::decode_lossy(selected_text))));
  const std::u32string needle = trim(fold_whitespace(raw).text);
  if (needle.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "selection is empty");
  }

  const std::u32string& hay = nd.chars();
  std::vector<Span> candidates;
  for (std::size_t p = hay.find(raw); p != std::u32string::npos;
       p = hay.find(raw, p + 1)) {
    candidates.push_back(Span{p, p + raw.size()});
  }
  const WhitespaceFolded folded = fold_whitespace(hay);
  for (std::size_t p = folded.text.find(needle); p != std::u32string::npos;
       p = folded.text.find(needle, p + 1)) {
    candidates.push_back(
        Span{folded.start[p], folded.end[p + needle.size() - 1]});
  }

  if (candidates.empty()) {
    std::size_t best_offset = 0;
    std::size_t best_len = 0;
    for (std::size_t p = 0; p < folded.text.size(); ++p) {
      std::size_t len = 0;
      while (len < needle.size() && p + len < folded.text.size() &&
             folded.text[p + len] == needle[len]) {
        ++len;
      }
      if (len > best_len) {
        best_len = len;
        best_offset = folded.start[p];
      }
    }
    throw SelectionNotFound(
        "selection not found; closest partial match of " +
            std::to_string(best_len) + " characters at offset " +
            std::to_string(best_offset),
        best_offset, best_len);
  }

  auto distance = [&](const Span& s) -> std::size_t {
    if (!hint_offset) return s.start;
    return s.start > *hint_offset ? s.start - *hint_offset
                                  : *hint_offset - s.start;
  };
  const Span* best = &candidates.front();
  for (const Span& c : candidates) {
    const auto dc = distance(c);
    const auto db = distance(*best);
    if (dc < db || (dc == db && c.start < best->start)) best = &c;
  }
  return *best;
}

CaseContent slice(const NormalizedDocument& nd, Span span) {
  CaseContent content;
  content.excerpt = nd.text(span);
  for (const auto& f : nd.formulas()) {
    if (span.contains(f.placeholder_span)) content.formula_ids.push_back(f.formula_id);
  }
  for (const auto& img : nd.images()) {
    if (span.contains(img.placeholder_span)) content.image_ids.push_back(img.image_id);
  }
  return content;
}

std::string to_canonical_json(const NormalizedDocument& nd) {
  ordered_json j;
  j["doc_id"] = nd.doc_id();
  j["display_name"] = nd.display_name();
  j["source_format"] = std::string(to_string(nd.source_format()));
  j["plain_text"] = nd.plain_text();
  j["formulas"] = ordered_json::array();
  for (const auto& f : nd.formulas()) {
    ordered_json fj;
    fj["formula_id"] = f.formula_id;
    fj["mathml"] = f.mathml;
    fj["placeholder_span"] = span_json(f.placeholder_span);
    fj["symbol_count"] = f.symbol_count;
    fj["display"] = f.display;
    j["formulas"].push_back(std::move(fj));
  }
  j["images"] = ordered_json::array();
  for (const auto& img : nd.images()) {
    ordered_json ij;
    ij["image_id"] = img.image_id;
    ij["content_hash"] = img.content_hash;
    ij["media_type"] = img.media_type;
    ij["placeholder_span"] = span_json(img.placeholder_span);
    j["images"].push_back(std::move(ij));
  }
  j["fingerprint"] = nd.fingerprint();
  return j.dump();
}

NormalizedDocument from_canonical_json(std::string_view json) {
  try {
    const auto j = nlohmann::json::parse(json);
    std::vector<FormulaEntry> formulas;
    for (const auto& fj : j.at("formulas")) {
      FormulaEntry f;
      f.formula_id = fj.at("formula_id").get<std::string>();
      f.mathml = fj.at("mathml").get<std::string>();
      f.placeholder_span = span_from_json(fj.at("placeholder_span"));
      f.symbol_count = fj.at("symbol_count").get<std::size_t>();
      f.display = fj.value("display", false);
      formulas.push_back(std::move(f));
    }
    std::vector<ImageEntry> images;
    for (const auto& ij : j.at("images")) {
      ImageEntry img;
      img.image_id = ij.at("image_id").get<std::string>();
      img.content_hash = ij.at("content_hash").get<std::string>();
      img.media_type = ij.at("media_type").get<std::string>();
      img.placeholder_span = span_from_json(ij.at("placeholder_span"));
      images.push_back(std::move(img));
    }
    NormalizedDocument nd(
        j.at("doc_id").get<std::string>(),
        j.at("display_name").get<std::string>(),
        source_format_from_string(j.at("source_format").get<std::string>()),
        j.at("plain_text").get<std::string>(), std::move(formulas),
        std::move(images));
    if (nd.fingerprint() != j.at("fingerprint").get<std::string>()) {
      throw Error(ErrorCode::kParseError, "document fingerprint mismatch");
    }
    return nd;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError,
                std::string("invalid document JSON: ") + e.what());
  }
}

}  // namespace reuse
