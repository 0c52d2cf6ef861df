#include "reuse/ingest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>

#include "reuse/document_model.hpp"
#include "reuse/error.hpp"
#include "reuse/unicode.hpp"

namespace reuse {
namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string extension_of(std::string_view filename) {
  const auto slash = filename.find_last_of("/\\");
  if (slash != std::string_view::npos) filename.remove_prefix(slash + 1);
  const auto dot = filename.rfind('.');
  if (dot == std::string_view::npos || dot == 0) return {};
  return lower_ascii(filename.substr(dot));
}

std::string_view skip_leading_space(std::string_view s) {
  // UTF-8 byte order mark
  if (s.substr(0, 3) == "\xEF\xBB\xBF") s.remove_prefix(3);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  return s;
}

}  // namespace

std::string media_type_for(std::string_view path) {
  const std::string ext = extension_of(path);
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".gif") return "image/gif";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".webp") return "image/webp";
  if (ext == ".pdf") return "application/pdf";
  if (ext == ".eps") return "application/postscript";
  return "application/octet-stream";
}

ResourceResolver filesystem_resolver(std::filesystem::path base_dir) {
  return [base = std::filesystem::weakly_canonical(std::move(base_dir))](
             std::string_view ref) -> std::optional<Resource> {
    if (ref.empty() || ref.find("://") != std::string_view::npos) {
      return std::nullopt;
    }
    static constexpr std::array<std::string_view, 6> kExtensions{
        "", ".png", ".jpg", ".jpeg", ".pdf", ".eps"};
    for (std::string_view ext : kExtensions) {
      std::filesystem::path candidate =
          std::filesystem::weakly_canonical(base / (std::string(ref) + std::string(ext)));
      const auto rel = candidate.lexically_relative(base);
      if (rel.empty() || *rel.begin() == "..") return std::nullopt;
      std::error_code ec;
      if (!std::filesystem::is_regular_file(candidate, ec)) continue;
      std::ifstream in(candidate, std::ios::binary);
      if (!in) continue;
      std::string bytes((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
      return Resource{std::move(bytes), media_type_for(candidate.string())};
    }
    return std::nullopt;
  };
}

SourceFormat detect_format(std::string_view bytes, std::string_view filename) {
  const std::string ext = extension_of(filename);
  if (ext == ".tex") return SourceFormat::kLatex;
  if (ext == ".html" || ext == ".htm") return SourceFormat::kHtml;
  if (ext == ".txt") return SourceFormat::kTxt;

  const std::string head = lower_ascii(skip_leading_space(bytes).substr(0, 64));
  if (head.rfind("<!doctype", 0) == 0 || head.rfind("<html", 0) == 0) {
    return SourceFormat::kHtml;
  }
  if (bytes.find("\\documentclass") != std::string_view::npos ||
      bytes.find("\\begin{document}") != std::string_view::npos) {
    return SourceFormat::kLatex;
  }
  return SourceFormat::kTxt;
}

bool is_pdf(std::string_view bytes, std::string_view filename) {
  return extension_of(filename) == ".pdf" || bytes.substr(0, 5) == "%PDF-";
}

Document parse_plaintext(std::string_view bytes, std::string name) {
  Document doc;
  doc.display_name = std::move(name);
  doc.source_format = SourceFormat::kTxt;
  std::size_t invalid = 0;
  std::string text = unicode::decode_lossy(bytes, &invalid);
  if (invalid > 0) {
    doc.warnings.push_back(Warning{
        "invalid-utf8",
        std::to_string(invalid) + " invalid UTF-8 sequence(s) replaced", 0});
  }
  doc.blocks.emplace_back(TextBlock{
      escape_placeholder_delimiters(unicode::normalize_newlines(text))});
  return doc;
}

Document ingest(std::string_view bytes, std::string_view filename,
                std::string display_name, const IngestOptions& options) {
  if (display_name.empty()) display_name = std::string(filename);
  if (is_pdf(bytes, filename)) {
    if (options.pdf_converter.empty()) {
      throw Error(ErrorCode::kUnsupportedFormat,
                  "PDF input requires a configured converter");
    }
    return external_converter_adapter(bytes, options.pdf_converter,
                                      std::move(display_name));
  }
  switch (detect_format(bytes, filename)) {
    case SourceFormat::kLatex:
      return parse_latex(bytes, std::move(display_name), options.resolver);
    case SourceFormat::kHtml:
      return parse_html(bytes, std::move(display_name), options.resolver);
    case SourceFormat::kTxt:
      break;
  }
  return parse_plaintext(bytes, std::move(display_name));
}

}  // namespace reuse
