#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "reuse/blocks.hpp"

namespace reuse {

struct Resource {
  std::string bytes;
  std::string media_type;
};

/// Maps an \includegraphics path or an <img src> to bytes. Returning
/// nullopt makes the image a placeholder entry with empty bytes.
using ResourceResolver =
    std::function<std::optional<Resource>(std::string_view ref)>;

/// Resolves paths relative to `base_dir`; tries common image extensions
/// when the reference has none. Refuses paths escaping `base_dir`.
ResourceResolver filesystem_resolver(std::filesystem::path base_dir);

std::string media_type_for(std::string_view path);

/// Extension first (.tex, .html/.htm, .txt), then content sniffing;
/// falls back to txt.
SourceFormat detect_format(std::string_view bytes, std::string_view filename);

bool is_pdf(std::string_view bytes, std::string_view filename);

Document parse_plaintext(std::string_view bytes, std::string name);

Document parse_latex(std::string_view source, std::string name,
                     const ResourceResolver& resolver = {});

Document parse_html(std::string_view source, std::string name,
                    const ResourceResolver& resolver = {});

/// Runs `converter_command` through /bin/sh with the input on stdin and
/// parses its stdout as HTML+MathML. Invocations of the same command are
/// serialized. An empty command throws Error(kUnsupportedFormat); a nonzero
/// exit or unusable output throws Error(kConversionFailed) carrying the
/// captured stderr.
Document external_converter_adapter(std::string_view bytes,
                                    const std::string& converter_command,
                                    std::string name = {});

struct IngestOptions {
  ResourceResolver resolver;
  std::string pdf_converter;  // empty: PDF uploads are rejected
};

/// detect_format + the matching parser; PDFs go through the converter.
Document ingest(std::string_view bytes, std::string_view filename,
                std::string display_name, const IngestOptions& options = {});

}  // namespace reuse
