#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>

#include "reuse/document_model.hpp"
#include "reuse/ingest.hpp"
#include "reuse/store.hpp"

namespace reuse {

struct ServiceOptions {
  std::filesystem::path data_dir = "data";
  std::size_t max_upload_bytes = 33554432;
  std::string pdf_converter;
  ResourceResolver resolver;  // for images referenced by uploaded sources
  std::function<std::chrono::system_clock::time_point()> clock;
};

struct RenderedDocument {
  std::string html;
  std::string doc_id;
  std::string fingerprint;
};

/// Text runs become <span data-offset="N">, formulas
/// <span class="formula" data-formula-id="F1" data-offset="N">MathML</span>,
/// images <img data-image-id="I1" data-offset="N" ...>. A new text run
/// starts after every paragraph break.
RenderedDocument render_document(const NormalizedDocument& nd);

/// HTTP API over ingest, detection and the annotation store.
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  AnnotationStore& store();

  /// Port 0 picks a free port. Returns the bound port; throws
  /// Error(kInvalidArgument) when binding fails.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop(). Requires bind().
  void serve();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace reuse
