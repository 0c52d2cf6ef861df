#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reuse/document_model.hpp"
#include "reuse/span.hpp"

namespace reuse {

struct ContentTypeFlags {
  bool text = false;
  bool image = false;
  bool math = false;

  bool any() const noexcept { return text || image || math; }
  friend bool operator==(const ContentTypeFlags&, const ContentTypeFlags&) = default;
};

/// Unordered pair of document fingerprints, stored lexicographically.
class PairKey {
 public:
  PairKey(std::string fingerprint_a, std::string fingerprint_b);

  const std::string& low() const noexcept { return low_; }
  const std::string& high() const noexcept { return high_; }
  bool involves(std::string_view fingerprint) const noexcept {
    return fingerprint == low_ || fingerprint == high_;
  }
  friend bool operator==(const PairKey&, const PairKey&) = default;

 private:
  std::string low_;
  std::string high_;
};

struct FormulaRef {
  std::string id;
  std::string mathml;
  friend bool operator==(const FormulaRef&, const FormulaRef&) = default;
};

/// One annotated reuse case. "A" and "B" keep the orientation in which the
/// case was recorded.
struct AnnotationCase {
  std::int64_t case_id = 0;
  std::string doc_a_name;
  std::string doc_b_name;
  std::string doc_a_fingerprint;
  std::string doc_b_fingerprint;
  Span span_a;
  Span span_b;
  std::string excerpt_a;
  std::string excerpt_b;
  std::vector<FormulaRef> formulas_a;
  std::vector<FormulaRef> formulas_b;
  std::vector<std::string> image_ids_a;
  std::vector<std::string> image_ids_b;
  ContentTypeFlags content_types;
  std::optional<std::string> obfuscation;
  std::string created_at;  // YYYY-MM-DDTHH:MM:SSZ

  PairKey pair() const { return PairKey(doc_a_fingerprint, doc_b_fingerprint); }
  std::vector<std::string> formula_ids_a() const;
  std::vector<std::string> formula_ids_b() const;

  friend bool operator==(const AnnotationCase&, const AnnotationCase&) = default;
};

/// Export line without the trailing newline; keys in export order.
std::string to_jsonl_line(const AnnotationCase& c);
/// Throws Error(kParseError) on malformed or incomplete lines.
AnnotationCase parse_jsonl_line(std::string_view line);
std::vector<AnnotationCase> parse_jsonl(std::string_view text);

std::string format_utc(std::chrono::system_clock::time_point t);

struct SaveResult {
  std::string doc_id;
  bool already_known = false;
  std::size_t prior_case_count = 0;
};

struct StoreOptions {
  std::filesystem::path data_dir = "data";
  std::function<std::chrono::system_clock::time_point()> clock;  // default: system_clock::now
};

/// Durable document and case store backed by SQLite in WAL mode. Any number
/// of readers run concurrently; writers are serialized and each write is
/// committed before it becomes visible.
class AnnotationStore {
 public:
  explicit AnnotationStore(StoreOptions options);
  ~AnnotationStore();
  AnnotationStore(const AnnotationStore&) = delete;
  AnnotationStore& operator=(const AnnotationStore&) = delete;

  /// Idempotent on the fingerprint. The stored copy takes the returned
  /// doc_id; the first display name seen for a fingerprint is kept.
  SaveResult save_document(const NormalizedDocument& nd);

  std::shared_ptr<const NormalizedDocument> find_by_id(std::string_view doc_id) const;
  std::shared_ptr<const NormalizedDocument> find_by_fingerprint(
      std::string_view fingerprint) const;
  std::size_t document_count() const;
  std::size_t case_count_for(std::string_view fingerprint) const;

  /// Throws Error(kNotFound), Error(kInvalidSpan) or Error(kInvalidArgument).
  AnnotationCase record_case(std::string_view fingerprint_a,
                             std::string_view fingerprint_b, Span span_a,
                             Span span_b, ContentTypeFlags flags,
                             std::optional<std::string> obfuscation);

  std::optional<std::int64_t> delete_last(const PairKey& pair);

  std::vector<AnnotationCase> list_cases(
      const std::optional<PairKey>& filter = std::nullopt) const;

  std::string export_jsonl(const std::optional<PairKey>& filter = std::nullopt) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace reuse
