#include "reuse/store.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <ctime>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "json.hpp"
#include "reuse/error.hpp"

namespace reuse {
namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void store_failure(sqlite3* db, const std::string& what) {
  throw Error(ErrorCode::kPersistentStore,
              what + ": " + (db ? sqlite3_errmsg(db) : "cannot open database"));
}

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      store_failure(db, "prepare failed");
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int index, std::string_view text) {
    check(sqlite3_bind_text(stmt_, index, text.data(), static_cast<int>(text.size()),
                            SQLITE_TRANSIENT));
    return *this;
  }
  Statement& bind_blob(int index, std::string_view bytes) {
    check(sqlite3_bind_blob(stmt_, index, bytes.data(), static_cast<int>(bytes.size()),
                            SQLITE_TRANSIENT));
    return *this;
  }
  Statement& bind(int index, std::int64_t value) {
    check(sqlite3_bind_int64(stmt_, index, value));
    return *this;
  }

  // true while rows are available
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    store_failure(db_, "statement failed");
  }

  std::string text(int column) const {
    const auto* p = sqlite3_column_blob(stmt_, column);
    const int n = sqlite3_column_bytes(stmt_, column);
    return p ? std::string(static_cast<const char*>(p), static_cast<std::size_t>(n))
             : std::string();
  }
  std::int64_t integer(int column) const { return sqlite3_column_int64(stmt_, column); }

 private:
  void check(int rc) {
    if (rc != SQLITE_OK) store_failure(db_, "bind failed");
  }

  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

void exec(sqlite3* db, const char* sql) {
  char* message = nullptr;
  if (sqlite3_exec(db, sql, nullptr, nullptr, &message) != SQLITE_OK) {
    std::string text = message ? message : "unknown error";
    sqlite3_free(message);
    throw Error(ErrorCode::kPersistentStore, std::string("sql failed: ") + text);
  }
}

class Transaction {
 public:
  explicit Transaction(sqlite3* db) : db_(db) { exec(db_, "BEGIN IMMEDIATE"); }
  ~Transaction() {
    if (!committed_) sqlite3_exec(db_, "ROLLBACK", nullptr, nullptr, nullptr);
  }
  void commit() {
    exec(db_, "COMMIT");
    committed_ = true;
  }

 private:
  sqlite3* db_;
  bool committed_ = false;
};

ordered_json span_json(Span s) {
  ordered_json o;
  o["start"] = s.start;
  o["end"] = s.end;
  return o;
}

ordered_json formulas_json(const std::vector<FormulaRef>& list) {
  ordered_json arr = ordered_json::array();
  for (const auto& f : list) {
    ordered_json o;
    o["id"] = f.id;
    o["mathml"] = f.mathml;
    arr.push_back(std::move(o));
  }
  return arr;
}

template <typename J>
const J& member(const J& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kParseError, std::string("case line lacks '") + key + "'");
  }
  return j.at(key);
}

template <typename J>
Span parse_span(const J& j) {
  return Span{member(j, "start").template get<std::size_t>(),
              member(j, "end").template get<std::size_t>()};
}

template <typename J>
std::vector<FormulaRef> parse_formulas(const J& j) {
  std::vector<FormulaRef> out;
  for (const auto& f : j) {
    out.push_back(FormulaRef{member(f, "id").template get<std::string>(),
                             member(f, "mathml").template get<std::string>()});
  }
  return out;
}

std::vector<std::string> ids_of(const std::vector<FormulaRef>& list) {
  std::vector<std::string> out;
  for (const auto& f : list) out.push_back(f.id);
  return out;
}

}  // namespace

PairKey::PairKey(std::string fingerprint_a, std::string fingerprint_b)
    : low_(std::move(fingerprint_a)), high_(std::move(fingerprint_b)) {
  if (high_ < low_) std::swap(low_, high_);
}

std::vector<std::string> AnnotationCase::formula_ids_a() const { return ids_of(formulas_a); }
std::vector<std::string> AnnotationCase::formula_ids_b() const { return ids_of(formulas_b); }

std::string to_jsonl_line(const AnnotationCase& c) {
  ordered_json j;
  j["case_id"] = c.case_id;
  j["doc_a"] = c.doc_a_name;
  j["doc_b"] = c.doc_b_name;
  j["doc_a_fingerprint"] = c.doc_a_fingerprint;
  j["doc_b_fingerprint"] = c.doc_b_fingerprint;
  j["span_a"] = span_json(c.span_a);
  j["span_b"] = span_json(c.span_b);
  j["text_a"] = c.excerpt_a;
  j["text_b"] = c.excerpt_b;
  j["formulas_a"] = formulas_json(c.formulas_a);
  j["formulas_b"] = formulas_json(c.formulas_b);
  j["images_a"] = c.image_ids_a;
  j["images_b"] = c.image_ids_b;
  ordered_json types = ordered_json::array();
  if (c.content_types.text) types.push_back("text");
  if (c.content_types.image) types.push_back("image");
  if (c.content_types.math) types.push_back("math");
  j["content_types"] = std::move(types);
  j["obfuscation"] = c.obfuscation ? ordered_json(*c.obfuscation) : ordered_json(nullptr);
  j["created_at"] = c.created_at;
  return j.dump();
}

AnnotationCase parse_jsonl_line(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("invalid case line: ") + e.what());
  }
  try {
    AnnotationCase c;
    c.case_id = member(j, "case_id").get<std::int64_t>();
    c.doc_a_name = member(j, "doc_a").get<std::string>();
    c.doc_b_name = member(j, "doc_b").get<std::string>();
    c.doc_a_fingerprint = member(j, "doc_a_fingerprint").get<std::string>();
    c.doc_b_fingerprint = member(j, "doc_b_fingerprint").get<std::string>();
    c.span_a = parse_span(member(j, "span_a"));
    c.span_b = parse_span(member(j, "span_b"));
    c.excerpt_a = member(j, "text_a").get<std::string>();
    c.excerpt_b = member(j, "text_b").get<std::string>();
    c.formulas_a = parse_formulas(member(j, "formulas_a"));
    c.formulas_b = parse_formulas(member(j, "formulas_b"));
    c.image_ids_a = member(j, "images_a").get<std::vector<std::string>>();
    c.image_ids_b = member(j, "images_b").get<std::vector<std::string>>();
    for (const auto& t : member(j, "content_types")) {
      const auto name = t.get<std::string>();
      if (name == "text") {
        c.content_types.text = true;
      } else if (name == "image") {
        c.content_types.image = true;
      } else if (name == "math") {
        c.content_types.math = true;
      } else {
        throw Error(ErrorCode::kParseError, "unknown content type '" + name + "'");
      }
    }
    const auto& obf = member(j, "obfuscation");
    if (!obf.is_null()) c.obfuscation = obf.get<std::string>();
    c.created_at = member(j, "created_at").get<std::string>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("invalid case line: ") + e.what());
  }
}

std::vector<AnnotationCase> parse_jsonl(std::string_view text) {
  std::vector<AnnotationCase> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    if (nl > pos) out.push_back(parse_jsonl_line(text.substr(pos, nl - pos)));
    pos = nl + 1;
  }
  return out;
}

std::string format_utc(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(
      std::chrono::floor<std::chrono::seconds>(t));
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct AnnotationStore::Impl {
  StoreOptions options;
  sqlite3* db = nullptr;
  mutable std::shared_mutex mutex;
  std::map<std::string, std::shared_ptr<const NormalizedDocument>, std::less<>> by_id;
  std::map<std::string, std::shared_ptr<const NormalizedDocument>, std::less<>> by_fingerprint;
  std::vector<AnnotationCase> cases;  // ascending case_id

  void open();
  void load();
  std::string allocate_doc_id(const std::string& fingerprint) const;
};

void AnnotationStore::Impl::open() {
  std::error_code ec;
  std::filesystem::create_directories(options.data_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kPersistentStore,
                "cannot create data directory " + options.data_dir.string() + ": " +
                    ec.message());
  }
  const auto path = (options.data_dir / "annotations.sqlite3").string();
  if (sqlite3_open_v2(path.c_str(), &db,
                      SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                      nullptr) != SQLITE_OK) {
    std::string message = db ? sqlite3_errmsg(db) : "out of memory";
    sqlite3_close(db);
    db = nullptr;
    throw Error(ErrorCode::kPersistentStore, "cannot open " + path + ": " + message);
  }
  sqlite3_busy_timeout(db, 5000);
  exec(db, "PRAGMA journal_mode=WAL");
  exec(db, "PRAGMA synchronous=FULL");
  exec(db,
       "CREATE TABLE IF NOT EXISTS documents ("
       " doc_id TEXT PRIMARY KEY,"
       " fingerprint TEXT NOT NULL UNIQUE,"
       " canonical TEXT NOT NULL);"
       "CREATE TABLE IF NOT EXISTS images ("
       " fingerprint TEXT NOT NULL,"
       " image_id TEXT NOT NULL,"
       " bytes BLOB NOT NULL,"
       " PRIMARY KEY (fingerprint, image_id));"
       "CREATE TABLE IF NOT EXISTS cases ("
       " case_id INTEGER PRIMARY KEY AUTOINCREMENT,"
       " pair_low TEXT NOT NULL,"
       " pair_high TEXT NOT NULL,"
       " line TEXT NOT NULL);"
       "CREATE INDEX IF NOT EXISTS cases_by_pair ON cases (pair_low, pair_high, case_id);");
}

void AnnotationStore::Impl::load() {
  Statement docs(db, "SELECT doc_id, canonical FROM documents ORDER BY rowid");
  while (docs.step()) {
    NormalizedDocument nd;
    try {
      nd = from_canonical_json(docs.text(1));
    } catch (const Error& e) {
      throw Error(ErrorCode::kPersistentStore,
                  "stored document " + docs.text(0) + " is corrupt: " + e.what());
    }
    std::vector<ImageEntry> images = nd.images();
    Statement blobs(db, "SELECT image_id, bytes FROM images WHERE fingerprint = ?");
    blobs.bind(1, nd.fingerprint());
    std::map<std::string, std::string> bytes;
    while (blobs.step()) bytes[blobs.text(0)] = blobs.text(1);
    for (auto& img : images) img.bytes = bytes[img.image_id];
    auto doc = std::make_shared<const NormalizedDocument>(
        nd.doc_id(), nd.display_name(), nd.source_format(), nd.plain_text(),
        nd.formulas(), std::move(images));
    by_id[doc->doc_id()] = doc;
    by_fingerprint[doc->fingerprint()] = doc;
  }
  Statement rows(db, "SELECT line FROM cases ORDER BY case_id");
  while (rows.step()) {
    try {
      cases.push_back(parse_jsonl_line(rows.text(0)));
    } catch (const Error& e) {
      throw Error(ErrorCode::kPersistentStore, std::string("stored case is corrupt: ") + e.what());
    }
  }
}

std::string AnnotationStore::Impl::allocate_doc_id(const std::string& fingerprint) const {
  for (std::size_t n = 16; n <= fingerprint.size(); ++n) {
    std::string candidate = fingerprint.substr(0, n);
    if (!by_id.contains(candidate)) return candidate;
  }
  return fingerprint;
}

AnnotationStore::AnnotationStore(StoreOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  if (!impl_->options.clock) impl_->options.clock = [] { return std::chrono::system_clock::now(); };
  try {
    impl_->open();
    impl_->load();
  } catch (...) {
    sqlite3_close(impl_->db);
    throw;
  }
}

AnnotationStore::~AnnotationStore() { sqlite3_close(impl_->db); }

SaveResult AnnotationStore::save_document(const NormalizedDocument& nd) {
  std::unique_lock lock(impl_->mutex);
  if (auto it = impl_->by_fingerprint.find(nd.fingerprint()); it != impl_->by_fingerprint.end()) {
    const auto& fp = nd.fingerprint();
    const auto count = static_cast<std::size_t>(
        std::count_if(impl_->cases.begin(), impl_->cases.end(), [&](const AnnotationCase& c) {
          return c.doc_a_fingerprint == fp || c.doc_b_fingerprint == fp;
        }));
    return SaveResult{it->second->doc_id(), true, count};
  }

  auto doc = std::make_shared<const NormalizedDocument>(
      nd.with_identity(impl_->allocate_doc_id(nd.fingerprint()), nd.display_name()));
  Transaction tx(impl_->db);
  Statement insert(impl_->db,
                   "INSERT INTO documents (doc_id, fingerprint, canonical) VALUES (?, ?, ?)");
  insert.bind(1, doc->doc_id()).bind(2, doc->fingerprint()).bind(3, to_canonical_json(*doc));
  insert.step();
  for (const auto& img : doc->images()) {
    Statement blob(impl_->db,
                   "INSERT OR REPLACE INTO images (fingerprint, image_id, bytes) VALUES (?, ?, ?)");
    blob.bind(1, doc->fingerprint()).bind(2, img.image_id).bind_blob(3, img.bytes);
    blob.step();
  }
  tx.commit();
  impl_->by_id[doc->doc_id()] = doc;
  impl_->by_fingerprint[doc->fingerprint()] = doc;
  return SaveResult{doc->doc_id(), false, 0};
}

std::shared_ptr<const NormalizedDocument> AnnotationStore::find_by_id(std::string_view doc_id) const {
  std::shared_lock lock(impl_->mutex);
  auto it = impl_->by_id.find(doc_id);
  return it == impl_->by_id.end() ? nullptr : it->second;
}

std::shared_ptr<const NormalizedDocument> AnnotationStore::find_by_fingerprint(
    std::string_view fingerprint) const {
  std::shared_lock lock(impl_->mutex);
  auto it = impl_->by_fingerprint.find(fingerprint);
  return it == impl_->by_fingerprint.end() ? nullptr : it->second;
}

std::size_t AnnotationStore::document_count() const {
  std::shared_lock lock(impl_->mutex);
  return impl_->by_id.size();
}

std::size_t AnnotationStore::case_count_for(std::string_view fingerprint) const {
  std::shared_lock lock(impl_->mutex);
  return static_cast<std::size_t>(
      std::count_if(impl_->cases.begin(), impl_->cases.end(), [&](const AnnotationCase& c) {
        return c.doc_a_fingerprint == fingerprint || c.doc_b_fingerprint == fingerprint;
      }));
}

AnnotationCase AnnotationStore::record_case(std::string_view fingerprint_a,
                                            std::string_view fingerprint_b, Span span_a,
                                            Span span_b, ContentTypeFlags flags,
                                            std::optional<std::string> obfuscation) {
  if (!flags.any()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one content type must be selected");
  }
  std::unique_lock lock(impl_->mutex);
  auto lookup = [&](std::string_view fp) {
    auto it = impl_->by_fingerprint.find(fp);
    if (it == impl_->by_fingerprint.end()) {
      throw Error(ErrorCode::kNotFound, "unknown document fingerprint " + std::string(fp));
    }
    return it->second;
  };
  const auto doc_a = lookup(fingerprint_a);
  const auto doc_b = lookup(fingerprint_b);
  const CaseContent content_a = slice(*doc_a, span_a);
  const CaseContent content_b = slice(*doc_b, span_b);

  AnnotationCase c;
  c.doc_a_name = doc_a->display_name();
  c.doc_b_name = doc_b->display_name();
  c.doc_a_fingerprint = doc_a->fingerprint();
  c.doc_b_fingerprint = doc_b->fingerprint();
  c.span_a = span_a;
  c.span_b = span_b;
  c.excerpt_a = content_a.excerpt;
  c.excerpt_b = content_b.excerpt;
  for (const auto& id : content_a.formula_ids) {
    c.formulas_a.push_back(FormulaRef{id, doc_a->find_formula(id)->mathml});
  }
  for (const auto& id : content_b.formula_ids) {
    c.formulas_b.push_back(FormulaRef{id, doc_b->find_formula(id)->mathml});
  }
  c.image_ids_a = content_a.image_ids;
  c.image_ids_b = content_b.image_ids;
  c.content_types = flags;
  c.obfuscation = std::move(obfuscation);
  c.created_at = format_utc(impl_->options.clock());

  const PairKey key = c.pair();
  Transaction tx(impl_->db);
  {
    Statement insert(impl_->db,
                     "INSERT INTO cases (pair_low, pair_high, line) VALUES (?, ?, '')");
    insert.bind(1, key.low()).bind(2, key.high());
    insert.step();
  }
  c.case_id = sqlite3_last_insert_rowid(impl_->db);
  {
    Statement update(impl_->db, "UPDATE cases SET line = ? WHERE case_id = ?");
    update.bind(1, to_jsonl_line(c)).bind(2, c.case_id);
    update.step();
  }
  tx.commit();
  impl_->cases.push_back(c);
  return c;
}

std::optional<std::int64_t> AnnotationStore::delete_last(const PairKey& pair) {
  std::unique_lock lock(impl_->mutex);
  auto& cases = impl_->cases;
  auto it = std::find_if(cases.rbegin(), cases.rend(),
                         [&](const AnnotationCase& c) { return c.pair() == pair; });
  if (it == cases.rend()) return std::nullopt;
  const std::int64_t id = it->case_id;
  Transaction tx(impl_->db);
  Statement remove(impl_->db, "DELETE FROM cases WHERE case_id = ?");
  remove.bind(1, id);
  remove.step();
  tx.commit();
  cases.erase(std::next(it).base());
  return id;
}

std::vector<AnnotationCase> AnnotationStore::list_cases(const std::optional<PairKey>& filter) const {
  std::shared_lock lock(impl_->mutex);
  if (!filter) return impl_->cases;
  std::vector<AnnotationCase> out;
  for (const auto& c : impl_->cases) {
    if (c.pair() == *filter) out.push_back(c);
  }
  return out;
}

std::string AnnotationStore::export_jsonl(const std::optional<PairKey>& filter) const {
  std::string out;
  for (const auto& c : list_cases(filter)) {
    out += to_jsonl_line(c);
    out += '\n';
  }
  return out;
}

}  // namespace reuse
