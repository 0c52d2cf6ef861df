#include "reuse/service.hpp"

#include <algorithm>
#include <charconv>

#include "httplib.h"
#include "json.hpp"
#include "reuse/encoding.hpp"
#include "reuse/error.hpp"
#include "reuse/similarity.hpp"
#include "reuse/unicode.hpp"

namespace reuse {
namespace {

using ordered_json = nlohmann::ordered_json;

struct Placed {
  Span span;
  const FormulaEntry* formula = nullptr;
  const ImageEntry* image = nullptr;
};

void append_runs(std::string& html, const std::u32string& chars, std::size_t from,
                 std::size_t to) {
  std::size_t start = from;
  std::size_t i = from;
  auto flush = [&](std::size_t end) {
    if (end <= start) return;
    html += "<span data-offset=\"" + std::to_string(start) + "\">";
    html += html_escape(unicode::to_utf8(std::u32string_view(chars).substr(start, end - start)));
    html += "</span>";
    start = end;
  };
  while (i < to) {
    if (chars[i] == U'\n') {
      std::size_t j = i;
      while (j < to && chars[j] == U'\n') ++j;
      if (j - i >= 2) flush(j);
      i = j;
    } else {
      ++i;
    }
  }
  flush(to);
}

ordered_json error_body(std::string_view message, std::string_view code) {
  ordered_json j;
  j["error"] = std::string(message);
  j["code"] = std::string(code);
  return j;
}

void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view message,
                std::string_view code) {
  send_json(res, status, error_body(message, code).dump());
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidId: return 400;
    case ErrorCode::kInvalidSpan:
    case ErrorCode::kParseError:
    case ErrorCode::kUnsupportedMath:
    case ErrorCode::kConversionFailed: return 422;
    case ErrorCode::kUnsupportedFormat: return 415;
    case ErrorCode::kPersistentStore: return 500;
  }
  return 500;
}

void send_exception(httplib::Response& res, const Error& e) {
  send_error(res, status_for(e.code()), e.what(), to_string(e.code()));
}

struct BadRequest {
  std::string message;
};

std::size_t parse_positive(const std::string& text, const char* what) {
  std::size_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || value == 0) {
    throw BadRequest{std::string(what) + " must be a positive integer"};
  }
  return value;
}

}  // namespace

RenderedDocument render_document(const NormalizedDocument& nd) {
  std::vector<Placed> placed;
  for (const auto& f : nd.formulas()) placed.push_back(Placed{f.placeholder_span, &f, nullptr});
  for (const auto& img : nd.images()) placed.push_back(Placed{img.placeholder_span, nullptr, &img});
  std::sort(placed.begin(), placed.end(),
            [](const Placed& x, const Placed& y) { return x.span.start < y.span.start; });

  const std::u32string& chars = nd.chars();
  std::string html = "<div class=\"document\" data-doc-id=\"" + html_escape(nd.doc_id()) +
                     "\" style=\"white-space: pre-wrap\">";
  std::size_t pos = 0;
  for (const Placed& p : placed) {
    append_runs(html, chars, pos, p.span.start);
    const std::string offset = std::to_string(p.span.start);
    if (p.formula) {
      html += "<span class=\"formula\" data-formula-id=\"" + p.formula->formula_id +
              "\" data-offset=\"" + offset + "\">" + p.formula->mathml + "</span>";
    } else {
      html += "<img class=\"image\" data-image-id=\"" + p.image->image_id +
              "\" data-offset=\"" + offset + "\" alt=\"" + p.image->image_id + "\"";
      if (!p.image->bytes.empty()) {
        html += " src=\"data:" + html_escape(p.image->media_type) + ";base64," +
                base64_encode(p.image->bytes) + "\"";
      }
      html += ">";
    }
    pos = p.span.end;
  }
  append_runs(html, chars, pos, chars.size());
  html += "</div>";
  return RenderedDocument{std::move(html), nd.doc_id(), nd.fingerprint()};
}

struct Service::Impl {
  ServiceOptions options;
  AnnotationStore store;
  httplib::Server server;
  bool bound = false;

  explicit Impl(ServiceOptions opts)
      : options(std::move(opts)), store(StoreOptions{options.data_dir, options.clock}) {}

  std::shared_ptr<const NormalizedDocument> document(const std::string& id) const {
    auto doc = store.find_by_id(id);
    if (!doc) throw Error(ErrorCode::kNotFound, "unknown document " + id);
    return doc;
  }

  std::optional<PairKey> pair_param(const httplib::Request& req, bool& unknown) const {
    unknown = false;
    if (!req.has_param("pair")) return std::nullopt;
    const std::string value = req.get_param_value("pair");
    const auto comma = value.find(',');
    if (comma == std::string::npos) throw BadRequest{"pair must be '<doc_id>,<doc_id>'"};
    const auto a = store.find_by_id(value.substr(0, comma));
    const auto b = store.find_by_id(value.substr(comma + 1));
    if (!a || !b) {
      unknown = true;
      return std::nullopt;
    }
    return PairKey(a->fingerprint(), b->fingerprint());
  }

  void routes();
  void upload(const httplib::Request& req, httplib::Response& res);
  void detect_pair(const httplib::Request& req, httplib::Response& res);
  void record(const httplib::Request& req, httplib::Response& res);
};

// Wraps a handler with the shared error mapping.
template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const BadRequest& e) {
      send_error(res, 400, e.message, "bad-request");
    } catch (const Error& e) {
      send_exception(res, e);
    }
  };
}

void Service::Impl::upload(const httplib::Request& req, httplib::Response& res) {
  if (!req.has_file("file")) throw BadRequest{"multipart field 'file' is required"};
  const auto file = req.get_file_value("file");
  std::string name = req.has_file("name") ? req.get_file_value("name").content : std::string();
  if (name.empty()) name = file.filename;

  IngestOptions ingest_options{options.resolver, options.pdf_converter};
  const Document parsed = ingest(file.content, file.filename, name, ingest_options);
  const NormalizedDocument nd = normalize(parsed);
  const SaveResult saved = store.save_document(nd);

  ordered_json j;
  j["doc_id"] = saved.doc_id;
  j["fingerprint"] = nd.fingerprint();
  j["already_known"] = saved.already_known;
  j["prior_case_count"] = saved.prior_case_count;
  j["warnings"] = ordered_json::array();
  for (const auto& w : parsed.warnings) {
    ordered_json o;
    o["code"] = w.code;
    o["message"] = w.message;
    o["source_offset"] = w.source_offset;
    j["warnings"].push_back(std::move(o));
  }
  send_json(res, 200, j.dump());
}

void Service::Impl::detect_pair(const httplib::Request& req, httplib::Response& res) {
  const auto a = document(req.matches[1]);
  const auto b = document(req.matches[2]);
  if (!req.has_param("algorithm")) throw BadRequest{"query parameter 'algorithm' is required"};
  if (!req.has_param("min_length")) throw BadRequest{"query parameter 'min_length' is required"};
  const Algorithm algorithm = parse_algorithm(req.get_param_value("algorithm"));
  const std::size_t min_length = parse_positive(req.get_param_value("min_length"), "min_length");
  send_json(res, 200, to_json(detect(*a, *b, algorithm, min_length)));
}

namespace {

std::optional<std::size_t> optional_offset(const ordered_json& body, const char* key) {
  if (!body.contains(key) || body.at(key).is_null()) return std::nullopt;
  if (!body.at(key).is_number_unsigned()) {
    throw BadRequest{std::string(key) + " must be a non-negative integer"};
  }
  return body.at(key).get<std::size_t>();
}

ContentTypeFlags parse_flags(const ordered_json& body) {
  ContentTypeFlags flags;
  if (body.contains("flags")) {
    const auto& f = body.at("flags");
    if (!f.is_object()) throw BadRequest{"flags must be an object"};
    flags.text = f.value("text", false);
    flags.image = f.value("image", false);
    flags.math = f.value("math", false);
  } else if (body.contains("content_types")) {
    const auto& list = body.at("content_types");
    if (!list.is_array()) throw BadRequest{"content_types must be an array"};
    for (const auto& t : list) {
      const std::string name = t.is_string() ? t.get<std::string>() : std::string();
      if (name == "text") {
        flags.text = true;
      } else if (name == "image") {
        flags.image = true;
      } else if (name == "math") {
        flags.math = true;
      } else {
        throw BadRequest{"unknown content type '" + name + "'"};
      }
    }
  }
  if (!flags.any()) throw BadRequest{"at least one content type must be selected"};
  return flags;
}

struct Unresolved {
  std::string side;
  SelectionNotFound error;
};

Span side_span(const ordered_json& body, const NormalizedDocument& doc, const std::string& side) {
  const std::string span_key = "span_" + side;
  if (body.contains(span_key) && !body.at(span_key).is_null()) {
    const auto& s = body.at(span_key);
    if (!s.is_object() || !s.contains("start") || !s.contains("end") ||
        !s.at("start").is_number_unsigned() || !s.at("end").is_number_unsigned()) {
      throw BadRequest{span_key + " must be {\"start\": n, \"end\": n}"};
    }
    return Span{s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>()};
  }
  const std::string text_key = "selected_text_" + side;
  if (!body.contains(text_key) || !body.at(text_key).is_string()) {
    throw BadRequest{"either " + span_key + " or " + text_key + " is required"};
  }
  const std::string hint_key = "hint_" + side;
  try {
    return resolve_span(doc, body.at(text_key).get<std::string>(),
                        optional_offset(body, hint_key.c_str()));
  } catch (const SelectionNotFound& e) {
    throw Unresolved{side, e};
  }
}

}  // namespace

void Service::Impl::record(const httplib::Request& req, httplib::Response& res) {
  const auto a = document(req.matches[1]);
  const auto b = document(req.matches[2]);
  ordered_json body;
  try {
    body = ordered_json::parse(req.body);
  } catch (const nlohmann::json::exception&) {
    throw BadRequest{"request body must be JSON"};
  }
  if (!body.is_object()) throw BadRequest{"request body must be a JSON object"};
  const ContentTypeFlags flags = parse_flags(body);
  std::optional<std::string> obfuscation;
  if (body.contains("obfuscation") && !body.at("obfuscation").is_null()) {
    if (!body.at("obfuscation").is_string()) throw BadRequest{"obfuscation must be a string"};
    obfuscation = body.at("obfuscation").get<std::string>();
    if (obfuscation->empty()) obfuscation.reset();
  }
  try {
    const Span span_a = side_span(body, *a, "a");
    const Span span_b = side_span(body, *b, "b");
    const AnnotationCase c =
        store.record_case(a->fingerprint(), b->fingerprint(), span_a, span_b, flags, obfuscation);
    send_json(res, 200, to_jsonl_line(c));
  } catch (const Unresolved& u) {
    ordered_json j = error_body(u.error.what(), "selection-not-found");
    j["document"] = u.side;
    j["closest_offset"] = u.error.closest_offset();
    j["matched_chars"] = u.error.matched_chars();
    send_json(res, 422, j.dump());
  }
}

void Service::Impl::routes() {
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  server.set_payload_max_length(options.max_upload_bytes);
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res,
                                  std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    send_error(res, 500, message, "internal");
  });

  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, R"({"status":"ok"})");
  });

  server.Post("/documents", guarded([this](const auto& req, auto& res) { upload(req, res); }));

  server.Get(R"(/documents/([^/]+)/rendered)", guarded([this](const auto& req, auto& res) {
    const auto doc = document(req.matches[1]);
    const RenderedDocument r = render_document(*doc);
    ordered_json j;
    j["html"] = r.html;
    j["doc_id"] = r.doc_id;
    j["fingerprint"] = r.fingerprint;
    send_json(res, 200, j.dump());
  }));

  server.Get(R"(/documents/([^/]+))", guarded([this](const auto& req, auto& res) {
    send_json(res, 200, to_canonical_json(*document(req.matches[1])));
  }));

  server.Get(R"(/pairs/([^/]+)/([^/]+)/detect)",
             guarded([this](const auto& req, auto& res) { detect_pair(req, res); }));

  server.Post(R"(/pairs/([^/]+)/([^/]+)/cases)",
              guarded([this](const auto& req, auto& res) { record(req, res); }));

  server.Delete(R"(/pairs/([^/]+)/([^/]+)/cases/last)", guarded([this](const auto& req, auto& res) {
    const auto a = document(req.matches[1]);
    const auto b = document(req.matches[2]);
    const auto deleted = store.delete_last(PairKey(a->fingerprint(), b->fingerprint()));
    ordered_json j;
    j["deleted_case_id"] = deleted ? ordered_json(*deleted) : ordered_json(nullptr);
    send_json(res, 200, j.dump());
  }));

  server.Get("/cases", guarded([this](const auto& req, auto& res) {
    bool unknown = false;
    const auto filter = pair_param(req, unknown);
    std::string body = "[";
    if (!unknown) {
      bool first = true;
      for (const auto& c : store.list_cases(filter)) {
        if (!first) body += ',';
        first = false;
        body += to_jsonl_line(c);
      }
    }
    body += "]";
    send_json(res, 200, body);
  }));

  server.Get("/cases/export", guarded([this](const auto& req, auto& res) {
    bool unknown = false;
    const auto filter = pair_param(req, unknown);
    res.status = 200;
    res.set_header("Content-Disposition", "attachment; filename=\"cases.jsonl\"");
    res.set_content(unknown ? std::string() : store.export_jsonl(filter), "application/x-ndjson");
  }));
}

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  impl_->routes();
}

Service::~Service() { stop(); }

AnnotationStore& Service::store() { return impl_->store; }

int Service::bind(const std::string& host, int port) {
  int bound_port = -1;
  if (port == 0) {
    bound_port = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound_port = port;
  }
  if (bound_port < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot listen on " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound_port;
}

void Service::serve() {
  if (!impl_->bound) throw Error(ErrorCode::kInvalidArgument, "serve() called before bind()");
  impl_->server.listen_after_bind();
}

void Service::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void Service::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace reuse
