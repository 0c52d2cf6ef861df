// Command-line front end: run the HTTP service, or normalize, compare and
// export from the shell.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "reuse/document_model.hpp"
#include "reuse/error.hpp"
#include "reuse/ingest.hpp"
#include "reuse/service.hpp"
#include "reuse/similarity.hpp"
#include "reuse/store.hpp"

namespace {

reuse::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

reuse::NormalizedDocument load(const std::filesystem::path& path,
                               const std::string& pdf_converter) {
  reuse::IngestOptions options;
  options.resolver = reuse::filesystem_resolver(path.parent_path().empty()
                                                    ? std::filesystem::path(".")
                                                    : path.parent_path());
  options.pdf_converter = pdf_converter;
  const reuse::Document doc = reuse::ingest(read_file(path), path.filename().string(),
                                            path.filename().string(), options);
  for (const auto& w : doc.warnings) {
    std::cerr << path.string() << ": warning [" << w.code << "] at byte "
              << w.source_offset << ": " << w.message << "\n";
  }
  reuse::NormalizedDocument nd = reuse::normalize(doc);
  return nd.with_identity(nd.fingerprint().substr(0, 16), nd.display_name());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Annotate content reuse between document pairs"};
  app.require_subcommand(1);

  int port = 8080;
  std::string data_dir = "./data";
  std::size_t max_upload = 33554432;
  std::string pdf_converter;
  std::string host = "0.0.0.0";
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--port", port, "Listening port")->envname("REUSE_PORT");
  serve->add_option("--host", host, "Listening address");
  serve->add_option("--data-dir", data_dir, "Directory for the annotation store")
      ->envname("REUSE_DATA_DIR");
  serve->add_option("--max-upload-bytes", max_upload, "Upload size limit");
  serve->add_option("--pdf-converter", pdf_converter,
                    "Shell command turning a PDF on stdin into HTML+MathML on stdout");

  std::string input;
  auto* normalize = app.add_subcommand("normalize", "Print the normalized form of a document as JSON");
  normalize->add_option("file", input, "Input .tex, .html or .txt file")->required();
  normalize->add_option("--pdf-converter", pdf_converter, "PDF conversion command");

  std::string file_a, file_b, algorithm = "lcs";
  std::size_t min_length = 5;
  auto* detect = app.add_subcommand("detect", "Run a similarity detector on two documents");
  detect->add_option("a", file_a, "First document")->required();
  detect->add_option("b", file_b, "Second document")->required();
  detect->add_option("--algorithm", algorithm, "lcs, adaplag, lcis or git")
      ->check(CLI::IsMember({"lcs", "adaplag", "lcis", "git"}));
  detect->add_option("--min-length", min_length, "Minimum match length (words or symbols)")
      ->check(CLI::PositiveNumber);
  detect->add_option("--pdf-converter", pdf_converter, "PDF conversion command");

  std::string export_dir = "./data";
  auto* export_cmd = app.add_subcommand("export", "Write recorded cases as JSON Lines to stdout");
  export_cmd->add_option("--data-dir", export_dir, "Directory of the annotation store")
      ->envname("REUSE_DATA_DIR");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      reuse::ServiceOptions options;
      options.data_dir = data_dir;
      options.max_upload_bytes = max_upload;
      options.pdf_converter = pdf_converter;
      reuse::Service service(options);
      const int bound = service.bind(host, port);
      g_service = &service;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << host << ":" << bound << ", data in " << data_dir << "\n";
      service.serve();
      g_service = nullptr;
    } else if (*normalize) {
      std::cout << reuse::to_canonical_json(load(input, pdf_converter)) << "\n";
    } else if (*detect) {
      const auto a = load(file_a, pdf_converter);
      const auto b = load(file_b, pdf_converter);
      std::cout << reuse::to_json(reuse::detect(a, b, algorithm, min_length)) << "\n";
    } else if (*export_cmd) {
      reuse::AnnotationStore store(reuse::StoreOptions{export_dir, {}});
      std::cout << store.export_jsonl();
    }
  } catch (const reuse::Error& e) {
    std::cerr << "error (" << reuse::to_string(e.code()) << "): " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
