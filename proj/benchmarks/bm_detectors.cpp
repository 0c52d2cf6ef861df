#include <benchmark/benchmark.h>

#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "reuse/document_model.hpp"
#include "reuse/ingest.hpp"
#include "reuse/similarity.hpp"
#include "reuse/unicode.hpp"

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(REUSE_CORPUS_DIR) + "/" + name, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const reuse::NormalizedDocument& corpus(const std::string& name) {
  static std::map<std::string, reuse::NormalizedDocument> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    reuse::IngestOptions opts{reuse::filesystem_resolver(REUSE_CORPUS_DIR), ""};
    it = cache.emplace(name, reuse::normalize(reuse::ingest(slurp(name), name, name, opts))).first;
  }
  return it->second;
}

std::vector<std::uint32_t> random_symbols(std::size_t n, std::uint32_t alphabet, unsigned seed) {
  std::mt19937 rng(seed);
  std::vector<std::uint32_t> out(n);
  for (auto& x : out) x = rng() % alphabet;
  return out;
}

// A long document made of shuffled corpus sentences so both sides share text.
reuse::NormalizedDocument synthetic(std::size_t paragraphs, unsigned seed) {
  const std::string base = corpus("e2e_a.tex").plain_text();
  std::mt19937 rng(seed);
  std::string text;
  for (std::size_t p = 0; p < paragraphs; ++p) {
    const std::size_t from = rng() % (base.size() / 2);
    text += base.substr(from, 400) + "\n\n";
  }
  return reuse::normalize(reuse::parse_plaintext(text, "synthetic.txt"));
}

void BM_GreedyTiling(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_symbols(n, 8, 1);
  const auto b = random_symbols(n, 8, 2);
  for (auto _ : state) benchmark::DoNotOptimize(reuse::greedy_tiling(a, b, 3));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GreedyTiling)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_LongestCommonSubsequence(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_symbols(n, 12, 3);
  const auto b = random_symbols(n, 12, 4);
  for (auto _ : state) benchmark::DoNotOptimize(reuse::longest_common_subsequence(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LongestCommonSubsequence)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_TokenizeWords(benchmark::State& state) {
  const std::string& text = corpus("doc01.tex").plain_text();
  for (auto _ : state) benchmark::DoNotOptimize(reuse::tokenize_words(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_TokenizeWords);

void BM_Detect(benchmark::State& state, const char* algorithm) {
  const auto& a = corpus("e2e_a.tex");
  const auto& b = corpus("e2e_b.tex");
  for (auto _ : state) benchmark::DoNotOptimize(reuse::detect(a, b, algorithm, 3));
}
BENCHMARK_CAPTURE(BM_Detect, lcs, "lcs");
BENCHMARK_CAPTURE(BM_Detect, adaplag, "adaplag");
BENCHMARK_CAPTURE(BM_Detect, lcis, "lcis");
BENCHMARK_CAPTURE(BM_Detect, git, "git");

void BM_DetectLong(benchmark::State& state, const char* algorithm) {
  const auto a = synthetic(static_cast<std::size_t>(state.range(0)), 5);
  const auto b = synthetic(static_cast<std::size_t>(state.range(0)), 6);
  for (auto _ : state) benchmark::DoNotOptimize(reuse::detect(a, b, algorithm, 5));
}
BENCHMARK_CAPTURE(BM_DetectLong, lcs, "lcs")->Arg(16)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(BM_DetectLong, adaplag, "adaplag")->Arg(16)->Arg(64)->Arg(256);

void BM_IngestNormalize(benchmark::State& state, const char* name) {
  const std::string bytes = slurp(name);
  reuse::IngestOptions opts{reuse::filesystem_resolver(REUSE_CORPUS_DIR), ""};
  for (auto _ : state) {
    benchmark::DoNotOptimize(reuse::normalize(reuse::ingest(bytes, name, name, opts)));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * bytes.size()));
}
BENCHMARK_CAPTURE(BM_IngestNormalize, latex, "doc01.tex");
BENCHMARK_CAPTURE(BM_IngestNormalize, html, "page01.html");

void BM_ResolveSpan(benchmark::State& state) {
  const auto& nd = corpus("page03.html");
  const std::u32string& chars = nd.chars();
  const std::size_t start = chars.size() / 2;
  const std::string needle = reuse::unicode::to_utf8(chars.substr(start, 60));
  for (auto _ : state) benchmark::DoNotOptimize(reuse::resolve_span(nd, needle, start));
}
BENCHMARK(BM_ResolveSpan);

}  // namespace

BENCHMARK_MAIN();
