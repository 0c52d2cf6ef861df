#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "reuse/document_model.hpp"
#include "reuse/math_tokens.hpp"
#include "reuse/seed_extend.hpp"
#include "reuse/span.hpp"

namespace reuse {

struct WordToken {
  std::string surface;
  std::string folded;
  Span span;

  friend bool operator==(const WordToken&, const WordToken&) = default;
};

struct TextMatch {
  Span span_a;
  Span span_b;
  std::size_t word_length = 0;

  friend bool operator==(const TextMatch&, const TextMatch&) = default;
};

struct TokenPair {
  std::size_t a = 0;
  std::size_t b = 0;
  friend bool operator==(const TokenPair&, const TokenPair&) = default;
};

struct TokenRef {
  std::string formula_id;
  std::size_t ordinal = 0;
  friend bool operator==(const TokenRef&, const TokenRef&) = default;
};

/// Aligned identifier-stream indices. GIT tiles are contiguous and
/// equal-length; an LCIS alignment is strictly increasing in both. The
/// refs_* vectors are filled by detect() with per-token back-references.
struct MathMatch {
  std::vector<TokenPair> token_pairs;
  std::size_t symbol_length = 0;
  std::vector<TokenRef> refs_a;
  std::vector<TokenRef> refs_b;

  friend bool operator==(const MathMatch&, const MathMatch&) = default;
};

/// One greedy tile: a[a .. a+length) == b[b .. b+length).
struct Tile {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t length = 0;
  friend bool operator==(const Tile&, const Tile&) = default;
};

/// Greedy tiling over symbol sequences: repeatedly take the longest common
/// run of unmarked symbols (ties: smaller a, then smaller b), mark it in
/// both sequences, stop when the longest run is shorter than min_length.
/// Tiles are returned in the order they were taken.
std::vector<Tile> greedy_tiling(std::span<const std::uint32_t> a,
                                std::span<const std::uint32_t> b,
                                std::size_t min_length);

/// Longest common subsequence; among maximal alignments the one whose
/// A-index sequence (then B-index sequence) is lexicographically smallest.
std::vector<TokenPair> longest_common_subsequence(
    std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

std::vector<WordToken> tokenize_words(std::string_view plain_text);

std::vector<TextMatch> lcs_words(const std::vector<WordToken>& a,
                                 const std::vector<WordToken>& b,
                                 std::size_t min_words);

std::vector<MathMatch> lcis(const TokenStream& a_ids, const TokenStream& b_ids,
                            std::size_t min_symbols);

std::vector<MathMatch> git(const TokenStream& a_ids, const TokenStream& b_ids,
                           std::size_t min_symbols);

enum class Algorithm { kLcs, kAdaplag, kLcis, kGit };

std::string_view to_string(Algorithm algorithm);
/// Throws Error(kInvalidArgument) for names other than lcs/adaplag/lcis/git.
Algorithm parse_algorithm(std::string_view name);
inline bool is_text_algorithm(Algorithm a) {
  return a == Algorithm::kLcs || a == Algorithm::kAdaplag;
}

struct DetectionResult {
  Algorithm algorithm = Algorithm::kLcs;
  std::size_t min_length = 1;
  std::vector<TextMatch> text_matches;
  std::vector<MathMatch> math_matches;

  std::size_t size() const noexcept {
    return is_text_algorithm(algorithm) ? text_matches.size()
                                        : math_matches.size();
  }
};

/// min_length counts words for lcs/adaplag and math symbols for lcis/git.
/// Results are sorted by span_a.start, or by first A-token index.
DetectionResult detect(const NormalizedDocument& a, const NormalizedDocument& b,
                       Algorithm algorithm, std::size_t min_length,
                       const SeedExtendParams& params = {});

DetectionResult detect(const NormalizedDocument& a, const NormalizedDocument& b,
                       std::string_view algorithm, std::size_t min_length,
                       const SeedExtendParams& params = {});

/// {"algorithm", "min_length", "matches": [...]}
std::string to_json(const DetectionResult& result);

}  // namespace reuse
