#pragma once

// Sentence-level seed-and-extend text alignment: tf-isf sentence vectors,
// seeding by cosine and Dice, gap-bounded clustering, fragment validation
// with one relaxed retry, overlap filtering.

#include <cstddef>
#include <string>
#include <vector>

#include "reuse/document_model.hpp"
#include "reuse/span.hpp"

namespace reuse {

struct TextMatch;
struct WordToken;

struct SeedExtendParams {
  double seed_cosine_min = 0.33;
  double seed_dice_min = 0.33;
  std::size_t max_gap_sentences = 4;
  std::size_t relaxed_max_gap = 24;
  std::size_t min_fragment_chars = 150;

  /// Throws Error(kInvalidArgument) when out of range.
  void validate() const;
};

namespace seed_extend {

struct Sentence {
  Span span;
  std::size_t first_word = 0;  // index into the document's word tokens
  std::size_t word_count = 0;
};

struct Seed {
  std::size_t a = 0;  // sentence index in A
  std::size_t b = 0;  // sentence index in B
  double cosine = 0;
  double dice = 0;
};

struct Fragment {
  std::size_t a_first = 0, a_last = 0;  // inclusive sentence ranges
  std::size_t b_first = 0, b_last = 0;
  Span span_a;
  Span span_b;
  double cosine = 0;
  std::size_t words_a = 0;
  std::size_t words_b = 0;
};

/// Intermediate results, exposed for inspection and tests.
struct Trace {
  std::vector<Sentence> sentences_a;
  std::vector<Sentence> sentences_b;
  std::vector<Seed> seeds;
  std::vector<Fragment> clustered;  // step 4 (after the retry, if any)
  bool relaxed = false;
  std::vector<Fragment> validated;  // step 5
  std::vector<Fragment> kept;       // steps 7 and 8
};

/// Splits at every newline and after '.', '!', '?' when followed by
/// whitespace or the end of text; sentences of fewer than three words are
/// merged into the following one (a trailing one into the previous).
std::vector<Sentence> segment_sentences(std::u32string_view text,
                                        const std::vector<WordToken>& words);

Trace align(const NormalizedDocument& a, const NormalizedDocument& b,
            const SeedExtendParams& params, std::size_t min_words);

}  // namespace seed_extend

std::vector<TextMatch> seed_extend_align(const NormalizedDocument& a,
                                         const NormalizedDocument& b,
                                         const SeedExtendParams& params,
                                         std::size_t min_words);

}  // namespace reuse
