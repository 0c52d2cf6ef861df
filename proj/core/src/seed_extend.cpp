#include "reuse/seed_extend.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <unordered_map>

#include "reuse/error.hpp"
#include "reuse/similarity.hpp"
#include "reuse/unicode.hpp"

namespace reuse {

void SeedExtendParams::validate() const {
  auto unit = [](double v) { return std::isfinite(v) && v > 0.0 && v <= 1.0; };
  if (!unit(seed_cosine_min) || !unit(seed_dice_min)) {
    throw Error(ErrorCode::kInvalidArgument, "seed thresholds must lie in (0, 1]");
  }
  if (max_gap_sentences == 0 || relaxed_max_gap == 0) {
    throw Error(ErrorCode::kInvalidArgument, "sentence gaps must be positive");
  }
}

namespace seed_extend {
namespace {

constexpr std::size_t kMinSentenceWords = 3;

bool is_terminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }

// Sparse term vector over dense term ids, sorted by id.
using TermVector = std::vector<std::pair<std::uint32_t, double>>;

double dot(const TermVector& x, const TermVector& y) {
  double sum = 0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].first < y[j].first) {
      ++i;
    } else if (y[j].first < x[i].first) {
      ++j;
    } else {
      sum += x[i].second * y[j].second;
      ++i;
      ++j;
    }
  }
  return sum;
}

double norm(const TermVector& x) { return std::sqrt(dot(x, x)); }

double cosine(const TermVector& x, const TermVector& y) {
  const double d = norm(x) * norm(y);
  return d > 0 ? dot(x, y) / d : 0.0;
}

double dice(const TermVector& x, const TermVector& y) {
  if (x.empty() && y.empty()) return 0.0;
  std::size_t shared = 0;
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    if (x[i].first < y[j].first) {
      ++i;
    } else if (y[j].first < x[i].first) {
      ++j;
    } else {
      ++shared;
      ++i;
      ++j;
    }
  }
  return 2.0 * static_cast<double>(shared) /
         static_cast<double>(x.size() + y.size());
}

struct Side {
  std::vector<WordToken> words;
  std::vector<std::uint32_t> terms;  // per word
  std::vector<Sentence> sentences;
  std::vector<TermVector> vectors;   // tf-isf per sentence
};

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x != y) parent_[std::max(x, y)] = std::min(x, y);
  }

 private:
  std::vector<std::size_t> parent_;
};

TermVector weigh(const Side& side, std::size_t first, std::size_t last,
                 const std::vector<double>& isf) {
  std::map<std::uint32_t, double> tf;
  for (std::size_t s = first; s <= last; ++s) {
    const Sentence& sent = side.sentences[s];
    for (std::size_t w = sent.first_word; w < sent.first_word + sent.word_count; ++w) {
      tf[side.terms[w]] += 1.0;
    }
  }
  TermVector v;
  v.reserve(tf.size());
  for (const auto& [term, count] : tf) v.emplace_back(term, count * isf[term]);
  return v;
}

std::vector<Fragment> cluster(const std::vector<Seed>& seeds, std::size_t gap,
                              const Side& a, const Side& b) {
  // seeds are ordered by (a, b)
  UnionFind uf(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    for (std::size_t j = i + 1; j < seeds.size(); ++j) {
      if (seeds[j].a - seeds[i].a > gap) break;
      const std::size_t db = seeds[i].b > seeds[j].b ? seeds[i].b - seeds[j].b
                                                     : seeds[j].b - seeds[i].b;
      if (db <= gap) uf.unite(i, j);
    }
  }
  std::map<std::size_t, Fragment> groups;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const Seed& s = seeds[i];
    auto [it, fresh] = groups.try_emplace(uf.find(i));
    Fragment& f = it->second;
    if (fresh) {
      f.a_first = f.a_last = s.a;
      f.b_first = f.b_last = s.b;
    } else {
      f.a_first = std::min(f.a_first, s.a);
      f.a_last = std::max(f.a_last, s.a);
      f.b_first = std::min(f.b_first, s.b);
      f.b_last = std::max(f.b_last, s.b);
    }
  }
  std::vector<Fragment> out;
  for (auto& [root, f] : groups) {
    f.span_a = Span{a.sentences[f.a_first].span.start, a.sentences[f.a_last].span.end};
    f.span_b = Span{b.sentences[f.b_first].span.start, b.sentences[f.b_last].span.end};
    for (std::size_t s = f.a_first; s <= f.a_last; ++s) f.words_a += a.sentences[s].word_count;
    for (std::size_t s = f.b_first; s <= f.b_last; ++s) f.words_b += b.sentences[s].word_count;
    out.push_back(f);
  }
  return out;
}

std::vector<Fragment> validate(std::vector<Fragment> fragments, const Side& a,
                               const Side& b, const std::vector<double>& isf,
                               const SeedExtendParams& params) {
  std::vector<Fragment> out;
  for (Fragment& f : fragments) {
    f.cosine = cosine(weigh(a, f.a_first, f.a_last, isf),
                      weigh(b, f.b_first, f.b_last, isf));
    if (f.cosine >= params.seed_cosine_min &&
        f.span_a.length() >= params.min_fragment_chars &&
        f.span_b.length() >= params.min_fragment_chars) {
      out.push_back(f);
    }
  }
  return out;
}

}  // namespace

std::vector<Sentence> segment_sentences(std::u32string_view text,
                                        const std::vector<WordToken>& words) {
  std::vector<Span> raw;
  std::size_t start = 0;
  auto emit = [&](std::size_t end) {
    std::size_t s = start;
    while (s < end && unicode::is_whitespace(text[s])) ++s;
    std::size_t e = end;
    while (e > s && unicode::is_whitespace(text[e - 1])) --e;
    if (s < e) raw.push_back(Span{s, e});
    start = end;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char32_t c = text[i];
    if (c == U'\n') {
      emit(i + 1);
    } else if (is_terminator(c) &&
               (i + 1 == text.size() || unicode::is_whitespace(text[i + 1]))) {
      emit(i + 1);
    }
  }
  emit(text.size());

  // Attach words; drop pieces without any.
  std::vector<Sentence> pieces;
  std::size_t w = 0;
  for (const Span& span : raw) {
    while (w < words.size() && words[w].span.start < span.start) ++w;
    Sentence sent{span, w, 0};
    while (w < words.size() && words[w].span.end <= span.end) {
      ++sent.word_count;
      ++w;
    }
    if (sent.word_count > 0) pieces.push_back(sent);
  }

  std::vector<Sentence> merged;
  std::optional<Sentence> pending;
  for (const Sentence& piece : pieces) {
    Sentence cur = piece;
    if (pending) {
      cur.span.start = pending->span.start;
      cur.first_word = pending->first_word;
      cur.word_count += pending->word_count;
      pending.reset();
    }
    if (cur.word_count < kMinSentenceWords) {
      pending = cur;
    } else {
      merged.push_back(cur);
    }
  }
  if (pending) {
    if (merged.empty()) {
      merged.push_back(*pending);
    } else {
      Sentence& last = merged.back();
      last.span.end = pending->span.end;
      last.word_count += pending->word_count;
    }
  }
  return merged;
}

Trace align(const NormalizedDocument& doc_a, const NormalizedDocument& doc_b,
            const SeedExtendParams& params, std::size_t min_words) {
  params.validate();
  if (min_words == 0) {
    throw Error(ErrorCode::kInvalidArgument, "minimum length must be at least 1");
  }
  Side a, b;
  a.words = tokenize_words(doc_a.plain_text());
  b.words = tokenize_words(doc_b.plain_text());
  std::unordered_map<std::string, std::uint32_t> vocab;
  auto term_of = [&](const WordToken& t) {
    return vocab.try_emplace(t.folded, static_cast<std::uint32_t>(vocab.size()))
        .first->second;
  };
  for (const auto& t : a.words) a.terms.push_back(term_of(t));
  for (const auto& t : b.words) b.terms.push_back(term_of(t));
  a.sentences = segment_sentences(doc_a.chars(), a.words);
  b.sentences = segment_sentences(doc_b.chars(), b.words);

  Trace trace;
  trace.sentences_a = a.sentences;
  trace.sentences_b = b.sentences;
  if (a.sentences.empty() || b.sentences.empty()) return trace;

  // Inverse sentence frequency over the sentences of both documents.
  std::vector<std::size_t> sf(vocab.size(), 0);
  for (const Side* side : {&a, &b}) {
    for (const Sentence& s : side->sentences) {
      std::vector<std::uint32_t> seen(side->terms.begin() + static_cast<std::ptrdiff_t>(s.first_word),
                                      side->terms.begin() + static_cast<std::ptrdiff_t>(s.first_word + s.word_count));
      std::sort(seen.begin(), seen.end());
      seen.erase(std::unique(seen.begin(), seen.end()), seen.end());
      for (auto t : seen) ++sf[t];
    }
  }
  const double n = static_cast<double>(a.sentences.size() + b.sentences.size());
  std::vector<double> isf(vocab.size());
  for (std::size_t t = 0; t < isf.size(); ++t) {
    isf[t] = std::log((1.0 + n) / (1.0 + static_cast<double>(sf[t]))) + 1.0;
  }
  for (Side* side : {&a, &b}) {
    for (std::size_t s = 0; s < side->sentences.size(); ++s) {
      side->vectors.push_back(weigh(*side, s, s, isf));
    }
  }

  for (std::size_t i = 0; i < a.sentences.size(); ++i) {
    for (std::size_t j = 0; j < b.sentences.size(); ++j) {
      const double c = cosine(a.vectors[i], b.vectors[j]);
      if (c < params.seed_cosine_min) continue;
      const double d = dice(a.vectors[i], b.vectors[j]);
      if (d < params.seed_dice_min) continue;
      trace.seeds.push_back(Seed{i, j, c, d});
    }
  }
  if (trace.seeds.empty()) return trace;

  trace.clustered = cluster(trace.seeds, params.max_gap_sentences, a, b);
  trace.validated = validate(trace.clustered, a, b, isf, params);
  if (trace.validated.empty()) {
    trace.relaxed = true;
    trace.clustered = cluster(trace.seeds, params.relaxed_max_gap, a, b);
    trace.validated = validate(trace.clustered, a, b, isf, params);
  }

  std::vector<Fragment> ranked = trace.validated;
  std::stable_sort(ranked.begin(), ranked.end(), [](const Fragment& x, const Fragment& y) {
    if (x.cosine != y.cosine) return x.cosine > y.cosine;
    const std::size_t lx = x.span_a.length() + x.span_b.length();
    const std::size_t ly = y.span_a.length() + y.span_b.length();
    if (lx != ly) return lx > ly;
    return x.span_a.start < y.span_a.start;
  });
  std::vector<Fragment> kept;
  for (const Fragment& f : ranked) {
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](const Fragment& k) {
      return k.span_a.overlaps(f.span_a) || k.span_b.overlaps(f.span_b);
    });
    if (!clash) kept.push_back(f);
  }
  std::erase_if(kept, [&](const Fragment& f) {
    return std::min(f.words_a, f.words_b) < min_words;
  });
  std::sort(kept.begin(), kept.end(), [](const Fragment& x, const Fragment& y) {
    return x.span_a.start < y.span_a.start;
  });
  trace.kept = std::move(kept);
  return trace;
}

}  // namespace seed_extend

std::vector<TextMatch> seed_extend_align(const NormalizedDocument& a,
                                         const NormalizedDocument& b,
                                         const SeedExtendParams& params,
                                         std::size_t min_words) {
  std::vector<TextMatch> out;
  for (const auto& f : seed_extend::align(a, b, params, min_words).kept) {
    out.push_back(TextMatch{f.span_a, f.span_b, std::min(f.words_a, f.words_b)});
  }
  return out;
}

}  // namespace reuse
