#include "reuse/similarity.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

#include "json.hpp"
#include "reuse/error.hpp"
#include "reuse/unicode.hpp"

namespace reuse {
namespace {

using ordered_json = nlohmann::ordered_json;

// Assigns dense ids to keys across both inputs.
class Vocabulary {
 public:
  std::uint32_t id(const std::string& key) {
    auto [it, inserted] = ids_.try_emplace(key, static_cast<std::uint32_t>(ids_.size()));
    return it->second;
  }
  std::size_t size() const { return ids_.size(); }

 private:
  std::unordered_map<std::string, std::uint32_t> ids_;
};

void require_threshold(std::size_t min_length) {
  if (min_length == 0) {
    throw Error(ErrorCode::kInvalidArgument, "minimum length must be at least 1");
  }
}

struct Candidate {
  std::size_t length;
  std::size_t a;
  std::size_t b;
};

// Heap order: longest first, then smallest a, then smallest b.
struct CandidateOrder {
  bool operator()(const Candidate& x, const Candidate& y) const {
    if (x.length != y.length) return x.length < y.length;
    if (x.a != y.a) return x.a > y.a;
    return x.b > y.b;
  }
};

}  // namespace

std::vector<Tile> greedy_tiling(std::span<const std::uint32_t> a,
                                std::span<const std::uint32_t> b,
                                std::size_t min_length) {
  require_threshold(min_length);
  std::vector<Tile> tiles;
  if (a.empty() || b.empty()) return tiles;

  std::uint32_t max_symbol = 0;
  for (auto s : b) max_symbol = std::max(max_symbol, s);
  std::vector<std::vector<std::uint32_t>> positions(std::size_t{max_symbol} + 1);
  for (std::size_t j = 0; j < b.size(); ++j) {
    positions[b[j]].push_back(static_cast<std::uint32_t>(j));
  }

  // Seed the queue with every maximal diagonal run. Later candidates are
  // always sub-runs of these, so stored lengths are upper bounds.
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateOrder> queue;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > max_symbol) continue;
    for (const std::uint32_t j : positions[a[i]]) {
      if (i > 0 && j > 0 && a[i - 1] == b[j - 1]) continue;
      std::size_t len = 1;
      while (i + len < a.size() && j + len < b.size() && a[i + len] == b[j + len]) {
        ++len;
      }
      if (len >= min_length) queue.push(Candidate{len, i, j});
    }
  }

  std::vector<bool> marked_a(a.size(), false);
  std::vector<bool> marked_b(b.size(), false);
  while (!queue.empty()) {
    const Candidate top = queue.top();
    queue.pop();
    bool intact = true;
    for (std::size_t k = 0; k < top.length; ++k) {
      if (marked_a[top.a + k] || marked_b[top.b + k]) {
        intact = false;
        break;
      }
    }
    if (intact) {
      for (std::size_t k = 0; k < top.length; ++k) {
        marked_a[top.a + k] = true;
        marked_b[top.b + k] = true;
      }
      tiles.push_back(Tile{top.a, top.b, top.length});
      continue;
    }
    // Re-queue the unmarked pieces that can still reach the threshold.
    std::size_t k = 0;
    while (k < top.length) {
      while (k < top.length && (marked_a[top.a + k] || marked_b[top.b + k])) ++k;
      const std::size_t start = k;
      while (k < top.length && !marked_a[top.a + k] && !marked_b[top.b + k]) ++k;
      if (k - start >= min_length) {
        queue.push(Candidate{k - start, top.a + start, top.b + start});
      }
    }
  }
  return tiles;
}

std::vector<TokenPair> longest_common_subsequence(
    std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0 || m == 0) return {};
  constexpr std::size_t kMaxCells = std::size_t{1} << 27;
  if ((n + 1) > kMaxCells / (m + 1)) {
    throw Error(ErrorCode::kInvalidArgument,
                "identifier streams too long for LCIS (" + std::to_string(n) +
                    " x " + std::to_string(m) + ")");
  }

  // suffix[i][j] = LCS length of a[i..] and b[j..]
  const std::size_t width = m + 1;
  std::vector<std::uint32_t> suffix((n + 1) * width, 0);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
    return suffix[i * width + j];
  };
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t j = m; j-- > 0;) {
      at(i, j) = a[i] == b[j] ? at(i + 1, j + 1) + 1
                              : std::max(at(i + 1, j), at(i, j + 1));
    }
  }

  std::unordered_map<std::uint32_t, std::vector<std::size_t>> positions;
  for (std::size_t j = 0; j < m; ++j) positions[b[j]].push_back(j);

  std::vector<TokenPair> pairs;
  std::size_t i = 0;
  std::size_t j = 0;
  std::uint32_t remaining = at(0, 0);
  while (remaining > 0) {
    // Earliest a-index that can start an optimal remainder; for it the
    // earliest matching b-index dominates all later ones.
    for (std::size_t k = i; k < n; ++k) {
      const auto it = positions.find(a[k]);
      if (it == positions.end()) continue;
      const auto jt = std::lower_bound(it->second.begin(), it->second.end(), j);
      if (jt == it->second.end()) continue;
      if (at(k + 1, *jt + 1) + 1 == remaining) {
        pairs.push_back(TokenPair{k, *jt});
        i = k + 1;
        j = *jt + 1;
        --remaining;
        break;
      }
    }
  }
  return pairs;
}

std::vector<WordToken> tokenize_words(std::string_view plain_text) {
  const std::u32string text = unicode::to_u32(plain_text);
  std::vector<WordToken> words;
  std::size_t i = 0;
  auto boundary = [&](std::size_t k) {
    return unicode::is_whitespace(text[k]) || text[k] == kPlaceholderOpen;
  };
  while (i < text.size()) {
    if (text[i] == kPlaceholderOpen) {
      while (i < text.size() && text[i] != kPlaceholderClose) ++i;
      if (i < text.size()) ++i;
      continue;
    }
    if (unicode::is_whitespace(text[i])) {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < text.size() && !boundary(i)) ++i;
    std::size_t end = i;
    while (start < end && unicode::is_punctuation(text[start])) ++start;
    while (end > start && unicode::is_punctuation(text[end - 1])) --end;
    if (start == end) continue;
    const std::u32string_view surface(text.data() + start, end - start);
    words.push_back(WordToken{unicode::to_utf8(surface),
                              unicode::to_utf8(unicode::simple_fold(surface)),
                              Span{start, end}});
  }
  return words;
}

std::vector<TextMatch> lcs_words(const std::vector<WordToken>& a,
                                 const std::vector<WordToken>& b,
                                 std::size_t min_words) {
  require_threshold(min_words);
  Vocabulary vocab;
  std::vector<std::uint32_t> sa;
  std::vector<std::uint32_t> sb;
  sa.reserve(a.size());
  sb.reserve(b.size());
  for (const auto& w : a) sa.push_back(vocab.id(w.folded));
  for (const auto& w : b) sb.push_back(vocab.id(w.folded));

  std::vector<TextMatch> matches;
  for (const Tile& t : greedy_tiling(sa, sb, min_words)) {
    matches.push_back(TextMatch{
        Span{a[t.a].span.start, a[t.a + t.length - 1].span.end},
        Span{b[t.b].span.start, b[t.b + t.length - 1].span.end}, t.length});
  }
  return matches;
}

namespace {

std::pair<std::vector<std::uint32_t>, std::vector<std::uint32_t>> encode(
    const TokenStream& a, const TokenStream& b) {
  Vocabulary vocab;
  std::vector<std::uint32_t> sa;
  std::vector<std::uint32_t> sb;
  for (const auto& t : a.tokens) sa.push_back(vocab.id(t.value));
  for (const auto& t : b.tokens) sb.push_back(vocab.id(t.value));
  return {std::move(sa), std::move(sb)};
}

}  // namespace

std::vector<MathMatch> lcis(const TokenStream& a_ids, const TokenStream& b_ids,
                            std::size_t min_symbols) {
  require_threshold(min_symbols);
  const auto [sa, sb] = encode(a_ids, b_ids);
  MathMatch match;
  match.token_pairs = longest_common_subsequence(sa, sb);
  match.symbol_length = match.token_pairs.size();
  if (match.symbol_length < min_symbols) return {};
  return {std::move(match)};
}

std::vector<MathMatch> git(const TokenStream& a_ids, const TokenStream& b_ids,
                           std::size_t min_symbols) {
  require_threshold(min_symbols);
  const auto [sa, sb] = encode(a_ids, b_ids);
  std::vector<MathMatch> matches;
  for (const Tile& t : greedy_tiling(sa, sb, min_symbols)) {
    MathMatch m;
    m.symbol_length = t.length;
    for (std::size_t k = 0; k < t.length; ++k) {
      m.token_pairs.push_back(TokenPair{t.a + k, t.b + k});
    }
    matches.push_back(std::move(m));
  }
  return matches;
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kLcs: return "lcs";
    case Algorithm::kAdaplag: return "adaplag";
    case Algorithm::kLcis: return "lcis";
    case Algorithm::kGit: return "git";
  }
  return "lcs";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "lcs") return Algorithm::kLcs;
  if (name == "adaplag") return Algorithm::kAdaplag;
  if (name == "lcis") return Algorithm::kLcis;
  if (name == "git") return Algorithm::kGit;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown algorithm '" + std::string(name) +
                  "' (expected lcs, adaplag, lcis or git)");
}

DetectionResult detect(const NormalizedDocument& a, const NormalizedDocument& b,
                       Algorithm algorithm, std::size_t min_length,
                       const SeedExtendParams& params) {
  require_threshold(min_length);
  DetectionResult result;
  result.algorithm = algorithm;
  result.min_length = min_length;
  switch (algorithm) {
    case Algorithm::kLcs:
      result.text_matches = lcs_words(tokenize_words(a.plain_text()),
                                      tokenize_words(b.plain_text()), min_length);
      break;
    case Algorithm::kAdaplag:
      result.text_matches = seed_extend_align(a, b, params, min_length);
      break;
    case Algorithm::kLcis:
    case Algorithm::kGit: {
      const TokenStream ids_a = identifier_stream(a);
      const TokenStream ids_b = identifier_stream(b);
      result.math_matches = algorithm == Algorithm::kLcis
                                ? lcis(ids_a, ids_b, min_length)
                                : git(ids_a, ids_b, min_length);
      for (MathMatch& m : result.math_matches) {
        for (const TokenPair& p : m.token_pairs) {
          m.refs_a.push_back(TokenRef{ids_a[p.a].formula_id, ids_a[p.a].ordinal});
          m.refs_b.push_back(TokenRef{ids_b[p.b].formula_id, ids_b[p.b].ordinal});
        }
      }
      break;
    }
  }
  std::stable_sort(result.text_matches.begin(), result.text_matches.end(),
                   [](const TextMatch& x, const TextMatch& y) {
                     return x.span_a.start < y.span_a.start;
                   });
  std::stable_sort(result.math_matches.begin(), result.math_matches.end(),
                   [](const MathMatch& x, const MathMatch& y) {
                     return x.token_pairs.front().a < y.token_pairs.front().a;
                   });
  return result;
}

DetectionResult detect(const NormalizedDocument& a, const NormalizedDocument& b,
                       std::string_view algorithm, std::size_t min_length,
                       const SeedExtendParams& params) {
  return detect(a, b, parse_algorithm(algorithm), min_length, params);
}

std::string to_json(const DetectionResult& result) {
  ordered_json j;
  j["algorithm"] = std::string(to_string(result.algorithm));
  j["min_length"] = result.min_length;
  j["matches"] = ordered_json::array();
  auto span_json = [](Span s) {
    ordered_json o;
    o["start"] = s.start;
    o["end"] = s.end;
    return o;
  };
  for (const TextMatch& m : result.text_matches) {
    ordered_json o;
    o["type"] = "text";
    o["span_a"] = span_json(m.span_a);
    o["span_b"] = span_json(m.span_b);
    o["length"] = m.word_length;
    j["matches"].push_back(std::move(o));
  }
  for (const MathMatch& m : result.math_matches) {
    ordered_json o;
    o["type"] = "math";
    o["token_pairs"] = ordered_json::array();
    for (const TokenPair& p : m.token_pairs) {
      o["token_pairs"].push_back(ordered_json::array({p.a, p.b}));
    }
    o["length"] = m.symbol_length;
    auto refs = [](const std::vector<TokenRef>& list) {
      ordered_json arr = ordered_json::array();
      for (const TokenRef& r : list) {
        ordered_json e;
        e["formula_id"] = r.formula_id;
        e["ordinal"] = r.ordinal;
        arr.push_back(std::move(e));
      }
      return arr;
    };
    o["tokens_a"] = refs(m.refs_a);
    o["tokens_b"] = refs(m.refs_b);
    j["matches"].push_back(std::move(o));
  }
  return j.dump();
}

}  // namespace reuse
