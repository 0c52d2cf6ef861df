#include <gtest/gtest.h>

#include "reuse/document_model.hpp"
#include "reuse/encoding.hpp"
#include "reuse/error.hpp"
#include "reuse/unicode.hpp"
#include "test_support.hpp"

using reuse::Block;
using reuse::Document;
using reuse::ErrorCode;
using reuse::ImageBlock;
using reuse::MathBlock;
using reuse::NormalizedDocument;
using reuse::Span;
using reuse::TextBlock;

namespace {

Document doc_of(std::vector<Block> blocks) {
  Document d;
  d.blocks = std::move(blocks);
  d.display_name = "d";
  return d;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const reuse::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kPersistentStore;
}

}  // namespace

TEST(RenderPlaceholder, FencesValidIds) {
  EXPECT_EQ(reuse::render_placeholder("F1"), "⟪F1⟫");
  EXPECT_EQ(reuse::render_placeholder("I12"), "⟪I12⟫");
  EXPECT_EQ(code_of([] { reuse::render_placeholder("X3"); }), ErrorCode::kInvalidId);
  EXPECT_EQ(code_of([] { reuse::render_placeholder("F"); }), ErrorCode::kInvalidId);
  EXPECT_EQ(code_of([] { reuse::render_placeholder("F1a"); }), ErrorCode::kInvalidId);
}

TEST(Normalize, InlineFormulaBetweenTextBlocks) {
  const auto nd = reuse::normalize(doc_of(
      {TextBlock{"Let "}, MathBlock{"<math><mi>x</mi></math>", false}, TextBlock{" hold."}}));
  EXPECT_EQ(nd.plain_text(), "Let ⟪F1⟫\nhold.");
  ASSERT_EQ(nd.formulas().size(), 1u);
  // "Let " is 4 code points and the placeholder is 4 more.
  EXPECT_EQ(nd.formulas()[0].placeholder_span, (Span{4, 8}));
  const auto found = reuse::testing::scan_placeholders(nd.chars());
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].id, "F1");
  EXPECT_EQ(found[0].span, nd.formulas()[0].placeholder_span);
  EXPECT_EQ(nd.fingerprint(), "6fcfba1aeee660189977507690088508cbc52d77e49063934b661cf19a4b8303");
}

TEST(Normalize, EmptyDocument) {
  const auto nd = reuse::normalize(doc_of({}));
  EXPECT_EQ(nd.plain_text(), "");
  EXPECT_TRUE(nd.formulas().empty());
  EXPECT_TRUE(nd.images().empty());
  EXPECT_EQ(nd.fingerprint(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Normalize, ConsecutiveFormulasGetOrderedDisjointIds) {
  const auto nd = reuse::normalize(doc_of({MathBlock{"<math><mi>a</mi></math>", false},
                                           MathBlock{"<math><mi>b</mi></math>", true}}));
  const auto found = reuse::testing::scan_placeholders(nd.chars());
  ASSERT_EQ(found.size(), 2u);
  ASSERT_EQ(nd.formulas().size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(nd.formulas()[i].formula_id, found[i].id);
    EXPECT_EQ(nd.formulas()[i].placeholder_span, found[i].span);
  }
  EXPECT_EQ(found[0].id, "F1");
  EXPECT_EQ(found[1].id, "F2");
  EXPECT_LE(found[0].span.end, found[1].span.start);
  EXPECT_TRUE(nd.formulas()[1].display);
}

TEST(Normalize, ImagesAndTextBoundaries) {
  const auto nd = reuse::normalize(doc_of({TextBlock{"a\n"}, ImageBlock{"PNG", "image/png", "x.png"},
                                           TextBlock{"b"}, TextBlock{"c"}}));
  EXPECT_EQ(nd.plain_text(), "a\n⟪I1⟫\nb\nc");
  ASSERT_EQ(nd.images().size(), 1u);
  EXPECT_EQ(nd.images()[0].placeholder_span, (Span{2, 6}));
  EXPECT_EQ(nd.images()[0].content_hash, reuse::sha256_hex("PNG"));
  EXPECT_EQ(nd.images()[0].media_type, "image/png");
}

TEST(Normalize, TextIsNfcAndDelimitersEscaped) {
  const auto nd = reuse::normalize(doc_of({TextBlock{"cafe\xCC\x81 \r\n⟪F1⟫"}}));
  EXPECT_EQ(nd.plain_text(), "caf\xC3\xA9 \n⟨F1⟩");
  EXPECT_TRUE(nd.formulas().empty());
  EXPECT_TRUE(reuse::testing::scan_placeholders(nd.chars()).empty());
}

TEST(Normalize, IsDeterministic) {
  const Document d = doc_of({TextBlock{"x "}, MathBlock{"<math><mi>y</mi></math>", false},
                             ImageBlock{"b", "image/gif", ""}});
  const auto a = reuse::normalize(d);
  const auto b = reuse::normalize(d);
  EXPECT_EQ(a.plain_text(), b.plain_text());
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
}

TEST(Fingerprint, SensitiveToEachComponent) {
  const auto base = reuse::compute_fingerprint("t", {"<math></math>"}, {"h"});
  EXPECT_NE(base, reuse::compute_fingerprint("u", {"<math></math>"}, {"h"}));
  EXPECT_NE(base, reuse::compute_fingerprint("t", {"<math><mi>x</mi></math>"}, {"h"}));
  EXPECT_NE(base, reuse::compute_fingerprint("t", {"<math></math>"}, {"g"}));
  EXPECT_EQ(base, reuse::sha256_hex(std::string("t\0<math></math>\0h", 17)));
}

TEST(ResolveSpan, NearestOccurrenceToHint) {
  const auto nd = reuse::testing::from_text("abc abc");
  EXPECT_EQ(reuse::resolve_span(nd, "abc", 5), (Span{4, 7}));
  EXPECT_EQ(reuse::resolve_span(nd, "abc", 1), (Span{0, 3}));
  EXPECT_EQ(reuse::resolve_span(nd, "abc", 2), (Span{0, 3}));  // tie -> smaller start
  EXPECT_EQ(reuse::resolve_span(nd, "abc"), (Span{0, 3}));
}

TEST(ResolveSpan, BruteForceNearestOracle) {
  const std::string text = "ab ab  ab\nab xab";
  const auto nd = reuse::testing::from_text(text);
  const std::u32string hay = reuse::unicode::to_u32(text);
  for (std::size_t hint = 0; hint <= hay.size(); ++hint) {
    std::size_t best = hay.size() + 10;
    for (std::size_t p = 0; p + 2 <= hay.size(); ++p) {
      if (hay.substr(p, 2) != U"ab") continue;
      auto d = [&](std::size_t s) { return s > hint ? s - hint : hint - s; };
      if (best > hay.size() || d(p) < d(best)) best = p;
    }
    EXPECT_EQ(reuse::resolve_span(nd, "ab", hint), (Span{best, best + 2})) << hint;
  }
}

TEST(ResolveSpan, WhitespaceInsensitiveMatching) {
  const auto nd = reuse::testing::from_text("one  two\nthree four");
  EXPECT_EQ(reuse::resolve_span(nd, "two three", std::nullopt), (Span{5, 14}));
  EXPECT_EQ(reuse::resolve_span(nd, "one two", std::nullopt), (Span{0, 8}));
  EXPECT_EQ(reuse::resolve_span(nd, "  three\t four ", std::nullopt), (Span{9, 19}));
}

TEST(ResolveSpan, MissingAndEmptySelections) {
  const auto nd = reuse::testing::from_text("abc");
  EXPECT_EQ(reuse::resolve_span(nd, "abc"), (Span{0, 3}));
  try {
    reuse::resolve_span(nd, "xyz");
    FAIL();
  } catch (const reuse::SelectionNotFound& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  try {
    reuse::resolve_span(reuse::testing::from_text("hello world"), "world peace");
    FAIL();
  } catch (const reuse::SelectionNotFound& e) {
    EXPECT_EQ(e.closest_offset(), 6u);
    EXPECT_EQ(e.matched_chars(), 5u);
  }
  EXPECT_EQ(code_of([&] { reuse::resolve_span(nd, " \n "); }), ErrorCode::kInvalidArgument);
}

TEST(ResolveSpan, OffsetsCountCodePoints) {
  const auto nd = reuse::testing::from_text("中文 😀 naïve");
  EXPECT_EQ(reuse::resolve_span(nd, "naïve"), (Span{5, 10}));
  EXPECT_EQ(reuse::resolve_span(nd, "😀"), (Span{3, 4}));
}

TEST(Slice, ContainmentRules) {
  const auto nd = reuse::testing::from_latex("See $x$ now.");
  ASSERT_EQ(nd.formulas().size(), 1u);
  const Span f = nd.formulas()[0].placeholder_span;
  auto whole = reuse::slice(nd, Span{0, nd.length()});
  EXPECT_EQ(whole.formula_ids, std::vector<std::string>{"F1"});
  EXPECT_EQ(whole.excerpt, nd.plain_text());
  EXPECT_EQ(reuse::slice(nd, f).formula_ids, std::vector<std::string>{"F1"});
  EXPECT_EQ(reuse::slice(nd, f).excerpt, "⟪F1⟫");
  EXPECT_TRUE(reuse::slice(nd, Span{f.start, f.start + 2}).formula_ids.empty());
  EXPECT_TRUE(reuse::slice(nd, Span{f.start + 1, f.end}).formula_ids.empty());
  const auto empty = reuse::slice(nd, Span{0, 0});
  EXPECT_EQ(empty.excerpt, "");
  EXPECT_TRUE(empty.formula_ids.empty());
  EXPECT_TRUE(empty.image_ids.empty());
  EXPECT_EQ(code_of([&] { reuse::slice(nd, Span{0, nd.length() + 1}); }), ErrorCode::kInvalidSpan);
  EXPECT_EQ(code_of([&] { reuse::slice(nd, Span{3, 2}); }), ErrorCode::kInvalidSpan);
}

TEST(CanonicalJson, RoundTripsAndChecksFingerprint) {
  const auto nd = reuse::testing::load_corpus("doc01.tex");
  const std::string json = reuse::to_canonical_json(nd);
  const auto back = reuse::from_canonical_json(json);
  EXPECT_EQ(reuse::to_canonical_json(back), json);
  EXPECT_EQ(back.plain_text(), nd.plain_text());
  EXPECT_EQ(back.fingerprint(), nd.fingerprint());
  EXPECT_EQ(json.rfind("{\"doc_id\":", 0), 0u);

  std::string tampered = json;
  const auto pos = tampered.find("\"plain_text\":\"") + 14;
  tampered[pos] = tampered[pos] == 'X' ? 'Y' : 'X';
  EXPECT_EQ(code_of([&] { reuse::from_canonical_json(tampered); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { reuse::from_canonical_json("{\"doc_id\":1}"); }), ErrorCode::kParseError);
}

TEST(DocumentModelProperty, SpansRoundTripOnCorpusSample) {
  reuse::testing::Rng rng(11);
  for (const char* name : {"doc02.tex", "page02.html"}) {
    const auto nd = reuse::testing::load_corpus(name);
    const auto all = reuse::slice(nd, Span{0, nd.length()});
    EXPECT_EQ(all.formula_ids.size(), nd.formulas().size());
    EXPECT_EQ(all.image_ids.size(), nd.images().size());
    for (int i = 0; i < 200; ++i) {
      std::size_t a = rng.below(nd.length() + 1);
      std::size_t b = rng.below(nd.length() + 1);
      if (a > b) std::swap(a, b);
      const std::string piece = nd.text(Span{a, b});
      bool blank = true;
      for (char32_t c : reuse::unicode::to_u32(piece)) blank = blank && reuse::unicode::is_whitespace(c);
      if (blank) continue;
      EXPECT_EQ(reuse::resolve_span(nd, piece, a), (Span{a, b})) << name << " " << a << "," << b;
    }
  }
}
