#include <gtest/gtest.h>

#include <fstream>
#include <regex>

#include "reuse/document_model.hpp"
#include "reuse/encoding.hpp"
#include "reuse/error.hpp"
#include "reuse/ingest.hpp"
#include "reuse/latex_math.hpp"
#include "reuse/mathml.hpp"
#include "test_support.hpp"

using reuse::Block;
using reuse::Document;
using reuse::ErrorCode;
using reuse::ImageBlock;
using reuse::MathBlock;
using reuse::SourceFormat;
using reuse::TextBlock;

namespace {

std::vector<Block> blocks_latex(std::string_view src, const reuse::ResourceResolver& r = {}) {
  return reuse::parse_latex(src, "t.tex", r).blocks;
}

std::vector<Block> blocks_html(std::string_view src, const reuse::ResourceResolver& r = {}) {
  return reuse::parse_html(src, "t.html", r).blocks;
}

std::vector<std::string> warning_codes(const Document& d) {
  std::vector<std::string> out;
  for (const auto& w : d.warnings) out.push_back(w.code);
  return out;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const reuse::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kInvalidId;
}

}  // namespace

TEST(DetectFormat, ExtensionThenSniffing) {
  EXPECT_EQ(reuse::detect_format("\\documentclass{article}...", "a.bin"), SourceFormat::kLatex);
  EXPECT_EQ(reuse::detect_format("anything", "p.tex"), SourceFormat::kLatex);
  EXPECT_EQ(reuse::detect_format("hello", "notes"), SourceFormat::kTxt);
  EXPECT_EQ(reuse::detect_format("<p>x</p>", "x.HTM"), SourceFormat::kHtml);
  EXPECT_EQ(reuse::detect_format("  <!DOCTYPE html><p>", "upload"), SourceFormat::kHtml);
  EXPECT_EQ(reuse::detect_format("<HTML>", ""), SourceFormat::kHtml);
  EXPECT_EQ(reuse::detect_format("x \\begin{document} y", ""), SourceFormat::kLatex);
  EXPECT_EQ(reuse::detect_format("\\documentclass", "readme.txt"), SourceFormat::kTxt);
  EXPECT_TRUE(reuse::is_pdf("%PDF-1.7 ...", "upload"));
  EXPECT_TRUE(reuse::is_pdf("", "paper.PDF"));
  EXPECT_FALSE(reuse::is_pdf("hello", "a.txt"));
}

TEST(ParsePlaintext, NormalizesAndReportsInvalidBytes) {
  EXPECT_EQ(reuse::parse_plaintext("a\r\nb", "n").blocks, (std::vector<Block>{TextBlock{"a\nb"}}));
  EXPECT_EQ(reuse::parse_plaintext("", "n").blocks, (std::vector<Block>{TextBlock{""}}));
  const Document bad = reuse::parse_plaintext("x\xffy", "n");
  EXPECT_EQ(bad.blocks, (std::vector<Block>{TextBlock{"x\xEF\xBF\xBDy"}}));
  ASSERT_EQ(bad.warnings.size(), 1u);
  EXPECT_EQ(bad.warnings[0].code, "invalid-utf8");
  EXPECT_NE(bad.warnings[0].message.find("1 invalid"), std::string::npos);
  EXPECT_EQ(reuse::parse_plaintext("⟪F1⟫", "n").blocks, (std::vector<Block>{TextBlock{"⟨F1⟩"}}));
  EXPECT_EQ(reuse::parse_plaintext("t", "n").source_format, SourceFormat::kTxt);
}

TEST(ParseLatex, InlineMathSplitsText) {
  EXPECT_EQ(blocks_latex("Let $x+1$ hold."),
            (std::vector<Block>{TextBlock{"Let "},
                                MathBlock{"<math><mi>x</mi><mo>+</mo><mn>1</mn></math>", false},
                                TextBlock{" hold."}}));
}

TEST(ParseLatex, CommentsAndDecorations) {
  EXPECT_EQ(blocks_latex("% only a comment"), (std::vector<Block>{TextBlock{""}}));
  EXPECT_EQ(blocks_latex("\\textbf{bold} rest"), (std::vector<Block>{TextBlock{"bold rest"}}));
  // a comment also consumes its line break
  EXPECT_EQ(blocks_latex("a 50\\% b % gone\nc"), (std::vector<Block>{TextBlock{"a 50% b c"}}));
  EXPECT_EQ(blocks_latex("\\section{Intro} and \\emph{x} \\underline{y}"),
            (std::vector<Block>{TextBlock{"Intro and x y"}}));
  EXPECT_EQ(blocks_latex("A\\cite{k} B\\ref{r}\\label{l}."), (std::vector<Block>{TextBlock{"A B."}}));
  EXPECT_EQ(blocks_latex("\\unknowncmd{kept} text"), (std::vector<Block>{TextBlock{"kept text"}}));
}

TEST(ParseLatex, PreambleSkippedAndMathModes) {
  const auto blocks = blocks_latex(
      "\\documentclass{article}\n\\title{T}\n\\begin{document}\n"
      "a \\(y\\) b $$z$$ c \\[w\\]\n\\begin{equation*}v\\end{equation*}\n\\end{document}\ntrailer");
  std::vector<std::string> kinds;
  for (const auto& b : blocks) {
    if (const auto* m = std::get_if<MathBlock>(&b)) {
      kinds.push_back(std::string(m->display ? "D:" : "I:") + m->mathml);
    } else if (const auto* t = std::get_if<TextBlock>(&b)) {
      kinds.push_back("T:" + t->content);
    }
  }
  EXPECT_EQ(kinds, (std::vector<std::string>{
                       "T:a ", "I:<math><mi>y</mi></math>", "T: b ", "D:<math><mi>z</mi></math>",
                       "T: c ", "D:<math><mi>w</mi></math>", "T:\n", "D:<math><mi>v</mi></math>"}));
}

TEST(ParseLatex, UnsupportedMathDegradesToSource) {
  const Document d = reuse::parse_latex("x $\\partial f$ y", "t");
  EXPECT_EQ(d.blocks, (std::vector<Block>{TextBlock{"x $\\partial f$ y"}}));
  EXPECT_EQ(warning_codes(d), std::vector<std::string>{"unsupported-math"});
}

TEST(ParseLatex, UnbalancedDelimiterKeepsRestOfLine) {
  const Document d = reuse::parse_latex("a $b c\n\nd $e$ f", "t");
  ASSERT_EQ(d.warnings.size(), 1u);
  EXPECT_EQ(d.warnings[0].code, "unbalanced-math");
  EXPECT_EQ(d.warnings[0].source_offset, 2u);
  EXPECT_EQ(d.blocks, (std::vector<Block>{TextBlock{"a $b c\n\nd "},
                                          MathBlock{"<math><mi>e</mi></math>", false},
                                          TextBlock{" f"}}));
}

TEST(ParseLatex, InlineMathDoesNotCrossBlankLine) {
  const Document d = reuse::parse_latex("a $b\n\nc$ d", "t");
  EXPECT_EQ(warning_codes(d).front(), "unbalanced-math");
  for (const auto& b : d.blocks) EXPECT_FALSE(std::holds_alternative<MathBlock>(b));
}

TEST(ParseLatex, IncludeGraphicsUsesResolver) {
  const reuse::ResourceResolver r = [](std::string_view ref) -> std::optional<reuse::Resource> {
    if (ref == "fig/a") return reuse::Resource{"BYTES", "image/png"};
    return std::nullopt;
  };
  const Document d = reuse::parse_latex(
      "see \\includegraphics[width=2cm]{fig/a} and \\includegraphics{fig/none}", "t", r);
  ASSERT_EQ(d.blocks.size(), 4u);
  const auto& found = std::get<ImageBlock>(d.blocks[1]);
  EXPECT_EQ(found.bytes, "BYTES");
  EXPECT_EQ(found.media_type, "image/png");
  EXPECT_EQ(found.source_ref, "fig/a");
  EXPECT_TRUE(std::get<ImageBlock>(d.blocks[3]).bytes.empty());
  EXPECT_EQ(warning_codes(d), std::vector<std::string>{"unresolved-image"});
}

TEST(ParseLatex, EscapesAndDelimiterCharacters) {
  EXPECT_EQ(blocks_latex("a\\&b\\_c~d\\\\e ⟪F1⟫"),
            (std::vector<Block>{TextBlock{"a&b_c d\ne ⟨F1⟩"}}));
}

TEST(ParseHtml, BlockBoundaries) {
  EXPECT_EQ(blocks_html("<p>a</p><p>b</p>"), (std::vector<Block>{TextBlock{"a\nb"}}));
  EXPECT_EQ(blocks_html("<div>one<br>two</div>  <li>three</li>"),
            (std::vector<Block>{TextBlock{"one\ntwo\nthree"}}));
  EXPECT_EQ(blocks_html("<p>  lots   of\n\tspace </p>"), (std::vector<Block>{TextBlock{"lots of space"}}));
  EXPECT_EQ(blocks_html("<table><tr><td>x</td><td>y</td></tr></table>"),
            (std::vector<Block>{TextBlock{"x y"}}));
}

TEST(ParseHtml, InlineMath) {
  EXPECT_EQ(blocks_html("<p>x: <math><mi>y</mi></math></p>"),
            (std::vector<Block>{TextBlock{"x: "}, MathBlock{"<math><mi>y</mi></math>", false}}));
  const auto blocks = blocks_html("<math display=\"block\" xmlns=\"http://www.w3.org/1998/Math/MathML\">"
                                  "<mrow> <mi>a</mi> </mrow></math>");
  ASSERT_EQ(blocks.size(), 1u);
  const auto& m = std::get<MathBlock>(blocks[0]);
  EXPECT_TRUE(m.display);
  EXPECT_EQ(m.mathml, "<math display=\"block\"><mrow><mi>a</mi></mrow></math>");
}

TEST(ParseHtml, DataUriImage) {
  const std::string png = reuse::testing::read_file(reuse::testing::corpus_dir() / "images/img1.png");
  const auto blocks = blocks_html("<img src='data:image/png;base64," + reuse::base64_encode(png) + "'/>");
  ASSERT_EQ(blocks.size(), 1u);
  const auto& img = std::get<ImageBlock>(blocks[0]);
  EXPECT_EQ(img.bytes, png);
  EXPECT_EQ(img.media_type, "image/png");
}

TEST(ParseHtml, DropsScriptsStylesAndComments) {
  EXPECT_EQ(blocks_html("<head><title>t</title></head><script>x<y</script><style>p{}</style>"
                        "a<!-- <p>hidden</p> -->b"),
            (std::vector<Block>{TextBlock{"ab"}}));
}

TEST(ParseHtml, EntitiesAndDelimiters) {
  EXPECT_EQ(blocks_html("a &amp; b &lt;c&gt; &#x27EA;I1&#x27EB; &nbsp;&mdash;"),
            (std::vector<Block>{TextBlock{"a & b <c> ⟨I1⟩ \u00A0—"}}));
}

TEST(ParseHtml, MalformedMathDegradesToText) {
  const Document d = reuse::parse_html("<p>q <math><msup><mi>x</mi></math> r</p>", "t");
  EXPECT_EQ(d.blocks, (std::vector<Block>{TextBlock{"q x r"}}));
  EXPECT_EQ(warning_codes(d), std::vector<std::string>{"malformed-mathml"});
}

TEST(ParseHtml, UnresolvedImagesWarn) {
  const Document d = reuse::parse_html("<img src=\"missing.png\">", "t");
  ASSERT_EQ(d.blocks.size(), 1u);
  EXPECT_TRUE(std::get<ImageBlock>(d.blocks[0]).bytes.empty());
  EXPECT_EQ(warning_codes(d), std::vector<std::string>{"unresolved-image"});
}

TEST(FilesystemResolver, ResolvesInsideBaseOnly) {
  const auto r = reuse::filesystem_resolver(reuse::testing::corpus_dir());
  const auto hit = r("images/img2");
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->media_type, "image/png");
  EXPECT_EQ(hit->bytes.substr(1, 3), "PNG");
  EXPECT_TRUE(r("images/img2.png").has_value());
  EXPECT_FALSE(r("../CMakeLists.txt").has_value());
  EXPECT_FALSE(r("/etc/passwd").has_value());
  EXPECT_FALSE(r("http://example.com/a.png").has_value());
  EXPECT_FALSE(r("images/nothing").has_value());
}

TEST(ExternalConverter, DelegatesToParseHtml) {
  const Document d = reuse::external_converter_adapter("%PDF-", "printf '<p>hi</p>'", "p.pdf");
  EXPECT_EQ(d.blocks, (std::vector<Block>{TextBlock{"hi"}}));
  // the input arrives on stdin
  const Document echoed = reuse::external_converter_adapter("<p>echo <math><mi>e</mi></math></p>", "cat");
  ASSERT_EQ(echoed.blocks.size(), 2u);
  EXPECT_EQ(std::get<MathBlock>(echoed.blocks[1]).mathml, "<math><mi>e</mi></math>");
}

TEST(ExternalConverter, FailuresAndConfiguration) {
  EXPECT_EQ(code_of([] { reuse::external_converter_adapter("%PDF-", "echo broken >&2; exit 1"); }),
            ErrorCode::kConversionFailed);
  try {
    reuse::external_converter_adapter("%PDF-", "echo diagnostic-text >&2; exit 3");
  } catch (const reuse::Error& e) {
    EXPECT_NE(std::string(e.what()).find("diagnostic-text"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { reuse::external_converter_adapter("%PDF-", "true"); }),
            ErrorCode::kConversionFailed);
  EXPECT_EQ(code_of([] { reuse::external_converter_adapter("%PDF-", ""); }),
            ErrorCode::kUnsupportedFormat);
  EXPECT_EQ(code_of([] { reuse::ingest("%PDF-1.4", "a.pdf", "a"); }), ErrorCode::kUnsupportedFormat);
  reuse::IngestOptions options;
  options.pdf_converter = "printf '<p>converted</p>'";
  EXPECT_EQ(reuse::ingest("%PDF-1.4", "a.pdf", "a", options).blocks,
            (std::vector<Block>{TextBlock{"converted"}}));
}

TEST(IngestProperty, CorpusInvariants) {
  const auto resolver = reuse::filesystem_resolver(reuse::testing::corpus_dir());
  for (const auto& ext : {".tex", ".html"}) {
    for (const auto& name : reuse::testing::corpus_files(ext)) {
      const std::string bytes = reuse::testing::read_file(reuse::testing::corpus_dir() / name);
      reuse::IngestOptions options;
      options.resolver = resolver;
      const Document first = reuse::ingest(bytes, name, name, options);
      EXPECT_EQ(first, reuse::ingest(bytes, name, name, options)) << name;
      std::size_t images = 0;
      for (const auto& b : first.blocks) {
        if (const auto* t = std::get_if<TextBlock>(&b)) {
          EXPECT_EQ(t->content.find("⟪"), std::string::npos) << name;
          EXPECT_EQ(t->content.find("⟫"), std::string::npos) << name;
        } else if (const auto* m = std::get_if<MathBlock>(&b)) {
          EXPECT_EQ(reuse::mathml::canonicalize(m->mathml), m->mathml) << name;
        } else {
          ++images;
        }
      }
      (void)images;
    }
  }
}

TEST(IngestProperty, DollarGroupsBecomeMathBlocks) {
  reuse::testing::Rng rng(5);
  const char* formulas[] = {"x", "a+b", "\\frac{1}{2}", "c_i^2", "\\alpha"};
  for (int round = 0; round < 50; ++round) {
    const std::size_t n = rng.below(8);
    std::string src;
    for (std::size_t i = 0; i < n; ++i) {
      src += "word" + std::to_string(rng.below(100)) + " $" + formulas[rng.below(5)] + "$ ";
    }
    src += "end";
    std::size_t math = 0;
    for (const auto& b : blocks_latex(src)) math += std::holds_alternative<MathBlock>(b);
    EXPECT_EQ(math, n) << src;
  }
}
