#include <gtest/gtest.h>

#include "reuse/error.hpp"
#include "reuse/mathml.hpp"
#include "test_support.hpp"

namespace m = reuse::mathml;
using reuse::Error;
using reuse::ErrorCode;

namespace {

ErrorCode error_of(std::string_view src) {
  try {
    m::parse(src);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parsed: " << src;
  return ErrorCode::kInvalidId;
}

}  // namespace

TEST(MathmlCanonical, DropsNamespaceAndWhitespace) {
  EXPECT_EQ(m::canonicalize("<math xmlns=\"http://www.w3.org/1998/Math/MathML\">\n"
                            "  <mi> x </mi>\n  <mo>+</mo>\n</math>"),
            "<math><mi>x</mi><mo>+</mo></math>");
}

TEST(MathmlCanonical, SortsAttributesAndLowercasesNames) {
  EXPECT_EQ(m::canonicalize("<MATH display='block'><MI mathvariant=\"bold\" class=\"a\">v</MI></MATH>"),
            "<math display=\"block\"><mi class=\"a\" mathvariant=\"bold\">v</mi></math>");
  EXPECT_EQ(m::canonicalize("<m:math xmlns:m=\"x\"><m:mi>y</m:mi></m:math>"),
            "<math><mi>y</mi></math>");
}

TEST(MathmlCanonical, ExpandsSelfClosingAndEntities) {
  EXPECT_EQ(m::canonicalize("<math><mspace width=\"1em\"/><mi>&alpha;</mi><mo>&#x2212;</mo><mo>&lt;</mo></math>"),
            "<math><mspace width=\"1em\"></mspace><mi>α</mi><mo>−</mo><mo>&lt;</mo></math>");
  EXPECT_EQ(m::canonicalize("<math><mi>a  \n b</mi></math>"), "<math><mi>a b</mi></math>");
  EXPECT_EQ(m::canonicalize("<math><!-- c --><mi>a</mi><![CDATA[<b>]]></math>"),
            "<math><mi>a</mi>&lt;b&gt;</math>");
}

TEST(MathmlCanonical, AppliesNfcToText) {
  EXPECT_EQ(m::canonicalize("<math><mi>e\xCC\x81</mi></math>"), "<math><mi>\xC3\xA9</mi></math>");
}

TEST(MathmlParse, RejectsMalformedInput) {
  EXPECT_EQ(error_of("<math><mi>x</math>"), ErrorCode::kParseError);
  EXPECT_EQ(error_of("<mrow><mi>x</mi></mrow>"), ErrorCode::kParseError);
  EXPECT_EQ(error_of("<math><mi>&nosuch;</mi></math>"), ErrorCode::kParseError);
  EXPECT_EQ(error_of("<math>"), ErrorCode::kParseError);
  EXPECT_EQ(error_of("<math></math><math></math>"), ErrorCode::kParseError);
  EXPECT_EQ(error_of(""), ErrorCode::kParseError);
  std::string deep = "<math>";
  for (int i = 0; i < 400; ++i) deep += "<mrow>";
  for (int i = 0; i < 400; ++i) deep += "</mrow>";
  deep += "</math>";
  EXPECT_EQ(error_of(deep), ErrorCode::kParseError);
}

TEST(MathmlText, ConcatenatesLeaves) {
  EXPECT_EQ(m::text_content(m::parse("<math><mi>a</mi><mo>+</mo><mn>2</mn></math>")), "a + 2");
}

namespace {

m::Node random_tree(reuse::testing::Rng& rng, int depth) {
  static const char* kLeaves[] = {"mi", "mo", "mn", "mtext"};
  static const char* kInner[] = {"mrow", "msup", "msub", "mfrac", "msqrt", "mstyle"};
  static const char* kText[] = {"x", "α", "+", "42", "a b", "<", "&", "sin", "⟪"};
  if (depth == 0 || rng.below(3) == 0) {
    m::Node leaf = m::Node::leaf(kLeaves[rng.below(4)], kText[rng.below(9)]);
    if (rng.below(4) == 0) leaf.attributes.emplace_back("mathvariant", "bold");
    return leaf;
  }
  m::Node n = m::Node::element(kInner[rng.below(6)]);
  const std::size_t kids = 1 + rng.below(3);
  for (std::size_t i = 0; i < kids; ++i) n.children.push_back(random_tree(rng, depth - 1));
  return n;
}

}  // namespace

TEST(MathmlProperty, SerializationIsAFixedPoint) {
  reuse::testing::Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    m::Node root = m::Node::element("math");
    const std::size_t kids = rng.below(4);
    for (std::size_t k = 0; k < kids; ++k) root.children.push_back(random_tree(rng, 4));
    const std::string once = m::serialize(root);
    const m::Node reparsed = m::parse(once);
    EXPECT_EQ(reparsed, root) << once;
    EXPECT_EQ(m::serialize(reparsed), once);
  }
}
