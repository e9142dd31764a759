#include <gtest/gtest.h>

#include "support.h"

using namespace hnn;
using namespace hnn::test;

namespace {

std::size_t error_offset(const std::string& src) {
  try {
    parse_expression(src);
  } catch (const ParseError& e) {
    return e.offset();
  }
  ADD_FAILURE() << "no parse error for " << src;
  return 0;
}

std::string error_message(const std::string& src, const ScenarioPtr& s) {
  try {
    evaluate(src, s);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ExpressionParse, Structure) {
  const ExprPtr e = parse_expression("2*t1*a^-3 - t1'");
  ASSERT_EQ(e->kind, Expr::Kind::Sum);
  EXPECT_EQ(e->signs, (std::vector<int>{1, -1}));
  ASSERT_EQ(e->children[0]->kind, Expr::Kind::Product);
  EXPECT_EQ(e->children[0]->children.size(), 3u);
  EXPECT_EQ(e->children[0]->children[2]->kind, Expr::Kind::Power);
  EXPECT_EQ(e->children[0]->children[2]->exponent, -3);
  EXPECT_EQ(e->children[1]->kind, Expr::Kind::Adjoint);
}

TEST(ExpressionParse, Scalars) {
  EXPECT_EQ(parse_expression("2.5")->value, Complex(2.5));
  EXPECT_EQ(parse_expression("2.5i")->value, Complex(0.0, 2.5));
  EXPECT_EQ(parse_expression("1e-3")->value, Complex(1e-3));
  const ExprPtr neg = parse_expression("(-2.0)");
  ASSERT_EQ(neg->kind, Expr::Kind::Sum);
  EXPECT_EQ(neg->signs[0], -1);
}

TEST(ExpressionParse, ErrorOffsets) {
  EXPECT_EQ(error_offset("t1 ^ 1.5"), 6u);
  EXPECT_EQ(error_offset("t1 +"), 4u);
  EXPECT_EQ(error_offset("(t1"), 3u);
  EXPECT_EQ(error_offset("t1 ) "), 3u);
  EXPECT_EQ(error_offset("a^"), 2u);
  EXPECT_EQ(error_offset("a # b"), 2u);
  try {
    parse_expression("t1 ^ 1.5");
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("power must be an integer"), std::string::npos);
  }
}

TEST(ExpressionEval, UnresolvedIdentifier) {
  const auto s = load("bs23.json");
  const std::string msg = error_message("t1*x", s);
  EXPECT_NE(msg.find("unresolved identifier 'x'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("byte 3"), std::string::npos) << msg;
  EXPECT_NE(error_message("t2", s).find("unresolved identifier 't2'"), std::string::npos);
}

TEST(ExpressionEval, RawExpansion) {
  const auto s = load("free2.json");
  EXPECT_EQ(ex(s, "(t1 + t1')^4").words().size(), 16u);
  EXPECT_EQ(ex(s, "1*t1").words().size(), 1u);
  EXPECT_EQ(ex(s, "(a + 2*a + 1)*t1").words().size(), 1u);
  EXPECT_EQ(ex(s, "(a + 1)*t1*(a + 1)").words().size(), 1u);
}

TEST(ExpressionEval, PowersAndAdjoints) {
  const auto s = load("bs23.json");
  EXPECT_EQ(to_string(normalize(ex(s, "t1^-1"))), "t1'");
  EXPECT_EQ(to_string(normalize(ex(s, "(t1*a)'"))), "a^-1*t1'");
  EXPECT_EQ(to_string(normalize(ex(s, "t1^0"))), "1");
  EXPECT_THROW(ex(s, "(a + 1)^-1"), ParseError);
  EXPECT_EQ(to_string(normalize(ex(s, "(2i*a)'"))), "(-2.0i)*a^-1");
}

TEST(ExpressionEval, Bindings) {
  const auto s = load("torus_rational.json");
  EXPECT_EQ(to_string(normalize(ex(s, "w"))), to_string(normalize(ex(s, "u*v"))));
  const auto m = load("tensor_case1.json");
  EXPECT_EQ(to_string(normalize(ex(m, "x"))), to_string(normalize(ex(m, "e1_1_2 + e1_2_1"))));
  const AlgebraElement v = evaluate_base(*parse_expression("u*v*u'"), s->base(), base_bindings(s->base()));
  EXPECT_EQ(v.terms().size(), 1u);
  EXPECT_THROW(evaluate_base(*parse_expression("t1"), s->base(), base_bindings(s->base())), ParseError);
}

TEST(ExpressionEval, ScalarFolding) {
  const auto s = load("bs23.json");
  EXPECT_EQ(state_moment(ex(s, "3 - 1.5 + 0.5i")), Complex(1.5, 0.5));
  EXPECT_EQ(state_moment(ex(s, "-a^0")), Complex(-1.0));
}
