#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "myopic/expression.hpp"
#include "oracles.hpp"

using namespace myopic;

namespace {

ExpressionScope voting_scope() {
  ExpressionScope s;
  s.players = {"1"};
  s.actions = {{"T", "C"}};
  return s;
}

ExpressionScope pennies_scope() {
  ExpressionScope s;
  s.players = {"1", "2"};
  s.actions = {{"H", "T"}, {"H", "T"}};
  return s;
}

std::vector<Expression> parse_all(const std::vector<std::string>& srcs, const ExpressionScope& s) {
  std::vector<Expression> out;
  for (const auto& src : srcs) out.push_back(parse_expression(src, s));
  return out;
}

// Random expression text over two players' actions.
std::string random_expression(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, 9);
  const int k = depth <= 0 ? pick(rng) % 2 : pick(rng);
  const char* vars[] = {"x[1,H]", "x[1,T]", "x[2,H]", "x[2,T]"};
  switch (k) {
    case 0: return std::to_string(pick(rng)) + (pick(rng) < 3 ? ".25" : "");
    case 1: return vars[pick(rng) % 4];
    case 2: return random_expression(rng, depth - 1) + " + " + random_expression(rng, depth - 1);
    case 3: return random_expression(rng, depth - 1) + "-" + random_expression(rng, depth - 1);
    case 4: return random_expression(rng, depth - 1) + "*" + random_expression(rng, depth - 1);
    case 5: return "(" + random_expression(rng, depth - 1) + ") / (2 + " + random_expression(rng, depth - 1) + ")";
    case 6: return "-" + random_expression(rng, depth - 1);
    case 7: return "max(" + random_expression(rng, depth - 1) + ", " + random_expression(rng, depth - 1) + ")";
    case 8: return "min(" + random_expression(rng, depth - 1) + "," + random_expression(rng, depth - 1) + ", 1)";
    default: return "abs(" + random_expression(rng, depth - 1) + ")";
  }
}

}  // namespace

TEST(Parse, VotingPayoff) {
  const Expression e = parse_expression("1 - 5*x[1,T]", voting_scope());
  for (double p : {0.0, 0.2, 0.7, 1.0}) EXPECT_DOUBLE_EQ(e.evaluate(Vector{p, 1 - p}), 1 - 5 * p);
  EXPECT_EQ(e.variables(), (std::vector<std::size_t>{0}));
}

TEST(Parse, MaxOfComplement) {
  const Expression e = parse_expression("max(x[1,H], 1 - x[1,H])", pennies_scope());
  EXPECT_DOUBLE_EQ(e.evaluate(Vector{0.3, 0.7, 0.5, 0.5}), 0.7);
  EXPECT_DOUBLE_EQ(e.evaluate(Vector{0.9, 0.1, 0.5, 0.5}), 0.9);
}

TEST(Parse, PrecedenceAndAssociativity) {
  const ExpressionScope s;
  EXPECT_DOUBLE_EQ(parse_expression("1 + 2 * 3", s).evaluate(Vector{}), 7.0);
  EXPECT_DOUBLE_EQ(parse_expression("8 - 4 - 2", s).evaluate(Vector{}), 2.0);
  EXPECT_DOUBLE_EQ(parse_expression("8 / 4 / 2", s).evaluate(Vector{}), 1.0);
  EXPECT_DOUBLE_EQ(parse_expression("-2 * -3", s).evaluate(Vector{}), 6.0);
  EXPECT_DOUBLE_EQ(parse_expression(" ( 1+2 )*\n3 ", s).evaluate(Vector{}), 9.0);
  EXPECT_DOUBLE_EQ(parse_expression("min(3, abs(-2), 5)", s).evaluate(Vector{}), 2.0);
  EXPECT_DOUBLE_EQ(parse_expression("2.5e-1", s).evaluate(Vector{}), 0.25);
}

TEST(Parse, ConditionalsAndScalars) {
  ExpressionScope s;
  s.conditionals = {"l", "r"};
  s.scalars = {"t"};
  const Expression e = parse_expression("q[l] - 2*q[r] + t", s);
  EXPECT_DOUBLE_EQ(e.evaluate(Vector{0.25, 0.75, 10.0}), 0.25 - 1.5 + 10.0);
}

TEST(Errors, UnclosedBracketReportsPosition) {
  try {
    parse_expression("x[1,H", pennies_scope());
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 6u);
    EXPECT_NE(std::string(e.what()).find("']'"), std::string::npos);
  }
}

TEST(Errors, LineAndColumnOnSecondLine) {
  try {
    parse_expression("1 +\n  * 2", ExpressionScope{});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 3u);
  }
}

TEST(Errors, UnknownIdentifiers) {
  EXPECT_THROW(parse_expression("x[3,H]", pennies_scope()), ParseError);
  EXPECT_THROW(parse_expression("x[1,Z]", pennies_scope()), ParseError);
  EXPECT_THROW(parse_expression("y + 1", pennies_scope()), ParseError);
  EXPECT_THROW(parse_expression("q[e1]", pennies_scope()), ParseError);
  EXPECT_THROW(parse_expression("", pennies_scope()), ParseError);
  EXPECT_THROW(parse_expression("1 2", pennies_scope()), ParseError);
  EXPECT_THROW(parse_expression("abs(1, 2)", pennies_scope()), ParseError);
}

TEST(Errors, DivisionByZeroIsADomainError) {
  const Expression e = parse_expression("1 / (x[1,H] - x[1,T])", pennies_scope());
  EXPECT_DOUBLE_EQ(e.evaluate(Vector{1, 0, 0.5, 0.5}), 1.0);
  EXPECT_THROW(e.evaluate(Vector{0.5, 0.5, 0.5, 0.5}), DomainError);
}

TEST(RoundTrip, PrettyPrintIsIdempotent) {
  std::mt19937_64 rng(5);
  const ExpressionScope s = pennies_scope();
  for (int k = 0; k < 100; ++k) {
    const std::string src = random_expression(rng, 4);
    const Expression e = parse_expression(src, s);
    const std::string once = e.to_string();
    const Expression again = parse_expression(once, s);
    EXPECT_EQ(again.to_string(), once) << src;
    // Printing preserves the value.
    const Vector x{0.3, 0.7, 0.6, 0.4};
    double a = 0, b = 0;
    bool threw_a = false, threw_b = false;
    try { a = e.evaluate(x); } catch (const DomainError&) { threw_a = true; }
    try { b = again.evaluate(x); } catch (const DomainError&) { threw_b = true; }
    EXPECT_EQ(threw_a, threw_b);
    if (!threw_a) EXPECT_EQ(a, b) << src << " -> " << once;
  }
}

TEST(RoundTrip, MinimalParentheses) {
  const ExpressionScope s;
  EXPECT_EQ(parse_expression("(1 + 2) + 3", s).to_string(), "1 + 2 + 3");
  EXPECT_EQ(parse_expression("1 - (2 - 3)", s).to_string(), "1 - (2 - 3)");
  EXPECT_EQ(parse_expression("(1 * 2) / (3 * 4)", s).to_string(), "1 * 2 / (3 * 4)");
  EXPECT_EQ(parse_expression("-(1 + 2)", s).to_string(), "-(1 + 2)");
}

TEST(Fixtures, ParsedFamiliesMatchHandCoded) {
  std::mt19937_64 rng(9);
  const auto voting1 = expression_family(
      Layout({2}), parse_all({"1 - 5*x[1,T]", "-5*x[1,T]"}, voting_scope()));
  const auto voting2 = expression_family(
      Layout({2}), parse_all({"1 - 5*x[1,T]", "0"}, voting_scope()));
  const auto pennies = expression_family(
      Layout({2, 2}),
      parse_all({"x[2,H] - x[2,T] + max(x[1,H], 1 - x[1,H])",
                 "x[2,T] - x[2,H] + max(x[1,H], 1 - x[1,H])",
                 "x[1,T] - x[1,H] + max(x[2,H], 1 - x[2,H])",
                 "x[1,H] - x[1,T] + max(x[2,H], 1 - x[2,H])"},
                pennies_scope()));
  for (int k = 0; k < 20; ++k) {
    const MixedProfile one(Layout({2}), oracle::random_simplex_point(2, rng));
    EXPECT_LE(max_abs_diff(voting1(one), fixture::voting_one()(one)), 1e-12);
    EXPECT_LE(max_abs_diff(voting2(one), fixture::voting_two()(one)), 1e-12);
    Vector c = oracle::random_simplex_point(2, rng);
    const Vector d = oracle::random_simplex_point(2, rng);
    c.insert(c.end(), d.begin(), d.end());
    const MixedProfile two(Layout({2, 2}), c);
    EXPECT_LE(max_abs_diff(pennies(two), fixture::matching_pennies_bonus()(two)), 1e-12);
  }
}
