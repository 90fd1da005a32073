#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "myopic/document.hpp"
#include "myopic/myopic.hpp"
#include "oracles.hpp"

using namespace myopic;

namespace {

std::string data(const std::string& name) { return std::string(MYOPIC_DATA_DIR) + "/" + name; }

Json voting_json() {
  return Json::parse(R"({
    "schema_version": 1, "kind": "myopic",
    "players": [{"name": "1", "actions": ["T", "C"]}],
    "payoffs": [["1 - 5*x[1,T]", "-5*x[1,T]"]]
  })");
}

std::string error_path(const Json& j) {
  try {
    parse_document(j);
  } catch (const SchemaError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST(Myopic, VotingRoundTrip) {
  const GameDocument d = load_document(data("voting1.json"));
  ASSERT_TRUE(d.myopic.has_value());
  const Json once = emit_document(d);
  const GameDocument again = parse_document(once);
  EXPECT_EQ(emit_document(again), once);
  EXPECT_EQ(again.myopic->payoffs, d.myopic->payoffs);
  EXPECT_EQ(again.myopic->scope.actions, d.myopic->scope.actions);
}

TEST(Myopic, FixturesEvaluateLikeHandCodedFamilies) {
  std::mt19937_64 rng(2);
  const auto v1 = load_document(data("voting1.json")).myopic->family();
  const auto v2 = load_document(data("voting2.json")).myopic->family();
  const auto mp = load_document(data("matching_pennies_bonus.json")).myopic->family();
  for (int k = 0; k < 20; ++k) {
    const MixedProfile one(Layout({2}), oracle::random_simplex_point(2, rng));
    EXPECT_LE(max_abs_diff(v1(one), fixture::voting_one()(one)), 1e-12);
    EXPECT_LE(max_abs_diff(v2(one), fixture::voting_two()(one)), 1e-12);
    Vector c = oracle::random_simplex_point(2, rng);
    const Vector d = oracle::random_simplex_point(2, rng);
    c.insert(c.end(), d.begin(), d.end());
    const MixedProfile two(Layout({2, 2}), c);
    EXPECT_LE(max_abs_diff(mp(two), fixture::matching_pennies_bonus()(two)), 1e-12);
  }
  EXPECT_EQ(mp.labels().actions[1][0], "H");
}

TEST(Schema, ErrorsCarryFieldPaths) {
  Json j = voting_json();
  j["payoffs"][0][1] = "-5*x[1,Q]";
  EXPECT_EQ(error_path(j), "/payoffs/0/1");
  j = voting_json();
  j.erase("players");
  EXPECT_EQ(error_path(j), "/players");
  j = voting_json();
  j["schema_version"] = 7;
  EXPECT_EQ(error_path(j), "/schema_version");
  j = voting_json();
  j["kind"] = "poker";
  EXPECT_EQ(error_path(j), "/kind");
  j = voting_json();
  j["players"][0]["actions"] = {"T", "T"};
  EXPECT_EQ(error_path(j), "/players/0/actions/1");
}

TEST(Schema, MalformedJsonHasPosition) {
  try {
    parse_document_text("{\n  \"kind\": }");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Neyman, OneThirdWeight) {
  const GameDocument d = load_document(data("coordination_neyman.json"));
  ASSERT_TRUE(d.neyman.has_value());
  EXPECT_EQ(d.neyman->spec.weights[0][0], 1.0 / 3.0);
  EXPECT_EQ(d.neyman->spec.weights[1][0], 1.0 / 3.0);
  EXPECT_EQ(d.neyman->spec.depth, 1u);
  const Json once = emit_document(d);
  EXPECT_EQ(emit_document(parse_document(once)), once);
}

TEST(Neyman, PriorMustSumToOne) {
  Json j = emit_document(load_document(data("coordination_neyman.json")));
  j["prior"] = {0.5, 0.6};
  EXPECT_EQ(error_path(j), "/prior");
  j["prior"] = {0.5, 0.5};
  j["weights"]["two"] = {0.4, 0.1};
  EXPECT_EQ(error_path(j), "/weights/two");
  j["weights"]["two"] = {1.0};
  EXPECT_EQ(error_path(j), "/weights/two");
  j["weights"]["two"] = {0.2};
  j["A"][1] = {{1, 0}};
  EXPECT_EQ(error_path(j), "/A/1");
}

TEST(Neyman, DocumentPlanPassesChecker) {
  const GameDocument d = load_document(data("coordination_neyman.json"));
  const JointPlan p = d.neyman->joint_plan();
  const StateGameAnalysis an(d.neyman->spec.games);
  EXPECT_TRUE(check_joint_plan(p, an).ok());
  EXPECT_EQ(p.payoff_one, (Vector{2, 2}));
  EXPECT_NEAR(p.payoff_two[0], 1.0, 1e-15);
}

TEST(Tree, EntryGameBuildsAndSolves) {
  const GameDocument d = load_document(data("entry_tree.json"));
  ASSERT_TRUE(d.tree.has_value());
  const auto built = d.tree->build();
  EXPECT_EQ(built.tree.classes().size(), 2u);
  // Selection of class {l, r} at q = (0.25, 0.75).
  const std::size_t c = built.tree.class_of(built.tree.endpoint_index(3));
  const Vector v = built.continuation.selections[c][0](Vector{0.25, 0.75});
  EXPECT_EQ(v, (Vector{0.25, 1.0, -0.75, 0.5}));
  const CompositeSolution sol = solve_composite(built.tree, built.continuation, built.wrappers);
  EXPECT_TRUE(sol.certified);
  const Json once = emit_document(d);
  EXPECT_EQ(emit_document(parse_document(once)), once);
}

TEST(Tree, ClassCoverageAndWrappers) {
  Json j = emit_document(load_document(data("entry_tree.json")));
  Json bad = j;
  bad["continuation"]["classes"].erase(0);
  EXPECT_EQ(error_path(bad), "/continuation/classes");
  bad = j;
  bad["continuation"]["classes"][1]["endpoints"] = {"l"};
  EXPECT_EQ(error_path(bad), "/continuation/classes/1/endpoints");
  bad = j;
  bad["wrappers"] = {{"out", {"1 + 2*t", "t*t"}}};
  EXPECT_EQ(error_path(bad), "/wrappers/out/1");
  bad["wrappers"] = {{"out", {"1 + 2*t", "3 - t"}}};
  EXPECT_EQ(error_path(bad), "/wrappers/out/1");
  j["wrappers"] = {{"out", {"1 + 2*t", "t / 2"}}};
  const auto built = parse_document(j).tree->build();
  const std::size_t e = built.tree.endpoint_index(1);
  EXPECT_DOUBLE_EQ(built.wrappers[e * 2].a, 1.0);
  EXPECT_DOUBLE_EQ(built.wrappers[e * 2].b, 2.0);
  EXPECT_DOUBLE_EQ(built.wrappers[e * 2 + 1].b, 0.5);
}

TEST(Wrappers, AffineParsing) {
  const Wrapper w = parse_wrapper("0.25 + 0.75*t");
  EXPECT_DOUBLE_EQ(w.a, 0.25);
  EXPECT_DOUBLE_EQ(w.b, 0.75);
  const Wrapper back = parse_wrapper(format_wrapper(w));
  EXPECT_EQ(back.a, w.a);
  EXPECT_EQ(back.b, w.b);
  EXPECT_THROW(parse_wrapper("abs(t)"), ConfigError);
  EXPECT_THROW(parse_wrapper("2"), ConfigError);
}
