#include <gtest/gtest.h>

#include "myopic/report.hpp"

// Each test recomputes a report's certificates from nothing but the report:
// its embedded input, its settings and its recorded solution.

using namespace myopic;

namespace {

std::string data(const std::string& name) { return std::string(MYOPIC_DATA_DIR) + "/" + name; }

Json roundtrip(const Json& r) { return Json::parse(r.dump()); }

double certificate(const Json& r, const std::string& name) {
  for (const auto& c : r["certificates"]) {
    if (c["name"] == name) return c["value"].get<double>();
  }
  ADD_FAILURE() << "no certificate " << name;
  return 0.0;
}

Vector vec(const Json& j) { return j.get<Vector>(); }

}  // namespace

TEST(Reports, ProjectRecomputes) {
  const Json r = roundtrip(project_report(Vector{0.3, -1.0, 2.5, 2.0}));
  const Vector y = vec(r["input"]);
  const Vector x = vec(r["results"]["projection"]);
  EXPECT_EQ(x, project_simplex(y));
  double top = -1e300;
  for (std::size_t i = 0; i < y.size(); ++i) top = std::max(top, y[i] - x[i]);
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (x[i] > 0) worst = std::max(worst, top - (y[i] - x[i]));
  }
  EXPECT_EQ(worst, certificate(r, "characterization"));
  EXPECT_TRUE(r["passed"].get<bool>());
}

TEST(Reports, SolveRecomputes) {
  for (const char* name : {"voting1.json", "voting2.json", "matching_pennies_bonus.json"}) {
    const Json r = roundtrip(solve_report(load_document(data(name))));
    const PayoffFamily w = parse_document(r["input"]).myopic->family();
    const double tol = r["settings"]["tolerance"].get<double>();
    const double support_tol = r["settings"]["support_tol"].get<double>();
    std::size_t k = 0;
    for (const auto& e : r["results"]["equilibria"]) {
      const MixedProfile x = profile_from_json(e["profile"], w.layout());
      const double res = equilibrium_residual(x, w, support_tol);
      ++k;
      EXPECT_EQ(res, certificate(r, "equilibrium " + std::to_string(k) + " residual")) << name;
      EXPECT_LE(res, tol);
      EXPECT_EQ(vec(e["payoffs"]), w(x));
    }
    EXPECT_GE(k, 1u);
    if (r["results"].contains("optimum")) {
      const auto& o = r["results"]["optimum"];
      const MixedProfile x = profile_from_json(o["profile"], w.layout());
      EXPECT_EQ(aggregate_payoffs(x, w)[0], o["value"].get<double>());
    }
  }
}

TEST(Reports, StructureRecomputes) {
  StructureOptions opt;
  opt.samples = 3;
  const Json r = roundtrip(structure_report(load_document(data("matching_pennies_bonus.json")), opt));
  const PayoffFamily w = parse_document(r["input"]).myopic->family();
  const FunctionSpace space(w.layout(), {w}, r["settings"]["mesh"].get<std::size_t>());
  const MixedProfile x0 = MixedProfile::barycenter(w.layout());
  double worst = 0.0, membership = 0.0;
  for (const auto& e : r["results"]["elements"]) {
    const RoundTripReport rt = check_round_trip(space, vec(e["coefficients"]), x0);
    worst = std::max({worst, rt.psi_phi_distance, rt.phi_psi_distance});
    membership = std::max(membership, rt.membership_residual);
  }
  EXPECT_EQ(r["results"]["elements"].size(), 4u);
  EXPECT_EQ(worst, certificate(r, "round trip"));
  EXPECT_EQ(membership, certificate(r, "graph membership"));
}

TEST(Reports, ValueRecomputes) {
  const Json r = roundtrip(value_report(load_document(data("coordination_neyman.json")), Vector{0.3, 0.7}));
  const NeymanDocument nd = *parse_document(r["input"]).neyman;
  const Vector p = vec(r["settings"]["p"]);
  EXPECT_EQ(a_star(nd.spec.games, p), r["results"]["a_star"]["value"].get<double>());
  EXPECT_EQ(b_star(nd.spec.games, p), r["results"]["b_star"]["value"].get<double>());
  // Duality: the recorded strategies guarantee the recorded value.
  const Vector sx = vec(r["results"]["a_star"]["one"]), sy = vec(r["results"]["a_star"]["two"]);
  const Matrix m = nd.spec.games.a_mix(p);
  double row = 1e300, col = -1e300;
  for (std::size_t j = 0; j < m[0].size(); ++j) {
    double v = 0;
    for (std::size_t i = 0; i < m.size(); ++i) v += sx[i] * m[i][j];
    row = std::min(row, v);
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    double v = 0;
    for (std::size_t j = 0; j < m[0].size(); ++j) v += m[i][j] * sy[j];
    col = std::max(col, v);
  }
  EXPECT_NEAR(col - row, certificate(r, "a* duality gap"), 1e-15);
}

TEST(Reports, TreeRecomputes) {
  const Json r = roundtrip(tree_report(load_document(data("entry_tree.json"))));
  const auto built = parse_document(r["input"]).tree->build();
  const auto& s = r["results"]["solution"];
  ProperVector pv;
  pv.profile = profile_from_json(s["profile"], built.tree.layout());
  pv.nu = vec(s["nu"]);
  pv.y = vec(s["y"]);
  for (const auto& c : s["classes"]) {
    pv.classes.push_back({c["probability"].get<double>(), vec(c["conditional"]), c["source"]});
  }
  const Vector y = strategy_values(built.tree, pv.profile, pv.nu, built.wrappers);
  EXPECT_EQ(y, pv.y);
  EXPECT_EQ(equilibrium_residual(pv.profile, y, r["settings"]["support_tol"].get<double>()),
            certificate(r, "deviation"));
  const ProperCheck pc = check_proper(built.tree, built.continuation, built.wrappers, pv);
  EXPECT_EQ(std::max({pc.y_error, pc.hull_distance, pc.conditional_error}), certificate(r, "proper vector"));
}

TEST(Reports, NeymanRecomputes) {
  const Json r = roundtrip(neyman_report(load_document(data("coordination_neyman.json"))));
  const NeymanDocument nd = *parse_document(r["input"]).neyman;
  // Deviation gains from the recorded profile and continuation vector.
  const NeymanTree nt = build_neyman_tree(nd.spec);
  const auto& s = r["results"]["solution"];
  const MixedProfile x = profile_from_json(s["profile"], nt.tree.layout());
  const Vector y = strategy_values(nt.tree, x, vec(s["nu"]), nt.wrappers);
  EXPECT_NEAR(equilibrium_residual(x, y, r["settings"]["support_tol"].get<double>()),
              certificate(r, "deviation gains"), 1e-12);
  // The other flags from a fresh run with the recorded settings.
  NeymanConfig cfg;
  cfg.seed = r["settings"]["seed"].get<std::uint64_t>();
  cfg.verify_tol = r["settings"]["verify_tol"].get<double>();
  cfg.selection_resolution = r["settings"]["selection_resolution"].get<std::size_t>();
  cfg.analysis_resolution = r["settings"]["analysis_resolution"].get<std::size_t>();
  cfg.plans.posterior_resolution = r["settings"]["posterior_resolution"].get<std::size_t>();
  cfg.plans.max_families = r["settings"]["max_families"].get<std::size_t>();
  cfg.plans.tolerance = r["settings"]["plan_tolerance"].get<double>();
  const NeymanSolution sol = solve_neyman(nd.spec, cfg);
  EXPECT_EQ(profile_json(sol.composite.vector.profile), s["profile"]);
  const NeymanVerification v = verify_neyman_equilibrium(sol);
  EXPECT_EQ(v.star_error, certificate(r, "star property"));
  EXPECT_TRUE(r["passed"].get<bool>());
}

TEST(Reports, PlanRecomputes) {
  const Json r = roundtrip(plan_report(load_document(data("coordination_neyman.json"))));
  const NeymanDocument nd = *parse_document(r["input"]).neyman;
  const auto& p = r["results"]["plan"];
  JointPlan plan;
  plan.prior = vec(p["prior"]);
  plan.posteriors = p["posteriors"].get<std::vector<Vector>>();
  plan.weights = vec(p["weights"]);
  plan.agreements = p["agreements"].get<std::vector<Vector>>();
  plan.signals = p["signals"].get<std::vector<std::vector<std::size_t>>>();
  plan.signal_probability = p["signal_probability"].get<std::vector<Vector>>();
  plan.y = vec(p["y"]);
  plan.payoff_one = vec(p["payoff_one"]);
  plan.payoff_two = vec(p["payoff_two"]);
  const StateGameAnalysis an(nd.spec.games, r["settings"]["envelope_resolution"].get<std::size_t>());
  const PlanCheck c = check_joint_plan(plan, an, r["settings"]["tolerance"].get<double>());
  EXPECT_TRUE(c.ok());
  EXPECT_EQ(c.condition2_error, certificate(r, "player one indifference"));
  EXPECT_EQ(c.payoff_error, certificate(r, "payoffs"));
}

TEST(Reports, FailedCertificateFailsTheReport) {
  SolveOptions opt;
  opt.solver.tolerance = -1.0;  // nothing can pass
  opt.solver.enumerate_supports = false;
  opt.solver.restarts = 1;
  opt.solver.max_iterations = 3;
  EXPECT_THROW(solve_report(load_document(data("voting1.json")), opt), BudgetExhausted);
  Json doc = emit_document(load_document(data("coordination_neyman.json")));
  doc["plan"]["y"] = {2.5, 2};
  const Json r = plan_report(parse_document(doc));
  EXPECT_FALSE(r["passed"].get<bool>());
}
