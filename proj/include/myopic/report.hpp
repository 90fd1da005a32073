#pragma once

// Machine-readable reports for the command-line subcommands. Every report
// embeds its input (document or vector), the settings and seeds used, the
// results, and a list of certificates; each certificate is a violation
// measure that passes when it is at most its tolerance.

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "document.hpp"
#include "matrix_tools.hpp"
#include "myopic.hpp"
#include "neyman.hpp"
#include "simplex.hpp"
#include "structure.hpp"
#include "tree.hpp"

namespace myopic {

inline constexpr int kReportVersion = 1;

inline Json profile_json(const MixedProfile& x) {
  Json out = Json::array();
  for (std::size_t n = 0; n < x.layout().players(); ++n) {
    const auto b = x.block(n);
    out.push_back(Vector(b.begin(), b.end()));
  }
  return out;
}

inline MixedProfile profile_from_json(const Json& j, const Layout& layout) {
  Vector c;
  for (const auto& block : j) {
    for (const auto& v : block) c.push_back(v.get<double>());
  }
  return MixedProfile(layout, std::move(c));
}

class Report {
 public:
  Report(std::string command, Json input) {
    j_["report_version"] = kReportVersion;
    j_["schema_version"] = kSchemaVersion;
    j_["command"] = std::move(command);
    j_["input"] = std::move(input);
    j_["settings"] = Json::object();
    j_["results"] = Json::object();
    j_["certificates"] = Json::array();
  }

  Json& settings() { return j_["settings"]; }
  Json& results() { return j_["results"]; }

  void certify(const std::string& name, double value, double tolerance) {
    j_["certificates"].push_back(
        {{"name", name}, {"value", value}, {"tolerance", tolerance}, {"passed", value <= tolerance}});
  }

  Json finish(double seconds) {
    bool ok = true;
    for (const auto& c : j_["certificates"]) ok = ok && c["passed"].get<bool>();
    j_["passed"] = ok;
    j_["seconds"] = seconds;
    return j_;
  }

 private:
  Json j_;
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline const MyopicDocument& need_myopic(const GameDocument& d) {
  if (!d.myopic) throw ConfigError("expected a document of kind 'myopic', got '" + d.kind + "'");
  return *d.myopic;
}

inline const TreeDocument& need_tree(const GameDocument& d) {
  if (!d.tree) throw ConfigError("expected a document of kind 'tree', got '" + d.kind + "'");
  return *d.tree;
}

inline const NeymanDocument& need_neyman(const GameDocument& d) {
  if (!d.neyman) throw ConfigError("expected a document of kind 'neyman', got '" + d.kind + "'");
  return *d.neyman;
}

/// Largest violation of the face characterization of r(y) = x: with
/// d = y - x, every support coordinate of x must carry max_j d_j.
inline double characterization_violation(const Vector& y, const Vector& x) {
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < y.size(); ++i) top = std::max(top, y[i] - x[i]);
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (x[i] != 0.0) worst = std::max(worst, top - (y[i] - x[i]));
  }
  return worst;
}

inline Json plan_json(const JointPlan& p) {
  return {{"prior", p.prior},
          {"posteriors", p.posteriors},
          {"weights", p.weights},
          {"agreements", p.agreements},
          {"signals", p.signals},
          {"signal_probability", p.signal_probability},
          {"y", p.y},
          {"payoff_one", p.payoff_one},
          {"payoff_two", p.payoff_two},
          {"origin", p.origin}};
}

inline Json plan_check_json(const PlanCheck& c) {
  return {{"hull_error", c.hull_error},
          {"bayes_error", c.bayes_error},
          {"condition1_slack", c.condition1_slack},
          {"condition2_error", c.condition2_error},
          {"condition3_excess", c.condition3_excess},
          {"payoff_error", c.payoff_error},
          {"ir_one_min_slack", c.ir.min_slack},
          {"signals_ok", c.signals_ok}};
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline Json project_report(const Vector& y) {
  const detail::Stopwatch clock;
  Report r("project", y);
  const Vector x = project_simplex(y);
  const FaceDecomposition dec = face_decompose(y);
  r.results()["projection"] = x;
  r.results()["support"] = dec.support;
  r.certify("characterization", detail::characterization_violation(y, x), 1e-12);
  return r.finish(clock.seconds());
}

struct SolveOptions {
  SolverConfig solver;
  std::size_t contrast_mesh = 100;     // Nash contrast mesh for several players
  std::size_t contrast_cap = 1000000;  // skip the contrast above this many mesh points
};

inline Json solve_report(const GameDocument& doc, const SolveOptions& opt = {}) {
  const detail::Stopwatch clock;
  const MyopicDocument& md = detail::need_myopic(doc);
  const PayoffFamily w = md.family();
  Report r("solve", emit_document(doc));
  const SolverConfig& cfg = opt.solver;
  r.settings() = {{"tolerance", cfg.tolerance},   {"support_tol", cfg.support_tol},
                  {"restarts", cfg.restarts},     {"max_iterations", cfg.max_iterations},
                  {"mesh", cfg.mesh},             {"seed", cfg.seed},
                  {"contrast_mesh", opt.contrast_mesh}};
  Json eqs = Json::array();
  for (const SolveReport& s : solve_myopic(w, cfg)) {
    eqs.push_back({{"profile", profile_json(s.profile)},
                   {"payoffs", s.witness},
                   {"aggregate", aggregate_payoffs(s.profile, w)},
                   {"residual", s.residual},
                   {"method", s.method}});
    r.certify("equilibrium " + std::to_string(eqs.size()) + " residual", s.residual, cfg.tolerance);
  }
  r.results()["equilibria"] = eqs;
  const Layout& layout = w.layout();
  if (layout.players() == 1) {
    const AggregateOptimum o = aggregate_optimum(w);
    r.results()["optimum"] = {{"profile", profile_json(o.profile)}, {"value", o.value}};
  } else if (profile_mesh_size(layout, opt.contrast_mesh, opt.contrast_cap) <= opt.contrast_cap) {
    const NashContrast c = nash_contrast(w, opt.contrast_mesh);
    r.results()["nash_contrast"] = {{"mesh", c.mesh_resolution},
                                    {"profile", profile_json(c.best_profile)},
                                    {"min_max_gain", c.min_max_gain},
                                    {"aggregate", c.aggregate}};
  }
  return r.finish(clock.seconds());
}

struct StructureOptions {
  std::size_t mesh = 0;  // 0: the largest of 50, 20, 10, 5 with at most 20000 mesh points
  bool check_roundtrip = true;
  std::size_t samples = 20;  // random elements checked besides the document's family
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
};

inline std::size_t structure_mesh(const Layout& layout, std::size_t requested) {
  if (requested) return requested;
  for (std::size_t m : {50, 20, 10, 5}) {
    if (profile_mesh_size(layout, m, 20000) <= 20000) return m;
  }
  return 2;
}

/// Round trip of the document's family in the space spanned by the constants
/// and that family, followed by random elements of the same space.
inline Json structure_report(const GameDocument& doc, const StructureOptions& opt = {}) {
  const detail::Stopwatch clock;
  const MyopicDocument& md = detail::need_myopic(doc);
  const PayoffFamily w = md.family();
  const Layout layout = w.layout();
  const std::size_t mesh = structure_mesh(layout, opt.mesh);
  const FunctionSpace space(layout, {w}, mesh);
  Report r("structure", emit_document(doc));
  r.settings() = {{"mesh", mesh},
                  {"check_roundtrip", opt.check_roundtrip},
                  {"samples", opt.check_roundtrip ? opt.samples : 0},
                  {"tolerance", opt.tolerance},
                  {"seed", opt.seed},
                  {"base_point", "barycenter"}};
  const MixedProfile x0 = MixedProfile::barycenter(layout);
  std::vector<Vector> elements;
  Vector own(space.dimension(), 0.0);
  if (space.dimension() > layout.total()) {
    own.back() = 1.0;
  } else {
    // The family is constant: its coefficients are its values.
    const Vector v = w(x0);
    std::copy(v.begin(), v.end(), own.begin());
  }
  elements.push_back(own);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (std::size_t k = 0; opt.check_roundtrip && k < opt.samples; ++k) {
    Vector c(space.dimension());
    for (double& v : c) v = u(rng);
    elements.push_back(std::move(c));
  }
  Json rows = Json::array();
  double worst = 0.0, membership = 0.0, bound_excess = 0.0;
  for (const Vector& c : elements) {
    const RoundTripReport rt = check_round_trip(space, c, x0);
    const GraphPoint p = phi(space, c, x0);
    rows.push_back({{"coefficients", c},
                    {"profile", profile_json(p.profile)},
                    {"psi_phi", rt.psi_phi_distance},
                    {"phi_psi", rt.phi_psi_distance},
                    {"membership", rt.membership_residual},
                    {"shift_norm", rt.shift_norm},
                    {"bound", rt.bound},
                    {"psi_shift_norm", rt.psi_shift_norm},
                    {"psi_bound", rt.psi_bound}});
    worst = std::max({worst, rt.psi_phi_distance, rt.phi_psi_distance});
    membership = std::max(membership, rt.membership_residual);
    bound_excess = std::max({bound_excess, rt.shift_norm - rt.bound, rt.psi_shift_norm - rt.psi_bound});
  }
  r.results()["dimension"] = space.dimension();
  r.results()["elements"] = rows;
  r.certify("graph membership", membership, opt.tolerance);
  if (opt.check_roundtrip) {
    r.certify("round trip", worst, opt.tolerance);
    r.certify("norm bounds", std::max(bound_excess, 0.0), 0.0);
  }
  return r.finish(clock.seconds());
}

/// a*, b* and vex(b*) at p for a neyman document's stage games.
inline Json value_report(const GameDocument& doc, const std::optional<Vector>& p_opt = std::nullopt) {
  const detail::Stopwatch clock;
  const NeymanDocument& nd = detail::need_neyman(doc);
  const Vector p = p_opt ? *p_opt : nd.spec.prior;
  if (p.size() != nd.spec.states()) throw DimensionError("--p must have one entry per state");
  if (!is_simplex_point(p, 1e-9)) throw InvalidInput("--p must be a probability vector");
  const StateGameAnalysis an(nd.spec.games);
  Report r("value", emit_document(doc));
  r.settings() = {{"p", p}, {"envelope_resolution", an.resolution()}};
  const GameValue a = game_value(an.matrices().a_mix(p));
  const GameValue b = game_value(transpose(an.matrices().b_mix(p)));
  r.results()["a_star"] = {{"value", a.value}, {"one", a.row_strategy}, {"two", a.col_strategy}};
  r.results()["b_star"] = {{"value", b.value}, {"one", b.col_strategy}, {"two", b.row_strategy}};
  r.results()["vex_b_star"] = an.vex_b()(p);
  r.certify("a* duality gap", a.col_guarantee - a.row_guarantee, 1e-9);
  r.certify("b* duality gap", b.col_guarantee - b.row_guarantee, 1e-9);
  r.certify("vex below b*", std::max(0.0, an.vex_b()(p) - b.value), 1e-9);
  return r.finish(clock.seconds());
}

struct TreeOptions {
  CompositeConfig composite;
  double eps_max = 0.125;
  double eps_min = std::ldexp(1.0, -12);
};

inline std::vector<double> halving_schedule(double eps_max, double eps_min) {
  if (!(eps_max > 0.0) || !(eps_min > 0.0) || eps_min > eps_max) {
    throw ConfigError("need 0 < eps-min <= eps-max");
  }
  std::vector<double> s;
  for (double e = eps_max; e >= eps_min * (1.0 - 1e-12); e *= 0.5) s.push_back(e);
  return s;
}

inline Json proper_json(const ProperVector& pv) {
  Json classes = Json::array();
  for (const auto& c : pv.classes) {
    classes.push_back(
        {{"probability", c.probability}, {"conditional", c.conditional}, {"source", c.source}});
  }
  return {{"profile", profile_json(pv.profile)}, {"y", pv.y}, {"nu", pv.nu}, {"classes", classes}};
}

inline Json tree_report(const GameDocument& doc, const TreeOptions& opt = {}) {
  const detail::Stopwatch clock;
  const TreeDocument& td = detail::need_tree(doc);
  const auto built = td.build();
  CompositeConfig cc = opt.composite;
  cc.schedule = halving_schedule(opt.eps_max, opt.eps_min);
  Report r("tree-solve", emit_document(doc));
  r.settings() = {{"schedule", cc.schedule},          {"cluster_tol", cc.cluster_tol},
                  {"certificate_tol", cc.certificate_tol}, {"support_tol", cc.support_tol},
                  {"seed", cc.solver.seed},           {"solver_tolerance", cc.solver.tolerance}};
  const CompositeSolution sol = solve_composite(built.tree, built.continuation, built.wrappers, cc);
  const ProperCheck pc = check_proper(built.tree, built.continuation, built.wrappers, sol.vector);
  Json trace = Json::array();
  for (const auto& s : sol.trace) {
    trace.push_back({{"eps", s.eps}, {"profile", profile_json(s.profile)}, {"residual", s.residual},
                     {"method", s.method}});
  }
  Json strategies = Json::array();
  for (std::size_t n = 0; n < built.tree.players(); ++n) {
    Json names = Json::array();
    for (std::size_t s = 0; s < built.tree.strategy_count(n); ++s) {
      std::string label;
      const auto acts = built.tree.decode_strategy(n, s);
      for (std::size_t c = 0; c < acts.size(); ++c) {
        const auto& cell = built.tree.spec().info[n][c];
        if (c) label += ",";
        label += built.tree.spec().names[built.tree.children(cell[0])[acts[c]]];
      }
      names.push_back(label);
    }
    strategies.push_back(names);
  }
  Json endpoints = Json::array();
  for (std::size_t e = 0; e < built.tree.endpoint_count(); ++e) {
    endpoints.push_back(built.tree.spec().names[built.tree.endpoints()[e]]);
  }
  r.results()["strategies"] = strategies;
  r.results()["endpoints"] = endpoints;
  r.results()["solution"] = proper_json(sol.vector);
  r.results()["extraction"] = sol.extraction;
  r.results()["trace"] = trace;
  r.results()["warnings"] = sol.warnings;
  r.certify("deviation", sol.certificate, cc.certificate_tol);
  r.certify("proper vector", std::max({pc.y_error, pc.hull_distance, pc.conditional_error}), 1e-9);
  return r.finish(clock.seconds());
}

struct NeymanOptions {
  NeymanConfig config;
};

inline Json neyman_report(const GameDocument& doc, const NeymanOptions& opt = {}) {
  const detail::Stopwatch clock;
  const NeymanDocument& nd = detail::need_neyman(doc);
  const NeymanConfig& cfg = opt.config;
  Report r("neyman-solve", emit_document(doc));
  r.settings() = {{"seed", cfg.seed},
                  {"verify_tol", cfg.verify_tol},
                  {"selection_resolution", cfg.selection_resolution},
                  {"analysis_resolution", cfg.analysis_resolution},
                  {"posterior_resolution", cfg.plans.posterior_resolution},
                  {"max_families", cfg.plans.max_families},
                  {"plan_tolerance", cfg.plans.tolerance},
                  {"certificate_tol", cfg.composite.certificate_tol},
                  {"support_tol", cfg.composite.support_tol}};
  const NeymanSolution sol = solve_neyman(nd.spec, cfg);
  const NeymanVerification v = verify_neyman_equilibrium(sol);
  Json classes = Json::array();
  const auto& t = sol.tree->tree;
  for (std::size_t c = 0; c < t.classes().size(); ++c) {
    classes.push_back({{"history", sol.tree->class_history[c]}, {"states", sol.tree->class_states[c]}});
  }
  r.results()["classes"] = classes;
  r.results()["solution"] = proper_json(sol.composite.vector);
  r.results()["composite_certificate"] = sol.composite.certificate;
  r.results()["extraction"] = sol.composite.extraction;
  r.results()["verification"] = {{"strategy_values", v.strategy_values},
                                 {"gains", v.gains},
                                 {"supported_gain", v.supported_gain},
                                 {"recompute_error", v.recompute_error},
                                 {"star_error", v.star_error},
                                 {"star_checks", v.star_checks},
                                 {"hull_distance", v.hull_distance},
                                 {"ir_slack_one", v.ir_slack_one},
                                 {"ir_slack_two", v.ir_slack_two},
                                 {"deviation_ok", v.deviation_ok},
                                 {"star_ok", v.star_ok},
                                 {"hull_ok", v.hull_ok},
                                 {"ir_ok", v.ir_ok}};
  r.certify("deviation gains", v.supported_gain, v.tol);
  r.certify("star property", v.star_error, 1e-10);
  double hull = 0.0, ir = 0.0;
  for (double d : v.hull_distance) hull = std::max(hull, d);
  for (double s : v.ir_slack_one) ir = std::max(ir, -s);
  for (double s : v.ir_slack_two) ir = std::max(ir, -s);
  r.certify("hull membership", hull, 1e-7);
  r.certify("individual rationality", std::max(ir, 0.0), 1e-7);
  return r.finish(clock.seconds());
}

/// Checks the plan stored in a neyman document.
inline Json plan_report(const GameDocument& doc, double tol = 1e-7) {
  const detail::Stopwatch clock;
  const NeymanDocument& nd = detail::need_neyman(doc);
  const JointPlan plan = nd.joint_plan();
  const StateGameAnalysis an(nd.spec.games);
  const PlanCheck c = check_joint_plan(plan, an, tol);
  Report r("verify-plan", emit_document(doc));
  r.settings() = {{"tolerance", tol}, {"envelope_resolution", an.resolution()}};
  r.results()["plan"] = detail::plan_json(plan);
  r.results()["check"] = detail::plan_check_json(c);
  r.certify("splitting", c.hull_error, tol);
  r.certify("bayes consistency", c.bayes_error, tol);
  r.certify("player two rationality", std::max(0.0, -c.condition1_slack), tol);
  r.certify("player one indifference", c.condition2_error, tol);
  r.certify("player one null states", std::max(0.0, c.condition3_excess), tol);
  r.certify("payoffs", c.payoff_error, tol);
  r.certify("player one individual rationality", std::max(0.0, -c.ir.min_slack), tol);
  r.certify("signals", c.signals_ok ? 0.0 : 1.0, 0.0);
  return r.finish(clock.seconds());
}

}  // namespace myopic
