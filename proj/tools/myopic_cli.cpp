// Command-line front end: one subcommand per solver, a short text summary on
// stdout and, with --json-out, the full report.
//
// Exit codes: 0 all certificates pass, 1 some certificate fails,
// 2 configuration or input error, 3 numeric failure.

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "myopic/all.hpp"

using namespace myopic;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

std::string vec(const Json& j) {
  std::string out = "(";
  for (std::size_t i = 0; i < j.size(); ++i) out += (i ? ", " : "") + num(j[i].get<double>());
  return out + ")";
}

std::string profile(const Json& j) {
  std::string out;
  for (std::size_t n = 0; n < j.size(); ++n) out += (n ? " " : "") + vec(j[n]);
  return out;
}

/// Comma-separated numbers; each entry may be a constant expression.
Vector parse_vector(const std::string& text) {
  Vector out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_expression(item, {}).evaluate(Vector{}));
  if (out.empty()) throw InvalidInput("empty vector");
  return out;
}

void print_summary(const Json& r) {
  const std::string cmd = r["command"];
  const Json& res = r["results"];
  if (cmd == "project") {
    const Json& x = res["projection"];
    for (std::size_t i = 0; i < x.size(); ++i) std::cout << (i ? "," : "") << num(x[i].get<double>());
    std::cout << "\n";
  } else if (cmd == "solve") {
    std::cout << "myopic equilibria: " << res["equilibria"].size() << "\n";
    for (const auto& e : res["equilibria"]) {
      std::cout << "  x = " << profile(e["profile"]) << "  payoffs " << vec(e["payoffs"])
                << "  aggregate " << vec(e["aggregate"]) << "  residual " << num(e["residual"])
                << "  [" << e["method"].get<std::string>() << "]\n";
    }
    if (res.contains("optimum")) {
      std::cout << "aggregate optimum: x = " << profile(res["optimum"]["profile"]) << "  value "
                << num(res["optimum"]["value"]) << "\n";
    }
    if (res.contains("nash_contrast")) {
      const auto& c = res["nash_contrast"];
      std::cout << "nash contrast on 1/" << c["mesh"].get<std::size_t>()
                << " mesh: smallest largest best-reply gain " << num(c["min_max_gain"]) << " at "
                << profile(c["profile"]) << "\n";
    }
  } else if (cmd == "structure") {
    std::cout << "space dimension " << res["dimension"].get<std::size_t>() << ", elements checked "
              << res["elements"].size() << "\n";
    const auto& first = res["elements"][0];
    std::cout << "  phi(w) profile " << profile(first["profile"]) << "  membership "
              << num(first["membership"]) << "\n";
  } else if (cmd == "value") {
    std::cout << "a*(p) = " << num(res["a_star"]["value"]) << "  b*(p) = " << num(res["b_star"]["value"])
              << "  vex b*(p) = " << num(res["vex_b_star"]) << "\n";
  } else if (cmd == "tree-solve" || cmd == "neyman-solve") {
    const auto& sol = res["solution"];
    std::cout << "profile " << profile(sol["profile"]) << "\n";
    for (std::size_t c = 0; c < sol["classes"].size(); ++c) {
      const auto& a = sol["classes"][c];
      std::cout << "  class " << c << ": probability " << num(a["probability"]) << "  conditional "
                << vec(a["conditional"]) << "  [" << a["source"].get<std::string>() << "]\n";
    }
    if (res.contains("warnings")) {
      for (const auto& w : res["warnings"]) std::cout << "  warning: " << w.get<std::string>() << "\n";
    }
  } else if (cmd == "verify-plan") {
    const auto& p = res["plan"];
    std::cout << "plan with " << p["posteriors"].size() << " posterior(s): player one "
              << vec(p["payoff_one"]) << ", player two " << vec(p["payoff_two"]) << "\n";
  }
  for (const auto& c : r["certificates"]) {
    std::cout << (c["passed"].get<bool>() ? "  ok    " : "  FAIL  ") << c["name"].get<std::string>()
              << " " << num(c["value"]) << " (tolerance " << num(c["tolerance"]) << ")\n";
  }
  std::cout << (r["passed"].get<bool>() ? "passed" : "FAILED") << " in " << num(r["seconds"]) << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Myopic equilibrium solvers"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string json_out;
  app.add_option("--json-out", json_out, "Write the full report as JSON ('-' for stdout)");

  std::string vector_text, file;

  auto* project = app.add_subcommand("project", "Project a vector onto the simplex");
  project->add_option("vector", vector_text, "Comma-separated entries")->required();

  SolveOptions solve_opt;
  auto* solve = app.add_subcommand("solve", "Myopic equilibria of a myopic document");
  solve->add_option("file", file)->required()->check(CLI::ExistingFile);
  solve->add_option("--tol", solve_opt.solver.tolerance, "Accepted residual")->capture_default_str();
  solve->add_option("--restarts", solve_opt.solver.restarts, "Random starts")->capture_default_str();
  solve->add_option("--seed", solve_opt.solver.seed)->capture_default_str();
  solve->add_option("--mesh", solve_opt.solver.mesh, "Start mesh resolution")->capture_default_str();

  StructureOptions structure_opt;
  bool roundtrip = false;
  auto* structure = app.add_subcommand("structure", "Graph homeomorphism checks for a myopic document");
  structure->add_option("file", file)->required()->check(CLI::ExistingFile);
  structure->add_flag("--check-roundtrip", roundtrip, "Check psi(phi(w)) = w on random elements too");
  structure->add_option("--samples", structure_opt.samples)->capture_default_str();
  structure->add_option("--seed", structure_opt.seed)->capture_default_str();

  std::string p_text;
  auto* value = app.add_subcommand("value", "a*, b* and vex b* for a neyman document's stage games");
  value->add_option("file", file)->required()->check(CLI::ExistingFile);
  value->add_option("--p", p_text, "Distribution over states (default: the prior)");

  TreeOptions tree_opt;
  auto* tree = app.add_subcommand("tree-solve", "Equilibrium of a truncated tree with continuations");
  tree->add_option("file", file)->required()->check(CLI::ExistingFile);
  tree->add_option("--eps-min", tree_opt.eps_min)->capture_default_str();
  tree->add_option("--eps-max", tree_opt.eps_max)->capture_default_str();
  tree->add_option("--seed", tree_opt.composite.solver.seed)->capture_default_str();

  NeymanOptions neyman_opt;
  auto* neyman = app.add_subcommand("neyman-solve", "Solve and verify a Neyman game");
  neyman->add_option("file", file)->required()->check(CLI::ExistingFile);
  neyman->add_option("--seed", neyman_opt.config.seed)->capture_default_str();
  neyman->add_option("--selection-resolution", neyman_opt.config.selection_resolution,
                     "Interpolation grid (0: automatic)")
      ->capture_default_str();

  double plan_tol = 1e-7;
  auto* verify = app.add_subcommand("verify-plan", "Check the joint plan stored in a neyman document");
  verify->add_option("file", file)->required()->check(CLI::ExistingFile);
  verify->add_option("--tol", plan_tol)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    Json report;
    if (*project) {
      report = project_report(parse_vector(vector_text));
    } else if (*solve) {
      report = solve_report(load_document(file), solve_opt);
    } else if (*structure) {
      structure_opt.check_roundtrip = roundtrip;
      report = structure_report(load_document(file), structure_opt);
    } else if (*value) {
      const GameDocument doc = load_document(file);
      std::optional<Vector> p;
      if (!p_text.empty()) p = parse_vector(p_text);
      report = value_report(doc, p);
    } else if (*tree) {
      report = tree_report(load_document(file), tree_opt);
    } else if (*neyman) {
      report = neyman_report(load_document(file), neyman_opt);
    } else if (*verify) {
      report = plan_report(load_document(file), plan_tol);
    }
    if (json_out == "-") {
      std::cout << report.dump(2) << "\n";
    } else {
      print_summary(report);
      if (!json_out.empty()) {
        std::ofstream out(json_out);
        if (!out) throw ConfigError("cannot write " + json_out);
        out << report.dump(2) << "\n";
      }
    }
    return report["passed"].get<bool>() ? 0 : kExitFailed;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
