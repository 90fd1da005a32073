// Acceptance run: one PASS/FAIL line per criterion with its measured runtime.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "myopic/all.hpp"
#include "oracles.hpp"
#include "tree_builders.hpp"

using namespace myopic;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream note;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) note << "failed: ";
      else note << "; ";
      note << what;
      ok = false;
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_seconds,
               const std::function<void(Check&)>& body) {
  Check out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.require(false, std::string("exception: ") + e.what());
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.require(sec < limit_seconds, "runtime " + std::to_string(sec) + " s over " +
                                       std::to_string(limit_seconds) + " s");
  std::cout << (out.ok ? "PASS " : "FAIL ") << id << " " << name << " (" << sec << " s)";
  const std::string note = out.note.str();
  if (!note.empty()) std::cout << " " << note;
  std::cout << std::endl;
  if (!out.ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t m, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(m, Vector(n));
  for (auto& r : a) {
    for (double& v : r) v = u(rng);
  }
  return a;
}

double nash_gap(const Matrix& a, const Matrix& b, const MixedProfile& p) {
  const auto x = p.block(0), y = p.block(1);
  double best_r = -1e300, best_c = -1e300, cur_r = 0, cur_c = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double s = 0;
    for (std::size_t j = 0; j < y.size(); ++j) s += a[i][j] * y[j];
    best_r = std::max(best_r, s);
    cur_r += x[i] * s;
  }
  for (std::size_t j = 0; j < y.size(); ++j) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += x[i] * b[i][j];
    best_c = std::max(best_c, s);
    cur_c += y[j] * s;
  }
  return std::max(best_r - cur_r, best_c - cur_c);
}

// Least-squares slope of log(d) against log(T).
double loglog_slope(const Vector& ts, const Vector& ds) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mx += std::log(ts[i]);
    my += std::log(ds[i]);
  }
  mx /= static_cast<double>(ts.size());
  my /= static_cast<double>(ts.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxy += (std::log(ts[i]) - mx) * (std::log(ds[i]) - my);
    sxx += (std::log(ts[i]) - mx) * (std::log(ts[i]) - mx);
  }
  return sxy / sxx;
}

std::string data(const std::string& name) { return std::string(MYOPIC_DATA_DIR) + "/" + name; }

}  // namespace

int main() {
  std::cout.precision(6);

  criterion(1, "matching pennies with bonus", 1.0, [](Check& o) {
    const PayoffFamily w = fixture::matching_pennies_bonus();
    const auto reports = solve_myopic(w);
    bool found = false;
    for (const auto& r : reports) {
      const Vector wx = w(r.profile);
      bool half = true;
      for (double v : wx) half = half && std::abs(v - 0.5) <= 1e-6;
      if (r.residual <= 1e-6 && half &&
          max_abs_diff(r.profile.coords(), Vector{0.5, 0.5, 0.5, 0.5}) <= 1e-6) {
        found = true;
      }
    }
    o.require(found, "no equilibrium at the barycenter with payoffs 1/2");
    // The contrast runs outside the solver's time budget.
    const auto t = std::chrono::steady_clock::now();
    const NashContrast c = nash_contrast(w, 100);
    o.note << "nash contrast min max gain " << c.min_max_gain << " in " << seconds_since(t) << " s";
    o.require(c.min_max_gain > 1e-3, "a mesh profile is a Nash equilibrium of the aggregate");
  });

  criterion(2, "voting game 1", 1.0, [](Check& o) {
    const PayoffFamily w = fixture::voting_one();
    const auto reports = solve_myopic(w);
    o.require(reports.size() == 1, "expected a unique equilibrium");
    o.require(std::abs(reports[0].profile(0, 0) - 1.0) <= 1e-6, "p != 1");
    o.require(std::abs(aggregate_payoffs(reports[0].profile, w)[0] + 4.0) <= 1e-6, "payoff != -4");
    const AggregateOptimum opt = aggregate_optimum(w);
    o.require(std::abs(opt.profile(0, 0)) <= 1e-6, "optimum p != 0");
    o.require(std::abs(opt.value) <= 1e-6, "optimum value != 0");
  });

  criterion(3, "voting game 2", 1.0, [](Check& o) {
    const PayoffFamily w = fixture::voting_two();
    const auto reports = solve_myopic(w);
    bool found = false;
    for (const auto& r : reports) {
      const Vector wx = w(r.profile);
      found = found || (std::abs(r.profile(0, 0) - 0.2) <= 1e-6 && std::abs(wx[0]) <= 1e-6 &&
                        std::abs(wx[1]) <= 1e-6);
    }
    o.require(found, "no equilibrium at p = 0.2 with zero payoffs");
    const AggregateOptimum opt = aggregate_optimum(w);
    o.require(std::abs(opt.profile(0, 0) - 0.1) <= 1e-4, "optimum p != 0.1");
    o.require(std::abs(opt.value - 0.05) <= 1e-6, "optimum value != 0.05");
  });

  criterion(4, "retraction characterization", 10.0, [](Check& o) {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g(0.0, 2.0);
    std::bernoulli_distribution coin(0.5);
    std::size_t bad_if = 0, bad_only_if = 0, bad_oracle = 0;
    double worst_oracle = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
      const std::size_t d = 2 + trial % 5;
      // If: x in a face and d maximal on supp(x) give r(x + d) = x.
      Vector x = oracle::random_simplex_point(d, rng);
      for (std::size_t i = 1; i < d; ++i) {
        if (coin(rng)) x[i] = 0.0;
      }
      double s = 0.0;
      for (double v : x) s += v;
      for (double& v : x) v /= s;
      const double top = g(rng);
      Vector z(d);
      for (std::size_t i = 0; i < d; ++i) z[i] = x[i] + (x[i] > 0.0 ? top : top - std::abs(g(rng)));
      if (max_abs_diff(project_simplex(z), x) > 1e-12) ++bad_if;
      // Only if: r(z) = x forces d = z - x maximal on supp(x).
      for (double& v : z) v = g(rng);
      const Vector p = project_simplex(z);
      double dmax = -1e300;
      for (std::size_t i = 0; i < d; ++i) dmax = std::max(dmax, z[i] - p[i]);
      for (std::size_t i = 0; i < d; ++i) {
        if (p[i] > 0.0 && dmax - (z[i] - p[i]) > 1e-12) {
          ++bad_only_if;
          break;
        }
      }
      const double e = max_abs_diff(p, oracle::face_enumeration_projection(z));
      worst_oracle = std::max(worst_oracle, e);
      if (e > 1e-9) ++bad_oracle;
    }
    o.note << "oracle distance " << worst_oracle;
    o.require(bad_if == 0, std::to_string(bad_if) + " 'if' checks");
    o.require(bad_only_if == 0, std::to_string(bad_only_if) + " 'only if' checks");
    o.require(bad_oracle == 0, std::to_string(bad_oracle) + " oracle mismatches");
  });

  criterion(5, "graph homeomorphism", 30.0, [](Check& o) {
    const FunctionSpace space = multilinear_space(Layout({2, 2}));
    const MixedProfile x0 = MixedProfile::barycenter(space.layout());
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0, membership = 0.0;
    bool bounds = true, probe = true;
    for (int k = 0; k < 100; ++k) {
      Vector c(space.dimension());
      const double scale = 1.0 + k % 10;
      for (double& v : c) v = scale * u(rng);
      const RoundTripReport r = check_round_trip(space, c, x0);
      worst = std::max({worst, r.psi_phi_distance, r.phi_psi_distance});
      membership = std::max(membership, r.membership_residual);
      bounds = bounds && r.shift_norm <= r.bound && r.psi_shift_norm <= r.psi_bound;
      if (k < 10) {
        const Vector m = properness_probe(space, c, {1, 10, 100, 1000}, x0);
        for (std::size_t i = 1; i < m.size(); ++i) probe = probe && m[i] >= m[i - 1];
      }
    }
    o.note << "round trip " << worst << ", membership " << membership;
    o.require(worst <= 1e-8, "round trip");
    o.require(membership <= 1e-8, "graph membership");
    o.require(bounds, "norm bounds");
    o.require(probe, "properness probe decreased");
  });

  criterion(6, "multilinear reduction", 60.0, [](Check& o) {
    std::mt19937_64 rng(47);
    std::size_t uncovered = 0, spurious = 0, games = 0;
    for (int g = 0; g < 70; ++g) {
      const std::size_t m = g < 50 ? 2 : 3;
      const Matrix a = random_matrix(rng, m, m), b = random_matrix(rng, m, m);
      const PayoffFamily w = multilinear_family(StrategicGame::bimatrix(a, b));
      const auto reports = solve_myopic(w);
      const NashResult nash = nash_bimatrix(a, b);
      ++games;
      for (const auto& e : nash.equilibria) {
        Vector c = e.row;
        c.insert(c.end(), e.col.begin(), e.col.end());
        bool hit = false;
        for (const auto& r : reports) hit = hit || max_abs_diff(r.profile.coords(), c) <= 1e-4;
        uncovered += !hit;
      }
      for (const auto& r : reports) {
        bool hit = false;
        for (const auto& e : nash.equilibria) {
          Vector c = e.row;
          c.insert(c.end(), e.col.begin(), e.col.end());
          hit = hit || max_abs_diff(r.profile.coords(), c) <= 1e-4;
        }
        spurious += !hit && nash_gap(a, b, r.profile) > 1e-9;
      }
    }
    o.note << games << " games";
    o.require(uncovered == 0, std::to_string(uncovered) + " Nash equilibria not found");
    o.require(spurious == 0, std::to_string(spurious) + " solver outputs not Nash");
  });

  criterion(7, "constant continuation trees", 120.0, [](Check& o) {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> u(-1, 1);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const TruncatedGameTree t(treebuild::random_tree(rng));
      Vector values(t.endpoint_count() * t.players());
      for (double& v : values) v = u(rng);
      const auto cont = treebuild::constant_continuation(t, values, 2.0);
      const std::vector<Wrapper> g(t.endpoint_count() * t.players());
      const CompositeSolution sol = solve_composite(t, cont, g);
      const auto table = treebuild::pure_payoff_table(t, values);
      worst = std::max(worst, treebuild::strategic_nash_gap(t, table, sol.vector.profile));
    }
    o.note << "largest strategic-form gain " << worst;
    o.require(worst <= 1e-4, "strategic-form Nash oracle");
  });

  criterion(8, "matrix tools", 60.0, [](Check& o) {
    std::mt19937_64 rng(59);
    double gap = 0.0;
    for (int k = 0; k < 100; ++k) {
      const GameValue v = game_value(random_matrix(rng, 1 + k % 5, 1 + (k / 5) % 5));
      gap = std::max(gap, v.col_guarantee - v.row_guarantee);
    }
    o.require(gap <= 1e-9, "duality gap " + std::to_string(gap));

    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto grid = simplex_grid(2, 40);
    double env = 0.0;
    for (int k = 0; k < 20; ++k) {
      Vector f, neg;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        f.push_back(u(rng));
        neg.push_back(-f.back());
      }
      const Vector lo = oracle::affine_minorant_envelope(f), hi = oracle::affine_minorant_envelope(neg);
      const Envelope vex = envelope(grid, f, EnvelopeKind::kVex);
      const Envelope cav = envelope(grid, f, EnvelopeKind::kCav);
      for (std::size_t i = 0; i < f.size(); ++i) {
        env = std::max({env, std::abs(vex.values()[i] - lo[i]), std::abs(cav.values()[i] + hi[i])});
      }
    }
    o.require(env <= 1e-12, "envelope mismatch " + std::to_string(env));

    // Targets on the boundary of individual rationality, player one playing
    // the strategy that keeps the expected payoff on the target.
    StateMatrices one;
    one.a = {{{3, -1}, {-2, 2}}};
    one.b = one.a;
    const GameValue v1 = game_value(one.a[0]);
    StateMatrices two;
    two.a = {{{1, 0}, {0, 0}}, {{0, 0}, {0, 1}}};
    two.b = two.a;
    struct Target {
      const StateMatrices* s;
      Vector y;
      Vector sigma;
    };
    const std::vector<Target> targets{{&one, {v1.value}, v1.row_strategy},
                                      {&two, {0.25, 0.25}, {0.5, 0.5}}};
    const Vector ts{100, 1000, 10000};
    for (const auto& target : targets) {
      const StateGameAnalysis an(*target.s);
      o.require(individually_rational_p1(target.y, an, 1e-12).ok, "target not IR");
      Vector ds;
      for (double T : ts) {
        double sum = 0.0;
        const int seeds = 40;
        for (int s = 0; s < seeds; ++s) {
          const Vector sigma = target.sigma;
          sum += approachability_punish(target.y, *target.s,
                                        [&sigma](std::size_t, const Vector&) { return sigma; },
                                        static_cast<std::size_t>(T), 1000 + s)
                     .distance;
        }
        ds.push_back(sum / seeds);
      }
      const double slope = loglog_slope(ts, ds);
      o.note << (o.note.tellp() > 0 ? ", " : "") << "slope " << slope << " (K=" << target.y.size() << ")";
      o.require(slope <= -0.4, "approachability slope");
    }
    o.note << ", duality gap " << gap;
  });

  criterion(9, "neyman game with lambda 1/3", 300.0, [](Check& o) {
    const GameDocument doc = load_document(data("coordination_neyman.json"));
    const NeymanGameSpec& spec = doc.neyman->spec;
    o.require(spec.states() == 2 && spec.depth == 1 && spec.weights[0][0] == 1.0 / 3.0 &&
                  spec.weights[1][0] == 1.0 / 3.0,
              "instance shape");
    const StateGameAnalysis an(spec.games);
    PlanOptions nr;
    nr.splits = false;
    o.require(!joint_plan_search(spec.prior, an, nr).plans.empty(), "no non-revealing plan");
    o.require(check_joint_plan(doc.neyman->joint_plan(), an).ok(), "document plan");
    const NeymanSolution sol = solve_neyman(spec);
    const NeymanVerification v = verify_neyman_equilibrium(sol);
    o.note << "gain " << v.supported_gain << ", star " << v.star_error;
    o.require(v.deviation_ok && v.supported_gain <= 1e-4, "deviation gains");
    o.require(v.star_ok, "property (*)");
    o.require(v.hull_ok, "hull membership");
    o.require(v.ir_ok, "individual rationality");
  });

  criterion(10, "zero-probability classes", 120.0, [](Check& o) {
    std::size_t zero_classes = 0;
    // A tree: player one stays out, so player two's class is never reached.
    {
      const auto built = load_document(data("entry_tree.json")).tree->build();
      const CompositeSolution sol = solve_composite(built.tree, built.continuation, built.wrappers);
      o.require(sol.certificate <= 1e-4, "tree deviation certificate");
      const ProperCheck pc = check_proper(built.tree, built.continuation, built.wrappers, sol.vector);
      o.require(pc.hull_distance <= 1e-9, "tree continuation outside F_C");
      for (const auto& c : sol.vector.classes) zero_classes += c.probability == 0.0;
    }
    // A Neyman game: defecting in the first stage leaves three histories unreached.
    {
      const GameDocument doc = load_document(data("prisoners_neyman.json"));
      const NeymanSolution sol = solve_neyman(doc.neyman->spec);
      const NeymanVerification v = verify_neyman_equilibrium(sol);
      const ProperCheck pc = check_proper(sol.tree->tree, sol.continuation, sol.tree->wrappers,
                                          sol.composite.vector);
      o.require(pc.hull_distance <= 1e-9, "neyman continuation outside F_C");
      o.require(v.ok(), "neyman verification");
      for (const auto& c : sol.composite.vector.classes) zero_classes += c.probability == 0.0;
    }
    o.note << zero_classes << " classes of probability zero";
    o.require(zero_classes >= 2, "instances did not produce unreached classes");
  });

  return failures;
}
