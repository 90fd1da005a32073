#pragma once

// Neyman games: n weighted stages of a state-dependent bimatrix game followed
// by the undiscounted repeated game in which only player one knows the state.
// The first n stages form a truncated tree; each class K x {h} of histories
// carries the convexified joint-plan equilibrium payoffs of the continuation
// game at the posterior over K.
//
// Players are 0 (informed, rows, matrices A) and 1 (uninformed, columns,
// matrices B). Payoff vectors over a class are (x, y_two): x^k is player
// one's limit payoff in state k, y_two^k player two's.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "myopic/error.hpp"
#include "myopic/lp.hpp"
#include "myopic/matrix_tools.hpp"
#include "myopic/simplex.hpp"
#include "myopic/tree.hpp"

namespace myopic {

struct NeymanGameSpec {
  StateMatrices games;            // a[k], b[k] over I x J
  Vector prior;                   // p0 over K
  std::vector<Vector> weights;    // [player][stage], lambda^i_l
  std::size_t depth = 1;          // n

  std::size_t states() const { return games.states(); }
  double total_weight(std::size_t player) const {
    double s = 0.0;
    for (double v : weights.at(player)) s += v;
    return s;
  }

  void validate() const {
    if (games.a.empty()) throw ConfigError("neyman: no states");
    try {
      games.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("neyman: ") + e.what());
    }
    if (depth == 0) throw ConfigError("neyman: truncation depth n must be at least 1");
    if (games.rows() < 2 || games.cols() < 2) {
      throw ConfigError("neyman: each player needs at least two actions");
    }
    if (prior.size() != states()) throw ConfigError("neyman: prior has wrong length");
    double s = 0.0;
    for (double v : prior) {
      if (!std::isfinite(v) || v < 0.0) throw ConfigError("neyman: prior has a negative entry");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw ConfigError("neyman: prior does not sum to 1");
    if (weights.size() != 2) throw ConfigError("neyman: need stage weights for both players");
    for (std::size_t i = 0; i < 2; ++i) {
      if (weights[i].size() != depth) {
        throw ConfigError("neyman: player " + std::to_string(i + 1) + " needs " +
                          std::to_string(depth) + " stage weights");
      }
      for (double v : weights[i]) {
        if (!std::isfinite(v) || v < 0.0) throw ConfigError("neyman: negative stage weight");
      }
      if (!(total_weight(i) < 1.0)) {
        throw ConfigError("neyman: total stage weight of player " + std::to_string(i + 1) +
                          " must be below 1");
      }
    }
  }

  /// f^i_n(h) = sum_l lambda^i_l * stage payoff at state k.
  double stage_payoff(std::size_t player, std::size_t k, const std::vector<std::size_t>& history) const {
    const auto& m = player == 0 ? games.a[k] : games.b[k];
    double s = 0.0;
    for (std::size_t l = 0; 2 * l + 1 < history.size(); ++l) {
      s += weights[player][l] * m[history[2 * l]][history[2 * l + 1]];
    }
    return s;
  }
};

struct NeymanTree {
  TruncatedGameTree tree;
  std::vector<Wrapper> wrappers;                           // e * 2 + player
  std::vector<std::size_t> endpoint_state;                 // per endpoint index
  std::vector<std::vector<std::size_t>> endpoint_history;  // i1, j1, ..., in, jn
  std::vector<std::vector<std::size_t>> class_states;      // [class][position] -> k
  std::vector<std::vector<std::size_t>> class_history;     // [class] -> h
};

inline std::string history_name(std::size_t k, const std::vector<std::size_t>& h) {
  std::string s = "k" + std::to_string(k);
  for (std::size_t l = 0; l < h.size(); ++l) s += (l % 2 == 0 ? "|" : ".") + std::to_string(h[l]);
  return s;
}

/// Root chance move over K (omitted when |K| = 1), then n rounds of: player
/// one moves knowing the state and the history, player two moves knowing
/// only the history. Q_1 is the singletons, Q_2 = Q the sets K x {h}.
inline NeymanTree build_neyman_tree(const NeymanGameSpec& spec) {
  spec.validate();
  const std::size_t K = spec.states(), I = spec.games.rows(), J = spec.games.cols();
  TreeSpec ts;
  ts.players = 2;
  ts.info.assign(2, {});
  std::vector<std::pair<std::size_t, std::vector<std::size_t>>> meta;  // (state, history)
  auto add = [&](std::size_t k, std::vector<std::size_t> h) {
    ts.names.push_back(history_name(k, h));
    meta.emplace_back(k, std::move(h));
    return ts.names.size() - 1;
  };
  std::vector<std::size_t> frontier;
  if (K == 1) {
    frontier.push_back(add(0, {}));
  } else {
    ts.names.push_back("root");
    meta.emplace_back(0, std::vector<std::size_t>{});
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t v = add(k, {});
      ts.arrows.emplace_back(0, v);
      frontier.push_back(v);
    }
    ts.chance[0] = spec.prior;
  }
  ts.root = 0;
  for (std::size_t m = 0; m < spec.depth; ++m) {
    std::map<std::vector<std::size_t>, std::size_t> p2_cell;  // history -> cell
    std::vector<std::size_t> next;
    for (std::size_t v : frontier) {
      ts.info[0].push_back({v});
      const auto [k, h] = meta[v];
      auto it = p2_cell.find(h);
      if (it == p2_cell.end()) {
        it = p2_cell.emplace(h, ts.info[1].size()).first;
        ts.info[1].emplace_back();
      }
      for (std::size_t i = 0; i < I; ++i) {
        auto hi = h;
        hi.push_back(i);
        const std::size_t u = add(k, hi);
        ts.arrows.emplace_back(v, u);
        ts.info[1][it->second].push_back(u);
        for (std::size_t j = 0; j < J; ++j) {
          auto hij = hi;
          hij.push_back(j);
          const std::size_t w = add(k, hij);
          ts.arrows.emplace_back(u, w);
          next.push_back(w);
        }
      }
    }
    frontier = std::move(next);
  }
  ts.endpoint_partition.assign(2, {});
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> by_history;
  for (std::size_t v : frontier) {
    ts.endpoint_partition[0].push_back({v});
    by_history[meta[v].second].push_back(v);
  }
  for (auto& [h, vs] : by_history) ts.endpoint_partition[1].push_back(vs);

  NeymanTree out;
  out.tree = TruncatedGameTree(std::move(ts));
  const auto& t = out.tree;
  const std::size_t E = t.endpoint_count();
  out.endpoint_state.resize(E);
  out.endpoint_history.resize(E);
  out.wrappers.resize(2 * E);
  for (std::size_t e = 0; e < E; ++e) {
    const auto& [k, h] = meta[t.endpoints()[e]];
    out.endpoint_state[e] = k;
    out.endpoint_history[e] = h;
    for (std::size_t i = 0; i < 2; ++i) {
      out.wrappers[e * 2 + i] = Wrapper{spec.stage_payoff(i, k, h), 1.0 - spec.total_weight(i)};
    }
  }
  for (const auto& cls : t.classes()) {
    std::vector<std::size_t> states;
    for (std::size_t e : cls) states.push_back(out.endpoint_state[e]);
    auto sorted = states;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k) {
      if (sorted.size() != K || sorted[k] != k) {
        throw NumericError("build_neyman_tree: class is not of the form K x {h}", 0.0);
      }
    }
    out.class_states.push_back(std::move(states));
    out.class_history.push_back(out.endpoint_history[cls[0]]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Joint plans

struct PlanOptions {
  std::size_t posterior_resolution = 4;  // vertex grid of Delta(K) for split plans
  bool non_revealing = true;
  bool splits = true;
  std::size_t max_families = 64;
  double tolerance = 1e-7;
  std::size_t max_cut_rounds = 200;
};

/// A set of posteriors V with weights alpha, prior = sum alpha_v v.
struct PlanFamily {
  std::vector<Vector> posteriors;
  Vector weights;
  std::string origin;  // "non-revealing" or "split"
};

struct JointPlan {
  Vector prior;
  std::vector<Vector> posteriors;                 // V
  Vector weights;                                 // alpha, prior = sum alpha_v v
  std::vector<Vector> agreements;                 // gamma_v, row-major over I x J
  std::vector<std::vector<std::size_t>> signals;  // player one's action strings, one per v
  std::vector<Vector> signal_probability;         // [k][v] = P(signal v | state k)
  Vector y;                                       // player one's per-state vector
  Vector payoff_one;                              // x^k
  Vector payoff_two;                              // y_two^k
  std::string origin;
};

struct PlanSearchResult {
  std::vector<JointPlan> plans;
  std::vector<std::string> diagnostics;
};

/// P(signal v | state k) = alpha_v v^k / p^k. For a state of prior zero the
/// signal is drawn with probability alpha_v (never used in expectations).
inline double signal_weight(const PlanFamily& f, const Vector& prior, std::size_t v, std::size_t k) {
  return prior[k] > 0.0 ? f.weights[v] * f.posteriors[v][k] / prior[k] : f.weights[v];
}

namespace detail {

inline bool strictly_between(double a, double p, double b) {
  return a < p - 1e-12 && p < b - 1e-12;
}

/// Barycentric weights of p in the simplex spanned by `pts` when p lies in
/// its relative interior.
inline std::optional<Vector> interior_weights(const std::vector<Vector>& pts, const Vector& p) {
  const auto K = static_cast<Eigen::Index>(p.size());
  const auto m = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd M(K + 1, m);
  Eigen::VectorXd rhs(K + 1);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index j = 0; j < m; ++j) M(k, j) = pts[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)];
    rhs(k) = p[static_cast<std::size_t>(k)];
  }
  M.row(K).setOnes();
  rhs(K) = 1.0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(M);
  if (qr.rank() < m) return std::nullopt;
  const Eigen::VectorXd a = qr.solve(rhs);
  if ((M * a - rhs).cwiseAbs().maxCoeff() > 1e-10) return std::nullopt;
  Vector w(static_cast<std::size_t>(m));
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!(a(j) > 1e-12)) return std::nullopt;
    w[static_cast<std::size_t>(j)] = a(j);
  }
  return w;
}

}  // namespace detail

/// Non-revealing family {p}, then splits of p over 2..|K| points of the
/// vertex grid containing p in their relative interior (fully revealing
/// first), at most max_families in total.
inline std::vector<PlanFamily> plan_families(const Vector& p, const PlanOptions& opt) {
  const std::size_t K = p.size();
  std::vector<PlanFamily> out;
  if (opt.non_revealing) out.push_back({{p}, {1.0}, "non-revealing"});
  if (!opt.splits || K < 2 || K > 3) return out;
  const auto grid = simplex_grid(K, std::max<std::size_t>(opt.posterior_resolution, 1));
  std::vector<std::vector<std::size_t>> subsets;
  // Fully revealing split first.
  std::vector<std::size_t> vertices;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (*std::max_element(grid[g].begin(), grid[g].end()) == 1.0) vertices.push_back(g);
  }
  subsets.push_back(vertices);
  for (std::size_t a = 0; a < grid.size(); ++a) {
    for (std::size_t b = a + 1; b < grid.size(); ++b) {
      subsets.push_back({a, b});
      if (K == 3) {
        for (std::size_t c = b + 1; c < grid.size(); ++c) subsets.push_back({a, b, c});
      }
    }
  }
  std::vector<std::vector<std::size_t>> seen;
  for (const auto& sub : subsets) {
    if (out.size() >= opt.max_families) break;
    if (sub.size() < 2) continue;
    auto key = sub;
    std::sort(key.begin(), key.end());
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
    seen.push_back(key);
    std::vector<Vector> pts;
    for (std::size_t g : sub) pts.push_back(grid[g]);
    if (auto w = detail::interior_weights(pts, p)) out.push_back({pts, *w, "split"});
  }
  return out;
}

/// Grid points of the analysis where IR constraints y.q >= a*(q) are imposed.
struct IrCuts {
  std::vector<Vector> points;
  Vector values;  // a*(q)

  static IrCuts initial(const StateGameAnalysis& an) {
    IrCuts c;
    const std::size_t K = an.matrices().states();
    for (std::size_t k = 0; k < K; ++k) {
      Vector e(K, 0.0);
      e[k] = 1.0;
      c.add(e, an);
    }
    if (K > 1) c.add(Vector(K, 1.0 / static_cast<double>(K)), an);
    return c;
  }
  void add(const Vector& q, const StateGameAnalysis& an) {
    for (const auto& p : points) {
      if (max_abs_diff(p, q) < 1e-12) return;
    }
    points.push_back(q);
    values.push_back(a_star(an.matrices(), q));
  }
};

namespace detail {

struct MatrixRange {
  double lo, hi;
};

inline MatrixRange a_range(const StateMatrices& s) {
  MatrixRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& m : s.a) {
    for (const auto& row : m) {
      for (double v : row) {
        r.lo = std::min(r.lo, v);
        r.hi = std::max(r.hi, v);
      }
    }
  }
  return r;
}

/// Variables: gamma_v (v-major, I*J each), then y (K, free).
struct PlanLp {
  const PlanFamily* family;
  std::size_t IJ, K, L;
  std::size_t gamma(std::size_t v, std::size_t ij) const { return v * IJ + ij; }
  std::size_t y(std::size_t k) const { return L * IJ + k; }
  std::size_t vars() const { return L * IJ + K; }
};

inline LinearProgram plan_lp(const PlanLp& ix, const Vector& prior, const StateGameAnalysis& an,
                             const IrCuts& cuts) {
  const StateMatrices& s = an.matrices();
  const std::size_t J = s.cols();
  const auto range = a_range(s);
  LinearProgram lp(ix.vars());
  for (std::size_t k = 0; k < ix.K; ++k) lp.set_free(ix.y(k));
  for (std::size_t v = 0; v < ix.L; ++v) {
    const Vector& post = ix.family->posteriors[v];
    Vector sum(ix.vars(), 0.0);
    for (std::size_t ij = 0; ij < ix.IJ; ++ij) sum[ix.gamma(v, ij)] = 1.0;
    lp.add_eq(std::move(sum), 1.0);
    Vector c1(ix.vars(), 0.0);
    for (std::size_t k = 0; k < ix.K; ++k) {
      for (std::size_t ij = 0; ij < ix.IJ; ++ij) c1[ix.gamma(v, ij)] += post[k] * s.b[k][ij / J][ij % J];
    }
    lp.add_ge(std::move(c1), an.vex_b()(post));
    for (std::size_t k = 0; k < ix.K; ++k) {
      Vector row(ix.vars(), 0.0);
      for (std::size_t ij = 0; ij < ix.IJ; ++ij) row[ix.gamma(v, ij)] = s.a[k][ij / J][ij % J];
      row[ix.y(k)] = -1.0;
      if (post[k] > 0.0) {
        lp.add_eq(std::move(row), 0.0);
      } else {
        lp.add_le(std::move(row), 0.0);
      }
    }
  }
  for (std::size_t k = 0; k < ix.K; ++k) {
    Vector up(ix.vars(), 0.0);
    up[ix.y(k)] = 1.0;
    lp.add_le(up, range.hi);
    lp.add_ge(std::move(up), range.lo);
  }
  for (std::size_t c = 0; c < cuts.points.size(); ++c) {
    Vector row(ix.vars(), 0.0);
    for (std::size_t k = 0; k < ix.K; ++k) row[ix.y(k)] = cuts.points[c][k];
    lp.add_ge(std::move(row), cuts.values[c]);
  }
  (void)prior;
  return lp;
}

/// Linear form of payoff coordinate `coord` (x^0..x^{K-1}, y_two^0..) over
/// the plan variables.
inline Vector payoff_form(const PlanLp& ix, const Vector& prior, const StateMatrices& s,
                          std::size_t coord) {
  Vector f(ix.vars(), 0.0);
  if (coord < ix.K) {
    f[ix.y(coord)] = 1.0;
    return f;
  }
  const std::size_t k = coord - ix.K, J = s.cols();
  for (std::size_t v = 0; v < ix.L; ++v) {
    const double w = signal_weight(*ix.family, prior, v, k);
    for (std::size_t ij = 0; ij < ix.IJ; ++ij) f[ix.gamma(v, ij)] += w * s.b[k][ij / J][ij % J];
  }
  return f;
}

inline std::vector<std::vector<std::size_t>> signal_strings(std::size_t count, std::size_t actions) {
  std::size_t m = 0, cap = 1;
  while (cap < count) {
    cap *= actions;
    ++m;
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t v = 0; v < count; ++v) {
    std::vector<std::size_t> s(m);
    std::size_t rest = v;
    for (std::size_t l = m; l-- > 0;) {
      s[l] = rest % actions;
      rest /= actions;
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline JointPlan make_plan(const PlanFamily& f, const Vector& prior, const PlanLp& ix,
                           const Vector& sol, const StateMatrices& s);

}  // namespace detail

/// A plan from its raw data: signals, signal law and payoffs are derived.
/// Agreements are row-major over I x J and are used as given.
inline JointPlan assemble_joint_plan(const PlanFamily& f, const Vector& prior,
                                     std::vector<Vector> agreements, Vector y,
                                     const StateMatrices& s) {
  const std::size_t K = s.states(), L = f.posteriors.size();
  if (prior.size() != K || y.size() != K || agreements.size() != L || f.weights.size() != L) {
    throw DimensionError("assemble_joint_plan: inconsistent dimensions");
  }
  for (const auto& g : agreements) {
    if (g.size() != s.rows() * s.cols()) throw DimensionError("assemble_joint_plan: agreement size");
  }
  JointPlan p;
  p.prior = prior;
  p.posteriors = f.posteriors;
  p.weights = f.weights;
  p.origin = f.origin;
  p.agreements = std::move(agreements);
  p.y = std::move(y);
  p.signals = detail::signal_strings(L, s.rows());
  p.signal_probability.assign(K, Vector(L));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t v = 0; v < L; ++v) p.signal_probability[k][v] = signal_weight(f, prior, v, k);
  }
  p.payoff_one = p.y;
  p.payoff_two.assign(K, 0.0);
  for (std::size_t v = 0; v < L; ++v) {
    const auto [ga, gb] = gamma_payoffs(p.agreements[v], s);
    for (std::size_t k = 0; k < K; ++k) p.payoff_two[k] += p.signal_probability[k][v] * gb[k];
  }
  return p;
}

namespace detail {

inline JointPlan make_plan(const PlanFamily& f, const Vector& prior, const PlanLp& ix,
                           const Vector& sol, const StateMatrices& s) {
  std::vector<Vector> agreements;
  for (std::size_t v = 0; v < ix.L; ++v) {
    Vector g(ix.IJ);
    double sum = 0.0;
    for (std::size_t ij = 0; ij < ix.IJ; ++ij) sum += (g[ij] = std::max(0.0, sol[ix.gamma(v, ij)]));
    for (double& x : g) x /= sum;
    agreements.push_back(std::move(g));
  }
  Vector y(ix.K);
  for (std::size_t k = 0; k < ix.K; ++k) y[k] = sol[ix.y(k)];
  return assemble_joint_plan(f, prior, std::move(agreements), std::move(y), s);
}

}  // namespace detail

/// Result of re-checking a plan from its raw data.
struct PlanCheck {
  double hull_error = 0.0;         // |sum alpha_v v - p|
  double bayes_error = 0.0;        // posterior of each signal vs its v
  double condition1_slack = 0.0;   // min_v (gamma_v B).v - vex(b*)(v)
  double condition2_error = 0.0;   // max |(gamma_v A)^k - y^k| over v^k > 0
  double condition3_excess = 0.0;  // max (gamma_v A)^k - y^k over v^k = 0
  double payoff_error = 0.0;       // stored payoffs vs recomputed expectations
  IrCheck ir;
  bool signals_ok = false;
  bool ok(double tol = 1e-7) const {
    return hull_error <= tol && bayes_error <= tol && condition1_slack >= -tol &&
           condition2_error <= tol && condition3_excess <= tol && payoff_error <= tol && ir.ok &&
           signals_ok;
  }
};

inline PlanCheck check_joint_plan(const JointPlan& plan, const StateGameAnalysis& an,
                                  double tol = 1e-7) {
  const StateMatrices& s = an.matrices();
  const std::size_t K = s.states(), L = plan.posteriors.size();
  PlanCheck c;
  if (plan.weights.size() != L || plan.agreements.size() != L || plan.signals.size() != L ||
      plan.y.size() != K || plan.prior.size() != K) {
    throw DimensionError("check_joint_plan: inconsistent plan dimensions");
  }
  for (std::size_t k = 0; k < K; ++k) {
    double mix = 0.0;
    for (std::size_t v = 0; v < L; ++v) mix += plan.weights[v] * plan.posteriors[v][k];
    c.hull_error = std::max(c.hull_error, std::abs(mix - plan.prior[k]));
  }
  double wsum = 0.0;
  for (double w : plan.weights) {
    if (w < 0.0) c.hull_error = std::max(c.hull_error, -w);
    wsum += w;
  }
  c.hull_error = std::max(c.hull_error, std::abs(wsum - 1.0));
  // Bayes: P(k | signal v) from the prior and the state-dependent signal law.
  for (std::size_t v = 0; v < L; ++v) {
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) total += plan.prior[k] * plan.signal_probability[k][v];
    for (std::size_t k = 0; k < K; ++k) {
      const double post = total > 0.0 ? plan.prior[k] * plan.signal_probability[k][v] / total : 0.0;
      c.bayes_error = std::max(c.bayes_error, std::abs(post - plan.posteriors[v][k]));
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (plan.prior[k] <= 0.0) continue;
    double row = 0.0;
    for (std::size_t v = 0; v < L; ++v) row += plan.signal_probability[k][v];
    c.bayes_error = std::max(c.bayes_error, std::abs(row - 1.0));
  }
  c.condition1_slack = std::numeric_limits<double>::infinity();
  Vector x(K, 0.0), y2(K, 0.0);
  for (std::size_t v = 0; v < L; ++v) {
    const Vector& g = plan.agreements[v];
    double gsum = 0.0;
    for (double w : g) gsum += w;
    if (std::abs(gsum - 1.0) > tol || *std::min_element(g.begin(), g.end()) < -tol) {
      c.condition2_error = std::max(c.condition2_error, std::abs(gsum - 1.0) + 1.0);
    }
    Vector ga(K, 0.0), gb(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < s.rows(); ++i) {
        for (std::size_t j = 0; j < s.cols(); ++j) {
          ga[k] += g[i * s.cols() + j] * s.a[k][i][j];
          gb[k] += g[i * s.cols() + j] * s.b[k][i][j];
        }
      }
    }
    double two = 0.0;
    for (std::size_t k = 0; k < K; ++k) two += gb[k] * plan.posteriors[v][k];
    c.condition1_slack = std::min(c.condition1_slack, two - an.vex_b()(plan.posteriors[v]));
    for (std::size_t k = 0; k < K; ++k) {
      if (plan.posteriors[v][k] > 0.0) {
        c.condition2_error = std::max(c.condition2_error, std::abs(ga[k] - plan.y[k]));
      } else {
        c.condition3_excess = std::max(c.condition3_excess, ga[k] - plan.y[k]);
      }
      x[k] += plan.signal_probability[k][v] * ga[k];
      y2[k] += plan.signal_probability[k][v] * gb[k];
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    // In a state of prior zero player one is held to y^k.
    const double expect_one = plan.prior[k] > 0.0 ? x[k] : plan.y[k];
    c.payoff_error = std::max(c.payoff_error, std::abs(expect_one - plan.payoff_one[k]));
    c.payoff_error = std::max(c.payoff_error, std::abs(y2[k] - plan.payoff_two[k]));
  }
  c.ir = individually_rational_p1(plan.y, an, tol);
  // Signals: distinct strings of the smallest length m with |I|^m >= |V|.
  std::size_t m = 0, cap = 1;
  while (cap < L) {
    cap *= s.rows();
    ++m;
  }
  c.signals_ok = true;
  for (std::size_t v = 0; v < L; ++v) {
    if (plan.signals[v].size() != m) c.signals_ok = false;
    for (std::size_t a : plan.signals[v]) {
      if (a >= s.rows()) c.signals_ok = false;
    }
    for (std::size_t u = 0; u < v; ++u) {
      if (plan.signals[u] == plan.signals[v]) c.signals_ok = false;
    }
  }
  return c;
}

/// Extreme plans of every family over a fixed set of payoff directions.
/// Each returned plan passes check_joint_plan; an empty result says only that
/// nothing was found at this grid.
inline PlanSearchResult joint_plan_search(const Vector& p, const StateGameAnalysis& an,
                                          const PlanOptions& opt = {}) {
  const StateMatrices& s = an.matrices();
  const std::size_t K = s.states();
  if (p.size() != K) throw DimensionError("joint_plan_search: prior has wrong length");
  PlanSearchResult res;
  IrCuts cuts = IrCuts::initial(an);
  // Directions over (x, y_two): total, each player's expected payoff, their
  // difference both ways, then each coordinate up and down.
  std::vector<Vector> dirs;
  {
    Vector both(2 * K), one(2 * K, 0.0), two(2 * K, 0.0), d1(2 * K), d2(2 * K);
    for (std::size_t k = 0; k < K; ++k) {
      both[k] = both[K + k] = p[k];
      one[k] = p[k];
      two[K + k] = p[k];
      d1[k] = p[k];
      d1[K + k] = -p[k];
      d2[k] = -p[k];
      d2[K + k] = p[k];
    }
    dirs = {both, one, two, d1, d2};
    for (std::size_t c = 0; c < 2 * K; ++c) {
      if (c >= K && p[c - K] == 0.0) continue;
      for (double sign : {1.0, -1.0}) {
        Vector d(2 * K, 0.0);
        d[c] = sign;
        dirs.push_back(std::move(d));
      }
    }
  }
  const auto families = plan_families(p, opt);
  for (const auto& fam : families) {
    const detail::PlanLp ix{&fam, s.rows() * s.cols(), K, fam.posteriors.size()};
    std::vector<Vector> forms;
    for (std::size_t c = 0; c < 2 * K; ++c) forms.push_back(detail::payoff_form(ix, p, s, c));
    std::size_t found = 0;
    bool infeasible = false;
    for (const auto& d : dirs) {
      if (infeasible) break;
      for (std::size_t round = 0; round < opt.max_cut_rounds; ++round) {
        LinearProgram lp = detail::plan_lp(ix, p, an, cuts);
        for (std::size_t c = 0; c < 2 * K; ++c) {
          for (std::size_t j = 0; j < ix.vars(); ++j) lp.c[j] -= d[c] * forms[c][j];
        }
        const LpResult r = solve_lp(lp);
        if (!r.optimal()) {
          infeasible = r.status == LpStatus::kInfeasible;
          if (!infeasible) res.diagnostics.push_back(fam.origin + ": LP did not reach optimality");
          break;
        }
        Vector y(K);
        for (std::size_t k = 0; k < K; ++k) y[k] = r.x[ix.y(k)];
        const IrCheck ir = individually_rational_p1(y, an, opt.tolerance * 0.1);
        if (!ir.ok) {
          cuts.add(ir.worst_q, an);
          continue;
        }
        JointPlan plan = detail::make_plan(fam, p, ix, r.x, s);
        const PlanCheck chk = check_joint_plan(plan, an, opt.tolerance);
        if (!chk.ok(opt.tolerance)) {
          res.diagnostics.push_back(fam.origin + ": candidate plan failed re-verification");
          break;
        }
        bool dup = false;
        for (const auto& q : res.plans) {
          if (max_abs_diff(q.payoff_one, plan.payoff_one) < 1e-9 &&
              max_abs_diff(q.payoff_two, plan.payoff_two) < 1e-9) {
            dup = true;
            break;
          }
        }
        if (!dup) {
          res.plans.push_back(std::move(plan));
          ++found;
        }
        break;
      }
    }
    if (infeasible && found == 0) {
      std::ostringstream msg;
      msg << fam.origin << " family over " << fam.posteriors.size() << " posterior(s) is infeasible";
      res.diagnostics.push_back(msg.str());
    }
  }
  if (res.plans.empty()) res.diagnostics.push_back("no joint plan found at the configured grid");
  return res;
}

// ---------------------------------------------------------------------------
// Continuation payoffs

struct EquilibriumPayoffPoint {
  Vector x;       // player one, per state
  Vector y_two;   // player two, per state
  std::size_t plan = 0;  // index of the generating plan in PayoffSet::plans
  Vector flat() const {
    Vector f = x;
    f.insert(f.end(), y_two.begin(), y_two.end());
    return f;
  }
};

/// Convex hull of joint-plan payoffs at one prior, by its extreme points.
struct PayoffSet {
  Vector prior;
  std::vector<JointPlan> plans;
  std::vector<EquilibriumPayoffPoint> extreme;

  HullMembership membership(const Vector& x, const Vector& y_two) const {
    std::vector<Vector> gens;
    for (const auto& e : extreme) gens.push_back(e.flat());
    Vector pt = x;
    pt.insert(pt.end(), y_two.begin(), y_two.end());
    return hull_membership(pt, gens);
  }
};

inline PayoffSet continuation_payoffs(const Vector& p, const StateGameAnalysis& an,
                                      const PlanOptions& opt = {}) {
  PlanSearchResult found = joint_plan_search(p, an, opt);
  if (found.plans.empty()) {
    std::ostringstream msg;
    msg << "continuation unavailable at prior (";
    for (std::size_t k = 0; k < p.size(); ++k) msg << (k ? ", " : "") << p[k];
    msg << ")";
    for (const auto& d : found.diagnostics) msg << "; " << d;
    throw ContinuationUnavailable(msg.str(), 0.0);
  }
  PayoffSet set;
  set.prior = p;
  set.plans = std::move(found.plans);
  std::vector<EquilibriumPayoffPoint> pts;
  for (std::size_t i = 0; i < set.plans.size(); ++i) {
    pts.push_back({set.plans[i].payoff_one, set.plans[i].payoff_two, i});
  }
  if (pts.size() == 1) {
    set.extreme = pts;
    return set;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<Vector> others;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i) others.push_back(pts[j].flat());
    }
    if (hull_membership(pts[i].flat(), others).distance > 1e-9) set.extreme.push_back(pts[i]);
  }
  if (set.extreme.empty()) set.extreme.push_back(pts[0]);
  return set;
}

/// Distance from (x, y_two) to the convexification of all plan payoffs of
/// the families at p. A point in the hull of the plans joint_plan_search
/// finds is accepted directly; otherwise one LP over scaled family variables
/// gives the exact distance. Player two's coordinates in states of prior
/// zero are not compared.
struct PlanMembership {
  double distance = std::numeric_limits<double>::infinity();
  Vector family_weights;
  std::vector<std::string> families;
  bool contains(double tol) const { return distance <= tol; }
};

inline PlanMembership plan_payoff_membership(const Vector& p, const Vector& x, const Vector& y_two,
                                             const StateGameAnalysis& an,
                                             const PlanOptions& opt = {}) {
  const StateMatrices& s = an.matrices();
  const std::size_t K = s.states(), J = s.cols(), IJ = s.rows() * s.cols();
  if (p.size() != K || x.size() != K || y_two.size() != K) {
    throw DimensionError("plan_payoff_membership: wrong dimension");
  }
  PlanMembership out;
  // Witness first: the hull of verified plan payoffs found at p.
  {
    auto project = [&](const Vector& one, const Vector& two) {
      Vector v = one;
      for (std::size_t k = 0; k < K; ++k) {
        if (p[k] > 0.0) v.push_back(two[k]);
      }
      return v;
    };
    const PlanSearchResult found = joint_plan_search(p, an, opt);
    std::vector<Vector> pts;
    for (const auto& plan : found.plans) pts.push_back(project(plan.payoff_one, plan.payoff_two));
    if (!pts.empty()) {
      const HullMembership h = hull_membership(project(x, y_two), pts);
      if (h.distance <= 1e-9) {
        out.distance = std::max(h.distance, 0.0);
        out.families.push_back("witness");
        out.family_weights = {1.0};
        return out;
      }
    }
  }
  const auto families = plan_families(p, opt);
  const auto range = detail::a_range(s);
  // Per family f: mu_f, Gamma_{f,v} (I*J each), Y_f (K, free); then t.
  std::vector<std::size_t> base;
  std::size_t n = 0;
  for (const auto& f : families) {
    base.push_back(n);
    n += 1 + f.posteriors.size() * IJ + K;
  }
  const std::size_t t_var = n++;
  auto mu = [&](std::size_t f) { return base[f]; };
  auto gam = [&](std::size_t f, std::size_t v, std::size_t ij) { return base[f] + 1 + v * IJ + ij; };
  auto yv = [&](std::size_t f, std::size_t k) {
    return base[f] + 1 + families[f].posteriors.size() * IJ + k;
  };
  IrCuts cuts = IrCuts::initial(an);
  for (const auto& f : families) out.families.push_back(f.origin);
  for (std::size_t round = 0; round < opt.max_cut_rounds; ++round) {
    LinearProgram lp(n);
    lp.c[t_var] = 1.0;
    Vector total(n, 0.0);
    for (std::size_t f = 0; f < families.size(); ++f) {
      total[mu(f)] = 1.0;
      const auto& fam = families[f];
      for (std::size_t k = 0; k < K; ++k) lp.set_free(yv(f, k));
      for (std::size_t v = 0; v < fam.posteriors.size(); ++v) {
        const Vector& post = fam.posteriors[v];
        Vector sum(n, 0.0);
        for (std::size_t ij = 0; ij < IJ; ++ij) sum[gam(f, v, ij)] = 1.0;
        sum[mu(f)] = -1.0;
        lp.add_eq(std::move(sum), 0.0);
        Vector c1(n, 0.0);
        for (std::size_t k = 0; k < K; ++k) {
          for (std::size_t ij = 0; ij < IJ; ++ij) c1[gam(f, v, ij)] += post[k] * s.b[k][ij / J][ij % J];
        }
        c1[mu(f)] = -an.vex_b()(post);
        lp.add_ge(std::move(c1), 0.0);
        for (std::size_t k = 0; k < K; ++k) {
          Vector row(n, 0.0);
          for (std::size_t ij = 0; ij < IJ; ++ij) row[gam(f, v, ij)] = s.a[k][ij / J][ij % J];
          row[yv(f, k)] = -1.0;
          if (post[k] > 0.0) {
            lp.add_eq(std::move(row), 0.0);
          } else {
            lp.add_le(std::move(row), 0.0);
          }
        }
      }
      for (std::size_t k = 0; k < K; ++k) {
        Vector up(n, 0.0), down(n, 0.0);
        up[yv(f, k)] = 1.0;
        up[mu(f)] = -range.hi;
        lp.add_le(std::move(up), 0.0);
        down[yv(f, k)] = -1.0;
        down[mu(f)] = range.lo;
        lp.add_le(std::move(down), 0.0);
      }
      for (std::size_t c = 0; c < cuts.points.size(); ++c) {
        Vector row(n, 0.0);
        for (std::size_t k = 0; k < K; ++k) row[yv(f, k)] = cuts.points[c][k];
        row[mu(f)] = -cuts.values[c];
        lp.add_ge(std::move(row), 0.0);
      }
    }
    lp.add_eq(std::move(total), 1.0);
    // Payoff coordinates as linear forms; |form - target| <= t.
    for (std::size_t c = 0; c < 2 * K; ++c) {
      if (c >= K && p[c - K] == 0.0) continue;
      Vector form(n, 0.0);
      for (std::size_t f = 0; f < families.size(); ++f) {
        if (c < K) {
          form[yv(f, c)] = 1.0;
          continue;
        }
        const std::size_t k = c - K;
        for (std::size_t v = 0; v < families[f].posteriors.size(); ++v) {
          const double w = signal_weight(families[f], p, v, k);
          for (std::size_t ij = 0; ij < IJ; ++ij) form[gam(f, v, ij)] += w * s.b[k][ij / J][ij % J];
        }
      }
      const double target = c < K ? x[c] : y_two[c - K];
      Vector up = form, down(n);
      for (std::size_t j = 0; j < n; ++j) down[j] = -form[j];
      up[t_var] = -1.0;
      down[t_var] = -1.0;
      lp.add_le(std::move(up), target);
      lp.add_le(std::move(down), -target);
    }
    const LpResult r = solve_lp(lp);
    if (!r.optimal()) return out;
    bool cut = false;
    for (std::size_t f = 0; f < families.size(); ++f) {
      const double m = r.x[mu(f)];
      if (m < 1e-9) continue;
      Vector y(K);
      for (std::size_t k = 0; k < K; ++k) y[k] = r.x[yv(f, k)] / m;
      const IrCheck ir = individually_rational_p1(y, an, opt.tolerance * 0.1);
      if (!ir.ok) {
        cuts.add(ir.worst_q, an);
        cut = true;
      }
    }
    if (cut) continue;
    out.distance = r.x[t_var];
    out.family_weights.clear();
    for (std::size_t f = 0; f < families.size(); ++f) out.family_weights.push_back(r.x[mu(f)]);
    return out;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Continuous selections over Delta(K)

/// Extreme payoff points on a grid of Delta(K), arranged in slots so that
/// each slot changes as little as possible between neighbouring grid points;
/// slot m is extended to all of Delta(K) by piecewise-linear interpolation
/// on the Kuhn triangulation of the grid.
class SelectionTable {
 public:
  SelectionTable() = default;

  SelectionTable(const StateGameAnalysis& an, std::size_t resolution, const PlanOptions& opt)
      : states_(an.matrices().states()), resolution_(states_ == 1 ? 0 : resolution) {
    if (states_ > 1 && resolution_ == 0) throw ConfigError("selection grid resolution must be positive");
    grid_ = states_ == 1 ? std::vector<Vector>{Vector{1.0}} : simplex_grid(states_, resolution_);
    for (std::size_t g = 0; g < grid_.size(); ++g) index_[key(grid_[g])] = g;
    for (const auto& q : grid_) sets_.push_back(continuation_payoffs(q, an, opt));
    std::size_t M = 0;
    for (const auto& s : sets_) M = std::max(M, s.extreme.size());
    slots_.assign(grid_.size(), {});
    for (std::size_t g = 0; g < grid_.size(); ++g) {
      std::vector<Vector> pts;
      for (const auto& e : sets_[g].extreme) pts.push_back(e.flat());
      if (g == 0) {
        for (std::size_t m = 0; m < M; ++m) slots_[g].push_back(pts[m % pts.size()]);
        continue;
      }
      // Reference: the nearest grid point already assigned.
      std::size_t ref = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t h = 0; h < g; ++h) {
        const double d = max_abs_diff(grid_[h], grid_[g]);
        if (d < best - 1e-12) {
          best = d;
          ref = h;
        }
      }
      std::vector<bool> used(pts.size(), false);
      std::size_t used_count = 0;
      for (std::size_t m = 0; m < M; ++m) {
        std::size_t pick = 0;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i) {
          if (used_count < pts.size() && used[i]) continue;
          const double d = max_abs_diff(pts[i], slots_[ref][m]);
          if (d < dist) {
            dist = d;
            pick = i;
          }
        }
        if (!used[pick]) {
          used[pick] = true;
          ++used_count;
        }
        slots_[g].push_back(pts[pick]);
      }
    }
  }

  std::size_t states() const { return states_; }
  std::size_t resolution() const { return resolution_; }
  std::size_t count() const { return slots_.empty() ? 0 : slots_[0].size(); }
  const std::vector<Vector>& grid() const { return grid_; }
  const std::vector<PayoffSet>& sets() const { return sets_; }
  const Vector& slot(std::size_t node, std::size_t m) const { return slots_.at(node).at(m); }

  /// Interpolation weights of q over grid nodes.
  std::vector<std::pair<std::size_t, double>> weights(std::span<const double> q) const {
    if (q.size() != states_) throw DimensionError("SelectionTable: wrong dimension");
    if (states_ == 1) return {{0, 1.0}};
    // Rounding in upstream conditionals may leave entries of order -1e-13.
    Vector qc(q.begin(), q.end());
    double total = 0.0;
    for (double& v : qc) {
      if (!std::isfinite(v) || v < -1e-9) throw InvalidInput("SelectionTable: not a distribution");
      total += (v = std::max(v, 0.0));
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidInput("SelectionTable: not a distribution");
    for (double& v : qc) v /= total;
    const std::size_t D = states_ - 1;
    const double R = static_cast<double>(resolution_);
    Vector u(D);
    double run = 0.0;
    for (std::size_t i = 0; i < D; ++i) {
      run += qc[i];
      u[i] = std::clamp(run, 0.0, 1.0) * R;
    }
    std::vector<long> b(D);
    Vector f(D);
    for (std::size_t i = 0; i < D; ++i) {
      b[i] = std::min(static_cast<long>(std::floor(u[i])), static_cast<long>(resolution_));
      f[i] = u[i] - static_cast<double>(b[i]);
    }
    std::vector<std::size_t> order(D);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
      return f[a] != f[c] ? f[a] > f[c] : a > c;
    });
    std::vector<std::pair<std::size_t, double>> out;
    std::vector<long> cur = b;
    double prev = 1.0;
    for (std::size_t s = 0; s <= D; ++s) {
      const double next = s < D ? f[order[s]] : 0.0;
      const double w = prev - next;
      if (w > 0.0) {
        const auto node = node_of(cur);
        if (!node) {
          std::ostringstream msg;
          msg << "SelectionTable: interpolation left the grid at q = (";
          for (std::size_t k = 0; k < q.size(); ++k) msg << (k ? ", " : "") << q[k];
          msg << ")";
          throw NumericError(msg.str(), 0.0);
        }
        out.emplace_back(*node, w);
      }
      if (s < D) ++cur[order[s]];
      prev = next;
    }
    return out;
  }

  /// Slot m at q: payoffs (x^0..x^{K-1}, y_two^0..y_two^{K-1}).
  Vector evaluate(std::size_t m, std::span<const double> q) const {
    Vector out(2 * states_, 0.0);
    for (const auto& [node, w] : weights(q)) {
      const Vector& v = slots_[node][m];
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * v[i];
    }
    return out;
  }

 private:
  std::vector<long> key(const Vector& q) const {
    std::vector<long> c;
    for (double v : q) c.push_back(std::lround(v * static_cast<double>(resolution_)));
    return c;
  }

  std::optional<std::size_t> node_of(const std::vector<long>& cum) const {
    // Cumulative counts back to per-state counts.
    std::vector<long> c(states_);
    long prev = 0;
    for (std::size_t i = 0; i + 1 < states_; ++i) {
      c[i] = cum[i] - prev;
      prev = cum[i];
    }
    c[states_ - 1] = static_cast<long>(resolution_) - prev;
    const auto it = index_.find(c);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t states_ = 0;
  std::size_t resolution_ = 0;
  std::vector<Vector> grid_;
  std::map<std::vector<long>, std::size_t> index_;
  std::vector<PayoffSet> sets_;
  std::vector<std::vector<Vector>> slots_;  // [node][m]
};

inline std::size_t default_selection_resolution(std::size_t states) {
  return states <= 2 ? 10 : 4;
}

// ---------------------------------------------------------------------------
// Pipeline

struct NeymanConfig {
  PlanOptions plans;
  std::size_t selection_resolution = 0;  // 0: 10 for |K| <= 2, 4 for |K| = 3
  std::size_t analysis_resolution = 0;   // 0: matrix-tools default
  CompositeConfig composite;
  double verify_tol = 1e-4;
  std::uint64_t seed = 0;  // player-two perturbations in the (*) check
};

struct NeymanSolution {
  NeymanGameSpec spec;
  NeymanConfig config;
  std::shared_ptr<const NeymanTree> tree;
  std::shared_ptr<const StateGameAnalysis> analysis;
  std::shared_ptr<const SelectionTable> table;
  ContinuationSystem continuation;
  CompositeSolution composite;
};

/// P(k | C) from player one's strategy alone: prior^k times the probability
/// that player one's actions along h are played in state k. This is the
/// conditional any player-two strategy reaching C induces.
inline std::optional<Vector> star_conditional(const NeymanTree& nt, std::size_t cls,
                                              const MixedProfile& x) {
  const auto& t = nt.tree;
  const auto& members = t.classes()[cls];
  Vector q(members.size());
  double s = 0.0;
  for (std::size_t pos = 0; pos < members.size(); ++pos) {
    const std::size_t e = members[pos];
    s += (q[pos] = t.chance_probability(e) * t.own_reach(x, 0, e));
  }
  if (!(s > 0.0)) return std::nullopt;
  for (double& v : q) v /= s;
  return q;
}

/// Per-class conditional over positions to a distribution over K.
inline Vector conditional_by_state(const NeymanTree& nt, std::size_t cls, std::span<const double> q) {
  Vector out(nt.class_states[cls].size(), 0.0);
  for (std::size_t pos = 0; pos < q.size(); ++pos) out[nt.class_states[cls][pos]] = q[pos];
  return out;
}

inline NeymanSolution solve_neyman(const NeymanGameSpec& spec, const NeymanConfig& cfg = {}) {
  NeymanSolution sol;
  sol.spec = spec;
  sol.config = cfg;
  auto nt = std::make_shared<const NeymanTree>(build_neyman_tree(spec));
  auto an = std::make_shared<const StateGameAnalysis>(spec.games, cfg.analysis_resolution);
  const std::size_t K = spec.states();
  auto table = std::make_shared<const SelectionTable>(
      *an, cfg.selection_resolution ? cfg.selection_resolution : default_selection_resolution(K),
      cfg.plans);
  sol.tree = nt;
  sol.analysis = an;
  sol.table = table;

  double bound = 0.0;
  for (const auto* ms : {&spec.games.a, &spec.games.b}) {
    for (const auto& m : *ms) {
      for (const auto& r : m) {
        for (double v : r) bound = std::max(bound, std::abs(v));
      }
    }
  }
  sol.continuation.bound = bound + 1.0;
  for (std::size_t c = 0; c < nt->tree.classes().size(); ++c) {
    std::vector<Selection> sels;
    for (std::size_t m = 0; m < table->count(); ++m) {
      sels.push_back([nt, table, c, m](std::span<const double> q) {
        const Vector qk = conditional_by_state(*nt, c, q);
        const Vector v = table->evaluate(m, qk);
        const std::size_t K = qk.size();
        Vector out(2 * K);
        for (std::size_t pos = 0; pos < K; ++pos) {
          const std::size_t k = nt->class_states[c][pos];
          out[pos * 2] = v[k];
          out[pos * 2 + 1] = v[K + k];
        }
        return out;
      });
    }
    sol.continuation.selections.push_back(std::move(sels));
  }

  CompositeConfig cc = cfg.composite;
  if (!cc.zero_rule) {
    cc.zero_rule = [nt](std::size_t cls, const MixedProfile& x) { return star_conditional(*nt, cls, x); };
  }
  sol.composite = solve_composite(nt->tree, sol.continuation, nt->wrappers, cc);
  return sol;
}

/// Independent check of a Neyman solution, recomputing payoffs from the game
/// data rather than from the tree's cached values.
struct NeymanVerification {
  // (i) deviation gains
  std::vector<Vector> strategy_values;  // [player][pure strategy]
  std::vector<Vector> gains;            // best value minus value
  double supported_gain = 0.0;
  double recompute_error = 0.0;         // vs the solution's proper vector
  bool deviation_ok = false;
  // (ii) property (*) across player-two perturbations
  double star_error = 0.0;
  std::size_t star_checks = 0;
  bool star_ok = false;
  // (iii) continuation payoffs are convexified plan payoffs at the conditional
  Vector hull_distance;  // per class
  bool hull_ok = false;
  // (iv) individual rationality of the assigned continuation
  Vector ir_slack_one;   // per class, min over the grid of x.q - a*(q)
  Vector ir_slack_two;   // per class, y_two.q - vex(b*)(q)
  bool ir_ok = false;
  double tol = 0.0;

  bool ok() const { return deviation_ok && star_ok && hull_ok && ir_ok; }
};

inline NeymanVerification verify_neyman_equilibrium(const NeymanSolution& sol, double tol = -1.0) {
  NeymanVerification rep;
  rep.tol = tol >= 0.0 ? tol : sol.config.verify_tol;
  const NeymanTree& nt = *sol.tree;
  const TruncatedGameTree& t = nt.tree;
  const NeymanGameSpec& spec = sol.spec;
  const ProperVector& pv = sol.composite.vector;
  const MixedProfile& x = pv.profile;
  const std::size_t K = spec.states();
  const std::size_t S0 = t.strategy_count(0), S1 = t.strategy_count(1);
  const double support_tol = sol.config.composite.support_tol;

  // Walk the tree for a pure pair in state k; returns the endpoint index.
  auto walk = [&](std::size_t k, const std::vector<std::size_t>& a0, const std::vector<std::size_t>& a1) {
    std::size_t v = t.spec().root;
    if (t.owner(v) == TruncatedGameTree::kChance) v = t.children(v)[k];
    while (!t.children(v).empty()) {
      const auto who = static_cast<std::size_t>(t.owner(v));
      const auto& acts = who == 0 ? a0 : a1;
      v = t.children(v)[acts[t.cell(v)]];
    }
    return t.endpoint_index(v);
  };

  // (i) payoff of every pure pair from stage payoffs and the assigned nu.
  std::vector<std::vector<std::size_t>> dec0(S0), dec1(S1);
  for (std::size_t s = 0; s < S0; ++s) dec0[s] = t.decode_strategy(0, s);
  for (std::size_t s = 0; s < S1; ++s) dec1[s] = t.decode_strategy(1, s);
  rep.strategy_values.assign(2, {});
  rep.strategy_values[0].assign(S0, 0.0);
  rep.strategy_values[1].assign(S1, 0.0);
  for (std::size_t s0 = 0; s0 < S0; ++s0) {
    for (std::size_t s1 = 0; s1 < S1; ++s1) {
      double u0 = 0.0, u1 = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        if (spec.prior[k] == 0.0) continue;
        const std::size_t e = walk(k, dec0[s0], dec1[s1]);
        const auto& h = nt.endpoint_history[e];
        u0 += spec.prior[k] * (spec.stage_payoff(0, k, h) + (1.0 - spec.total_weight(0)) * pv.nu[e * 2]);
        u1 += spec.prior[k] * (spec.stage_payoff(1, k, h) + (1.0 - spec.total_weight(1)) * pv.nu[e * 2 + 1]);
      }
      rep.strategy_values[0][s0] += x(1, s1) * u0;
      rep.strategy_values[1][s1] += x(0, s0) * u1;
    }
  }
  rep.gains.assign(2, {});
  for (std::size_t n = 0; n < 2; ++n) {
    const Vector& v = rep.strategy_values[n];
    const double best = *std::max_element(v.begin(), v.end());
    for (std::size_t s = 0; s < v.size(); ++s) {
      rep.gains[n].push_back(best - v[s]);
      if (x(n, s) > support_tol) rep.supported_gain = std::max(rep.supported_gain, best - v[s]);
      rep.recompute_error =
          std::max(rep.recompute_error, std::abs(v[s] - pv.y[t.layout().offset(n) + s]));
    }
  }
  rep.deviation_ok = rep.supported_gain <= rep.tol;

  // (ii) conditionals under perturbed player-two strategies.
  std::vector<Vector> taus;
  {
    const auto b = x.block(1);
    taus.emplace_back(b.begin(), b.end());
  }
  for (std::size_t s = 0; s < S1; ++s) {
    Vector e(S1, 0.0);
    e[s] = 1.0;
    taus.push_back(std::move(e));
  }
  taus.emplace_back(S1, 1.0 / static_cast<double>(S1));
  std::mt19937_64 rng(sol.config.seed);
  std::gamma_distribution<double> gd(1.0, 1.0);
  for (int r = 0; r < 3; ++r) {
    Vector tau(S1);
    double s = 0.0;
    for (double& v : tau) s += (v = gd(rng));
    for (double& v : tau) v /= s;
    taus.push_back(std::move(tau));
  }
  // Player one's probability of each endpoint's own actions, by direct walk.
  const std::size_t E = t.endpoint_count();
  Vector reach0(E, 0.0);
  std::vector<Vector> reach1(taus.size(), Vector(E, 0.0));
  for (std::size_t e = 0; e < E; ++e) {
    const std::size_t k = nt.endpoint_state[e];
    const auto& h = nt.endpoint_history[e];
    for (std::size_t s0 = 0; s0 < S0; ++s0) {
      // Player one's choices along h in state k, with player two's moves fixed to h.
      bool match = true;
      std::size_t v = t.spec().root;
      if (t.owner(v) == TruncatedGameTree::kChance) v = t.children(v)[k];
      for (std::size_t l = 0; l < h.size() && match; ++l) {
        if (l % 2 == 0) match = dec0[s0][t.cell(v)] == h[l];
        v = t.children(v)[h[l]];
      }
      if (match) reach0[e] += x(0, s0);
    }
    for (std::size_t r = 0; r < taus.size(); ++r) {
      for (std::size_t s1 = 0; s1 < S1; ++s1) {
        bool match = true;
        std::size_t v = t.spec().root;
        if (t.owner(v) == TruncatedGameTree::kChance) v = t.children(v)[k];
        for (std::size_t l = 0; l < h.size() && match; ++l) {
          if (l % 2 == 1) match = dec1[s1][t.cell(v)] == h[l];
          v = t.children(v)[h[l]];
        }
        if (match) reach1[r][e] += taus[r][s1];
      }
    }
  }
  for (std::size_t c = 0; c < t.classes().size(); ++c) {
    const auto& members = t.classes()[c];
    Vector rule(members.size());
    double rs = 0.0;
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      const std::size_t e = members[pos];
      rs += (rule[pos] = spec.prior[nt.endpoint_state[e]] * reach0[e]);
    }
    if (!(rs > 0.0)) continue;
    for (double& v : rule) v /= rs;
    for (std::size_t r = 0; r < taus.size(); ++r) {
      Vector cond(members.size());
      double cs = 0.0;
      for (std::size_t pos = 0; pos < members.size(); ++pos) {
        const std::size_t e = members[pos];
        cs += (cond[pos] = spec.prior[nt.endpoint_state[e]] * reach0[e] * reach1[r][e]);
      }
      if (!(cs > 1e-300)) continue;
      for (double& v : cond) v /= cs;
      rep.star_error = std::max(rep.star_error, max_abs_diff(cond, rule));
      ++rep.star_checks;
    }
    // The conditional the solution used for C.
    rep.star_error = std::max(rep.star_error, max_abs_diff(pv.classes[c].conditional, rule));
    ++rep.star_checks;
  }
  rep.star_ok = rep.star_error <= 1e-10;

  // (iii) and (iv) per class.
  const StateGameAnalysis& an = *sol.analysis;
  rep.hull_ok = true;
  rep.ir_ok = true;
  for (std::size_t c = 0; c < t.classes().size(); ++c) {
    const auto& members = t.classes()[c];
    const Vector q = conditional_by_state(nt, c, pv.classes[c].conditional);
    Vector xs(K), ys(K);
    for (std::size_t pos = 0; pos < members.size(); ++pos) {
      const std::size_t k = nt.class_states[c][pos];
      xs[k] = pv.nu[members[pos] * 2];
      ys[k] = pv.nu[members[pos] * 2 + 1];
    }
    const PlanMembership m = plan_payoff_membership(q, xs, ys, an, sol.config.plans);
    rep.hull_distance.push_back(m.distance);
    if (!m.contains(1e-7)) rep.hull_ok = false;
    const IrCheck one = individually_rational_p1(xs, an, 1e-7);
    rep.ir_slack_one.push_back(one.min_slack);
    double two = -an.vex_b()(q);
    for (std::size_t k = 0; k < K; ++k) two += q[k] * ys[k];
    rep.ir_slack_two.push_back(two);
    if (!one.ok || two < -1e-7) rep.ir_ok = false;
  }
  return rep;
}

}  // namespace myopic
