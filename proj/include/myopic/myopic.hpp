#pragma once

// Myopic equilibria of payoff families: residual, the retraction map
// x -> r(w(x) + x) whose fixed points are the equilibria, and a solver.
//
// Solver pipeline (each stage only adds candidates; every candidate is
// re-certified by the residual before it is reported):
//   1. support enumeration with Newton on the indifference equations,
//   2. damped iteration x <- (1 - a_t) x + a_t r(w(x) + x), a_t = c / (t + 1),
//      from mesh and random starts, followed by a support polish,
//   3. hierarchical mesh refinement minimizing |r(w(x) + x) - x|.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "myopic/error.hpp"
#include "myopic/lp.hpp"
#include "myopic/payoff.hpp"
#include "myopic/simplex.hpp"

namespace myopic {

inline constexpr double kDefaultSupportTol = 1e-9;

/// max over players n and actions i with x^n_i > support_tol of
/// (max_j w^n_j - w^n_i), evaluated on precomputed payoffs wx.
inline double equilibrium_residual(const MixedProfile& x, std::span<const double> wx,
                                   double support_tol = kDefaultSupportTol) {
  const Layout& layout = x.layout();
  if (wx.size() != layout.total()) throw DimensionError("equilibrium_residual: payoff size");
  double res = 0.0;
  for (std::size_t n = 0; n < layout.players(); ++n) {
    const auto block = wx.subspan(layout.offset(n), layout.actions(n));
    const double best = *std::max_element(block.begin(), block.end());
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (x(n, i) > support_tol) res = std::max(res, best - block[i]);
    }
  }
  return res;
}

inline double equilibrium_residual(const MixedProfile& x, const PayoffFamily& w,
                                   double support_tol = kDefaultSupportTol) {
  return equilibrium_residual(x, w(x), support_tol);
}

/// r(w(x) + x).
inline MixedProfile best_response_map(const MixedProfile& x, const PayoffFamily& w) {
  Vector z = w(x);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += x.coords()[i];
  return product_retract(z, x.layout());
}

inline double displacement(const MixedProfile& x, const PayoffFamily& w) {
  return max_abs_diff(best_response_map(x, w).coords(), x.coords());
}

struct SolverConfig {
  double tolerance = 1e-9;  // accepted residual
  double support_tol = kDefaultSupportTol;
  std::size_t restarts = 16;  // random starts for the damped iteration
  std::size_t max_iterations = 2000;
  std::size_t mesh = 4;  // start-mesh resolution per block
  std::uint64_t seed = 0;
  double step_constant = 1.0;
  double dedupe_distance = 1e-4;
  std::size_t max_support_combinations = 4096;
  std::size_t newton_starts = 3;
  bool stop_at_first = false;
  bool enumerate_supports = true;
};

struct SolveReport {
  MixedProfile profile;
  Vector witness;  // y of the equilibrium condition; w(x) for single-valued families
  double residual = 0.0;
  std::string method;
  Vector hull_weights;  // correspondence solves only
};

namespace detail {

using Support = std::vector<std::vector<std::size_t>>;

inline Vector face_point(const Layout& layout, const Support& support,
                         std::span<const double> hint) {
  Vector c(layout.total(), 0.0);
  for (std::size_t n = 0; n < layout.players(); ++n) {
    double sum = 0.0;
    for (std::size_t i : support[n]) sum += std::max(hint[layout.offset(n) + i], 0.0);
    for (std::size_t i : support[n]) {
      const double h = std::max(hint[layout.offset(n) + i], 0.0);
      c[layout.offset(n) + i] =
          sum > 0.0 ? h / sum : 1.0 / static_cast<double>(support[n].size());
    }
  }
  return c;
}

/// Indifference residuals w_{S[k]} - w_{S[0]} over all players' supports.
inline Vector support_equations(const Layout& layout, const Support& support,
                                std::span<const double> wx) {
  Vector f;
  for (std::size_t n = 0; n < layout.players(); ++n) {
    const double base = wx[layout.offset(n) + support[n][0]];
    for (std::size_t k = 1; k < support[n].size(); ++k) {
      f.push_back(wx[layout.offset(n) + support[n][k]] - base);
    }
  }
  return f;
}

inline double inf_norm(const Vector& v) {
  double m = 0.0;
  for (double c : v) m = std::max(m, std::abs(c));
  return m;
}

/// Keeps the iterate inside the face by re-projecting each support block.
inline void clamp_to_face(const Layout& layout, const Support& support, Vector& c) {
  for (std::size_t n = 0; n < layout.players(); ++n) {
    Vector block;
    for (std::size_t i : support[n]) block.push_back(c[layout.offset(n) + i]);
    const Vector p = project_simplex(block);
    for (std::size_t k = 0; k < support[n].size(); ++k) c[layout.offset(n) + support[n][k]] = p[k];
  }
}

/// Newton's method on the indifference system restricted to a support face.
/// Returns the converged profile or nothing.
inline std::optional<MixedProfile> support_newton(const PayoffFamily& w, const Support& support,
                                                  std::span<const double> start,
                                                  std::size_t max_iter = 60) {
  const Layout& layout = w.layout();
  Vector c = face_point(layout, support, start);
  std::vector<std::pair<std::size_t, std::size_t>> free;  // (player, action)
  for (std::size_t n = 0; n < layout.players(); ++n) {
    for (std::size_t k = 1; k < support[n].size(); ++k) free.emplace_back(n, support[n][k]);
  }
  auto eval = [&](const Vector& coords) {
    const MixedProfile x(layout, coords);
    const Vector wx = w(x);
    double scale = 1.0;
    for (double v : wx) scale = std::max(scale, std::abs(v));
    return std::make_pair(support_equations(layout, support, wx), scale);
  };
  auto [f, scale] = eval(c);
  const double target = 1e-13 * scale;
  if (free.empty()) return MixedProfile(layout, c);
  const std::size_t dim = free.size();
  for (std::size_t it = 0; it < max_iter && inf_norm(f) > target; ++it) {
    Eigen::MatrixXd jac(dim, dim);
    const double h = 1e-7;
    for (std::size_t v = 0; v < dim; ++v) {
      const auto [n, i] = free[v];
      const std::size_t base = layout.offset(n) + support[n][0];
      const std::size_t idx = layout.offset(n) + i;
      // Move mass between the free coordinate and the block's base coordinate,
      // stepping toward the interior to stay feasible.
      const double dir = c[base] >= h ? 1.0 : -1.0;
      Vector cp = c;
      cp[idx] += dir * h;
      cp[base] -= dir * h;
      if (cp[idx] < 0.0 || cp[base] < 0.0) {
        cp = c;
        const double hh = std::max(std::min(c[idx], c[base]), 1e-12) * 0.5;
        cp[idx] += dir * hh;
        cp[base] -= dir * hh;
        const auto fp = eval(cp).first;
        for (std::size_t r = 0; r < dim; ++r) jac(r, v) = (fp[r] - f[r]) / (dir * hh);
        continue;
      }
      const auto fp = eval(cp).first;
      for (std::size_t r = 0; r < dim; ++r) jac(r, v) = (fp[r] - f[r]) / (dir * h);
    }
    Eigen::VectorXd rhs(dim);
    for (std::size_t r = 0; r < dim; ++r) rhs(r) = -f[r];
    Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(rhs);
    if (!step.allFinite()) return std::nullopt;
    const double f0 = inf_norm(f);
    bool improved = false;
    for (double t = 1.0; t > 1e-4; t *= 0.5) {
      Vector cn = c;
      for (std::size_t v = 0; v < dim; ++v) {
        const auto [n, i] = free[v];
        cn[layout.offset(n) + i] += t * step(static_cast<Eigen::Index>(v));
        cn[layout.offset(n) + support[n][0]] -= t * step(static_cast<Eigen::Index>(v));
      }
      clamp_to_face(layout, support, cn);
      auto [fn, sn] = eval(cn);
      if (inf_norm(fn) < f0) {
        c = std::move(cn);
        f = std::move(fn);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (inf_norm(f) > 1e-10 * scale) return std::nullopt;
  return MixedProfile(layout, c);
}

/// k-element subsets of {0..n-1} in lexicographic order, at most `cap`.
inline std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k,
                                                          std::size_t cap) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> c(k);
  std::iota(c.begin(), c.end(), 0);
  while (out.size() < cap) {
    out.push_back(c);
    std::size_t i = k;
    while (i > 0 && c[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++c[i - 1];
    for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

/// Support combinations in order of increasing total size, capped.
inline std::vector<Support> support_combinations(const Layout& layout, std::size_t cap) {
  const std::size_t P = layout.players();
  std::vector<Support> out;
  std::vector<std::size_t> sizes(P, 1);
  for (std::size_t total = P; total <= layout.total() && out.size() < cap; ++total) {
    // All size tuples with 1 <= sizes[n] <= actions(n) summing to total.
    std::fill(sizes.begin(), sizes.end(), 1);
    while (true) {
      std::size_t sum = 0;
      for (std::size_t v : sizes) sum += v;
      if (sum == total) {
        std::vector<std::vector<std::vector<std::size_t>>> per;
        for (std::size_t n = 0; n < P; ++n) per.push_back(combinations(layout.actions(n), sizes[n], cap));
        std::vector<std::size_t> idx(P, 0);
        while (out.size() < cap) {
          Support sp;
          for (std::size_t n = 0; n < P; ++n) sp.push_back(per[n][idx[n]]);
          out.push_back(std::move(sp));
          std::size_t n = 0;
          while (n < P && ++idx[n] == per[n].size()) idx[n++] = 0;
          if (n == P) break;
        }
        if (out.size() >= cap) break;
      }
      std::size_t n = 0;
      while (n < P && ++sizes[n] > layout.actions(n)) sizes[n++] = 1;
      if (n == P) break;
    }
  }
  return out;
}

inline Support support_of(const MixedProfile& x, double threshold) {
  Support s(x.layout().players());
  for (std::size_t n = 0; n < x.layout().players(); ++n) {
    for (std::size_t i = 0; i < x.layout().actions(n); ++i) {
      if (x(n, i) > threshold) s[n].push_back(i);
    }
    if (s[n].empty()) {
      const auto b = x.block(n);
      s[n].push_back(static_cast<std::size_t>(std::max_element(b.begin(), b.end()) - b.begin()));
    }
  }
  return s;
}

inline Vector random_profile(const Layout& layout, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  Vector c(layout.total());
  for (std::size_t n = 0; n < layout.players(); ++n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < layout.actions(n); ++i) {
      c[layout.offset(n) + i] = expo(rng);
      sum += c[layout.offset(n) + i];
    }
    for (std::size_t i = 0; i < layout.actions(n); ++i) c[layout.offset(n) + i] /= sum;
  }
  return c;
}

class Collector {
 public:
  Collector(const PayoffFamily& w, const SolverConfig& cfg) : w_(w), cfg_(cfg) {}

  /// Certifies x and records it unless a close duplicate exists.
  bool offer(const MixedProfile& x, const std::string& method) {
    const Vector wx = w_(x);
    const double res = equilibrium_residual(x, wx, cfg_.support_tol);
    best_residual_ = std::min(best_residual_, res);
    if (res > cfg_.tolerance) return false;
    for (auto& r : reports_) {
      if (max_abs_diff(r.profile.coords(), x.coords()) <= cfg_.dedupe_distance) {
        if (res < r.residual) r = SolveReport{x, wx, res, method, {}};
        return false;
      }
    }
    reports_.push_back(SolveReport{x, wx, res, method, {}});
    return true;
  }

  bool done() const { return cfg_.stop_at_first && !reports_.empty(); }
  double best_residual() const { return best_residual_; }
  std::vector<SolveReport> take() { return std::move(reports_); }
  const std::vector<SolveReport>& reports() const { return reports_; }

 private:
  const PayoffFamily& w_;
  const SolverConfig& cfg_;
  std::vector<SolveReport> reports_;
  double best_residual_ = std::numeric_limits<double>::infinity();
};

inline void polish(const PayoffFamily& w, const MixedProfile& x, Collector& out,
                   const std::string& method) {
  out.offer(x, method);
  for (double threshold : {1e-6, 1e-3, 1e-2}) {
    if (out.done()) return;
    const Support s = support_of(x, threshold);
    if (auto y = support_newton(w, s, x.coords())) out.offer(*y, method + "+newton");
  }
}

/// Pattern search on |T(x) - x| moving mass between pairs of actions.
inline MixedProfile refine_displacement(const PayoffFamily& w, MixedProfile x, double step) {
  const Layout& layout = x.layout();
  double best = displacement(x, w);
  while (step > 1e-13 && best > 1e-14) {
    bool moved = false;
    for (std::size_t n = 0; n < layout.players(); ++n) {
      for (std::size_t i = 0; i < layout.actions(n); ++i) {
        for (std::size_t j = 0; j < layout.actions(n); ++j) {
          if (i == j) continue;
          Vector c = x.coords();
          const double m = std::min(step, c[layout.offset(n) + i]);
          if (m <= 0.0) continue;
          c[layout.offset(n) + i] -= m;
          c[layout.offset(n) + j] += m;
          MixedProfile y(layout, std::move(c));
          const double d = displacement(y, w);
          if (d < best) {
            best = d;
            x = std::move(y);
            moved = true;
          }
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return x;
}

}  // namespace detail

/// Myopic equilibria of w. Throws BudgetExhausted (carrying the best
/// residual found) when no candidate certifies.
inline std::vector<SolveReport> solve_myopic(const PayoffFamily& w, const SolverConfig& cfg = {},
                                             const MixedProfile* warm_start = nullptr) {
  const Layout& layout = w.layout();
  detail::Collector out(w, cfg);
  std::mt19937_64 rng(cfg.seed);

  if (warm_start != nullptr) {
    detail::polish(w, *warm_start, out, "warm-start");
  }

  if (cfg.enumerate_supports && !out.done()) {
    const auto supports = detail::support_combinations(layout, cfg.max_support_combinations);
    for (const auto& s : supports) {
      std::vector<Vector> starts;
      if (warm_start != nullptr) starts.push_back(warm_start->coords());
      starts.push_back(MixedProfile::barycenter(layout).coords());
      for (std::size_t k = 1; k < cfg.newton_starts; ++k) {
        starts.push_back(detail::random_profile(layout, rng));
      }
      for (const auto& st : starts) {
        if (auto x = detail::support_newton(w, s, st)) {
          out.offer(*x, "support-newton");
          break;
        }
      }
      if (out.done()) break;
    }
  }

  if (!out.done()) {
    std::vector<MixedProfile> starts;
    if (warm_start != nullptr) starts.push_back(*warm_start);
    if (cfg.mesh > 0) {
      const auto mesh = sampled_profile_mesh(layout, cfg.mesh, 256, rng);
      starts.insert(starts.end(), mesh.begin(), mesh.end());
    }
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
      starts.emplace_back(layout, detail::random_profile(layout, rng));
    }
    for (const auto& s : starts) {
      MixedProfile x = s;
      MixedProfile best = x;
      double best_disp = std::numeric_limits<double>::infinity();
      for (std::size_t t = 0; t < cfg.max_iterations; ++t) {
        const MixedProfile tx = best_response_map(x, w);
        const double d = max_abs_diff(tx.coords(), x.coords());
        if (d < best_disp) {
          best_disp = d;
          best = x;
        }
        if (d <= 1e-15) break;
        const double a = std::min(1.0, cfg.step_constant / static_cast<double>(t + 1));
        Vector c(x.coords().size());
        for (std::size_t i = 0; i < c.size(); ++i) {
          c[i] = (1.0 - a) * x.coords()[i] + a * tx.coords()[i];
        }
        x = MixedProfile(layout, std::move(c));
      }
      detail::polish(w, best, out, "damped-iteration");
      if (out.done()) break;
    }
  }

  if (out.reports().empty()) {
    const auto mesh = sampled_profile_mesh(layout, std::max<std::size_t>(cfg.mesh, 2) * 2, 4096, rng);
    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t k = 0; k < mesh.size(); ++k) scored.emplace_back(displacement(mesh[k], w), k);
    std::sort(scored.begin(), scored.end());
    const std::size_t keep = std::min<std::size_t>(8, scored.size());
    for (std::size_t k = 0; k < keep && !out.done(); ++k) {
      const MixedProfile x = detail::refine_displacement(
          w, mesh[scored[k].second], 0.5 / static_cast<double>(std::max<std::size_t>(cfg.mesh, 2)));
      detail::polish(w, x, out, "mesh-refinement");
    }
  }

  auto reports = out.take();
  if (reports.empty()) {
    throw BudgetExhausted("solve_myopic: no certified equilibrium within budget",
                          out.best_residual());
  }
  return reports;
}

/// Convex weights over the selections at x minimizing the worst tie violation
/// max_{n, i in supp x^n, j} (y_j - y_i), y = sum_m mu_m selection_m(x).
struct HullWitness {
  Vector weights;
  Vector witness;
  double gap = std::numeric_limits<double>::infinity();
};

inline HullWitness correspondence_witness(const MixedProfile& x, const PayoffCorrespondence& W,
                                          double support_tol = kDefaultSupportTol) {
  const Layout& layout = x.layout();
  const auto values = W.values(x);
  const std::size_t m = values.size();
  LinearProgram lp(m + 1);  // mu_1..mu_m, t >= 0
  lp.c[m] = 1.0;
  for (std::size_t n = 0; n < layout.players(); ++n) {
    for (std::size_t i = 0; i < layout.actions(n); ++i) {
      if (x(n, i) <= support_tol) continue;
      for (std::size_t j = 0; j < layout.actions(n); ++j) {
        if (j == i) continue;
        Vector row(m + 1, 0.0);
        for (std::size_t s = 0; s < m; ++s) {
          row[s] = values[s][layout.offset(n) + j] - values[s][layout.offset(n) + i];
        }
        row[m] = -1.0;
        lp.add_le(std::move(row), 0.0);
      }
    }
  }
  Vector ones(m + 1, 1.0);
  ones[m] = 0.0;
  lp.add_eq(std::move(ones), 1.0);
  const LpResult r = solve_lp(lp);
  HullWitness h;
  if (!r.optimal()) return h;
  h.weights.assign(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(m));
  h.witness.assign(layout.total(), 0.0);
  for (std::size_t s = 0; s < m; ++s) {
    for (std::size_t i = 0; i < layout.total(); ++i) h.witness[i] += h.weights[s] * values[s][i];
  }
  h.gap = equilibrium_residual(x, h.witness, support_tol);
  return h;
}

/// A myopic equilibrium x of W together with a witness y in W(x).
///
/// Every fixed convex combination of the selections is a continuous selection
/// of W, so its equilibria are equilibria of W; these are searched first
/// (vertices, then the barycenter of the weight simplex) and the hull weights
/// are re-optimized at the equilibrium found.
inline SolveReport solve_myopic_correspondence(const PayoffCorrespondence& W,
                                               const SolverConfig& cfg = {}) {
  const std::size_t m = W.selections().size();
  std::vector<Vector> weight_candidates;
  for (std::size_t s = 0; s < m; ++s) {
    Vector e(m, 0.0);
    e[s] = 1.0;
    weight_candidates.push_back(std::move(e));
  }
  if (m > 1) weight_candidates.emplace_back(m, 1.0 / static_cast<double>(m));

  double best_residual = std::numeric_limits<double>::infinity();
  for (const auto& weights : weight_candidates) {
    std::vector<SolveReport> found;
    try {
      found = solve_myopic(W.fixed_weights(weights), cfg);
    } catch (const BudgetExhausted& e) {
      best_residual = std::min(best_residual, e.gap());
      continue;
    }
    for (auto& rep : found) {
      HullWitness h = correspondence_witness(rep.profile, W, cfg.support_tol);
      if (h.gap > rep.residual) {
        h.weights = weights;
        h.witness = rep.witness;
        h.gap = rep.residual;
      }
      if (h.gap <= cfg.tolerance) {
        std::ostringstream method;
        method << rep.method << " (selection weights";
        for (double v : weights) method << ' ' << v;
        method << ")";
        return SolveReport{rep.profile, h.witness, h.gap, method.str(), h.weights};
      }
      best_residual = std::min(best_residual, h.gap);
    }
  }
  throw BudgetExhausted("solve_myopic_correspondence: no certified equilibrium", best_residual);
}

/// Aggregate payoff g^n(x) = sum_i x^n_i w^n_i(x).
inline Vector aggregate_payoffs(const MixedProfile& x, const PayoffFamily& w) {
  const Vector wx = w(x);
  Vector g(x.layout().players(), 0.0);
  for (std::size_t n = 0; n < x.layout().players(); ++n) {
    for (std::size_t i = 0; i < x.layout().actions(n); ++i) {
      g[n] += x(n, i) * wx[x.layout().offset(n) + i];
    }
  }
  return g;
}

/// Conventional best-reply search on the aggregate payoffs over a mesh, for
/// contrasting myopic equilibria with Nash equilibria of the induced game.
struct NashContrast {
  MixedProfile best_profile;         // mesh profile minimizing the largest gain
  double min_max_gain = 0.0;         // its largest best-reply gain
  Vector aggregate;                  // aggregate payoffs at best_profile
  std::size_t mesh_resolution = 0;
};

inline NashContrast nash_contrast(const PayoffFamily& w, std::size_t resolution) {
  const Layout& layout = w.layout();
  std::vector<std::vector<Vector>> blocks;
  for (std::size_t n = 0; n < layout.players(); ++n) {
    blocks.push_back(simplex_grid(layout.actions(n), resolution));
  }
  const auto mesh = profile_mesh(layout, resolution);
  NashContrast best;
  best.mesh_resolution = resolution;
  best.min_max_gain = std::numeric_limits<double>::infinity();
  for (const auto& x : mesh) {
    const Vector g = aggregate_payoffs(x, w);
    double worst = 0.0;
    for (std::size_t n = 0; n < layout.players() && worst < best.min_max_gain; ++n) {
      double top = g[n];
      for (const auto& dev : blocks[n]) {
        Vector c = x.coords();
        std::copy(dev.begin(), dev.end(), c.begin() + static_cast<std::ptrdiff_t>(layout.offset(n)));
        const MixedProfile y(layout, std::move(c));
        top = std::max(top, aggregate_payoffs(y, w)[n]);
      }
      worst = std::max(worst, top - g[n]);
    }
    if (worst < best.min_max_gain) {
      best.min_max_gain = worst;
      best.best_profile = x;
      best.aggregate = g;
    }
  }
  return best;
}

/// Maximizer of the aggregate payoff of a one-player family (mesh search
/// followed by pattern refinement).
struct AggregateOptimum {
  MixedProfile profile;
  double value = 0.0;
};

inline AggregateOptimum aggregate_optimum(const PayoffFamily& w, std::size_t resolution = 1000) {
  const Layout& layout = w.layout();
  if (layout.players() != 1) throw InvalidInput("aggregate_optimum: one-player families only");
  AggregateOptimum best{MixedProfile::barycenter(layout), -std::numeric_limits<double>::infinity()};
  for (const auto& p : simplex_grid(layout.actions(0), resolution)) {
    MixedProfile x(layout, p);
    const double v = aggregate_payoffs(x, w)[0];
    if (v > best.value) best = {std::move(x), v};
  }
  double step = 1.0 / static_cast<double>(resolution);
  while (step > 1e-14) {
    bool moved = false;
    for (std::size_t i = 0; i < layout.actions(0); ++i) {
      for (std::size_t j = 0; j < layout.actions(0); ++j) {
        if (i == j) continue;
        Vector c = best.profile.coords();
        const double m = std::min(step, c[i]);
        if (m <= 0.0) continue;
        c[i] -= m;
        c[j] += m;
        MixedProfile x(layout, std::move(c));
        const double v = aggregate_payoffs(x, w)[0];
        if (v > best.value) {
          best = {std::move(x), v};
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

}  // namespace myopic
