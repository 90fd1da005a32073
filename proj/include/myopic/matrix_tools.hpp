#pragma once

// Zero-sum matrix game values, convex/concave envelopes over Delta(K),
// individual rationality for the informed and uninformed player, gamma
// payoffs, Blackwell approachability of orthants, and bimatrix support
// enumeration.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "myopic/error.hpp"
#include "myopic/lp.hpp"
#include "myopic/simplex.hpp"

namespace myopic {

using Matrix = std::vector<Vector>;  // row-major

inline void check_matrix(const Matrix& m, const char* what) {
  if (m.empty() || m[0].empty()) throw DimensionError(std::string(what) + ": empty matrix");
  for (const auto& row : m) {
    if (row.size() != m[0].size()) throw DimensionError(std::string(what) + ": ragged matrix");
    require_finite(row, what);
  }
}

inline Matrix transpose(const Matrix& m) {
  Matrix t(m[0].size(), Vector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[0].size(); ++j) t[j][i] = m[i][j];
  }
  return t;
}

struct GameValue {
  double value = 0.0;
  Vector row_strategy;
  Vector col_strategy;
  double row_guarantee = 0.0;  // min_j (x M)_j
  double col_guarantee = 0.0;  // max_i (M y)_i
  double gap() const { return col_guarantee - row_guarantee; }
};

/// Value of the zero-sum game where the row player maximizes x M y.
inline GameValue game_value(const Matrix& m) {
  check_matrix(m, "game_value");
  const std::size_t rows = m.size();
  const std::size_t cols = m[0].size();
  double scale = 1.0;
  for (const auto& r : m) {
    for (double v : r) scale = std::max(scale, std::abs(v));
  }

  LinearProgram row_lp(rows + 1);  // x, v
  row_lp.c[rows] = -1.0;
  row_lp.set_free(rows);
  for (std::size_t j = 0; j < cols; ++j) {
    Vector a(rows + 1, 0.0);
    for (std::size_t i = 0; i < rows; ++i) a[i] = -m[i][j];
    a[rows] = 1.0;
    row_lp.add_le(std::move(a), 0.0);
  }
  Vector ones_r(rows + 1, 1.0);
  ones_r[rows] = 0.0;
  row_lp.add_eq(std::move(ones_r), 1.0);

  LinearProgram col_lp(cols + 1);  // y, u
  col_lp.c[cols] = 1.0;
  col_lp.set_free(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    Vector a(cols + 1, 0.0);
    for (std::size_t j = 0; j < cols; ++j) a[j] = m[i][j];
    a[cols] = -1.0;
    col_lp.add_le(std::move(a), 0.0);
  }
  Vector ones_c(cols + 1, 1.0);
  ones_c[cols] = 0.0;
  col_lp.add_eq(std::move(ones_c), 1.0);

  const LpResult rr = solve_lp(row_lp);
  const LpResult cr = solve_lp(col_lp);
  if (!rr.optimal() || !cr.optimal()) {
    throw NumericError("game_value: LP solver failed", std::numeric_limits<double>::infinity());
  }
  GameValue g;
  g.row_strategy.assign(rr.x.begin(), rr.x.begin() + static_cast<std::ptrdiff_t>(rows));
  g.col_strategy.assign(cr.x.begin(), cr.x.begin() + static_cast<std::ptrdiff_t>(cols));
  for (double& v : g.row_strategy) v = std::max(v, 0.0);
  for (double& v : g.col_strategy) v = std::max(v, 0.0);
  g.row_guarantee = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += g.row_strategy[i] * m[i][j];
    g.row_guarantee = std::min(g.row_guarantee, s);
  }
  g.col_guarantee = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += m[i][j] * g.col_strategy[j];
    g.col_guarantee = std::max(g.col_guarantee, s);
  }
  g.value = 0.5 * (g.row_guarantee + g.col_guarantee);
  if (std::abs(g.gap()) > 1e-9 * scale) {
    throw NumericError("game_value: duality gap above tolerance", g.gap());
  }
  return g;
}

/// Payoff matrices A^k (informed player one) and B^k (player two) per state.
struct StateMatrices {
  std::vector<Matrix> a;
  std::vector<Matrix> b;

  std::size_t states() const { return a.size(); }
  std::size_t rows() const { return a.at(0).size(); }
  std::size_t cols() const { return a.at(0).at(0).size(); }

  void validate() const {
    if (a.empty() || a.size() != b.size()) throw DimensionError("StateMatrices: state count");
    for (std::size_t k = 0; k < a.size(); ++k) {
      check_matrix(a[k], "StateMatrices A");
      check_matrix(b[k], "StateMatrices B");
      if (a[k].size() != rows() || b[k].size() != rows() || a[k][0].size() != cols() ||
          b[k][0].size() != cols()) {
        throw DimensionError("StateMatrices: all matrices must share dimensions");
      }
    }
  }

  static Matrix mix(const std::vector<Matrix>& ms, std::span<const double> p) {
    Matrix out(ms[0].size(), Vector(ms[0][0].size(), 0.0));
    for (std::size_t k = 0; k < ms.size(); ++k) {
      if (p[k] == 0.0) continue;
      for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t j = 0; j < out[0].size(); ++j) out[i][j] += p[k] * ms[k][i][j];
      }
    }
    return out;
  }
  Matrix a_mix(std::span<const double> p) const { return mix(a, p); }
  Matrix b_mix(std::span<const double> p) const { return mix(b, p); }

  double entry_range() const {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* set : {&a, &b}) {
      for (const auto& m : *set) {
        for (const auto& r : m) {
          for (double v : r) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        }
      }
    }
    return hi - lo;
  }
};

/// a*(p): value of sum_k p^k A^k with player one maximizing over rows.
inline double a_star(const StateMatrices& s, std::span<const double> p) {
  return game_value(s.a_mix(p)).value;
}

/// b*(p): value of sum_k p^k B^k with player two maximizing over columns.
inline double b_star(const StateMatrices& s, std::span<const double> p) {
  return game_value(transpose(s.b_mix(p))).value;
}

enum class EnvelopeKind { kVex, kCav };

/// vex (greatest convex minorant) or cav (least concave majorant) of a
/// function sampled on a barycentric grid of Delta(K).
class Envelope {
 public:
  Envelope() = default;
  Envelope(std::vector<Vector> grid, Vector values, EnvelopeKind kind)
      : grid_(std::move(grid)), values_(std::move(values)), kind_(kind) {}

  const std::vector<Vector>& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  EnvelopeKind kind() const { return kind_; }
  std::size_t states() const { return grid_.empty() ? 0 : grid_[0].size(); }

  /// Envelope of the grid data evaluated at an arbitrary p in Delta(K).
  double operator()(std::span<const double> p) const {
    if (p.size() != states()) throw DimensionError("Envelope: wrong dimension");
    if (states() == 1) return values_[0];
    if (states() == 2) {
      // Grid is ordered by increasing p[0].
      const double t = std::clamp(p[0], 0.0, 1.0) * static_cast<double>(grid_.size() - 1);
      const std::size_t lo = std::min(static_cast<std::size_t>(t), grid_.size() - 2);
      const double f = t - static_cast<double>(lo);
      return (1.0 - f) * values_[lo] + f * values_[lo + 1];
    }
    return hull_value(grid_, values_, kind_, p);
  }

  /// Convex (concave) hull of the points (grid_g, values_g) at p, by LP.
  static double hull_value(const std::vector<Vector>& grid, const Vector& values,
                           EnvelopeKind kind, std::span<const double> p) {
    const std::size_t g = grid.size();
    const std::size_t k = p.size();
    LinearProgram lp(g);
    const double sign = kind == EnvelopeKind::kVex ? 1.0 : -1.0;
    for (std::size_t i = 0; i < g; ++i) lp.c[i] = sign * values[i];
    for (std::size_t s = 0; s + 1 < k; ++s) {
      Vector row(g);
      for (std::size_t i = 0; i < g; ++i) row[i] = grid[i][s];
      lp.add_eq(std::move(row), p[s]);
    }
    lp.add_eq(Vector(g, 1.0), 1.0);
    const LpResult r = solve_lp(lp);
    if (!r.optimal()) throw NumericError("Envelope: hull LP failed", 0.0);
    return sign * r.objective;
  }

 private:
  std::vector<Vector> grid_;
  Vector values_;
  EnvelopeKind kind_ = EnvelopeKind::kVex;
};

/// Envelope of values given on `grid` (as produced by simplex_grid).
inline Envelope envelope(const std::vector<Vector>& grid, const Vector& values, EnvelopeKind kind) {
  if (grid.size() != values.size() || grid.empty()) throw DimensionError("envelope: size mismatch");
  const std::size_t k = grid[0].size();
  Vector out(values.size());
  if (k == 1) {
    out = values;
  } else if (k == 2) {
    if (grid.size() < 2) throw InvalidInput("envelope: need at least 2 grid points per edge");
    // Monotone chain over t = p[0]; cav is -vex(-f).
    const double sign = kind == EnvelopeKind::kVex ? 1.0 : -1.0;
    std::vector<std::size_t> hull;
    auto t = [&](std::size_t i) { return grid[i][0]; };
    auto f = [&](std::size_t i) { return sign * values[i]; };
    for (std::size_t i = 0; i < grid.size(); ++i) {
      while (hull.size() >= 2) {
        const std::size_t a = hull[hull.size() - 2], b = hull.back();
        const double cross = (t(b) - t(a)) * (f(i) - f(a)) - (f(b) - f(a)) * (t(i) - t(a));
        if (cross <= 0.0) {
          hull.pop_back();
        } else {
          break;
        }
      }
      hull.push_back(i);
    }
    std::size_t seg = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      while (seg + 1 < hull.size() && hull[seg + 1] < i) ++seg;
      if (seg + 1 >= hull.size()) {
        out[i] = sign * f(hull[seg]);
        continue;
      }
      const std::size_t a = hull[seg], b = hull[seg + 1];
      if (i == a) {
        out[i] = values[a];
      } else if (i == b) {
        out[i] = values[b];
      } else {
        const double w = (t(i) - t(a)) / (t(b) - t(a));
        out[i] = sign * ((1.0 - w) * f(a) + w * f(b));
      }
    }
  } else {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out[i] = Envelope::hull_value(grid, values, kind, grid[i]);
    }
  }
  return Envelope(grid, std::move(out), kind);
}

/// Grid resolution (subdivisions per edge) used for Delta(K) by default:
/// 101 points per edge for |K| = 2, 21 for |K| = 3.
inline std::size_t default_state_resolution(std::size_t states) {
  return states <= 2 ? 100 : 20;
}

/// Cached a*, b* and vex(b*) on a grid of Delta(K).
class StateGameAnalysis {
 public:
  StateGameAnalysis(StateMatrices mats, std::size_t resolution = 0) : mats_(std::move(mats)) {
    mats_.validate();
    resolution_ = resolution ? resolution : default_state_resolution(mats_.states());
    grid_ = simplex_grid(mats_.states(), resolution_);
    a_values_.reserve(grid_.size());
    b_values_.reserve(grid_.size());
    for (const auto& q : grid_) {
      a_values_.push_back(a_star(mats_, q));
      b_values_.push_back(b_star(mats_, q));
    }
    vex_b_ = envelope(grid_, b_values_, EnvelopeKind::kVex);
  }

  const StateMatrices& matrices() const { return mats_; }
  const std::vector<Vector>& grid() const { return grid_; }
  const Vector& a_values() const { return a_values_; }
  const Vector& b_values() const { return b_values_; }
  const Envelope& vex_b() const { return vex_b_; }
  std::size_t resolution() const { return resolution_; }

  /// Lipschitz bound of q -> y.q - a*(q) in the l1 norm, times the grid's
  /// l1 covering radius: slack lost between grid points is at most this.
  double ir_margin(std::span<const double> y) const {
    double lip = 0.0;
    for (double v : y) lip = std::max(lip, std::abs(v));
    for (const auto& m : mats_.a) {
      for (const auto& r : m) {
        for (double v : r) lip = std::max(lip, std::abs(v));
      }
    }
    return 2.0 * lip / static_cast<double>(resolution_);
  }

 private:
  StateMatrices mats_;
  std::size_t resolution_ = 0;
  std::vector<Vector> grid_;
  Vector a_values_;
  Vector b_values_;
  Envelope vex_b_;
};

struct IrCheck {
  bool ok = false;
  Vector worst_q;
  double min_slack = 0.0;         // min over grid of y.q - a*(q)
  double certified_margin = 0.0;  // continuity allowance between grid points
};

/// y in R^K is individually rational for player one iff y.q >= a*(q) for all
/// q; checked on the analysis grid.
inline IrCheck individually_rational_p1(std::span<const double> y, const StateGameAnalysis& an,
                                        double tol = 1e-9) {
  if (y.size() != an.matrices().states()) throw DimensionError("IR p1: wrong dimension");
  IrCheck c;
  c.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < an.grid().size(); ++g) {
    double s = -an.a_values()[g];
    for (std::size_t k = 0; k < y.size(); ++k) s += y[k] * an.grid()[g][k];
    if (s < c.min_slack) {
      c.min_slack = s;
      c.worst_q = an.grid()[g];
    }
  }
  c.ok = c.min_slack >= -tol;
  c.certified_margin = an.ir_margin(y);
  return c;
}

/// (r, p) is individually rational for player two iff r >= vex(b*)(p).
inline bool individually_rational_p2(double r, std::span<const double> p,
                                     const StateGameAnalysis& an, double tol = 1e-9) {
  return r >= an.vex_b()(p) - tol;
}

/// (gamma A)^k and (gamma B)^k; gamma is row-major over I x J.
inline std::pair<Vector, Vector> gamma_payoffs(std::span<const double> gamma,
                                               const StateMatrices& s) {
  const std::size_t rows = s.rows(), cols = s.cols();
  if (gamma.size() != rows * cols) throw DimensionError("gamma_payoffs: wrong dimension");
  Vector ga(s.states(), 0.0), gb(s.states(), 0.0);
  for (std::size_t k = 0; k < s.states(); ++k) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        ga[k] += gamma[i * cols + j] * s.a[k][i][j];
        gb[k] += gamma[i * cols + j] * s.b[k][i][j];
      }
    }
  }
  return {ga, gb};
}

/// Player one's mixed action at a stage, given the stage index and the
/// running average vector payoff.
using PlayerOneStrategy = std::function<Vector(std::size_t stage, const Vector& average)>;

struct ApproachResult {
  Vector average;   // per-state average payoff after T stages
  double distance;  // Euclidean distance to the orthant {z <= y}
};

inline double orthant_distance(std::span<const double> z, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double e = std::max(z[k] - y[k], 0.0);
    s += e * e;
  }
  return std::sqrt(s);
}

/// Blackwell approachability of {z <= y} by player two with vector payoff
/// (A^k(i, j))_k. Outside the orthant player two plays an optimal (minimizing)
/// strategy of sum_k lambda^k A^k, lambda the normalized positive part of
/// average - y; inside it keeps the last direction.
inline ApproachResult approachability_punish(std::span<const double> y, const StateMatrices& s,
                                             const PlayerOneStrategy& player_one,
                                             std::size_t stages, std::uint64_t seed) {
  if (stages == 0) throw InvalidInput("approachability_punish: need T >= 1");
  const std::size_t K = s.states();
  if (y.size() != K) throw DimensionError("approachability_punish: target dimension");
  std::mt19937_64 rng(seed);
  Vector avg(K, 0.0);
  Vector lambda(K, 1.0 / static_cast<double>(K));
  Vector tau = game_value(s.a_mix(lambda)).col_strategy;
  for (std::size_t t = 0; t < stages; ++t) {
    if (t > 0) {
      Vector pos(K);
      double sum = 0.0;
      for (std::size_t k = 0; k < K; ++k) sum += (pos[k] = std::max(avg[k] - y[k], 0.0));
      if (sum > 0.0) {
        for (double& v : pos) v /= sum;
        if (max_abs_diff(pos, lambda) > 1e-12) {
          lambda = std::move(pos);
          tau = game_value(s.a_mix(lambda)).col_strategy;
        }
      }
    }
    const Vector sigma = player_one(t, avg);
    std::discrete_distribution<std::size_t> di(sigma.begin(), sigma.end());
    std::discrete_distribution<std::size_t> dj(tau.begin(), tau.end());
    const std::size_t i = di(rng), j = dj(rng);
    const double w = 1.0 / static_cast<double>(t + 1);
    for (std::size_t k = 0; k < K; ++k) avg[k] += w * (s.a[k][i][j] - avg[k]);
  }
  return {avg, orthant_distance(avg, y)};
}

struct NashPoint {
  Vector row;
  Vector col;
  double row_payoff = 0.0;
  double col_payoff = 0.0;
};

struct NashResult {
  std::vector<NashPoint> equilibria;
  bool degenerate = false;  // some support system was singular
};

/// All Nash equilibria of a nondegenerate bimatrix game by enumerating
/// equal-size support pairs.
inline NashResult nash_bimatrix(const Matrix& a, const Matrix& b) {
  check_matrix(a, "nash_bimatrix");
  check_matrix(b, "nash_bimatrix");
  const std::size_t m = a.size(), n = a[0].size();
  if (m > 4 || n > 4) throw InvalidInput("nash_bimatrix: at most 4 actions per player");
  if (b.size() != m || b[0].size() != n) throw DimensionError("nash_bimatrix: shape mismatch");
  NashResult res;
  const double tol = 1e-9;

  auto subsets = [](std::size_t count, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    for (std::uint32_t mask = 1; mask < (1u << count); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
      std::vector<std::size_t> s;
      for (std::size_t i = 0; i < count; ++i) {
        if (mask >> i & 1) s.push_back(i);
      }
      out.push_back(std::move(s));
    }
    return out;
  };
  // Solve sum_{c in T} M[r][c] z_c = u (r in S), sum z = 1 for z on T.
  auto indifference = [&](const Matrix& mat, const std::vector<std::size_t>& S,
                          const std::vector<std::size_t>& T, Vector& z, double& u) {
    const std::size_t k = S.size();
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k + 1),
                                                static_cast<Eigen::Index>(k + 1));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k + 1));
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) sys(r, c) = mat[S[r]][T[c]];
      sys(r, k) = -1.0;
    }
    for (std::size_t c = 0; c < k; ++c) sys(k, c) = 1.0;
    rhs(k) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    if (lu.rank() < static_cast<Eigen::Index>(k + 1)) return false;
    const Eigen::VectorXd sol = lu.solve(rhs);
    z.assign(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) z[c] = sol(static_cast<Eigen::Index>(c));
    u = sol(static_cast<Eigen::Index>(k));
    return true;
  };
  const Matrix bt = transpose(b);
  for (std::size_t k = 1; k <= std::min(m, n); ++k) {
    for (const auto& S : subsets(m, k)) {
      for (const auto& T : subsets(n, k)) {
        Vector yz, xz;
        double u = 0.0, v = 0.0;
        // Column strategy makes rows in S indifferent; row strategy makes
        // columns in T indifferent.
        if (!indifference(a, S, T, yz, u) || !indifference(bt, T, S, xz, v)) {
          res.degenerate = true;
          continue;
        }
        if (*std::min_element(yz.begin(), yz.end()) < -tol ||
            *std::min_element(xz.begin(), xz.end()) < -tol) {
          continue;
        }
        Vector x(m, 0.0), y(n, 0.0);
        for (std::size_t r = 0; r < k; ++r) x[S[r]] = std::max(xz[r], 0.0);
        for (std::size_t c = 0; c < k; ++c) y[T[c]] = std::max(yz[c], 0.0);
        bool ok = true;
        for (std::size_t i = 0; i < m && ok; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += a[i][j] * y[j];
          if (s > u + tol) ok = false;
        }
        for (std::size_t j = 0; j < n && ok; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < m; ++i) s += x[i] * b[i][j];
          if (s > v + tol) ok = false;
        }
        if (!ok) continue;
        bool dup = false;
        for (const auto& e : res.equilibria) {
          if (max_abs_diff(e.row, x) < 1e-9 && max_abs_diff(e.col, y) < 1e-9) dup = true;
        }
        if (!dup) res.equilibria.push_back({x, y, u, v});
      }
    }
  }
  return res;
}

}  // namespace myopic
