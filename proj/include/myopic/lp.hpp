#pragma once

// Dense two-phase simplex method, Dantzig pricing with Bland's rule as the
// anti-cycling fallback. Sized for the small programs this library needs:
// matrix games, envelope evaluation, hull membership and joint plans.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "myopic/error.hpp"
#include "myopic/simplex.hpp"

namespace myopic {

/// minimize c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x_j >= 0 unless free_vars[j].
struct LinearProgram {
  Vector c;
  std::vector<Vector> a_ub;
  Vector b_ub;
  std::vector<Vector> a_eq;
  Vector b_eq;
  std::vector<bool> free_vars;  // empty means all variables nonnegative

  explicit LinearProgram(std::size_t num_vars = 0) : c(num_vars, 0.0) {}
  std::size_t num_vars() const { return c.size(); }

  void add_le(Vector row, double rhs) {
    a_ub.push_back(std::move(row));
    b_ub.push_back(rhs);
  }
  void add_ge(Vector row, double rhs) {
    for (double& v : row) v = -v;
    add_le(std::move(row), -rhs);
  }
  void add_eq(Vector row, double rhs) {
    a_eq.push_back(std::move(row));
    b_eq.push_back(rhs);
  }
  void set_free(std::size_t j) {
    if (free_vars.empty()) free_vars.assign(num_vars(), false);
    free_vars[j] = true;
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double objective = std::numeric_limits<double>::quiet_NaN();
  bool optimal() const { return status == LpStatus::kOptimal; }
};

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  // Row `rows_` holds reduced costs; its rhs holds -objective.
  double& cost(std::size_t c) { return at(rows_, c); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    nz_.clear();
    for (std::size_t c = 0; c <= cols_; ++c) {
      if (at(pr, c) != 0.0) {
        at(pr, c) /= p;
        nz_.push_back(c);
      }
    }
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c : nz_) at(r, c) -= f * at(pr, c);
    }
    basis_[pr] = pc;
  }

  /// Runs simplex iterations on columns [0, allowed): most negative reduced
  /// cost, switching to Bland's rule after a run of degenerate pivots.
  LpStatus optimize(std::size_t allowed, std::size_t max_iter, double eps) {
    std::size_t degenerate = 0;
    for (std::size_t it = 0; it < max_iter; ++it) {
      const bool bland = degenerate > 50;
      std::size_t enter = allowed;
      double most = -eps;
      for (std::size_t c = 0; c < allowed; ++c) {
        if (cost(c) < most) {
          enter = c;
          if (bland) break;
          most = cost(c);
        }
      }
      if (enter == allowed) return LpStatus::kOptimal;
      const double piv_tol = 1e-9;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a > piv_tol) best = std::min(best, std::max(rhs(r), 0.0) / a);
      }
      if (!std::isfinite(best)) return LpStatus::kUnbounded;
      // Among minimum-ratio rows: the largest pivot, or under Bland the
      // lowest basic index.
      std::size_t leave = rows_;
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a <= piv_tol || std::max(rhs(r), 0.0) / a > best + eps) continue;
        if (leave == rows_) {
          leave = r;
        } else if (bland ? basis_[r] < basis_[leave] : a > at(leave, enter)) {
          leave = r;
        }
      }
      degenerate = best <= eps ? degenerate + 1 : 0;
      pivot(leave, enter);
    }
    return LpStatus::kIterationLimit;
  }

  void drop_row(std::size_t r) {
    std::vector<double> next((rows_) * (cols_ + 1));
    std::size_t w = 0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      for (std::size_t c = 0; c <= cols_; ++c) next[w * (cols_ + 1) + c] = at(i, c);
      ++w;
    }
    data_ = std::move(next);
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nz_;
};

}  // namespace detail

inline LpResult solve_lp(const LinearProgram& lp, std::size_t max_iter = 200000,
                         double eps = 1e-11) {
  const std::size_t n = lp.num_vars();
  std::vector<bool> is_free = lp.free_vars;
  is_free.resize(n, false);

  // Column map: original var j -> (plus column, minus column or npos).
  std::vector<std::size_t> plus(n), minus(n, static_cast<std::size_t>(-1));
  std::size_t structural = 0;
  for (std::size_t j = 0; j < n; ++j) {
    plus[j] = structural++;
    if (is_free[j]) minus[j] = structural++;
  }
  const std::size_t m_ub = lp.a_ub.size();
  const std::size_t m_eq = lp.a_eq.size();
  const std::size_t m = m_ub + m_eq;
  const std::size_t slack0 = structural;
  const std::size_t art0 = slack0 + m_ub;
  const std::size_t cols = art0 + m;

  detail::Tableau t(m, cols);
  auto fill_row = [&](std::size_t r, const Vector& a, double b, bool has_slack) {
    if (a.size() != n) throw DimensionError("solve_lp: constraint row width mismatch");
    const double sign = b < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      t.at(r, plus[j]) = sign * a[j];
      if (is_free[j]) t.at(r, minus[j]) = -sign * a[j];
    }
    if (has_slack) t.at(r, slack0 + r) = sign;
    t.rhs(r) = sign * b;
    if (has_slack && sign > 0.0) {
      t.basis()[r] = slack0 + r;
    } else {
      t.at(r, art0 + r) = 1.0;
      t.basis()[r] = art0 + r;
    }
  };
  for (std::size_t r = 0; r < m_ub; ++r) fill_row(r, lp.a_ub[r], lp.b_ub[r], true);
  for (std::size_t r = 0; r < m_eq; ++r) fill_row(m_ub + r, lp.a_eq[r], lp.b_eq[r], false);

  // Phase 1: minimize the sum of artificials.
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis()[r] < art0) continue;
    for (std::size_t c = 0; c <= cols; ++c) {
      if (c >= art0 && c < cols) continue;
      t.cost(c) -= t.at(r, c);
    }
  }
  LpResult result;
  LpStatus s1 = t.optimize(cols, max_iter, eps);
  if (s1 == LpStatus::kIterationLimit) {
    result.status = s1;
    return result;
  }
  double scale = 1.0;
  for (std::size_t r = 0; r < t.rows(); ++r) scale = std::max(scale, std::abs(t.rhs(r)));
  if (-t.at(t.rows(), cols) > 1e-9 * scale) {
    result.status = LpStatus::kInfeasible;
    return result;
  }
  // Drive artificials out of the basis; drop redundant rows.
  for (std::size_t r = 0; r < t.rows();) {
    if (t.basis()[r] < art0) {
      ++r;
      continue;
    }
    std::size_t pc = art0;
    for (std::size_t c = 0; c < art0; ++c) {
      if (std::abs(t.at(r, c)) > 1e-9) {
        pc = c;
        break;
      }
    }
    if (pc == art0) {
      t.drop_row(r);
    } else {
      t.pivot(r, pc);
      ++r;
    }
  }

  // Phase 2: original costs, artificials barred from entering.
  const std::size_t rows = t.rows();
  for (std::size_t c = 0; c <= cols; ++c) t.at(rows, c) = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    t.cost(plus[j]) = lp.c[j];
    if (is_free[j]) t.cost(minus[j]) = -lp.c[j];
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const double cb = t.at(rows, t.basis()[r]);
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= cols; ++c) t.at(rows, c) -= cb * t.at(r, c);
  }
  LpStatus s2 = t.optimize(art0, max_iter, eps);
  result.status = s2;
  if (s2 != LpStatus::kOptimal) return result;

  Vector col_value(cols, 0.0);
  for (std::size_t r = 0; r < rows; ++r) col_value[t.basis()[r]] = t.rhs(r);
  result.x.assign(n, 0.0);
  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    result.x[j] = col_value[plus[j]];
    if (is_free[j]) result.x[j] -= col_value[minus[j]];
    obj += lp.c[j] * result.x[j];
  }
  result.objective = obj;
  return result;
}

struct HullMembership {
  double distance = std::numeric_limits<double>::infinity();  // max-norm gap to the hull
  Vector weights;
  bool contains(double tol) const { return distance <= tol; }
};

/// Max-norm distance from `point` to conv(points), with the minimizing
/// convex weights.
inline HullMembership hull_membership(std::span<const double> point,
                                      const std::vector<Vector>& points) {
  if (points.empty()) throw InvalidInput("hull_membership: no generators");
  const std::size_t m = points.size();
  const std::size_t d = point.size();
  LinearProgram lp(m + 1);  // mu, t
  lp.c[m] = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    Vector up(m + 1, 0.0), down(m + 1, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      if (points[k].size() != d) throw DimensionError("hull_membership: generator dimension");
      up[k] = points[k][i];
      down[k] = -points[k][i];
    }
    up[m] = -1.0;
    down[m] = -1.0;
    lp.add_le(std::move(up), point[i]);
    lp.add_le(std::move(down), -point[i]);
  }
  Vector ones(m + 1, 1.0);
  ones[m] = 0.0;
  lp.add_eq(std::move(ones), 1.0);
  const LpResult r = solve_lp(lp);
  HullMembership h;
  if (!r.optimal()) return h;
  h.weights.assign(r.x.begin(), r.x.begin() + static_cast<std::ptrdiff_t>(m));
  h.distance = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    double v = -point[i];
    for (std::size_t k = 0; k < m; ++k) v += h.weights[k] * points[k][i];
    h.distance = std::max(h.distance, std::abs(v));
  }
  return h;
}

}  // namespace myopic
