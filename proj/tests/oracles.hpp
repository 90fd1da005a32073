#pragma once

// Independent reference computations used only by the tests. Nothing here
// calls into the code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

/// Euclidean projection onto Delta(J) by solving the equality-constrained
/// least-squares problem on every face and keeping the nearest feasible one.
inline Vec face_enumeration_projection(const Vec& y) {
  const std::size_t d = y.size();
  Vec best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << d); ++mask) {
    double sum = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask >> i & 1) {
        sum += y[i];
        ++k;
      }
    }
    const double shift = (sum - 1.0) / static_cast<double>(k);
    Vec x(d, 0.0);
    bool feasible = true;
    for (std::size_t i = 0; i < d; ++i) {
      if (mask >> i & 1) {
        x[i] = y[i] - shift;
        if (x[i] < -1e-15) feasible = false;
      }
    }
    if (!feasible) continue;
    double dist = 0.0;
    for (std::size_t i = 0; i < d; ++i) dist += (x[i] - y[i]) * (x[i] - y[i]);
    if (dist < best_dist) {
      best_dist = dist;
      best = x;
    }
  }
  return best;
}

/// Nearest mesh point of Delta(J) (mesh step 1/res) to y.
inline Vec mesh_projection(const Vec& y, std::size_t res) {
  const std::size_t d = y.size();
  Vec best;
  double best_dist = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> c(d, 0);
  auto rec = [&](auto&& self, std::size_t idx, std::size_t rem) -> void {
    if (idx + 1 == d) {
      c[idx] = rem;
      double dist = 0.0;
      Vec x(d);
      for (std::size_t i = 0; i < d; ++i) {
        x[i] = static_cast<double>(c[i]) / static_cast<double>(res);
        dist += (x[i] - y[i]) * (x[i] - y[i]);
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = x;
      }
      return;
    }
    for (std::size_t v = 0; v <= rem; ++v) {
      c[idx] = v;
      self(self, idx + 1, rem - v);
    }
  };
  rec(rec, 0, res);
  return best;
}

/// Minimax value of a matrix game by brute force over a 1/res mesh of the
/// row player's mixed strategies (2-row games).
inline double brute_force_value_2rows(const std::vector<Vec>& m, std::size_t res) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= res; ++k) {
    const double p = static_cast<double>(k) / static_cast<double>(res);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m[0].size(); ++j) worst = std::min(worst, p * m[0][j] + (1 - p) * m[1][j]);
    best = std::max(best, worst);
  }
  return best;
}

/// Greatest convex minorant at grid points of a 1-D function sampled on an
/// equispaced grid: the maximum over all affine functions through two grid
/// points that lie below every sample.
inline Vec affine_minorant_envelope(const Vec& f) {
  const std::size_t g = f.size();
  Vec out(g, -std::numeric_limits<double>::infinity());
  auto t = [&](std::size_t i) { return static_cast<double>(i) / static_cast<double>(g - 1); };
  for (std::size_t a = 0; a < g; ++a) {
    for (std::size_t b = a; b < g; ++b) {
      // Candidate lines: through (a, f_a) and (b, f_b); horizontal if a == b.
      const double slope = a == b ? 0.0 : (f[b] - f[a]) / (t(b) - t(a));
      bool below = true;
      for (std::size_t i = 0; i < g && below; ++i) {
        if (f[a] + slope * (t(i) - t(a)) > f[i] + 1e-12) below = false;
      }
      if (!below) continue;
      for (std::size_t i = 0; i < g; ++i) out[i] = std::max(out[i], f[a] + slope * (t(i) - t(a)));
    }
  }
  return out;
}

inline Vec random_simplex_point(std::size_t d, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Vec x(d);
  double s = 0.0;
  for (double& v : x) s += (v = e(rng));
  for (double& v : x) v /= s;
  return x;
}

}  // namespace oracle
