#pragma once

// Euclidean retraction of R^J onto the probability simplex, its face
// decomposition, and the per-player product retraction.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "myopic/error.hpp"

namespace myopic {

using Vector = std::vector<double>;

/// Coordinates below this are treated as outside the support of a point.
inline constexpr double kSupportThreshold = 1e-12;

/// Tolerance on the coordinate sum of a valid simplex point.
inline constexpr double kSimplexSumTolerance = 1e-12;

inline void require_finite(std::span<const double> v, const char* what) {
  for (double c : v) {
    if (!std::isfinite(c)) {
      throw InvalidInput(std::string(what) + ": non-finite coordinate");
    }
  }
}

inline bool is_simplex_point(std::span<const double> x,
                             double tol = kSimplexSumTolerance) {
  if (x.empty()) return false;
  double sum = 0.0;
  for (double c : x) {
    if (!std::isfinite(c) || c < -tol) return false;
    sum += c;
  }
  return std::abs(sum - 1.0) <= tol * static_cast<double>(x.size());
}

/// Nearest point of the simplex to y (sort-and-threshold method).
///
/// The result x satisfies the retraction characterization: with d = y - x,
/// d_i equals max_j d_j on every coordinate where x_i > 0.
inline Vector project_simplex(std::span<const double> y) {
  if (y.empty()) throw InvalidInput("project_simplex: empty vector");
  require_finite(y, "project_simplex");
  Vector u(y.begin(), y.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumulative += u[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) theta = candidate;
  }
  Vector x(y.size());
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) total += (x[i] = std::max(y[i] - theta, 0.0));
  // Cancellation in theta for large |y| can leave the sum off by ~|y| * 1e-16.
  if (total != 1.0) {
    for (double& v : x) v /= total;
  }
  return x;
}

/// z = x + y with x in the face Delta(support) and y in Y_support.
struct FaceDecomposition {
  std::vector<std::size_t> support;
  Vector x;
  Vector y;
};

inline FaceDecomposition face_decompose(std::span<const double> z) {
  FaceDecomposition d;
  d.x = project_simplex(z);
  d.y.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    d.y[i] = z[i] - d.x[i];
    if (d.x[i] > kSupportThreshold) d.support.push_back(i);
  }
  return d;
}

/// Action counts per player; fixes how a flat vector over I = (+)_n I_n is
/// split into player blocks.
class Layout {
 public:
  Layout() = default;
  explicit Layout(std::vector<std::size_t> actions) : actions_(std::move(actions)) {
    offsets_.reserve(actions_.size() + 1);
    offsets_.push_back(0);
    for (std::size_t a : actions_) {
      if (a == 0) throw DimensionError("Layout: player with no actions");
      offsets_.push_back(offsets_.back() + a);
    }
  }

  std::size_t players() const { return actions_.size(); }
  std::size_t actions(std::size_t n) const { return actions_.at(n); }
  std::size_t offset(std::size_t n) const { return offsets_.at(n); }
  std::size_t total() const { return offsets_.empty() ? 0 : offsets_.back(); }
  const std::vector<std::size_t>& action_counts() const { return actions_; }
  std::size_t max_actions() const {
    return actions_.empty() ? 0 : *std::max_element(actions_.begin(), actions_.end());
  }

  bool operator==(const Layout&) const = default;

 private:
  std::vector<std::size_t> actions_;
  std::vector<std::size_t> offsets_;
};

/// A point of Delta = prod_n Delta(I_n), stored flat.
class MixedProfile {
 public:
  MixedProfile() = default;
  MixedProfile(Layout layout, Vector coords)
      : layout_(std::move(layout)), coords_(std::move(coords)) {
    if (coords_.size() != layout_.total()) {
      throw DimensionError("MixedProfile: coordinate count does not match layout");
    }
    for (std::size_t n = 0; n < layout_.players(); ++n) {
      if (!is_simplex_point(block(n), 1e-9)) {
        throw InvalidInput("MixedProfile: block " + std::to_string(n) +
                           " is not a probability vector");
      }
    }
  }

  /// Uniform distribution in every block.
  static MixedProfile barycenter(const Layout& layout) {
    Vector c(layout.total());
    for (std::size_t n = 0; n < layout.players(); ++n) {
      const double v = 1.0 / static_cast<double>(layout.actions(n));
      std::fill_n(c.begin() + static_cast<std::ptrdiff_t>(layout.offset(n)),
                  layout.actions(n), v);
    }
    return MixedProfile(layout, std::move(c));
  }

  /// Point mass on one action per player.
  static MixedProfile pure(const Layout& layout, const std::vector<std::size_t>& choice) {
    if (choice.size() != layout.players()) throw DimensionError("pure: wrong player count");
    Vector c(layout.total(), 0.0);
    for (std::size_t n = 0; n < layout.players(); ++n) {
      if (choice[n] >= layout.actions(n)) throw InvalidInput("pure: action out of range");
      c[layout.offset(n) + choice[n]] = 1.0;
    }
    return MixedProfile(layout, std::move(c));
  }

  const Layout& layout() const { return layout_; }
  const Vector& coords() const { return coords_; }
  std::span<const double> block(std::size_t n) const {
    return std::span<const double>(coords_).subspan(layout_.offset(n), layout_.actions(n));
  }
  double operator()(std::size_t n, std::size_t i) const {
    return coords_[layout_.offset(n) + i];
  }

 private:
  Layout layout_;
  Vector coords_;
};

/// r = prod_n r_n: projects each player block independently.
inline MixedProfile product_retract(std::span<const double> y, const Layout& layout) {
  if (y.size() != layout.total()) {
    throw DimensionError("product_retract: vector has " + std::to_string(y.size()) +
                         " coordinates, layout expects " + std::to_string(layout.total()));
  }
  Vector out(y.size());
  for (std::size_t n = 0; n < layout.players(); ++n) {
    const Vector b = project_simplex(y.subspan(layout.offset(n), layout.actions(n)));
    std::copy(b.begin(), b.end(), out.begin() + static_cast<std::ptrdiff_t>(layout.offset(n)));
  }
  return MixedProfile(layout, std::move(out));
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double euclidean_norm(std::span<const double> a) {
  double s = 0.0;
  for (double c : a) s += c * c;
  return std::sqrt(s);
}

/// All points of Delta(dim) whose coordinates are multiples of 1/resolution.
inline std::vector<Vector> simplex_grid(std::size_t dim, std::size_t resolution) {
  std::vector<Vector> out;
  if (dim == 0) return out;
  std::vector<std::size_t> counts(dim, 0);
  const double step = 1.0 / static_cast<double>(resolution);
  // Enumerate compositions of `resolution` into `dim` nonnegative parts.
  auto rec = [&](auto&& self, std::size_t idx, std::size_t remaining) -> void {
    if (idx + 1 == dim) {
      counts[idx] = remaining;
      Vector p(dim);
      for (std::size_t k = 0; k < dim; ++k) p[k] = static_cast<double>(counts[k]) * step;
      out.push_back(std::move(p));
      return;
    }
    for (std::size_t c = 0; c <= remaining; ++c) {
      counts[idx] = c;
      self(self, idx + 1, remaining - c);
    }
  };
  rec(rec, 0, resolution);
  return out;
}

/// Cartesian product of per-player simplex grids.
inline std::vector<MixedProfile> profile_mesh(const Layout& layout, std::size_t resolution) {
  std::vector<std::vector<Vector>> blocks;
  for (std::size_t n = 0; n < layout.players(); ++n) {
    blocks.push_back(simplex_grid(layout.actions(n), resolution));
  }
  std::vector<MixedProfile> out;
  std::vector<std::size_t> idx(layout.players(), 0);
  while (true) {
    Vector c;
    c.reserve(layout.total());
    for (std::size_t n = 0; n < layout.players(); ++n) {
      c.insert(c.end(), blocks[n][idx[n]].begin(), blocks[n][idx[n]].end());
    }
    out.emplace_back(layout, std::move(c));
    std::size_t n = 0;
    while (n < idx.size() && ++idx[n] == blocks[n].size()) idx[n++] = 0;
    if (n == idx.size()) break;
  }
  return out;
}

/// Number of points profile_mesh would return, saturating at `cap` + 1.
inline std::size_t profile_mesh_size(const Layout& layout, std::size_t resolution, std::size_t cap) {
  double total = 1.0;
  for (std::size_t n = 0; n < layout.players(); ++n) {
    // C(resolution + a - 1, a - 1)
    double c = 1.0;
    const std::size_t a = layout.actions(n);
    for (std::size_t i = 1; i < a; ++i) {
      c = c * static_cast<double>(resolution + i) / static_cast<double>(i);
      if (c > static_cast<double>(cap)) break;
    }
    total *= c;
    if (total > static_cast<double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(std::llround(total));
}

/// At most `cap` points of profile_mesh: the whole mesh when it is small
/// enough, otherwise independent uniform draws of mesh points.
template <class Rng>
std::vector<MixedProfile> sampled_profile_mesh(const Layout& layout, std::size_t resolution,
                                               std::size_t cap, Rng& rng) {
  if (profile_mesh_size(layout, resolution, cap) <= cap) {
    return profile_mesh(layout, resolution);
  }
  std::vector<MixedProfile> out;
  const double step = 1.0 / static_cast<double>(resolution);
  for (std::size_t k = 0; k < cap; ++k) {
    Vector c(layout.total(), 0.0);
    for (std::size_t n = 0; n < layout.players(); ++n) {
      std::uniform_int_distribution<std::size_t> pick(0, layout.actions(n) - 1);
      for (std::size_t u = 0; u < resolution; ++u) c[layout.offset(n) + pick(rng)] += step;
    }
    out.emplace_back(layout, std::move(c));
  }
  return out;
}

}  // namespace myopic
