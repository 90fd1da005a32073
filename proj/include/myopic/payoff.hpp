#pragma once

// Payoff families w : Delta -> R^I (one payoff function per player action)
// and finite-selection payoff correspondences.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "myopic/error.hpp"
#include "myopic/simplex.hpp"

namespace myopic {

/// Action and player labels carried along for reports and documents.
struct Labels {
  std::vector<std::string> players;
  std::vector<std::vector<std::string>> actions;

  static Labels numbered(const Layout& layout) {
    Labels l;
    for (std::size_t n = 0; n < layout.players(); ++n) {
      l.players.push_back(std::to_string(n + 1));
      std::vector<std::string> acts;
      for (std::size_t i = 0; i < layout.actions(n); ++i) acts.push_back(std::to_string(i + 1));
      l.actions.push_back(std::move(acts));
    }
    return l;
  }
};

/// The family {w^n_i}. Evaluation must be deterministic and safe to call
/// concurrently.
class PayoffFamily {
 public:
  using Evaluator = std::function<Vector(const MixedProfile&)>;

  PayoffFamily() = default;
  PayoffFamily(Layout layout, Evaluator eval,
               double bound = std::numeric_limits<double>::infinity())
      : layout_(std::move(layout)), eval_(std::move(eval)), bound_(bound),
        labels_(Labels::numbered(layout_)) {}

  Vector operator()(const MixedProfile& x) const {
    if (!(x.layout() == layout_)) throw DimensionError("PayoffFamily: profile layout mismatch");
    Vector out = eval_(x);
    if (out.size() != layout_.total()) {
      throw DimensionError("PayoffFamily: evaluator returned wrong dimension");
    }
    return out;
  }

  const Layout& layout() const { return layout_; }
  double bound() const { return bound_; }
  const Labels& labels() const { return labels_; }
  void set_labels(Labels l) { labels_ = std::move(l); }
  void set_bound(double b) { bound_ = b; }

 private:
  Layout layout_;
  Evaluator eval_;
  double bound_ = std::numeric_limits<double>::infinity();
  Labels labels_;
};

inline PayoffFamily constant_family(const Layout& layout, Vector c) {
  if (c.size() != layout.total()) throw DimensionError("constant_family: wrong dimension");
  double b = 0.0;
  for (double v : c) b = std::max(b, std::abs(v));
  return PayoffFamily(layout, [c = std::move(c)](const MixedProfile&) { return c; }, b);
}

/// Payoff tensors of a finite game in strategic form. tables[n] holds player
/// n's payoff for every pure profile, row-major with player 0 slowest.
struct StrategicGame {
  Layout layout;
  std::vector<Vector> tables;

  std::size_t profile_count() const {
    std::size_t c = 1;
    for (std::size_t a : layout.action_counts()) c *= a;
    return c;
  }
  std::size_t index(const std::vector<std::size_t>& pure) const {
    std::size_t idx = 0;
    for (std::size_t n = 0; n < layout.players(); ++n) idx = idx * layout.actions(n) + pure[n];
    return idx;
  }
  std::vector<std::size_t> decode(std::size_t idx) const {
    std::vector<std::size_t> pure(layout.players());
    for (std::size_t n = layout.players(); n-- > 0;) {
      pure[n] = idx % layout.actions(n);
      idx /= layout.actions(n);
    }
    return pure;
  }

  /// Expected payoff to player n of each of its actions against x^{-n}.
  Vector action_values(const MixedProfile& x) const {
    Vector out(layout.total(), 0.0);
    const std::size_t count = profile_count();
    for (std::size_t idx = 0; idx < count; ++idx) {
      const auto pure = decode(idx);
      for (std::size_t n = 0; n < layout.players(); ++n) {
        double prob = 1.0;
        for (std::size_t m = 0; m < layout.players() && prob != 0.0; ++m) {
          if (m != n) prob *= x(m, pure[m]);
        }
        if (prob != 0.0) out[layout.offset(n) + pure[n]] += prob * tables[n][idx];
      }
    }
    return out;
  }

  /// Expected payoff of player n under x.
  double expected(const MixedProfile& x, std::size_t n) const {
    const Vector v = action_values(x);
    double s = 0.0;
    for (std::size_t i = 0; i < layout.actions(n); ++i) s += x(n, i) * v[layout.offset(n) + i];
    return s;
  }

  static StrategicGame bimatrix(const std::vector<Vector>& a, const std::vector<Vector>& b) {
    const std::size_t rows = a.size();
    const std::size_t cols = rows ? a[0].size() : 0;
    if (rows == 0 || cols == 0 || b.size() != rows) {
      throw DimensionError("bimatrix: inconsistent matrix shapes");
    }
    StrategicGame g{Layout({rows, cols}), {Vector(rows * cols), Vector(rows * cols)}};
    for (std::size_t i = 0; i < rows; ++i) {
      if (a[i].size() != cols || b[i].size() != cols) {
        throw DimensionError("bimatrix: ragged matrix");
      }
      for (std::size_t j = 0; j < cols; ++j) {
        g.tables[0][i * cols + j] = a[i][j];
        g.tables[1][i * cols + j] = b[i][j];
      }
    }
    return g;
  }
};

/// The multilinear family of a strategic game; its myopic equilibria are
/// exactly the Nash equilibria.
inline PayoffFamily multilinear_family(StrategicGame game) {
  double b = 0.0;
  for (const auto& t : game.tables) {
    for (double v : t) b = std::max(b, std::abs(v));
  }
  Layout layout = game.layout;
  return PayoffFamily(
      layout,
      [g = std::move(game)](const MixedProfile& x) { return g.action_values(x); }, b);
}

/// sum_k coeffs[k] * families[k] + shift.
inline PayoffFamily linear_combination(std::vector<PayoffFamily> families, Vector coeffs,
                                       Vector shift = {}) {
  if (families.empty() || families.size() != coeffs.size()) {
    throw DimensionError("linear_combination: coefficient count mismatch");
  }
  const Layout layout = families.front().layout();
  if (shift.empty()) shift.assign(layout.total(), 0.0);
  double b = 0.0;
  for (double s : shift) b = std::max(b, std::abs(s));
  for (std::size_t k = 0; k < families.size(); ++k) {
    if (!(families[k].layout() == layout)) throw DimensionError("linear_combination: layouts differ");
    b += std::abs(coeffs[k]) * families[k].bound();
  }
  return PayoffFamily(
      layout,
      [fs = std::move(families), cs = std::move(coeffs), sh = std::move(shift)](
          const MixedProfile& x) {
        Vector out = sh;
        for (std::size_t k = 0; k < fs.size(); ++k) {
          if (cs[k] == 0.0) continue;
          const Vector v = fs[k](x);
          for (std::size_t i = 0; i < out.size(); ++i) out[i] += cs[k] * v[i];
        }
        return out;
      },
      b);
}

/// Largest |w^n_i(x)| seen on the given sample points.
inline double sampled_sup(const PayoffFamily& w, const std::vector<MixedProfile>& points) {
  double m = 0.0;
  for (const auto& x : points) {
    for (double v : w(x)) m = std::max(m, std::abs(v));
  }
  return m;
}

/// W(x) = conv{ selection_m(x) }.
class PayoffCorrespondence {
 public:
  explicit PayoffCorrespondence(std::vector<PayoffFamily> selections)
      : selections_(std::move(selections)) {
    if (selections_.empty()) throw InvalidInput("PayoffCorrespondence: needs a selection");
    for (const auto& s : selections_) {
      if (!(s.layout() == selections_.front().layout())) {
        throw DimensionError("PayoffCorrespondence: selection layouts differ");
      }
    }
  }

  const Layout& layout() const { return selections_.front().layout(); }
  const std::vector<PayoffFamily>& selections() const { return selections_; }

  /// Selection values at x, one row per selection.
  std::vector<Vector> values(const MixedProfile& x) const {
    std::vector<Vector> v;
    v.reserve(selections_.size());
    for (const auto& s : selections_) v.push_back(s(x));
    return v;
  }

  /// The point of W(x) with the given convex weights.
  Vector combine(const MixedProfile& x, const Vector& weights) const {
    if (weights.size() != selections_.size()) throw DimensionError("combine: weight count");
    Vector out(layout().total(), 0.0);
    for (std::size_t m = 0; m < selections_.size(); ++m) {
      if (weights[m] == 0.0) continue;
      const Vector v = selections_[m](x);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += weights[m] * v[i];
    }
    return out;
  }

  /// The single-valued family x -> sum_m weights[m] selection_m(x).
  PayoffFamily fixed_weights(const Vector& weights) const {
    return linear_combination(selections_, weights);
  }

 private:
  std::vector<PayoffFamily> selections_;
};

}  // namespace myopic
