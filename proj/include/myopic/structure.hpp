#pragma once

// The graph E = {(w, x) : x is a myopic equilibrium of w} over a finite
// dimensional space W of payoff families containing the constants, the
// homeomorphism phi : W -> E, its inverse psi, and the homotopy H.
//
// Norms: |w|_sup is the largest |w^n_i(x)| over a fixed evaluation mesh
// (step 1/50 per block by default), i.e. the sup over the mesh of the
// coordinate max norm on R^I. The matching delta = sup_x |x| is 1.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "myopic/error.hpp"
#include "myopic/myopic.hpp"
#include "myopic/payoff.hpp"
#include "myopic/simplex.hpp"

namespace myopic {

class FunctionSpace {
 public:
  /// Basis = the |I| constant unit functions followed by those generators
  /// that are linearly independent (on the mesh) of everything before them.
  FunctionSpace(Layout layout, const std::vector<PayoffFamily>& generators,
                std::size_t mesh_resolution = 50)
      : layout_(std::move(layout)), mesh_(profile_mesh(layout_, mesh_resolution)),
        mesh_resolution_(mesh_resolution) {
    const std::size_t I = layout_.total();
    for (std::size_t j = 0; j < I; ++j) {
      Vector e(I, 0.0);
      e[j] = 1.0;
      add_column(constant_family(layout_, e));
    }
    for (const auto& g : generators) {
      if (!(g.layout() == layout_)) throw DimensionError("FunctionSpace: generator layout");
      add_column(g);
      if (rank() < basis_.size()) drop_last_column();
    }
    // The constants must be the first |I| basis functions, exactly.
    for (std::size_t j = 0; j < I; ++j) {
      for (std::size_t p = 0; p < mesh_.size(); ++p) {
        for (std::size_t r = 0; r < I; ++r) {
          if (sample(p, r, j) != (r == j ? 1.0 : 0.0)) {
            throw InvalidInput("FunctionSpace: constant basis function is not constant");
          }
        }
      }
    }
  }

  const Layout& layout() const { return layout_; }
  std::size_t dimension() const { return basis_.size(); }
  const std::vector<PayoffFamily>& basis() const { return basis_; }
  const std::vector<MixedProfile>& mesh() const { return mesh_; }
  std::size_t mesh_resolution() const { return mesh_resolution_; }

  /// sup_x |x| in the coordinate max norm.
  static constexpr double delta() { return 1.0; }

  Vector evaluate(const Vector& coeffs, const MixedProfile& x) const {
    check(coeffs);
    Vector out(layout_.total(), 0.0);
    for (std::size_t b = 0; b < basis_.size(); ++b) {
      if (coeffs[b] == 0.0) continue;
      if (b < layout_.total()) {
        out[b] += coeffs[b];
        continue;
      }
      const Vector v = basis_[b](x);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeffs[b] * v[i];
    }
    return out;
  }

  PayoffFamily family(const Vector& coeffs) const {
    check(coeffs);
    return PayoffFamily(layout_, [basis = basis_, coeffs](const MixedProfile& x) {
      Vector out(x.layout().total(), 0.0);
      for (std::size_t b = 0; b < basis.size(); ++b) {
        if (coeffs[b] == 0.0) continue;
        const Vector v = basis[b](x);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeffs[b] * v[i];
      }
      return out;
    });
  }

  /// Largest |w^n_i(x)| over the evaluation mesh.
  double sup_norm(const Vector& coeffs) const {
    check(coeffs);
    double m = 0.0;
    for (std::size_t p = 0; p < mesh_.size(); ++p) {
      for (std::size_t r = 0; r < layout_.total(); ++r) {
        double v = 0.0;
        for (std::size_t b = 0; b < basis_.size(); ++b) v += coeffs[b] * sample(p, r, b);
        m = std::max(m, std::abs(v));
      }
    }
    return m;
  }

  /// Coefficients of w + c for a constant vector c.
  Vector add_constant(Vector coeffs, std::span<const double> c) const {
    check(coeffs);
    if (c.size() != layout_.total()) throw DimensionError("add_constant: wrong dimension");
    for (std::size_t i = 0; i < c.size(); ++i) coeffs[i] += c[i];
    return coeffs;
  }

 private:
  void check(const Vector& coeffs) const {
    if (coeffs.size() != basis_.size()) throw DimensionError("FunctionSpace: coefficient count");
    require_finite(coeffs, "FunctionSpace");
  }

  double sample(std::size_t point, std::size_t row, std::size_t col) const {
    return samples_[col][point * layout_.total() + row];
  }

  void add_column(const PayoffFamily& f) {
    Vector col;
    col.reserve(mesh_.size() * layout_.total());
    for (const auto& x : mesh_) {
      const Vector v = f(x);
      col.insert(col.end(), v.begin(), v.end());
    }
    samples_.push_back(std::move(col));
    basis_.push_back(f);
  }

  void drop_last_column() {
    samples_.pop_back();
    basis_.pop_back();
  }

  std::size_t rank() const {
    const auto rows = static_cast<Eigen::Index>(samples_[0].size());
    Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(samples_.size()));
    for (std::size_t c = 0; c < samples_.size(); ++c) {
      for (Eigen::Index r = 0; r < rows; ++r) m(r, static_cast<Eigen::Index>(c)) = samples_[c][r];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    qr.setThreshold(1e-9);
    return static_cast<std::size_t>(qr.rank());
  }

  Layout layout_;
  std::vector<MixedProfile> mesh_;
  std::size_t mesh_resolution_;
  std::vector<PayoffFamily> basis_;
  std::vector<Vector> samples_;  // per basis function, mesh-major then coordinate
};

/// Constants plus the multilinear functions: coordinate (n, i) carrying the
/// indicator product prod_{m != n} x^m_{s_m} for each pure profile s of the
/// other players.
inline FunctionSpace multilinear_space(const Layout& layout, std::size_t mesh_resolution = 50) {
  std::vector<PayoffFamily> gens;
  const std::size_t N = layout.players();
  for (std::size_t n = 0; n < N; ++n) {
    std::size_t others = 1;
    for (std::size_t m = 0; m < N; ++m) {
      if (m != n) others *= layout.actions(m);
    }
    for (std::size_t i = 0; i < layout.actions(n); ++i) {
      for (std::size_t s = 0; s < others; ++s) {
        const std::size_t coord = layout.offset(n) + i;
        gens.emplace_back(
            layout,
            [layout, n, coord, s](const MixedProfile& x) {
              Vector out(layout.total(), 0.0);
              double prod = 1.0;
              std::size_t rest = s;
              for (std::size_t m = layout.players(); m-- > 0;) {
                if (m == n) continue;
                prod *= x(m, rest % layout.actions(m));
                rest /= layout.actions(m);
              }
              out[coord] = prod;
              return out;
            },
            1.0);
      }
    }
  }
  return FunctionSpace(layout, gens, mesh_resolution);
}

/// A point (w, x) of W x Delta.
struct GraphPoint {
  Vector element;
  MixedProfile profile;
};

inline Vector constant_vector_minus(const Vector& a, const Vector& b) {
  Vector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

/// phi(w) = (w + w(x0) - w(xbar) - xbar, xbar) with xbar = r(w(x0)).
inline GraphPoint phi(const FunctionSpace& space, const Vector& w, const MixedProfile& x0) {
  const Vector wx0 = space.evaluate(w, x0);
  const MixedProfile xbar = product_retract(wx0, space.layout());
  const Vector wxbar = space.evaluate(w, xbar);
  Vector shift = constant_vector_minus(wx0, wxbar);
  for (std::size_t i = 0; i < shift.size(); ++i) shift[i] -= xbar.coords()[i];
  return GraphPoint{space.add_constant(w, shift), xbar};
}

/// Residual of the E-membership condition.
inline double graph_residual(const FunctionSpace& space, const GraphPoint& pt,
                             double support_tol = kDefaultSupportTol) {
  return equilibrium_residual(pt.profile, space.evaluate(pt.element, pt.profile), support_tol);
}

/// psi(u, x) = u - u(x0) + u(x) + x.
inline Vector psi(const FunctionSpace& space, const GraphPoint& pt, const MixedProfile& x0,
                  double tol = 1e-8) {
  const double res = graph_residual(space, pt);
  if (res > tol) throw InvalidInput("psi: point is not in E (residual " + std::to_string(res) + ")");
  const Vector ux0 = space.evaluate(pt.element, x0);
  const Vector ux = space.evaluate(pt.element, pt.profile);
  Vector shift = constant_vector_minus(ux, ux0);
  for (std::size_t i = 0; i < shift.size(); ++i) shift[i] += pt.profile.coords()[i];
  return space.add_constant(pt.element, shift);
}

/// H(w, t) = w + t (w(x0) - w(r(w(x0)))).
inline Vector homotopy_H(const FunctionSpace& space, const Vector& w, double t,
                         const MixedProfile& x0) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidInput("homotopy_H: t must lie in [0, 1]");
  if (t == 0.0) return w;
  const Vector wx0 = space.evaluate(w, x0);
  const Vector wr = space.evaluate(w, product_retract(wx0, space.layout()));
  Vector shift = constant_vector_minus(wx0, wr);
  for (double& v : shift) v *= t;
  return space.add_constant(w, shift);
}

/// min over t in {0, 0.1, ..., 1} of |H(s u, t)|_sup for each scale s.
inline Vector properness_probe(const FunctionSpace& space, const Vector& u,
                               const std::vector<double>& scales, const MixedProfile& x0) {
  Vector out;
  for (double s : scales) {
    Vector w = u;
    for (double& c : w) c *= s;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 10; ++k) {
      best = std::min(best, space.sup_norm(homotopy_H(space, w, 0.1 * k, x0)));
    }
    out.push_back(best);
  }
  return out;
}

struct RoundTripReport {
  double psi_phi_distance = 0.0;  // |psi(phi(w)) - w| on coefficients
  double phi_psi_distance = 0.0;  // |phi(psi(phi(w))) - phi(w)| on coefficients and profile
  double membership_residual = 0.0;
  double shift_norm = 0.0;        // |phi(w).element - w|_sup
  double bound = 0.0;             // 2 |w|_sup + delta
  double psi_shift_norm = 0.0;    // |psi(phi(w)) - phi(w).element|_sup
  double psi_bound = 0.0;         // 2 |phi(w).element|_sup + delta
  bool ok(double tol = 1e-8) const {
    return psi_phi_distance <= tol && phi_psi_distance <= tol && membership_residual <= tol &&
           shift_norm <= bound && psi_shift_norm <= psi_bound;
  }
};

inline RoundTripReport check_round_trip(const FunctionSpace& space, const Vector& w,
                                        const MixedProfile& x0) {
  RoundTripReport r;
  const GraphPoint p = phi(space, w, x0);
  r.membership_residual = graph_residual(space, p);
  const Vector back = psi(space, p, x0);
  r.psi_phi_distance = max_abs_diff(back, w);
  const GraphPoint again = phi(space, back, x0);
  r.phi_psi_distance = std::max(max_abs_diff(again.element, p.element),
                                max_abs_diff(again.profile.coords(), p.profile.coords()));
  r.shift_norm = space.sup_norm(constant_vector_minus(p.element, w));
  r.bound = 2.0 * space.sup_norm(w) + FunctionSpace::delta();
  r.psi_shift_norm = space.sup_norm(constant_vector_minus(back, p.element));
  r.psi_bound = 2.0 * space.sup_norm(p.element) + FunctionSpace::delta();
  return r;
}

}  // namespace myopic
