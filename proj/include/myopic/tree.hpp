#pragma once

// Truncated game trees: endpoints carry no payoff, instead every class C of
// the common-knowledge partition Q of the endpoints carries a continuation
// correspondence F_C given as the hull of finitely many continuous
// selections over Delta(C). Players mix over pure decision strategies.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "myopic/error.hpp"
#include "myopic/lp.hpp"
#include "myopic/myopic.hpp"
#include "myopic/payoff.hpp"
#include "myopic/simplex.hpp"

namespace myopic {

/// Raw tree description. Players are 0-based. A vertex with no out-arrows is
/// an endpoint; every other vertex is either a chance node (has an entry in
/// `chance`) or belongs to exactly one information cell of one player. The
/// k-th action of a cell is the k-th out-arrow (in arrow order) of each of
/// its vertices.
struct TreeSpec {
  std::size_t players = 0;
  std::vector<std::string> names;  // one per vertex
  std::size_t root = 0;
  std::vector<std::pair<std::size_t, std::size_t>> arrows;
  std::map<std::size_t, Vector> chance;
  std::vector<std::vector<std::vector<std::size_t>>> info;                // [n][cell] vertices
  std::vector<std::vector<std::vector<std::size_t>>> endpoint_partition;  // [n][cell] endpoints
};

struct ValidationReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
  std::string summary() const {
    std::string s;
    for (const auto& p : problems) s += p + "\n";
    return s;
  }
};

inline ValidationReport validate_tree(const TreeSpec& t) {
  ValidationReport rep;
  const std::size_t V = t.names.size();
  auto name = [&](std::size_t v) { return v < V ? "'" + t.names[v] + "'" : std::to_string(v); };
  auto bad = [&](std::string s) { rep.problems.push_back(std::move(s)); };
  if (V == 0) {
    bad("tree has no vertices");
    return rep;
  }
  if (t.root >= V) {
    bad("root index out of range");
    return rep;
  }
  std::vector<std::size_t> indeg(V, 0);
  std::vector<std::vector<std::size_t>> out(V);
  for (const auto& [a, b] : t.arrows) {
    if (a >= V || b >= V) {
      bad("arrow references unknown vertex");
      continue;
    }
    out[a].push_back(b);
    ++indeg[b];
  }
  if (indeg[t.root] != 0) bad("root " + name(t.root) + " has an incoming arrow");
  for (std::size_t v = 0; v < V; ++v) {
    if (v != t.root && indeg[v] != 1) {
      bad("vertex " + name(v) + " has " + std::to_string(indeg[v]) + " incoming arrows");
    }
    if (out[v].size() == 1) bad("decision vertex " + name(v) + " has a single out-arrow");
  }
  // Reachability from the root (also rules out cycles given in-degrees).
  std::vector<char> seen(V, 0);
  std::vector<std::size_t> stack{t.root};
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = 1;
    for (std::size_t c : out[v]) stack.push_back(c);
  }
  for (std::size_t v = 0; v < V; ++v) {
    if (!seen[v]) bad("vertex " + name(v) + " is not reachable from the root");
  }

  std::vector<int> owner(V, -2);  // -2 unassigned, -1 chance, n player
  for (const auto& [v, p] : t.chance) {
    if (v >= V) {
      bad("chance entry for unknown vertex");
      continue;
    }
    owner[v] = -1;
    if (p.size() != out[v].size()) {
      bad("chance vertex " + name(v) + " distribution has wrong length");
    } else if (!is_simplex_point(p, 1e-9)) {
      bad("chance vertex " + name(v) + " distribution is not a probability vector");
    }
  }
  if (t.info.size() != t.players) bad("information partition count differs from player count");
  for (std::size_t n = 0; n < t.info.size(); ++n) {
    for (const auto& cell : t.info[n]) {
      if (cell.empty()) {
        bad("player " + std::to_string(n + 1) + " has an empty information cell");
        continue;
      }
      for (std::size_t v : cell) {
        if (v >= V) {
          bad("information cell references unknown vertex");
          continue;
        }
        if (owner[v] != -2) {
          bad("vertex " + name(v) + " is assigned to more than one mover");
        }
        owner[v] = static_cast<int>(n);
        if (out[v].empty()) bad("endpoint " + name(v) + " is in an information cell");
        if (cell[0] < V && out[v].size() != out[cell[0]].size()) {
          bad("information cell of " + name(v) + " mixes vertices with different action counts");
        }
      }
    }
  }
  std::vector<std::size_t> endpoints;
  for (std::size_t v = 0; v < V; ++v) {
    if (out[v].empty()) {
      endpoints.push_back(v);
      if (owner[v] == -1) bad("endpoint " + name(v) + " has a chance distribution");
    } else if (owner[v] == -2) {
      bad("decision vertex " + name(v) + " has no mover");
    }
  }
  if (t.endpoint_partition.size() != t.players) bad("endpoint partition count differs from player count");
  for (std::size_t n = 0; n < t.endpoint_partition.size(); ++n) {
    std::vector<int> hits(V, 0);
    for (const auto& cell : t.endpoint_partition[n]) {
      if (cell.empty()) bad("player " + std::to_string(n + 1) + " has an empty endpoint cell");
      for (std::size_t e : cell) {
        if (e >= V || !out[e].empty()) {
          bad("endpoint cell of player " + std::to_string(n + 1) + " contains a non-endpoint");
          continue;
        }
        ++hits[e];
      }
    }
    for (std::size_t e : endpoints) {
      if (hits[e] != 1) {
        bad("endpoint " + name(e) + " is covered " + std::to_string(hits[e]) +
            " times by the endpoint partition of player " + std::to_string(n + 1));
      }
    }
  }
  return rep;
}

struct RecallReport {
  bool ok = true;
  std::vector<std::string> counterexamples;
};

/// Affine continuation wrapper g(t) = a + b t with b > 0.
struct Wrapper {
  double a = 0.0;
  double b = 1.0;
  double operator()(double t) const { return a + b * t; }
};

class TruncatedGameTree {
 public:
  TruncatedGameTree() = default;

  explicit TruncatedGameTree(TreeSpec spec) : spec_(std::move(spec)) {
    const ValidationReport rep = validate_tree(spec_);
    if (!rep.ok()) throw ConfigError("invalid tree:\n" + rep.summary());
    const std::size_t V = spec_.names.size();
    children_.assign(V, {});
    parent_.assign(V, npos);
    parent_action_.assign(V, npos);
    for (const auto& [a, b] : spec_.arrows) {
      parent_[b] = a;
      parent_action_[b] = children_[a].size();
      children_[a].push_back(b);
    }
    owner_.assign(V, kEndpoint);
    cell_.assign(V, npos);
    for (const auto& [v, p] : spec_.chance) owner_[v] = kChance;
    for (std::size_t n = 0; n < spec_.players; ++n) {
      for (std::size_t c = 0; c < spec_.info[n].size(); ++c) {
        for (std::size_t v : spec_.info[n][c]) {
          owner_[v] = static_cast<int>(n);
          cell_[v] = c;
        }
      }
    }
    endpoint_index_.assign(V, npos);
    for (std::size_t v = 0; v < V; ++v) {
      if (children_[v].empty()) {
        endpoint_index_[v] = endpoints_.size();
        endpoints_.push_back(v);
      }
    }
    // Pure strategies: mixed radix over cells, first cell fastest.
    strategy_counts_.assign(spec_.players, 1);
    for (std::size_t n = 0; n < spec_.players; ++n) {
      for (const auto& cell : spec_.info[n]) strategy_counts_[n] *= children_[cell[0]].size();
    }
    build_classes();
    build_paths();
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  static constexpr int kChance = -1;
  static constexpr int kEndpoint = -2;

  const TreeSpec& spec() const { return spec_; }
  std::size_t players() const { return spec_.players; }
  std::size_t vertex_count() const { return spec_.names.size(); }
  const std::vector<std::size_t>& endpoints() const { return endpoints_; }
  std::size_t endpoint_count() const { return endpoints_.size(); }
  std::size_t endpoint_index(std::size_t v) const { return endpoint_index_.at(v); }
  const std::vector<std::size_t>& children(std::size_t v) const { return children_.at(v); }
  std::size_t parent(std::size_t v) const { return parent_.at(v); }
  std::size_t parent_action(std::size_t v) const { return parent_action_.at(v); }
  int owner(std::size_t v) const { return owner_.at(v); }
  std::size_t cell(std::size_t v) const { return cell_.at(v); }
  std::size_t strategy_count(std::size_t n) const { return strategy_counts_.at(n); }
  Layout layout() const { return Layout(strategy_counts_); }

  /// Classes of the join Q, each a list of endpoint indices in E order.
  const std::vector<std::vector<std::size_t>>& classes() const { return classes_; }
  std::size_t class_of(std::size_t e) const { return class_of_.at(e); }
  /// Position of endpoint e inside its class.
  std::size_t position_in_class(std::size_t e) const { return class_pos_.at(e); }

  std::size_t cell_actions(std::size_t n, std::size_t c) const {
    return children_[spec_.info[n][c][0]].size();
  }

  std::vector<std::size_t> decode_strategy(std::size_t n, std::size_t s) const {
    std::vector<std::size_t> acts(spec_.info[n].size());
    for (std::size_t c = 0; c < acts.size(); ++c) {
      acts[c] = s % cell_actions(n, c);
      s /= cell_actions(n, c);
    }
    return acts;
  }

  std::size_t encode_strategy(std::size_t n, const std::vector<std::size_t>& acts) const {
    std::size_t s = 0;
    for (std::size_t c = acts.size(); c-- > 0;) s = s * cell_actions(n, c) + acts[c];
    return s;
  }

  /// Product of chance probabilities along the path to endpoint e.
  double chance_probability(std::size_t e) const { return chance_prob_.at(e); }

  /// Whether pure strategy s of player n takes every own action on the path to e.
  bool consistent(std::size_t n, std::size_t s, std::size_t e) const {
    return consistent_[n][e][s] != 0;
  }

  /// Probability that x^n takes all of player n's actions on the path to e.
  double own_reach(const MixedProfile& x, std::size_t n, std::size_t e) const {
    double r = 0.0;
    const auto& cons = consistent_[n][e];
    const auto block = x.block(n);
    for (std::size_t s = 0; s < cons.size(); ++s) {
      if (cons[s]) r += block[s];
    }
    return r;
  }

  /// reach[n][e] for every player and endpoint.
  std::vector<Vector> reach_table(const MixedProfile& x) const {
    std::vector<Vector> r(players(), Vector(endpoint_count()));
    for (std::size_t n = 0; n < players(); ++n) {
      for (std::size_t e = 0; e < endpoint_count(); ++e) r[n][e] = own_reach(x, n, e);
    }
    return r;
  }

  /// p_x over E.
  Vector endpoint_distribution(const MixedProfile& x) const {
    check_profile(x);
    const auto r = reach_table(x);
    Vector p(endpoint_count());
    for (std::size_t e = 0; e < p.size(); ++e) {
      p[e] = chance_prob_[e];
      for (std::size_t n = 0; n < players(); ++n) p[e] *= r[n][e];
    }
    return p;
  }

  void check_profile(const MixedProfile& x) const {
    if (!(x.layout() == layout())) throw DimensionError("tree: profile layout mismatch");
  }

  RecallReport check_perfect_recall(std::size_t n) const;

 private:
  void build_classes() {
    const std::size_t E = endpoints_.size();
    std::vector<std::size_t> uf(E);
    std::iota(uf.begin(), uf.end(), 0);
    auto find = [&](std::size_t a) {
      while (uf[a] != a) a = uf[a] = uf[uf[a]];
      return a;
    };
    for (const auto& part : spec_.endpoint_partition) {
      for (const auto& cell : part) {
        for (std::size_t k = 1; k < cell.size(); ++k) {
          const std::size_t a = find(endpoint_index_[cell[0]]);
          const std::size_t b = find(endpoint_index_[cell[k]]);
          if (a != b) uf[std::max(a, b)] = std::min(a, b);
        }
      }
    }
    std::map<std::size_t, std::size_t> id;
    class_of_.assign(E, 0);
    class_pos_.assign(E, 0);
    for (std::size_t e = 0; e < E; ++e) {
      const std::size_t r = find(e);
      auto it = id.find(r);
      if (it == id.end()) {
        it = id.emplace(r, classes_.size()).first;
        classes_.emplace_back();
      }
      class_of_[e] = it->second;
      class_pos_[e] = classes_[it->second].size();
      classes_[it->second].push_back(e);
    }
  }

  void build_paths() {
    const std::size_t E = endpoints_.size();
    chance_prob_.assign(E, 1.0);
    consistent_.assign(players(), std::vector<std::vector<char>>(E));
    for (std::size_t n = 0; n < players(); ++n) {
      for (std::size_t e = 0; e < E; ++e) consistent_[n][e].assign(strategy_counts_[n], 1);
    }
    for (std::size_t e = 0; e < E; ++e) {
      for (std::size_t v = endpoints_[e]; parent_[v] != npos; v = parent_[v]) {
        const std::size_t u = parent_[v];
        const std::size_t a = parent_action_[v];
        if (owner_[u] == kChance) {
          chance_prob_[e] *= spec_.chance.at(u)[a];
          continue;
        }
        const auto n = static_cast<std::size_t>(owner_[u]);
        for (std::size_t s = 0; s < strategy_counts_[n]; ++s) {
          if (decode_strategy(n, s)[cell_[u]] != a) consistent_[n][e][s] = 0;
        }
      }
    }
  }

  TreeSpec spec_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> parent_action_;
  std::vector<int> owner_;
  std::vector<std::size_t> cell_;
  std::vector<std::size_t> endpoints_;
  std::vector<std::size_t> endpoint_index_;
  std::vector<std::size_t> strategy_counts_;
  std::vector<std::vector<std::size_t>> classes_;
  std::vector<std::size_t> class_of_;
  std::vector<std::size_t> class_pos_;
  Vector chance_prob_;
  std::vector<std::vector<std::vector<char>>> consistent_;  // [n][e][s]
};

inline RecallReport TruncatedGameTree::check_perfect_recall(std::size_t n) const {
  RecallReport rep;
  auto history = [&](std::size_t v) {
    std::vector<std::size_t> h;
    for (std::size_t u = v; parent_[u] != npos;) {
      u = parent_[u];
      if (owner_[u] == static_cast<int>(n)) h.push_back(cell_[u]);
    }
    std::reverse(h.begin(), h.end());
    return h;
  };
  auto describe = [&](const std::vector<std::size_t>& h) {
    std::string s = "[";
    for (std::size_t k = 0; k < h.size(); ++k) s += (k ? "," : "") + std::to_string(h[k]);
    return s + "]";
  };
  auto check_group = [&](const std::vector<std::size_t>& vs, std::optional<std::size_t> own_cell,
                         const std::string& label) {
    const auto h0 = history(vs[0]);
    for (std::size_t v : vs) {
      auto h = history(v);
      if (h != h0) {
        rep.ok = false;
        rep.counterexamples.push_back(label + ": paths to '" + spec_.names[vs[0]] + "' and '" +
                                      spec_.names[v] + "' pass own cells " + describe(h0) +
                                      " vs " + describe(h));
      }
      if (own_cell) h.push_back(*own_cell);
      auto sorted = h;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        rep.ok = false;
        rep.counterexamples.push_back(label + ": path to '" + spec_.names[v] +
                                      "' repeats an own cell " + describe(h));
      }
    }
  };
  for (std::size_t c = 0; c < spec_.info[n].size(); ++c) {
    check_group(spec_.info[n][c], c, "information cell " + std::to_string(c));
  }
  for (std::size_t c = 0; c < spec_.endpoint_partition[n].size(); ++c) {
    check_group(spec_.endpoint_partition[n][c], std::nullopt, "endpoint cell " + std::to_string(c));
  }
  return rep;
}

struct Outcome {
  Vector endpoint_prob;               // p_x(e)
  Vector class_prob;                  // p_x(C)
  std::vector<std::optional<Vector>> conditional;  // P_x(.|C), undefined when p_x(C) = 0
};

inline Outcome outcome_distribution(const TruncatedGameTree& t, const MixedProfile& x) {
  Outcome o;
  o.endpoint_prob = t.endpoint_distribution(x);
  o.class_prob.assign(t.classes().size(), 0.0);
  o.conditional.resize(t.classes().size());
  for (std::size_t c = 0; c < t.classes().size(); ++c) {
    for (std::size_t e : t.classes()[c]) o.class_prob[c] += o.endpoint_prob[e];
    if (o.class_prob[c] > 0.0) {
      Vector q;
      for (std::size_t e : t.classes()[c]) q.push_back(o.endpoint_prob[e] / o.class_prob[c]);
      o.conditional[c] = std::move(q);
    }
  }
  return o;
}

/// Per information cell of player n: the action distribution of x^n given
/// that the cell is reached by n's own play (uniform when unreachable).
inline std::vector<Vector> behavior_view(const TruncatedGameTree& t, const MixedProfile& x,
                                         std::size_t n) {
  std::vector<Vector> out;
  const auto& cells = t.spec().info[n];
  // A strategy reaches vertex v iff it takes every own action on the path.
  auto reaches = [&](std::size_t s, std::size_t v) {
    const auto acts = t.decode_strategy(n, s);
    for (std::size_t u = v; t.parent(u) != TruncatedGameTree::npos;) {
      const std::size_t a = t.parent_action(u);
      u = t.parent(u);
      if (t.owner(u) == static_cast<int>(n) && acts[t.cell(u)] != a) return false;
    }
    return true;
  };
  for (std::size_t c = 0; c < cells.size(); ++c) {
    Vector d(t.cell_actions(n, c), 0.0);
    double total = 0.0;
    for (std::size_t s = 0; s < t.strategy_count(n); ++s) {
      if (x(n, s) == 0.0 || !reaches(s, cells[c][0])) continue;
      d[t.decode_strategy(n, s)[c]] += x(n, s);
      total += x(n, s);
    }
    for (double& v : d) v = total > 0.0 ? v / total : 1.0 / static_cast<double>(d.size());
    out.push_back(std::move(d));
  }
  return out;
}

/// A continuous selection of F_C: conditional over C -> values over C x N,
/// endpoint-major (index position * N + n).
using Selection = std::function<Vector(std::span<const double> conditional)>;

struct ContinuationSystem {
  std::vector<std::vector<Selection>> selections;  // per class
  double bound = 0.0;                               // B, exceeds every |selection value|

  /// Throws unless every class has a selection and B dominates the values
  /// sampled at the vertices and barycenter of each Delta(C).
  void validate(const TruncatedGameTree& t) const {
    if (selections.size() != t.classes().size()) {
      throw ConfigError("continuation system: one selection list per class required");
    }
    for (std::size_t c = 0; c < selections.size(); ++c) {
      if (selections[c].empty()) throw ConfigError("continuation system: class without selection");
      const std::size_t size = t.classes()[c].size();
      std::vector<Vector> samples;
      samples.emplace_back(size, 1.0 / static_cast<double>(size));
      for (std::size_t k = 0; k < size; ++k) {
        Vector v(size, 0.0);
        v[k] = 1.0;
        samples.push_back(std::move(v));
      }
      for (const auto& sel : selections[c]) {
        for (const auto& q : samples) {
          const Vector val = sel(q);
          if (val.size() != size * t.players()) {
            throw DimensionError("continuation selection returned wrong dimension");
          }
          for (double v : val) {
            if (!(std::abs(v) < bound)) {
              throw ConfigError("continuation bound B does not dominate selection values");
            }
          }
        }
      }
    }
  }
};

/// Convex weights over each class's selections: the continuous selection
/// phi_C used for F_C.
using SelectionWeights = std::vector<Vector>;

inline SelectionWeights first_selection_weights(const ContinuationSystem& cont) {
  SelectionWeights w;
  for (const auto& sels : cont.selections) {
    Vector v(sels.size(), 0.0);
    v[0] = 1.0;
    w.push_back(std::move(v));
  }
  return w;
}

inline Vector combined_selection(const ContinuationSystem& cont, const SelectionWeights& w,
                                 std::size_t c, std::span<const double> q) {
  Vector out;
  for (std::size_t m = 0; m < cont.selections[c].size(); ++m) {
    if (w[c][m] == 0.0) continue;
    const Vector v = cont.selections[c][m](q);
    if (out.empty()) out.assign(v.size(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += w[c][m] * v[i];
  }
  return out;
}

/// y^n_s = sum_e p_{x^s}(e) g^{e,n}(nu^{e,n}) for all n, s (flat, layout order).
inline Vector strategy_values(const TruncatedGameTree& t, const MixedProfile& x, const Vector& nu,
                              const std::vector<Wrapper>& g) {
  const std::size_t N = t.players(), E = t.endpoint_count();
  const auto reach = t.reach_table(x);
  const Layout layout = t.layout();
  Vector y(layout.total(), 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t e = 0; e < E; ++e) {
      double others = t.chance_probability(e);
      for (std::size_t m = 0; m < N && others != 0.0; ++m) {
        if (m != n) others *= reach[m][e];
      }
      if (others == 0.0) continue;
      const double val = others * g[e * N + n](nu[e * N + n]);
      for (std::size_t s = 0; s < t.strategy_count(n); ++s) {
        if (t.consistent(n, s, e)) y[layout.offset(n) + s] += val;
      }
    }
  }
  return y;
}

/// The perturbed composite family f~_eps over prod_n Delta(S_n).
inline PayoffFamily epsilon_payoff_family(const TruncatedGameTree& t, const ContinuationSystem& cont,
                                          const std::vector<Wrapper>& g, double eps,
                                          SelectionWeights weights = {}) {
  if (!(eps > 0.0)) throw InvalidInput("epsilon_payoff_family: eps must be positive");
  if (g.size() != t.endpoint_count() * t.players()) {
    throw DimensionError("epsilon_payoff_family: one wrapper per (endpoint, player)");
  }
  if (weights.empty()) weights = first_selection_weights(cont);
  auto tree = std::make_shared<const TruncatedGameTree>(t);
  auto evaluator = [tree, cont, g, eps, weights](const MixedProfile& x) {
    const std::size_t N = tree->players();
    const Outcome o = outcome_distribution(*tree, x);
    Vector nu(tree->endpoint_count() * N, 2.0 * cont.bound);
    for (std::size_t c = 0; c < tree->classes().size(); ++c) {
      const double pc = o.class_prob[c];
      if (pc <= 0.0) continue;
      const double lambda = std::min(1.0, pc / eps);
      const Vector phi = combined_selection(cont, weights, c, *o.conditional[c]);
      const auto& members = tree->classes()[c];
      for (std::size_t k = 0; k < members.size(); ++k) {
        for (std::size_t n = 0; n < N; ++n) {
          nu[members[k] * N + n] = lambda * phi[k * N + n] + (1.0 - lambda) * 2.0 * cont.bound;
        }
      }
    }
    return strategy_values(*tree, x, nu, g);
  };
  double b = 0.0;
  for (const auto& w : g) b = std::max(b, std::abs(w.a) + std::abs(w.b) * 2.0 * cont.bound);
  return PayoffFamily(t.layout(), evaluator, b);
}

/// How the continuation of a class was determined.
struct ClassAssignment {
  double probability = 0.0;
  Vector conditional;  // the point of Delta(C) the selection was evaluated at
  std::string source;  // "limit", "custom", "sequence", "barycenter"
};

struct ProperVector {
  MixedProfile profile;
  Vector y;   // layout order
  Vector nu;  // e * N + n
  std::vector<ClassAssignment> classes;
};

/// max over n and s with x^n_s > support_tol of max_t y^n_t - y^n_s.
inline double deviation_certificate(const ProperVector& pv, double support_tol = 1e-6) {
  return equilibrium_residual(pv.profile, pv.y, support_tol);
}

/// Supplies the conditional used for a class of probability zero (property
/// (*)-style rules); std::nullopt defers to the default rule.
using ZeroClassRule =
    std::function<std::optional<Vector>(std::size_t cls, const MixedProfile& x)>;

struct CompositeConfig {
  std::vector<double> schedule;  // decreasing eps; empty means 2^-3 .. 2^-12
  double cluster_tol = 1e-4;
  double certificate_tol = 1e-4;
  double support_tol = 1e-6;
  SolverConfig solver;
  SelectionWeights weights;  // empty means first selection per class
  ZeroClassRule zero_rule;

  static std::vector<double> default_schedule() {
    std::vector<double> s;
    for (int k = 3; k <= 12; ++k) s.push_back(std::ldexp(1.0, -k));
    return s;
  }
};

struct EpsilonStep {
  double eps = 0.0;
  MixedProfile profile;
  Vector values;
  double residual = 0.0;
  std::string method;
};

struct CompositeSolution {
  ProperVector vector;
  double certificate = 0.0;
  bool certified = false;
  std::vector<EpsilonStep> trace;
  std::string extraction;  // which limit candidate was kept
  std::vector<std::string> warnings;
};

namespace detail {

/// nu at x: selection at the conditional for classes of positive
/// probability, the fixed assignment for the others.
inline ProperVector assemble_proper(const TruncatedGameTree& t, const ContinuationSystem& cont,
                                    const SelectionWeights& w, const std::vector<Wrapper>& g,
                                    const MixedProfile& x,
                                    const std::vector<std::optional<ClassAssignment>>& fixed) {
  const std::size_t N = t.players();
  const Outcome o = outcome_distribution(t, x);
  ProperVector pv;
  pv.profile = x;
  pv.nu.assign(t.endpoint_count() * N, 0.0);
  for (std::size_t c = 0; c < t.classes().size(); ++c) {
    ClassAssignment a;
    if (o.class_prob[c] > 0.0) {
      a.conditional = *o.conditional[c];
      a.source = "limit";
    } else if (fixed[c]) {
      a = *fixed[c];
    } else {
      a.conditional.assign(t.classes()[c].size(), 1.0 / static_cast<double>(t.classes()[c].size()));
      a.source = "barycenter";
    }
    a.probability = o.class_prob[c];
    const Vector phi = combined_selection(cont, w, c, a.conditional);
    for (std::size_t k = 0; k < t.classes()[c].size(); ++k) {
      for (std::size_t n = 0; n < N; ++n) pv.nu[t.classes()[c][k] * N + n] = phi[k * N + n];
    }
    pv.classes.push_back(std::move(a));
  }
  pv.y = strategy_values(t, x, pv.nu, g);
  return pv;
}

inline MixedProfile snap_profile(const MixedProfile& x, double threshold) {
  Vector c = x.coords();
  const Layout& l = x.layout();
  for (std::size_t n = 0; n < l.players(); ++n) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.actions(n); ++i) {
      double& v = c[l.offset(n) + i];
      if (v < threshold) v = 0.0;
      s += v;
    }
    for (std::size_t i = 0; i < l.actions(n); ++i) c[l.offset(n) + i] /= s;
  }
  return MixedProfile(l, std::move(c));
}

}  // namespace detail

/// Equilibrium of the composite game: solves the eps-perturbed families along
/// the schedule (warm-started), stops at the first pair of consecutive
/// solutions within cluster_tol (or accepts the final pair within
/// cluster_tol + 4 eps), then extracts the limit: vanishing coordinates are
/// snapped to zero and the support re-solved with the continuation fixed on
/// classes of probability zero. The candidate with the smallest deviation
/// certificate is kept.
inline CompositeSolution solve_composite(const TruncatedGameTree& t, const ContinuationSystem& cont,
                                         const std::vector<Wrapper>& g,
                                         const CompositeConfig& cfg = {}) {
  cont.validate(t);
  for (const auto& w : g) {
    if (!(w.b > 0.0)) throw ConfigError("continuation wrappers must be increasing (b > 0)");
  }
  CompositeSolution sol;
  for (std::size_t n = 0; n < t.players(); ++n) {
    const RecallReport r = t.check_perfect_recall(n);
    if (!r.ok) sol.warnings.push_back("player " + std::to_string(n + 1) + " lacks perfect recall");
  }
  const SelectionWeights weights = cfg.weights.empty() ? first_selection_weights(cont) : cfg.weights;
  const std::vector<double> schedule =
      cfg.schedule.empty() ? CompositeConfig::default_schedule() : cfg.schedule;

  SolverConfig scfg = cfg.solver;
  scfg.stop_at_first = true;
  // Last positive-probability conditional seen per class along the sequence.
  std::vector<std::optional<Vector>> last_conditional(t.classes().size());
  bool clustered = false;
  // Distance between two steps: the smaller of the coordinate distance and
  // the distance between endpoint distributions (equivalent pure strategies
  // may trade mass without changing anything observable).
  auto profile_gap = [&t](const EpsilonStep& a, const EpsilonStep& b) {
    return std::min(max_abs_diff(a.profile.coords(), b.profile.coords()),
                    max_abs_diff(outcome_distribution(t, a.profile).endpoint_prob,
                                 outcome_distribution(t, b.profile).endpoint_prob));
  };
  for (double eps : schedule) {
    const PayoffFamily f = epsilon_payoff_family(t, cont, g, eps, weights);
    const MixedProfile* warm = sol.trace.empty() ? nullptr : &sol.trace.back().profile;
    // Solutions tend to move linearly in eps; try the extrapolated profile first.
    std::vector<SolveReport> reports;
    if (sol.trace.size() >= 2) {
      const auto& a = sol.trace[sol.trace.size() - 2];
      const auto& b = sol.trace.back();
      const double r = (eps - b.eps) / (b.eps - a.eps);
      Vector c(b.profile.coords().size());
      for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = b.profile.coords()[i] + r * (b.profile.coords()[i] - a.profile.coords()[i]);
      }
      const MixedProfile predicted = product_retract(c, t.layout());
      SolverConfig quick = scfg;
      quick.enumerate_supports = false;
      quick.restarts = 0;
      quick.mesh = 0;
      try {
        reports = solve_myopic(f, quick, &predicted);
      } catch (const BudgetExhausted&) {
      }
    }
    if (reports.empty()) reports = solve_myopic(f, scfg, warm);
    const SolveReport* pick = &reports[0];
    if (warm != nullptr) {
      for (const auto& r : reports) {
        if (max_abs_diff(r.profile.coords(), warm->coords()) <
            max_abs_diff(pick->profile.coords(), warm->coords())) {
          pick = &r;
        }
      }
    }
    sol.trace.push_back({eps, pick->profile, pick->witness, pick->residual, pick->method});
    const Outcome o = outcome_distribution(t, pick->profile);
    for (std::size_t c = 0; c < o.conditional.size(); ++c) {
      if (o.conditional[c]) last_conditional[c] = o.conditional[c];
    }
    if (sol.trace.size() >= 2) {
      const auto& a = sol.trace[sol.trace.size() - 2];
      const auto& b = sol.trace.back();
      if (profile_gap(a, b) <= cfg.cluster_tol && max_abs_diff(a.values, b.values) <= cfg.cluster_tol) {
        clustered = true;
        break;
      }
    }
  }
  // Strategies leading into vanishing classes carry O(eps) mass in the
  // perturbed solutions, so the last pair may drift by a small multiple of eps.
  if (!clustered && sol.trace.size() >= 2) {
    const auto& a = sol.trace[sol.trace.size() - 2];
    const auto& b = sol.trace.back();
    const double allowance = cfg.cluster_tol + 4.0 * a.eps;
    clustered = profile_gap(a, b) <= allowance && max_abs_diff(a.values, b.values) <= allowance;
  }
  if (!clustered) {
    std::ostringstream msg;
    msg << "solve_composite: no cluster along the eps schedule; last steps:";
    for (const auto& s : sol.trace) msg << " [eps=" << s.eps << " residual=" << s.residual << "]";
    throw BudgetExhausted(msg.str(), sol.trace.back().residual);
  }

  auto fixed_for = [&](const MixedProfile& x) {
    std::vector<std::optional<ClassAssignment>> fixed(t.classes().size());
    for (std::size_t c = 0; c < fixed.size(); ++c) {
      if (cfg.zero_rule) {
        if (auto q = cfg.zero_rule(c, x)) {
          fixed[c] = ClassAssignment{0.0, *q, "custom"};
          continue;
        }
      }
      if (last_conditional[c]) fixed[c] = ClassAssignment{0.0, *last_conditional[c], "sequence"};
    }
    return fixed;
  };

  const MixedProfile raw = sol.trace.back().profile;
  std::vector<std::pair<ProperVector, std::string>> candidates;
  candidates.emplace_back(detail::assemble_proper(t, cont, weights, g, raw, fixed_for(raw)), "raw");
  const double eps_last = sol.trace.back().eps;
  for (double threshold : {1e-8, 1e-6, 1e-4, 2 * eps_last, 8 * eps_last, 1e-2}) {
    const MixedProfile snapped = detail::snap_profile(raw, threshold);
    const auto fixed = fixed_for(snapped);
    candidates.emplace_back(detail::assemble_proper(t, cont, weights, g, snapped, fixed),
                            "snap " + std::to_string(threshold));
    // Re-solve on the snapped support with the zero-probability classes frozen.
    const Outcome o0 = outcome_distribution(t, snapped);
    std::vector<Vector> frozen_q(t.classes().size());
    for (std::size_t c = 0; c < frozen_q.size(); ++c) {
      if (o0.class_prob[c] > 0.0) continue;
      frozen_q[c] = fixed[c] ? fixed[c]->conditional
                             : Vector(t.classes()[c].size(),
                                      1.0 / static_cast<double>(t.classes()[c].size()));
    }
    const PayoffFamily frozen(t.layout(), [&t, &cont, &weights, &g, frozen_q](const MixedProfile& x) {
      const std::size_t N = t.players();
      const Outcome o = outcome_distribution(t, x);
      Vector nu(t.endpoint_count() * N, 0.0);
      for (std::size_t c = 0; c < frozen_q.size(); ++c) {
        const bool live = frozen_q[c].empty() && o.conditional[c].has_value();
        const Vector q = live ? *o.conditional[c]
                              : (frozen_q[c].empty()
                                     ? Vector(t.classes()[c].size(),
                                              1.0 / static_cast<double>(t.classes()[c].size()))
                                     : frozen_q[c]);
        const Vector phi = combined_selection(cont, weights, c, q);
        for (std::size_t k = 0; k < t.classes()[c].size(); ++k) {
          for (std::size_t n = 0; n < N; ++n) nu[t.classes()[c][k] * N + n] = phi[k * N + n];
        }
      }
      return strategy_values(t, x, nu, g);
    });
    SolverConfig pcfg = scfg;
    pcfg.enumerate_supports = false;
    pcfg.restarts = 0;
    pcfg.mesh = 0;
    try {
      const auto polished = solve_myopic(frozen, pcfg, &snapped);
      const MixedProfile& px = polished[0].profile;
      candidates.emplace_back(detail::assemble_proper(t, cont, weights, g, px, fixed_for(px)),
                              "snap " + std::to_string(threshold) + " + polish");
    } catch (const BudgetExhausted&) {
    }
  }
  std::size_t best = 0;
  double best_cert = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double c = deviation_certificate(candidates[k].first, cfg.support_tol);
    if (c < best_cert) {
      best_cert = c;
      best = k;
    }
  }
  sol.vector = std::move(candidates[best].first);
  sol.extraction = candidates[best].second;
  sol.certificate = best_cert;
  sol.certified = best_cert <= cfg.certificate_tol;
  return sol;
}

/// Checks the proper-vector identities: y recomputes from nu exactly and each
/// class block of nu lies in F_C at its recorded conditional (and, for
/// classes of positive probability, that conditional is P_x(.|C)).
struct ProperCheck {
  double y_error = 0.0;
  double hull_distance = 0.0;
  double conditional_error = 0.0;
  bool ok(double tol = 1e-9) const {
    return y_error <= tol && hull_distance <= tol && conditional_error <= tol;
  }
};

inline ProperCheck check_proper(const TruncatedGameTree& t, const ContinuationSystem& cont,
                                const std::vector<Wrapper>& g, const ProperVector& pv) {
  ProperCheck pc;
  pc.y_error = max_abs_diff(strategy_values(t, pv.profile, pv.nu, g), pv.y);
  const Outcome o = outcome_distribution(t, pv.profile);
  const std::size_t N = t.players();
  for (std::size_t c = 0; c < t.classes().size(); ++c) {
    const auto& a = pv.classes[c];
    if (o.conditional[c]) {
      pc.conditional_error = std::max(pc.conditional_error, max_abs_diff(a.conditional, *o.conditional[c]));
    }
    std::vector<Vector> gens;
    for (const auto& sel : cont.selections[c]) gens.push_back(sel(a.conditional));
    Vector block;
    for (std::size_t e : t.classes()[c]) {
      for (std::size_t n = 0; n < N; ++n) block.push_back(pv.nu[e * N + n]);
    }
    pc.hull_distance = std::max(pc.hull_distance, hull_membership(block, gens).distance);
  }
  return pc;
}

}  // namespace myopic
