#pragma once

// Game documents: JSON files with a schema version and a `kind` of
// "myopic", "tree" or "neyman". Numbers may be given as JSON numbers or as
// constant expressions in strings ("1/3").
//
// myopic:  players [{name, actions[]}], payoffs[player][action] (expressions
//          over x[player,action]), optional bound
// tree:    players, vertices[], root, arrows [[from,to]], chance {v: [p]},
//          information[player][cell][v], endpoint_partition[player][cell][e],
//          continuation {bound, classes [{endpoints[], selections
//          [selection][endpoint][player]}]} (expressions over q[e]),
//          optional wrappers {e: ["a + b*t", ...]}
// neyman:  states[], actions {one[], two[]}, prior[], A[k][i][j], B[k][i][j],
//          weights {one[], two[]}, depth, optional plan {posteriors[],
//          weights[], agreements[v][i][j], y[]}

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "myopic/error.hpp"
#include "myopic/expression.hpp"
#include "myopic/neyman.hpp"
#include "myopic/tree.hpp"

namespace myopic {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// Schema violation at a JSON pointer path such as "/payoffs/0/1".
class SchemaError : public ConfigError {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : ConfigError("schema error at " + (path.empty() ? std::string("/") : path) + ": " + what),
        path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

namespace detail {

/// JSON node plus its path, for error messages.
class Field {
 public:
  Field(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const Json& json() const { return *j_; }
  const std::string& path() const { return path_; }
  [[noreturn]] void fail(const std::string& what) const { throw SchemaError(path_, what); }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }
  Field operator[](const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    if (!j_->contains(key)) throw SchemaError(path_ + "/" + key, "missing required field");
    return Field(j_->at(key), path_ + "/" + key);
  }
  Field operator[](std::size_t i) const { return Field(j_->at(i), path_ + "/" + std::to_string(i)); }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }
  std::vector<Field> items() const {
    std::vector<Field> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back((*this)[i]);
    return out;
  }
  std::vector<std::pair<std::string, Field>> members() const {
    if (!j_->is_object()) fail("expected an object");
    std::vector<std::pair<std::string, Field>> out;
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      out.emplace_back(it.key(), Field(it.value(), path_ + "/" + it.key()));
    }
    return out;
  }

  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  std::size_t count() const {
    if (!j_->is_number_integer() && !j_->is_number_unsigned()) fail("expected a nonnegative integer");
    const auto v = j_->get<long long>();
    if (v < 0) fail("expected a nonnegative integer");
    return static_cast<std::size_t>(v);
  }
  double number() const {
    if (j_->is_number()) return j_->get<double>();
    if (j_->is_string()) {
      try {
        return parse_expression(j_->get<std::string>(), ExpressionScope{}).evaluate(Vector{});
      } catch (const Error& e) {
        fail(std::string("bad constant: ") + e.what());
      }
    }
    fail("expected a number");
  }
  Vector numbers() const {
    Vector out;
    for (const auto& f : items()) out.push_back(f.number());
    return out;
  }
  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (const auto& f : items()) out.push_back(f.str());
    return out;
  }
  Matrix matrix() const {
    Matrix m;
    for (const auto& row : items()) m.push_back(row.numbers());
    if (m.empty()) fail("empty matrix");
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (m[r].size() != m[0].size() || m[r].empty()) (*this)[r].fail("ragged or empty matrix row");
    }
    return m;
  }

 private:
  const Json* j_;
  std::string path_;
};

inline void check_probability(const Field& f, const Vector& p) {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!std::isfinite(p[k]) || p[k] < 0.0) f[k].fail("probability must be finite and nonnegative");
    s += p[k];
  }
  if (p.empty() || std::abs(s - 1.0) > 1e-9) f.fail("probabilities must sum to 1");
}

inline void unique_names(const Field& f, const std::vector<std::string>& names) {
  std::set<std::string> seen;
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (names[k].empty()) f[k].fail("empty name");
    for (char c : names[k]) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) {
        f[k].fail("names may contain only letters, digits and '_'");
      }
    }
    if (!seen.insert(names[k]).second) f[k].fail("duplicate name '" + names[k] + "'");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct MyopicDocument {
  ExpressionScope scope;
  std::vector<std::vector<std::string>> payoffs;  // [player][action] sources
  std::optional<double> bound;

  Layout layout() const {
    std::vector<std::size_t> a;
    for (const auto& acts : scope.actions) a.push_back(acts.size());
    return Layout(a);
  }
  std::vector<Expression> expressions() const {
    std::vector<Expression> out;
    for (const auto& row : payoffs) {
      for (const auto& src : row) out.push_back(parse_expression(src, scope));
    }
    return out;
  }
  PayoffFamily family() const {
    PayoffFamily f = expression_family(layout(), expressions(),
                                       bound ? *bound : std::numeric_limits<double>::infinity());
    Labels labels;
    labels.players = scope.players;
    labels.actions = scope.actions;
    f.set_labels(labels);
    return f;
  }
};

struct TreeDocument {
  TreeSpec spec;
  struct ClassEntry {
    std::vector<std::string> endpoints;
    std::vector<std::vector<std::vector<std::string>>> selections;  // [m][endpoint][player]
  };
  double bound = 0.0;
  std::vector<ClassEntry> classes;
  std::map<std::string, std::vector<std::string>> wrappers;  // endpoint -> per player "a + b*t"

  /// Tree, continuation system and wrappers ready for solve_composite.
  struct Built {
    TruncatedGameTree tree;
    ContinuationSystem continuation;
    std::vector<Wrapper> wrappers;
  };
  Built build() const;
};

struct NeymanDocument {
  std::vector<std::string> states;
  std::vector<std::string> actions_one;
  std::vector<std::string> actions_two;
  NeymanGameSpec spec;
  struct Plan {
    std::vector<Vector> posteriors;
    Vector weights;
    std::vector<Matrix> agreements;  // [v][i][j]
    Vector y;
  };
  std::optional<Plan> plan;

  JointPlan joint_plan() const {
    if (!plan) throw ConfigError("document has no plan");
    PlanFamily f{plan->posteriors, plan->weights, "document"};
    std::vector<Vector> gs;
    for (const auto& m : plan->agreements) {
      Vector g;
      for (const auto& r : m) g.insert(g.end(), r.begin(), r.end());
      gs.push_back(std::move(g));
    }
    return assemble_joint_plan(f, spec.prior, std::move(gs), plan->y, spec.games);
  }
};

struct GameDocument {
  int schema_version = kSchemaVersion;
  std::string kind;
  std::string name;
  std::optional<MyopicDocument> myopic;
  std::optional<TreeDocument> tree;
  std::optional<NeymanDocument> neyman;
};

// ---------------------------------------------------------------------------
// Affine wrappers "a + b*t"

inline Wrapper parse_wrapper(const std::string& src) {
  ExpressionScope s;
  s.scalars = {"t"};
  const Expression e = parse_expression(src, s);
  const double a = e.evaluate(Vector{0.0});
  const double b = e.evaluate(Vector{1.0}) - a;
  for (double t : {-3.0, 2.0, 7.5}) {
    if (std::abs(e.evaluate(Vector{t}) - (a + b * t)) > 1e-9 * (1.0 + std::abs(a) + std::abs(b * t))) {
      throw ConfigError("wrapper '" + src + "' is not affine in t");
    }
  }
  if (!(b > 0.0)) throw ConfigError("wrapper '" + src + "' must be increasing in t");
  return Wrapper{a, b};
}

inline std::string format_wrapper(const Wrapper& w) {
  std::ostringstream os;
  os.precision(17);
  os << w.a << " + " << w.b << "*t";
  return os.str();
}

inline TreeDocument::Built TreeDocument::build() const {
  Built out;
  out.tree = TruncatedGameTree(spec);
  const auto& t = out.tree;
  const std::size_t N = t.players();
  std::map<std::string, std::size_t> vertex;
  for (std::size_t v = 0; v < spec.names.size(); ++v) vertex[spec.names[v]] = v;
  out.continuation.bound = bound;
  out.continuation.selections.assign(t.classes().size(), {});
  std::vector<bool> covered(t.classes().size(), false);
  for (std::size_t ci = 0; ci < classes.size(); ++ci) {
    const auto& entry = classes[ci];
    const std::string where = "/continuation/classes/" + std::to_string(ci);
    if (entry.endpoints.empty()) throw SchemaError(where + "/endpoints", "empty class");
    std::vector<std::size_t> eidx;
    for (const auto& name : entry.endpoints) {
      const auto it = vertex.find(name);
      if (it == vertex.end() || !t.children(it->second).empty()) {
        throw SchemaError(where + "/endpoints", "'" + name + "' is not an endpoint");
      }
      eidx.push_back(t.endpoint_index(it->second));
    }
    const std::size_t c = t.class_of(eidx[0]);
    const auto& members = t.classes()[c];
    auto sorted = eidx;
    std::sort(sorted.begin(), sorted.end());
    auto msorted = members;
    std::sort(msorted.begin(), msorted.end());
    if (sorted != msorted) {
      throw SchemaError(where + "/endpoints", "endpoints do not form one common-knowledge class");
    }
    if (covered[c]) throw SchemaError(where, "class listed twice");
    covered[c] = true;
    // doc position -> tree class position
    std::vector<std::size_t> to_tree(eidx.size());
    for (std::size_t d = 0; d < eidx.size(); ++d) to_tree[d] = t.position_in_class(eidx[d]);
    ExpressionScope scope;
    scope.conditionals = entry.endpoints;
    if (entry.selections.empty()) throw SchemaError(where + "/selections", "no selections");
    for (std::size_t m = 0; m < entry.selections.size(); ++m) {
      const auto& table = entry.selections[m];
      const std::string sw = where + "/selections/" + std::to_string(m);
      if (table.size() != eidx.size()) throw SchemaError(sw, "need one row per endpoint");
      std::vector<Expression> exprs;  // doc order, endpoint-major
      for (std::size_t d = 0; d < table.size(); ++d) {
        if (table[d].size() != N) {
          throw SchemaError(sw + "/" + std::to_string(d), "need one expression per player");
        }
        for (std::size_t n = 0; n < N; ++n) {
          try {
            exprs.push_back(parse_expression(table[d][n], scope));
          } catch (const ParseError& e) {
            throw SchemaError(sw + "/" + std::to_string(d) + "/" + std::to_string(n), e.what());
          }
        }
      }
      out.continuation.selections[c].push_back(
          [exprs, to_tree, N](std::span<const double> q) {
            Vector env(to_tree.size());
            for (std::size_t d = 0; d < to_tree.size(); ++d) env[d] = q[to_tree[d]];
            Vector v(to_tree.size() * N);
            for (std::size_t d = 0; d < to_tree.size(); ++d) {
              for (std::size_t n = 0; n < N; ++n) v[to_tree[d] * N + n] = exprs[d * N + n].evaluate(env);
            }
            return v;
          });
    }
  }
  for (std::size_t c = 0; c < covered.size(); ++c) {
    if (!covered[c]) {
      throw SchemaError("/continuation/classes",
                        "no entry for the class containing '" + spec.names[t.endpoints()[t.classes()[c][0]]] + "'");
    }
  }
  out.wrappers.assign(t.endpoint_count() * N, Wrapper{});
  for (const auto& [name, forms] : wrappers) {
    const auto it = vertex.find(name);
    if (it == vertex.end() || !t.children(it->second).empty()) {
      throw SchemaError("/wrappers/" + name, "not an endpoint");
    }
    if (forms.size() != N) throw SchemaError("/wrappers/" + name, "need one wrapper per player");
    const std::size_t e = t.endpoint_index(it->second);
    for (std::size_t n = 0; n < N; ++n) {
      try {
        out.wrappers[e * N + n] = parse_wrapper(forms[n]);
      } catch (const ConfigError& err) {
        throw SchemaError("/wrappers/" + name + "/" + std::to_string(n), err.what());
      }
    }
  }
  out.continuation.validate(out.tree);
  return out;
}

// ---------------------------------------------------------------------------
// Reading

namespace detail {

inline MyopicDocument read_myopic(const Field& root) {
  MyopicDocument d;
  const Field players = root["players"];
  if (players.size() == 0) players.fail("need at least one player");
  for (const auto& p : players.items()) {
    d.scope.players.push_back(p["name"].str());
    const Field acts = p["actions"];
    d.scope.actions.push_back(acts.strings());
    if (d.scope.actions.back().empty()) acts.fail("need at least one action");
    unique_names(acts, d.scope.actions.back());
  }
  unique_names(players, d.scope.players);
  const Field payoffs = root["payoffs"];
  if (payoffs.size() != d.scope.players.size()) payoffs.fail("need one payoff list per player");
  for (std::size_t n = 0; n < payoffs.size(); ++n) {
    const Field row = payoffs[n];
    if (row.size() != d.scope.actions[n].size()) row.fail("need one expression per action");
    d.payoffs.emplace_back();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const std::string src = row[i].str();
      try {
        parse_expression(src, d.scope);
      } catch (const ParseError& e) {
        row[i].fail(e.what());
      }
      d.payoffs.back().push_back(src);
    }
  }
  if (root.has("bound")) {
    d.bound = root["bound"].number();
    if (!(*d.bound > 0.0)) root["bound"].fail("bound must be positive");
  }
  return d;
}

inline TreeDocument read_tree(const Field& root) {
  TreeDocument d;
  d.spec.players = root["players"].count();
  d.spec.names = root["vertices"].strings();
  unique_names(root["vertices"], d.spec.names);
  std::map<std::string, std::size_t> index;
  for (std::size_t v = 0; v < d.spec.names.size(); ++v) index[d.spec.names[v]] = v;
  auto vertex = [&](const Field& f) {
    const std::string name = f.str();
    const auto it = index.find(name);
    if (it == index.end()) f.fail("unknown vertex '" + name + "'");
    return it->second;
  };
  d.spec.root = vertex(root["root"]);
  for (const auto& a : root["arrows"].items()) {
    if (a.size() != 2) a.fail("an arrow is [from, to]");
    d.spec.arrows.emplace_back(vertex(a[0]), vertex(a[1]));
  }
  if (root.has("chance")) {
    for (const auto& [name, probs] : root["chance"].members()) {
      const auto it = index.find(name);
      if (it == index.end()) probs.fail("unknown vertex '" + name + "'");
      d.spec.chance[it->second] = probs.numbers();
      check_probability(probs, d.spec.chance[it->second]);
    }
  }
  auto partition = [&](const Field& f) {
    if (f.size() != d.spec.players) f.fail("need one entry per player");
    std::vector<std::vector<std::vector<std::size_t>>> out;
    for (const auto& player : f.items()) {
      out.emplace_back();
      for (const auto& cell : player.items()) {
        out.back().emplace_back();
        for (const auto& v : cell.items()) out.back().back().push_back(vertex(v));
      }
    }
    return out;
  };
  d.spec.info = partition(root["information"]);
  d.spec.endpoint_partition = partition(root["endpoint_partition"]);
  const ValidationReport rep = validate_tree(d.spec);
  if (!rep.ok()) root.fail("invalid tree:\n" + rep.summary());
  const Field cont = root["continuation"];
  d.bound = cont["bound"].number();
  if (!(d.bound > 0.0)) cont["bound"].fail("bound must be positive");
  for (const auto& cls : cont["classes"].items()) {
    TreeDocument::ClassEntry e;
    e.endpoints = cls["endpoints"].strings();
    for (const auto& sel : cls["selections"].items()) {
      e.selections.emplace_back();
      for (const auto& row : sel.items()) e.selections.back().push_back(row.strings());
    }
    d.classes.push_back(std::move(e));
  }
  if (root.has("wrappers")) {
    for (const auto& [name, forms] : root["wrappers"].members()) d.wrappers[name] = forms.strings();
  }
  d.build();  // resolves classes, expressions and wrappers
  return d;
}

inline NeymanDocument read_neyman(const Field& root) {
  NeymanDocument d;
  const Field states = root["states"];
  d.states = states.strings();
  unique_names(states, d.states);
  const std::size_t K = d.states.size();
  if (K == 0) states.fail("need at least one state");
  const Field acts = root["actions"];
  d.actions_one = acts["one"].strings();
  d.actions_two = acts["two"].strings();
  unique_names(acts["one"], d.actions_one);
  unique_names(acts["two"], d.actions_two);
  const std::size_t I = d.actions_one.size(), J = d.actions_two.size();
  if (I < 2) acts["one"].fail("need at least two actions");
  if (J < 2) acts["two"].fail("need at least two actions");
  const Field prior = root["prior"];
  d.spec.prior = prior.numbers();
  if (d.spec.prior.size() != K) prior.fail("need one probability per state");
  check_probability(prior, d.spec.prior);
  for (const char* key : {"A", "B"}) {
    const Field ms = root[key];
    if (ms.size() != K) ms.fail("need one matrix per state");
    for (std::size_t k = 0; k < K; ++k) {
      Matrix m = ms[k].matrix();
      if (m.size() != I || m[0].size() != J) ms[k].fail("matrix must be |one| x |two|");
      (key[0] == 'A' ? d.spec.games.a : d.spec.games.b).push_back(std::move(m));
    }
  }
  const Field depth = root["depth"];
  d.spec.depth = depth.count();
  if (d.spec.depth == 0) depth.fail("truncation depth must be at least 1");
  const Field weights = root["weights"];
  d.spec.weights.clear();
  for (const char* who : {"one", "two"}) {
    const Field w = weights[who];
    Vector v = w.numbers();
    if (v.size() != d.spec.depth) w.fail("need one weight per stage");
    double s = 0.0;
    for (std::size_t l = 0; l < v.size(); ++l) {
      if (!std::isfinite(v[l]) || v[l] < 0.0) w[l].fail("weights must be nonnegative");
      s += v[l];
    }
    if (!(s < 1.0)) w.fail("stage weights must sum to less than 1");
    d.spec.weights.push_back(std::move(v));
  }
  try {
    d.spec.validate();
  } catch (const ConfigError& e) {
    root.fail(e.what());
  }
  if (root.has("plan")) {
    const Field p = root["plan"];
    NeymanDocument::Plan plan;
    for (const auto& v : p["posteriors"].items()) {
      plan.posteriors.push_back(v.numbers());
      if (plan.posteriors.back().size() != K) v.fail("need one probability per state");
      check_probability(v, plan.posteriors.back());
    }
    plan.weights = p["weights"].numbers();
    if (plan.weights.size() != plan.posteriors.size()) p["weights"].fail("need one weight per posterior");
    for (const auto& g : p["agreements"].items()) {
      plan.agreements.push_back(g.matrix());
      if (plan.agreements.back().size() != I || plan.agreements.back()[0].size() != J) {
        g.fail("agreement must be |one| x |two|");
      }
    }
    if (plan.agreements.size() != plan.posteriors.size()) {
      p["agreements"].fail("need one agreement per posterior");
    }
    plan.y = p["y"].numbers();
    if (plan.y.size() != K) p["y"].fail("need one entry per state");
    d.plan = std::move(plan);
  }
  return d;
}

}  // namespace detail

inline GameDocument parse_document(const Json& j) {
  const detail::Field root(j, "");
  if (!j.is_object()) root.fail("document must be an object");
  GameDocument d;
  const detail::Field version = root["schema_version"];
  if (!version.json().is_number_integer()) version.fail("expected an integer");
  d.schema_version = version.json().get<int>();
  if (d.schema_version != kSchemaVersion) {
    version.fail("unsupported schema version " + std::to_string(d.schema_version));
  }
  d.kind = root["kind"].str();
  if (root.has("name")) d.name = root["name"].str();
  if (d.kind == "myopic") {
    d.myopic = detail::read_myopic(root);
  } else if (d.kind == "tree") {
    d.tree = detail::read_tree(root);
  } else if (d.kind == "neyman") {
    d.neyman = detail::read_neyman(root);
  } else {
    root["kind"].fail("kind must be myopic, tree or neyman");
  }
  return d;
}

inline GameDocument parse_document_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // nlohmann reports a byte offset; convert it to a line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("malformed JSON", line, col);
  }
  return parse_document(j);
}

inline GameDocument load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_document_text(ss.str());
}

// ---------------------------------------------------------------------------
// Writing

inline Json matrix_json(const Matrix& m) {
  Json j = Json::array();
  for (const auto& r : m) j.push_back(r);
  return j;
}

inline Json emit_document(const GameDocument& d) {
  Json j;
  j["schema_version"] = d.schema_version;
  j["kind"] = d.kind;
  if (!d.name.empty()) j["name"] = d.name;
  if (d.myopic) {
    const auto& m = *d.myopic;
    Json players = Json::array();
    for (std::size_t n = 0; n < m.scope.players.size(); ++n) {
      players.push_back({{"name", m.scope.players[n]}, {"actions", m.scope.actions[n]}});
    }
    j["players"] = players;
    j["payoffs"] = m.payoffs;
    if (m.bound) j["bound"] = *m.bound;
  }
  if (d.tree) {
    const auto& t = *d.tree;
    const auto& names = t.spec.names;
    j["players"] = t.spec.players;
    j["vertices"] = names;
    j["root"] = names[t.spec.root];
    Json arrows = Json::array();
    for (const auto& [a, b] : t.spec.arrows) arrows.push_back({names[a], names[b]});
    j["arrows"] = arrows;
    if (!t.spec.chance.empty()) {
      Json ch = Json::object();
      for (const auto& [v, p] : t.spec.chance) ch[names[v]] = p;
      j["chance"] = ch;
    }
    auto partition = [&](const std::vector<std::vector<std::vector<std::size_t>>>& part) {
      Json out = Json::array();
      for (const auto& player : part) {
        Json cells = Json::array();
        for (const auto& cell : player) {
          Json c = Json::array();
          for (std::size_t v : cell) c.push_back(names[v]);
          cells.push_back(c);
        }
        out.push_back(cells);
      }
      return out;
    };
    j["information"] = partition(t.spec.info);
    j["endpoint_partition"] = partition(t.spec.endpoint_partition);
    Json classes = Json::array();
    for (const auto& c : t.classes) classes.push_back({{"endpoints", c.endpoints}, {"selections", c.selections}});
    j["continuation"] = {{"bound", t.bound}, {"classes", classes}};
    if (!t.wrappers.empty()) {
      Json w = Json::object();
      for (const auto& [name, forms] : t.wrappers) w[name] = forms;
      j["wrappers"] = w;
    }
  }
  if (d.neyman) {
    const auto& n = *d.neyman;
    j["states"] = n.states;
    j["actions"] = {{"one", n.actions_one}, {"two", n.actions_two}};
    j["prior"] = n.spec.prior;
    Json a = Json::array(), b = Json::array();
    for (const auto& m : n.spec.games.a) a.push_back(matrix_json(m));
    for (const auto& m : n.spec.games.b) b.push_back(matrix_json(m));
    j["A"] = a;
    j["B"] = b;
    j["weights"] = {{"one", n.spec.weights[0]}, {"two", n.spec.weights[1]}};
    j["depth"] = n.spec.depth;
    if (n.plan) {
      Json g = Json::array();
      for (const auto& m : n.plan->agreements) g.push_back(matrix_json(m));
      j["plan"] = {{"posteriors", n.plan->posteriors},
                   {"weights", n.plan->weights},
                   {"agreements", g},
                   {"y", n.plan->y}};
    }
  }
  return j;
}

}  // namespace myopic
