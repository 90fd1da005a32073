#pragma once

// Payoff expressions: a small arithmetic language over action probabilities
// x[n,i], class conditionals q[e] and named scalars.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | primary
//   primary := number | x[player, action] | q[endpoint] | name
//            | max(expr, ...) | min(expr, ...) | abs(expr) | '(' expr ')'

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "myopic/error.hpp"
#include "myopic/payoff.hpp"
#include "myopic/simplex.hpp"

namespace myopic {

/// Names that expressions may refer to. Variables are resolved to slots of a
/// flat environment: x[n,i] in layout order, then q[e], then scalars.
struct ExpressionScope {
  std::vector<std::string> players;               // x[<player>, .]
  std::vector<std::vector<std::string>> actions;  // x[., <action>]
  std::vector<std::string> conditionals;          // q[<endpoint>]
  std::vector<std::string> scalars;               // bare identifiers

  /// Players "1".."N" with actions "1".."k" (names may still be overridden).
  static ExpressionScope numbered(const Layout& layout) {
    ExpressionScope s;
    for (std::size_t n = 0; n < layout.players(); ++n) {
      s.players.push_back(std::to_string(n + 1));
      s.actions.emplace_back();
      for (std::size_t i = 0; i < layout.actions(n); ++i) s.actions[n].push_back(std::to_string(i + 1));
    }
    return s;
  }

  std::size_t action_slots() const {
    std::size_t c = 0;
    for (const auto& a : actions) c += a.size();
    return c;
  }
  std::size_t slot_count() const { return action_slots() + conditionals.size() + scalars.size(); }
};

class Expression {
 public:
  enum class Kind { kNumber, kVariable, kNeg, kAdd, kSub, kMul, kDiv, kMax, kMin, kAbs };

  struct Node {
    Kind kind = Kind::kNumber;
    double value = 0.0;
    std::size_t slot = 0;
    std::string name;  // printed form of a variable
    std::vector<std::shared_ptr<const Node>> args;
  };
  using NodePtr = std::shared_ptr<const Node>;

  Expression() = default;
  Expression(std::string source, NodePtr root, std::size_t slots)
      : source_(std::move(source)), root_(std::move(root)), slots_(slots) {}

  const std::string& source() const { return source_; }
  const NodePtr& root() const { return root_; }
  std::size_t slot_count() const { return slots_; }

  double evaluate(std::span<const double> env) const {
    if (env.size() < slots_) throw DimensionError("expression: environment too short");
    return eval(*root_, env);
  }

  /// Canonical text with minimal parentheses.
  std::string to_string() const { return print(*root_, 0); }

  /// Slots the expression reads.
  std::vector<std::size_t> variables() const {
    std::vector<std::size_t> out;
    collect(*root_, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  static double eval(const Node& n, std::span<const double> env) {
    switch (n.kind) {
      case Kind::kNumber: return n.value;
      case Kind::kVariable: return env[n.slot];
      case Kind::kNeg: return -eval(*n.args[0], env);
      case Kind::kAdd: return eval(*n.args[0], env) + eval(*n.args[1], env);
      case Kind::kSub: return eval(*n.args[0], env) - eval(*n.args[1], env);
      case Kind::kMul: return eval(*n.args[0], env) * eval(*n.args[1], env);
      case Kind::kDiv: {
        const double d = eval(*n.args[1], env);
        if (d == 0.0 || !std::isfinite(d)) throw DomainError("expression: division by zero", 0.0);
        return eval(*n.args[0], env) / d;
      }
      case Kind::kMax:
      case Kind::kMin: {
        double r = eval(*n.args[0], env);
        for (std::size_t k = 1; k < n.args.size(); ++k) {
          const double v = eval(*n.args[k], env);
          r = n.kind == Kind::kMax ? std::max(r, v) : std::min(r, v);
        }
        return r;
      }
      case Kind::kAbs: return std::abs(eval(*n.args[0], env));
    }
    return 0.0;
  }

  static void collect(const Node& n, std::vector<std::size_t>& out) {
    if (n.kind == Kind::kVariable) out.push_back(n.slot);
    for (const auto& a : n.args) collect(*a, out);
  }

  static int precedence(Kind k) {
    switch (k) {
      case Kind::kAdd:
      case Kind::kSub: return 1;
      case Kind::kMul:
      case Kind::kDiv: return 2;
      case Kind::kNeg: return 3;
      default: return 4;
    }
  }

  static std::string number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
  }

  // `context` is the precedence the surrounding position requires.
  static std::string print(const Node& n, int context) {
    std::string s;
    const int p = precedence(n.kind);
    switch (n.kind) {
      case Kind::kNumber:
        s = number(n.value);
        // A negative literal only arises from folding; print it as negation.
        if (n.value < 0.0 || (n.value == 0.0 && std::signbit(n.value))) {
          s = "-" + number(-n.value);
          return context > 1 ? "(" + s + ")" : s;
        }
        return s;
      case Kind::kVariable: return n.name;
      case Kind::kNeg: s = "-" + print(*n.args[0], 3); break;
      case Kind::kAdd:
      case Kind::kSub:
      case Kind::kMul:
      case Kind::kDiv: {
        const char* op = n.kind == Kind::kAdd ? " + " : n.kind == Kind::kSub ? " - "
                         : n.kind == Kind::kMul ? " * " : " / ";
        // Left-associative: the right operand needs strictly higher precedence.
        s = print(*n.args[0], p) + op + print(*n.args[1], p + 1);
        break;
      }
      case Kind::kMax:
      case Kind::kMin:
      case Kind::kAbs: {
        s = n.kind == Kind::kMax ? "max(" : n.kind == Kind::kMin ? "min(" : "abs(";
        for (std::size_t k = 0; k < n.args.size(); ++k) {
          if (k) s += ", ";
          s += print(*n.args[k], 0);
        }
        s += ")";
        return s;
      }
    }
    return p < context ? "(" + s + ")" : s;
  }

  std::string source_;
  NodePtr root_;
  std::size_t slots_ = 0;
};

namespace detail {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view src, const ExpressionScope& scope) : src_(src), scope_(scope) {}

  Expression::NodePtr parse() {
    skip();
    if (pos_ >= src_.size()) fail("empty expression");
    auto e = expr();
    skip();
    if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  using Kind = Expression::Kind;
  using NodePtr = Expression::NodePtr;

  [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < at && k < src_.size(); ++k) {
      if (src_[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("expression: " + what, line, col);
  }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) {
      fail(pos_ < src_.size() ? "expected '" + std::string(1, c) + "' but found '" +
                                    std::string(1, src_[pos_]) + "'"
                              : "expected '" + std::string(1, c) + "' at end of input");
    }
  }

  static NodePtr make(Kind k, std::vector<NodePtr> args) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->args = std::move(args);
    return n;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (eat('+')) {
        lhs = make(Kind::kAdd, {lhs, term()});
      } else if (eat('-')) {
        lhs = make(Kind::kSub, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (eat('*')) {
        lhs = make(Kind::kMul, {lhs, unary()});
      } else if (eat('/')) {
        lhs = make(Kind::kDiv, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Kind::kNeg, {unary()});
    if (eat('+')) return unary();
    return primary();
  }

  std::string word() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(src_.substr(start, pos_ - start));
  }

  static std::size_t find(const std::vector<std::string>& names, const std::string& w) {
    const auto it = std::find(names.begin(), names.end(), w);
    return it == names.end() ? names.size() : static_cast<std::size_t>(it - names.begin());
  }

  NodePtr variable(std::size_t slot, std::string name) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::kVariable;
    n->slot = slot;
    n->name = std::move(name);
    return n;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return literal();
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) {
      fail("unexpected '" + std::string(1, c) + "'");
    }
    const std::size_t at = pos_;
    const std::string id = word();
    if (id == "max" || id == "min" || id == "abs") {
      expect('(');
      std::vector<NodePtr> args{expr()};
      while (eat(',')) args.push_back(expr());
      expect(')');
      if (id == "abs" && args.size() != 1) fail_at("abs takes one argument", at);
      return make(id == "max" ? Kind::kMax : id == "min" ? Kind::kMin : Kind::kAbs, std::move(args));
    }
    skip();
    if (id == "x" && pos_ < src_.size() && src_[pos_] == '[') {
      ++pos_;
      const std::size_t pat = (skip(), pos_);
      const std::string pl = word();
      if (pl.empty()) fail("expected a player name");
      expect(',');
      const std::size_t aat = (skip(), pos_);
      const std::string ac = word();
      if (ac.empty()) fail("expected an action name");
      expect(']');
      const std::size_t n = find(scope_.players, pl);
      if (n == scope_.players.size()) fail_at("unknown player '" + pl + "'", pat);
      const std::size_t i = find(scope_.actions[n], ac);
      if (i == scope_.actions[n].size()) {
        fail_at("unknown action '" + ac + "' of player '" + pl + "'", aat);
      }
      std::size_t slot = i;
      for (std::size_t m = 0; m < n; ++m) slot += scope_.actions[m].size();
      return variable(slot, "x[" + pl + "," + ac + "]");
    }
    if (id == "q" && pos_ < src_.size() && src_[pos_] == '[') {
      ++pos_;
      const std::size_t eat_at = (skip(), pos_);
      const std::string e = word();
      if (e.empty()) fail("expected an endpoint name");
      expect(']');
      const std::size_t k = find(scope_.conditionals, e);
      if (k == scope_.conditionals.size()) fail_at("unknown endpoint '" + e + "'", eat_at);
      return variable(scope_.action_slots() + k, "q[" + e + "]");
    }
    const std::size_t k = find(scope_.scalars, id);
    if (k == scope_.scalars.size()) fail_at("unknown identifier '" + id + "'", at);
    return variable(scope_.action_slots() + scope_.conditionals.size() + k, id);
  }

  NodePtr literal() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
        pos_ = k;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto r = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (r.ec != std::errc() || r.ptr != src_.data() + pos_) fail_at("malformed number", start);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::kNumber;
    n->value = v;
    return n;
  }

  std::string_view src_;
  const ExpressionScope& scope_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expression parse_expression(std::string_view src, const ExpressionScope& scope) {
  detail::ExpressionParser p(src, scope);
  auto root = p.parse();
  return Expression(std::string(src), std::move(root), scope.slot_count());
}

/// Payoff family whose w^n_i is exprs[layout.offset(n) + i], read over x only.
inline PayoffFamily expression_family(const Layout& layout, std::vector<Expression> exprs,
                                      double bound = std::numeric_limits<double>::infinity()) {
  if (exprs.size() != layout.total()) throw DimensionError("expression_family: one expression per action");
  for (const auto& e : exprs) {
    if (e.slot_count() != layout.total()) {
      throw DimensionError("expression_family: expressions must range over x only");
    }
  }
  return PayoffFamily(
      layout,
      [es = std::move(exprs)](const MixedProfile& x) {
        Vector out(es.size());
        for (std::size_t k = 0; k < es.size(); ++k) out[k] = es[k].evaluate(x.coords());
        return out;
      },
      bound);
}

}  // namespace myopic
