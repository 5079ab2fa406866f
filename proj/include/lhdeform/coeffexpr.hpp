#pragma once

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lhdeform/errors.hpp"
#include "lhdeform/numkit/special.hpp"

namespace lhdeform::expr {

enum class Func { sin, cos, exp, sh, ch, th, sqrt, shc };

inline constexpr std::array<std::pair<std::string_view, Func>, 8> kFunctions{{
    {"sin", Func::sin},
    {"cos", Func::cos},
    {"exp", Func::exp},
    {"sh", Func::sh},
    {"ch", Func::ch},
    {"th", Func::th},
    {"sqrt", Func::sqrt},
    {"shc", Func::shc},
}};

inline std::string_view name_of(Func f) {
  for (const auto& [n, g] : kFunctions)
    if (g == f) return n;
  return "?";
}

inline std::optional<Func> lookup_function(std::string_view name) {
  for (const auto& [n, g] : kFunctions)
    if (n == name) return g;
  return std::nullopt;
}

/// Builtin function table shared by every evaluator.
inline double apply(Func f, double x) {
  switch (f) {
    case Func::sin: return std::sin(x);
    case Func::cos: return std::cos(x);
    case Func::exp: return std::exp(x);
    case Func::sh: return std::sinh(x);
    case Func::ch: return std::cosh(x);
    case Func::th: return std::tanh(x);
    case Func::sqrt: return std::sqrt(x);
    case Func::shc: return std::isfinite(x) ? (std::abs(x) > kOverflowArgument ? HUGE_VAL : lhdeform::shc(x)) : x;
  }
  return NAN;
}

enum class BinOp : char { add = '+', sub = '-', mul = '*', div = '/', pow = '^' };

inline double apply(BinOp op, double a, double b) {
  switch (op) {
    case BinOp::add: return a + b;
    case BinOp::sub: return a - b;
    case BinOp::mul: return a * b;
    case BinOp::div: return a / b;
    case BinOp::pow: return std::pow(a, b);
  }
  return NAN;
}

struct Node {
  enum class Kind { number, variable, negate, binary, call };

  Kind kind = Kind::number;
  double value = 0.0;
  BinOp op = BinOp::add;
  Func func = Func::sin;
  std::shared_ptr<const Node> lhs;  ///< operand of negate and call
  std::shared_ptr<const Node> rhs;
  std::size_t begin = 0;  ///< byte range in the source text
  std::size_t end = 0;
};

using NodePtr = std::shared_ptr<const Node>;

/// Structural equality, ignoring source positions.
inline bool same_tree(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Node::Kind::number: return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
    case Node::Kind::variable: return true;
    case Node::Kind::negate: return same_tree(*a.lhs, *b.lhs);
    case Node::Kind::call: return a.func == b.func && same_tree(*a.lhs, *b.lhs);
    case Node::Kind::binary: return a.op == b.op && same_tree(*a.lhs, *b.lhs) && same_tree(*a.rhs, *b.rhs);
  }
  return false;
}

/// Fully parenthesized text that parses back to the same tree.
inline std::string print(const Node& n) {
  switch (n.kind) {
    case Node::Kind::number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      return buf;
    }
    case Node::Kind::variable: return "t";
    case Node::Kind::negate: return "(-" + print(*n.lhs) + ")";
    case Node::Kind::call: return std::string(name_of(n.func)) + "(" + print(*n.lhs) + ")";
    case Node::Kind::binary:
      return "(" + print(*n.lhs) + " " + static_cast<char>(n.op) + " " + print(*n.rhs) + ")";
  }
  return "";
}

namespace detail {

// expr    := term (('+' | '-') term)*
// term    := unary (('*' | '/') unary)*
// unary   := ('-' | '+') unary | power
// power   := primary ('^' unary)?
// primary := number | 't' | ident '(' expr ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  NodePtr parse() {
    skip();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    NodePtr root = expr();
    skip();
    if (pos_ < src_.size()) {
      if (src_[pos_] == ')') throw ParseError("unbalanced ')'", pos_);
      throw ParseError("unexpected trailing input '" + std::string(src_.substr(pos_)) + "'", pos_);
    }
    return root;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;

  static constexpr int kMaxDepth = 256;

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

  NodePtr binary(BinOp op, NodePtr a, NodePtr b) {
    Node n;
    n.kind = Node::Kind::binary;
    n.op = op;
    n.begin = a->begin;
    n.end = b->end;
    n.lhs = std::move(a);
    n.rhs = std::move(b);
    return make(std::move(n));
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) throw ParseError("expression nested too deeply", p.pos_);
    }
    ~DepthGuard() { --p.depth_; }
  };

  NodePtr expr() {
    DepthGuard guard(*this);
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = binary(BinOp::add, lhs, term());
      else if (accept('-')) lhs = binary(BinOp::sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = binary(BinOp::mul, lhs, unary());
      else if (accept('/')) lhs = binary(BinOp::div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    DepthGuard guard(*this);
    skip();
    const std::size_t at = pos_;
    if (accept('-')) {
      NodePtr operand = unary();
      Node n;
      n.kind = Node::Kind::negate;
      n.begin = at;
      n.end = operand->end;
      n.lhs = std::move(operand);
      return make(std::move(n));
    }
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary(BinOp::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    const std::size_t at = pos_;
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      const std::string_view ident = src_.substr(at, pos_ - at);
      if (ident == "t") {
        Node n;
        n.kind = Node::Kind::variable;
        n.begin = at;
        n.end = pos_;
        return make(std::move(n));
      }
      const auto f = lookup_function(ident);
      if (!f) throw ParseError("unknown identifier '" + std::string(ident) + "'", at);
      if (!accept('(')) throw ParseError("expected '(' after '" + std::string(ident) + "'", pos_);
      NodePtr arg = expr();
      if (!accept(')')) throw ParseError("unbalanced '(': expected ')'", pos_);
      Node n;
      n.kind = Node::Kind::call;
      n.func = *f;
      n.begin = at;
      n.end = pos_;
      n.lhs = std::move(arg);
      return make(std::move(n));
    }
    if (accept('(')) {
      NodePtr inner = expr();
      if (!accept(')')) throw ParseError("unbalanced '(': expected ')'", pos_);
      Node n = *inner;
      n.begin = at;
      n.end = pos_;
      return make(std::move(n));
    }
    if (c == ')') throw ParseError("unbalanced ')'", pos_);
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t at = pos_;
    auto digits = [&] {
      const std::size_t s = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ParseError("malformed number", at);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    const std::string text(src_.substr(at, pos_ - at));
    const double v = std::strtod(text.c_str(), nullptr);
    if (!std::isfinite(v)) throw ParseError("numeric literal out of range", at);
    Node node;
    node.kind = Node::Kind::number;
    node.value = v;
    node.begin = at;
    node.end = pos_;
    return make(std::move(node));
  }
};

}  // namespace detail

/// A parsed coefficient expression in the single variable t, compiled to a
/// postfix program for evaluation. Immutable; cheap to copy.
class Expr {
 public:
  static Expr parse(std::string_view src) {
    Expr e;
    e.source_ = std::make_shared<const std::string>(src);
    e.root_ = detail::Parser(*e.source_).parse();
    auto prog = std::make_shared<std::vector<Instr>>();
    compile(*e.root_, *prog);
    e.program_ = std::move(prog);
    return e;
  }

  /// Value at t. Throws EvalError naming the first subexpression whose
  /// value is not finite.
  double eval(double t) const {
    if (!std::isfinite(t)) throw EvalError("t must be finite", 0);
    std::vector<double> stack;
    stack.reserve(program_->size());
    for (const Instr& in : *program_) {
      double v;
      switch (in.kind) {
        case Node::Kind::number: v = in.value; break;
        case Node::Kind::variable: v = t; break;
        case Node::Kind::negate: v = -stack.back(); stack.pop_back(); break;
        case Node::Kind::call: v = apply(in.func, stack.back()); stack.pop_back(); break;
        case Node::Kind::binary: {
          const double b = stack.back();
          stack.pop_back();
          const double a = stack.back();
          stack.pop_back();
          v = apply(in.op, a, b);
          break;
        }
        default: v = NAN;
      }
      if (!std::isfinite(v)) fail(in.begin, in.end);
      stack.push_back(v);
    }
    return stack.back();
  }

  double operator()(double t) const { return eval(t); }

  const Node& root() const { return *root_; }
  const std::string& source() const { return *source_; }
  std::string print() const { return expr::print(*root_); }

  /// Throws EvalError for the source range [begin, end).
  [[noreturn]] void fail(std::size_t begin, std::size_t end) const {
    throw EvalError("non-finite value in '" + source_->substr(begin, end - begin) + "'", begin);
  }

  friend bool operator==(const Expr& a, const Expr& b) { return same_tree(*a.root_, *b.root_); }

 private:
  struct Instr {
    Node::Kind kind;
    double value;
    BinOp op;
    Func func;
    std::size_t begin;
    std::size_t end;
  };

  static void compile(const Node& n, std::vector<Instr>& out) {
    if (n.lhs) compile(*n.lhs, out);
    if (n.rhs) compile(*n.rhs, out);
    out.push_back({n.kind, n.value, n.op, n.func, n.begin, n.end});
  }

  std::shared_ptr<const std::string> source_;
  NodePtr root_;
  std::shared_ptr<const std::vector<Instr>> program_;
};

inline Expr parse(std::string_view src) { return Expr::parse(src); }

inline double eval(const Expr& e, double t) { return e.eval(t); }

/// Wraps a parsed expression as a coefficient function.
inline std::function<double(double)> as_function(const Expr& e) {
  return [e](double t) { return e.eval(t); };
}

}  // namespace lhdeform::expr
