#include "ccdim/expr.hpp"

#include <charconv>
#include <cmath>
#include <utility>

#include "ccdim/numeric.hpp"

namespace ccdim {

struct ExprNode {
  enum class Kind { Const, Var, Neg, Sqrt, Exp, Log, Add, Sub, Mul, Div, Pow };
  Kind kind;
  double value = 0.0;  // literal for Const, exponent for Pow
  std::shared_ptr<const ExprNode> a, b;
};

namespace {

using Kind = ExprNode::Kind;
using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Const;
  n->value = v;
  return n;
}

NodePtr make_var() {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Var;
  return n;
}

bool is_const(const NodePtr& n, double v) {
  return n->kind == Kind::Const && n->value == v;
}

NodePtr make_unary(Kind kind, NodePtr child) {
  if (child->kind == Kind::Const) {
    double v = child->value;
    double folded;
    switch (kind) {
      case Kind::Neg: folded = -v; break;
      case Kind::Sqrt: folded = std::sqrt(v); break;
      case Kind::Exp: folded = std::exp(v); break;
      case Kind::Log: folded = std::log(v); break;
      default: folded = std::nan("");
    }
    if (std::isfinite(folded)) return make_const(folded);
    // Leave the node in place so evaluation reports the domain fault.
  }
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->a = std::move(child);
  return n;
}

NodePtr make_binary(Kind kind, NodePtr a, NodePtr b) {
  if (a->kind == Kind::Const && b->kind == Kind::Const) {
    double folded;
    switch (kind) {
      case Kind::Add: folded = a->value + b->value; break;
      case Kind::Sub: folded = a->value - b->value; break;
      case Kind::Mul: folded = a->value * b->value; break;
      case Kind::Div: folded = b->value != 0.0 ? a->value / b->value
                                               : std::nan(""); break;
      default: folded = std::nan("");
    }
    if (std::isfinite(folded)) return make_const(folded);
  }
  switch (kind) {
    case Kind::Add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Kind::Sub:
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make_unary(Kind::Neg, std::move(b));
      break;
    case Kind::Mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      // c1 * (c2 * e) -> (c1 c2) * e
      if (a->kind == Kind::Const && b->kind == Kind::Mul &&
          b->a->kind == Kind::Const)
        return make_binary(Kind::Mul, make_const(a->value * b->a->value), b->b);
      if (b->kind == Kind::Const && a->kind == Kind::Mul &&
          a->a->kind == Kind::Const)
        return make_binary(Kind::Mul, make_const(b->value * a->a->value), a->b);
      break;
    case Kind::Div:
      if (is_const(b, 1.0)) return a;
      break;
    default:
      break;
  }
  auto n = std::make_shared<ExprNode>();
  n->kind = kind;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_pow(NodePtr base, double exponent) {
  if (exponent == 1.0) return base;
  if (exponent == 0.0) return make_const(1.0);
  if (base->kind == Kind::Const) {
    const double folded = std::pow(base->value, exponent);
    if (std::isfinite(folded)) return make_const(folded);
  }
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Pow;
  n->value = exponent;
  n->a = std::move(base);
  return n;
}

int precedence(Kind kind) {
  switch (kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

void print_node(const ExprNode* n, std::string& out) {
  auto child = [&](const ExprNode* c, bool needs_parens) {
    if (needs_parens) out.push_back('(');
    print_node(c, out);
    if (needs_parens) out.push_back(')');
  };
  const int p = precedence(n->kind);
  switch (n->kind) {
    case Kind::Const: out += format_double(n->value); return;
    case Kind::Var: out.push_back('x'); return;
    case Kind::Neg:
      out.push_back('-');
      child(n->a.get(), precedence(n->a->kind) < p);
      return;
    case Kind::Sqrt:
    case Kind::Exp:
    case Kind::Log:
      out += n->kind == Kind::Sqrt ? "sqrt" : n->kind == Kind::Exp ? "exp" : "log";
      out.push_back('(');
      print_node(n->a.get(), out);
      out.push_back(')');
      return;
    case Kind::Pow:
      child(n->a.get(), precedence(n->a->kind) <= p);
      out.push_back('^');
      out += format_double(n->value);
      return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
    case Kind::Div: {
      const char op = n->kind == Kind::Add   ? '+'
                      : n->kind == Kind::Sub ? '-'
                      : n->kind == Kind::Mul ? '*'
                                             : '/';
      child(n->a.get(), precedence(n->a->kind) < p);
      out.push_back(' ');
      out.push_back(op);
      out.push_back(' ');
      const bool strict = n->kind == Kind::Sub || n->kind == Kind::Div;
      child(n->b.get(), precedence(n->b->kind) < p + (strict ? 1 : 0));
      return;
    }
  }
}

std::string node_str(const ExprNode* n) {
  std::string out;
  print_node(n, out);
  return out;
}

double eval_node(const ExprNode* n, double x) {
  double result;
  switch (n->kind) {
    case Kind::Const: return n->value;
    case Kind::Var: return x;
    case Kind::Neg: return -eval_node(n->a.get(), x);
    case Kind::Sqrt: {
      const double v = eval_node(n->a.get(), x);
      if (v < 0.0) throw EvalDomainError("sqrt of negative value", node_str(n));
      return std::sqrt(v);
    }
    case Kind::Exp:
      result = std::exp(eval_node(n->a.get(), x));
      break;
    case Kind::Log: {
      const double v = eval_node(n->a.get(), x);
      if (v <= 0.0) throw EvalDomainError("log of non-positive value", node_str(n));
      return std::log(v);
    }
    case Kind::Add:
      result = eval_node(n->a.get(), x) + eval_node(n->b.get(), x);
      break;
    case Kind::Sub:
      result = eval_node(n->a.get(), x) - eval_node(n->b.get(), x);
      break;
    case Kind::Mul:
      result = eval_node(n->a.get(), x) * eval_node(n->b.get(), x);
      break;
    case Kind::Div: {
      const double denom = eval_node(n->b.get(), x);
      if (denom == 0.0) throw EvalDomainError("division by zero", node_str(n));
      result = eval_node(n->a.get(), x) / denom;
      break;
    }
    case Kind::Pow: {
      const double base = eval_node(n->a.get(), x);
      const double e = n->value;
      if (base < 0.0 && e != std::floor(e))
        throw EvalDomainError("negative base with non-integer exponent",
                              node_str(n));
      if (base == 0.0 && e < 0.0)
        throw EvalDomainError("zero base with negative exponent", node_str(n));
      result = std::pow(base, e);
      break;
    }
    default:
      result = std::nan("");
  }
  if (!std::isfinite(result))
    throw EvalDomainError("non-finite result", node_str(n));
  return result;
}

NodePtr diff_node(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Const: return make_const(0.0);
    case Kind::Var: return make_const(1.0);
    case Kind::Neg: return make_unary(Kind::Neg, diff_node(n->a));
    case Kind::Sqrt:
      // (sqrt u)' = u' / (2 sqrt u)
      return make_binary(Kind::Div, diff_node(n->a),
                         make_binary(Kind::Mul, make_const(2.0),
                                     make_unary(Kind::Sqrt, n->a)));
    case Kind::Exp:
      return make_binary(Kind::Mul, diff_node(n->a), make_unary(Kind::Exp, n->a));
    case Kind::Log:
      return make_binary(Kind::Div, diff_node(n->a), n->a);
    case Kind::Add:
      return make_binary(Kind::Add, diff_node(n->a), diff_node(n->b));
    case Kind::Sub:
      return make_binary(Kind::Sub, diff_node(n->a), diff_node(n->b));
    case Kind::Mul:
      return make_binary(Kind::Add,
                         make_binary(Kind::Mul, diff_node(n->a), n->b),
                         make_binary(Kind::Mul, n->a, diff_node(n->b)));
    case Kind::Div:
      return make_binary(
          Kind::Div,
          make_binary(Kind::Sub, make_binary(Kind::Mul, diff_node(n->a), n->b),
                      make_binary(Kind::Mul, n->a, diff_node(n->b))),
          make_binary(Kind::Mul, n->b, n->b));
    case Kind::Pow:
      // (u^p)' = p u^(p-1) u'
      return make_binary(Kind::Mul, make_const(n->value),
                         make_binary(Kind::Mul, make_pow(n->a, n->value - 1.0),
                                     diff_node(n->a)));
  }
  return make_const(0.0);
}

bool same_node(const ExprNode* a, const ExprNode* b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::Const: return a->value == b->value;
    case Kind::Var: return true;
    case Kind::Neg:
    case Kind::Sqrt:
    case Kind::Exp:
    case Kind::Log:
      return same_node(a->a.get(), b->a.get());
    case Kind::Pow:
      return a->value == b->value && same_node(a->a.get(), b->a.get());
    default:
      return same_node(a->a.get(), b->a.get()) && same_node(a->b.get(), b->b.get());
  }
}

// Recursive-descent parser. Grammar (whitespace insignificant):
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := primary ('^' unary)?     -- exponent must fold to a literal
//   primary:= number | 'x' | ident '(' expr ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr run() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("empty expression", 0);
    NodePtr e = parse_expr();
    skip_ws();
    if (pos_ < text_.size())
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'",
                       pos_);
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r'))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      if (eat('+')) e = make_binary(Kind::Add, e, parse_term());
      else if (eat('-')) e = make_binary(Kind::Sub, e, parse_term());
      else return e;
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_unary();
    for (;;) {
      if (eat('*')) e = make_binary(Kind::Mul, e, parse_unary());
      else if (eat('/')) e = make_binary(Kind::Div, e, parse_unary());
      else return e;
    }
  }

  NodePtr parse_unary() {
    if (eat('-')) return make_unary(Kind::Neg, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    skip_ws();
    if (!eat('^')) return base;
    skip_ws();
    const std::size_t expo_pos = pos_;
    NodePtr expo = parse_unary();
    if (expo->kind != Kind::Const)
      throw ParseError("exponent must be a numeric literal", expo_pos);
    return make_pow(std::move(base), expo->value);
  }

  NodePtr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = parse_expr();
      if (!eat(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return parse_ident();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    double v = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr == begin)
      throw ParseError("invalid numeric literal", start);
    pos_ += static_cast<std::size_t>(ptr - begin);
    return make_const(v);
  }

  NodePtr parse_ident() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           ((text_[pos_] >= 'a' && text_[pos_] <= 'z') ||
            (text_[pos_] >= 'A' && text_[pos_] <= 'Z') ||
            (text_[pos_] >= '0' && text_[pos_] <= '9')))
      ++pos_;
    const std::string name(text_.substr(start, pos_ - start));
    if (name == "x") return make_var();
    Kind kind;
    if (name == "sqrt") kind = Kind::Sqrt;
    else if (name == "exp") kind = Kind::Exp;
    else if (name == "log") kind = Kind::Log;
    else throw ParseError("unknown identifier '" + name + "'", start);
    if (!eat('(')) throw ParseError("expected '(' after '" + name + "'", pos_);
    NodePtr arg = parse_expr();
    if (!eat(')')) throw ParseError("expected ')'", pos_);
    return make_unary(kind, std::move(arg));
  }
};

}  // namespace

MapExpr::MapExpr() : root_(make_const(0.0)) {}
MapExpr::MapExpr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}

MapExpr MapExpr::parse(std::string_view text) {
  return MapExpr(Parser(text).run());
}

MapExpr MapExpr::derivative() const { return MapExpr(diff_node(root_)); }

double MapExpr::eval(double x) const { return eval_node(root_.get(), x); }

std::string MapExpr::str() const { return node_str(root_.get()); }

bool MapExpr::same_tree(const MapExpr& other) const {
  return same_node(root_.get(), other.root_.get());
}

}  // namespace ccdim
