#include "exitwise/drift_expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "exitwise/errors.hpp"
#include "exitwise/special_fn.hpp"

namespace exitwise {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Sin, Cos, Exp, Pow };

struct Expr::Node {
  Op op;
  double value = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr leaf(double v) { return std::make_shared<const Expr::Node>(Expr::Node{Op::Const, v, nullptr, nullptr}); }
NodePtr var() { return std::make_shared<const Expr::Node>(Expr::Node{Op::Var, 0.0, nullptr, nullptr}); }
NodePtr node(Op op, NodePtr l, NodePtr r = nullptr) {
  return std::make_shared<const Expr::Node>(Expr::Node{op, 0.0, std::move(l), std::move(r)});
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

bool depends_on_x(const NodePtr& n) {
  if (!n) return false;
  if (n->op == Op::Var) return true;
  return depends_on_x(n->lhs) || depends_on_x(n->rhs);
}

double eval(const Expr::Node& n, double x) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x;
    case Op::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
    case Op::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
    case Op::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
    case Op::Div: return eval(*n.lhs, x) / eval(*n.rhs, x);
    case Op::Neg: return -eval(*n.lhs, x);
    case Op::Sin: return std::sin(eval(*n.lhs, x));
    case Op::Cos: return std::cos(eval(*n.lhs, x));
    case Op::Exp: return std::exp(eval(*n.lhs, x));
    case Op::Pow: return std::pow(eval(*n.lhs, x), eval(*n.rhs, x));
  }
  return 0.0;
}

// constructors that fold the trivial cases the derivative keeps producing
NodePtr add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return leaf(a->value + b->value);
  return node(Op::Add, a, b);
}
NodePtr sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return leaf(a->value - b->value);
  if (is_const(a, 0.0)) return node(Op::Neg, b);
  return node(Op::Sub, a, b);
}
NodePtr mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return leaf(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return leaf(a->value * b->value);
  return node(Op::Mul, a, b);
}
NodePtr div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return leaf(0.0);
  if (is_const(b, 1.0)) return a;
  return node(Op::Div, a, b);
}
NodePtr neg(NodePtr a) {
  if (a->op == Op::Const) return leaf(-a->value);
  return node(Op::Neg, a);
}

NodePtr diff(const NodePtr& n) {
  switch (n->op) {
    case Op::Const: return leaf(0.0);
    case Op::Var: return leaf(1.0);
    case Op::Add: return add(diff(n->lhs), diff(n->rhs));
    case Op::Sub: return sub(diff(n->lhs), diff(n->rhs));
    case Op::Mul: return add(mul(diff(n->lhs), n->rhs), mul(n->lhs, diff(n->rhs)));
    case Op::Div:
      return div(sub(mul(diff(n->lhs), n->rhs), mul(n->lhs, diff(n->rhs))), mul(n->rhs, n->rhs));
    case Op::Neg: return neg(diff(n->lhs));
    case Op::Sin: return mul(node(Op::Cos, n->lhs), diff(n->lhs));
    case Op::Cos: return neg(mul(node(Op::Sin, n->lhs), diff(n->lhs)));
    case Op::Exp: return mul(n, diff(n->lhs));
    case Op::Pow: {
      const double c = eval(*n->rhs, 0.0);
      return mul(mul(leaf(c), node(Op::Pow, n->lhs, leaf(c - 1.0))), diff(n->lhs));
    }
  }
  return leaf(0.0);
}

void print(const Expr::Node& n, std::ostringstream& os) {
  auto fn = [&](const char* name) {
    os << name << '(';
    print(*n.lhs, os);
    os << ')';
  };
  auto bin = [&](char c) {
    os << '(';
    print(*n.lhs, os);
    os << ' ' << c << ' ';
    print(*n.rhs, os);
    os << ')';
  };
  switch (n.op) {
    case Op::Const: os << n.value; break;
    case Op::Var: os << 'x'; break;
    case Op::Add: bin('+'); break;
    case Op::Sub: bin('-'); break;
    case Op::Mul: bin('*'); break;
    case Op::Div: bin('/'); break;
    case Op::Pow: bin('^'); break;
    case Op::Neg:
      os << "(-";
      print(*n.lhs, os);
      os << ')';
      break;
    case Op::Sin: fn("sin"); break;
    case Op::Cos: fn("cos"); break;
    case Op::Exp: fn("exp"); break;
  }
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr run() {
    NodePtr e = expression();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("drift expression: " + what + " at column " + std::to_string(pos_ + 1) + " in '" +
                     std::string(s_) + "'");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expression() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = node(Op::Add, lhs, term());
      else if (eat('-')) lhs = node(Op::Sub, lhs, term());
      else return lhs;
    }
  }
  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = node(Op::Mul, lhs, unary());
      else if (eat('/')) lhs = node(Op::Div, lhs, unary());
      else return lhs;
    }
  }
  NodePtr unary() {
    if (eat('-')) return node(Op::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (eat('^')) {
      NodePtr ex = unary();
      if (depends_on_x(ex)) fail("exponent must be constant");
      return node(Op::Pow, base, leaf(eval(*ex, 0.0)));
    }
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(s_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("bad number");
      pos_ += std::size_t(end - rest.c_str());
      return leaf(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view id = s_.substr(start, pos_ - start);
      if (id == "x") return var();
      if (id == "pi") return leaf(kPi);
      if (id == "e") return leaf(std::exp(1.0));
      Op op;
      if (id == "sin") op = Op::Sin;
      else if (id == "cos") op = Op::Cos;
      else if (id == "exp") op = Op::Exp;
      else {
        pos_ = start;
        fail("unknown identifier '" + std::string(id) + "'");
      }
      if (!eat('(')) fail("expected '(' after function name");
      NodePtr arg = expression();
      if (!eat(')')) fail("expected ')'");
      return node(op, arg);
    }
    if (eat('(')) {
      NodePtr e = expression();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    fail("unexpected character");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).run()); }

Expr Expr::constant(double value) { return Expr(leaf(value)); }

Expr Expr::variable() { return Expr(var()); }

double Expr::operator()(double x) const { return eval(*root_, x); }

Expr Expr::derivative() const { return Expr(diff(root_)); }

std::string Expr::str() const {
  std::ostringstream os;
  os.precision(17);
  print(*root_, os);
  return os.str();
}

}  // namespace exitwise
