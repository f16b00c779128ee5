#include "ealign/expression.hpp"

#include <cctype>
#include <cmath>
#include <map>
#include <vector>

namespace ealign {

struct Expression::Node {
  enum class Op {
    Const, Var1, Var2,
    Add, Sub, Mul, Div, Pow, Neg,
    Call1, Call2
  };
  Op op = Op::Const;
  double value = 0.0;
  double (*fn1)(double) = nullptr;
  double (*fn2)(double, double) = nullptr;
  std::shared_ptr<const Node> a, b;

  double eval(double x1, double x2) const {
    switch (op) {
      case Op::Const: return value;
      case Op::Var1: return x1;
      case Op::Var2: return x2;
      case Op::Add: return a->eval(x1, x2) + b->eval(x1, x2);
      case Op::Sub: return a->eval(x1, x2) - b->eval(x1, x2);
      case Op::Mul: return a->eval(x1, x2) * b->eval(x1, x2);
      case Op::Div: return a->eval(x1, x2) / b->eval(x1, x2);
      case Op::Pow: return std::pow(a->eval(x1, x2), b->eval(x1, x2));
      case Op::Neg: return -a->eval(x1, x2);
      case Op::Call1: return fn1(a->eval(x1, x2));
      case Op::Call2: return fn2(a->eval(x1, x2), b->eval(x1, x2));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make(Node::Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_const(double v) {
  auto n = std::make_shared<Node>();
  n->value = v;
  return n;
}

struct Parser {
  const std::string& s;
  size_t pos = 0;

  explicit Parser(const std::string& src) : s(src) {}

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw EalignError("expression parse error at position " + std::to_string(pos) +
                      ": " + what + " in \"" + s + "\"");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      skip();
      if (eat('+'))
        lhs = make(Node::Op::Add, lhs, term());
      else if (eat('-'))
        lhs = make(Node::Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      skip();
      if (eat('*'))
        lhs = make(Node::Op::Mul, lhs, unary());
      else if (eat('/'))
        lhs = make(Node::Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    skip();
    if (eat('-')) return make(Node::Op::Neg, unary());
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    skip();
    if (eat('^')) return make(Node::Op::Pow, base, unary());  // right-assoc
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    const char c = s[pos];
    if (c == '(') {
      ++pos;
      NodePtr inner = expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t end = 0;
      const double v = std::stod(s.substr(pos), &end);
      pos += end;
      return make_const(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      const std::string name = s.substr(start, pos - start);
      if (name == "a1" || name == "x") return make(Node::Op::Var1);
      if (name == "a2" || name == "y") return make(Node::Op::Var2);
      if (name == "pi") return make_const(M_PI);
      if (name == "e") return make_const(M_E);
      static const std::map<std::string, double (*)(double)> fns1 = {
          {"sin", std::sin},    {"cos", std::cos},   {"tan", std::tan},
          {"exp", std::exp},    {"log", std::log},   {"sqrt", std::sqrt},
          {"abs", std::fabs},   {"tanh", std::tanh}, {"sinh", std::sinh},
          {"cosh", std::cosh},  {"asinh", std::asinh}, {"atan", std::atan}};
      static const std::map<std::string, double (*)(double, double)> fns2 = {
          {"pow", std::pow}, {"min", std::fmin}, {"max", std::fmax}};
      if (!eat('(')) fail("unknown identifier '" + name + "'");
      NodePtr first = expr();
      if (auto it = fns2.find(name); it != fns2.end()) {
        if (!eat(',')) fail("'" + name + "' expects two arguments");
        NodePtr second = expr();
        if (!eat(')')) fail("expected ')'");
        auto n = std::make_shared<Node>();
        n->op = Node::Op::Call2;
        n->fn2 = it->second;
        n->a = first;
        n->b = second;
        return n;
      }
      auto it = fns1.find(name);
      if (it == fns1.end()) fail("unknown function '" + name + "'");
      if (!eat(')')) fail("expected ')'");
      auto n = std::make_shared<Node>();
      n->op = Node::Op::Call1;
      n->fn1 = it->second;
      n->a = first;
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Expression::Expression(const std::string& source) : src_(source) {
  Parser p(source);
  root_ = p.expr();
  p.skip();
  if (p.pos != source.size()) p.fail("trailing input");
}

double Expression::operator()(double a1, double a2) const { return root_->eval(a1, a2); }

}  // namespace ealign
