#include "reiflab/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "reiflab/errors.hpp"

namespace reiflab {

struct Expression::Node {
  enum class Kind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Abs } kind;
  double value = 0.0;
  int var = 0;  // 0..2 coordinates, 3 r, 4 theta
  std::vector<std::shared_ptr<const Node>> args;

  double eval(const Point& p) const {
    switch (kind) {
      case Kind::Number:
        return value;
      case Kind::Var:
        if (var < 3) return p[static_cast<std::size_t>(var)];
        if (var == 3) return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        {
          double th = std::atan2(p[1], p[0]);
          if (th < 0.0) th += 2.0 * std::numbers::pi;
          return th;
        }
      case Kind::Neg:
        return -args[0]->eval(p);
      case Kind::Add:
        return args[0]->eval(p) + args[1]->eval(p);
      case Kind::Sub:
        return args[0]->eval(p) - args[1]->eval(p);
      case Kind::Mul:
        return args[0]->eval(p) * args[1]->eval(p);
      case Kind::Div:
        return args[0]->eval(p) / args[1]->eval(p);
      case Kind::Pow:
        return std::pow(args[0]->eval(p), args[1]->eval(p));
      case Kind::Sin:
        return std::sin(args[0]->eval(p));
      case Kind::Cos:
        return std::cos(args[0]->eval(p));
      case Kind::Exp:
        return std::exp(args[0]->eval(p));
      case Kind::Abs:
        return std::abs(args[0]->eval(p));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, std::vector<NodePtr> args = {}, double value = 0.0, int var = 0) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->args = std::move(args);
  n->value = value;
  n->var = var;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr run() {
    auto n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("expression \"" + s_ + "\": " + what + " at position " + std::to_string(pos_));
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

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    auto lhs = term();
    while (true) {
      if (eat('+'))
        lhs = make(Kind::Add, {lhs, term()});
      else if (eat('-'))
        lhs = make(Kind::Sub, {lhs, term()});
      else
        return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    while (true) {
      if (eat('*'))
        lhs = make(Kind::Mul, {lhs, unary()});
      else if (eat('/'))
        lhs = make(Kind::Div, {lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Kind::Neg, {unary()});
    if (eat('+')) return unary();
    auto base = primary();
    if (eat('^')) return make(Kind::Pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Kind::Number, {}, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return make(Kind::Var, {}, 0.0, 0);
      if (name == "y") return make(Kind::Var, {}, 0.0, 1);
      if (name == "z") return make(Kind::Var, {}, 0.0, 2);
      if (name == "r") return make(Kind::Var, {}, 0.0, 3);
      if (name == "theta") return make(Kind::Var, {}, 0.0, 4);
      if (name == "pi") return make(Kind::Number, {}, std::numbers::pi);
      Kind k;
      int arity = 1;
      if (name == "sin")
        k = Kind::Sin;
      else if (name == "cos")
        k = Kind::Cos;
      else if (name == "exp")
        k = Kind::Exp;
      else if (name == "abs")
        k = Kind::Abs;
      else if (name == "pow") {
        k = Kind::Pow;
        arity = 2;
      } else {
        pos_ = start;
        fail("unknown name '" + name + "'");
      }
      expect('(');
      std::vector<NodePtr> args{expr()};
      for (int i = 1; i < arity; ++i) {
        expect(',');
        args.push_back(expr());
      }
      expect(')');
      return make(k, std::move(args));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.text_ = text;
  e.root_ = Parser(e.text_).run();
  return e;
}

double Expression::operator()(const Point& p) const { return root_->eval(p); }

}  // namespace reiflab
