#include "pmink/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace pmink {

struct Expression::Node {
  enum class Kind { Constant, Theta, Add, Sub, Mul, Div, Pow, Neg, Call };
  enum class Function { Cos, Sin, Exp, Sqrt, Abs };

  Kind kind = Kind::Constant;
  double value = 0.0;
  Function function = Function::Cos;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(double theta) const {
    switch (kind) {
      case Kind::Constant: return value;
      case Kind::Theta: return theta;
      case Kind::Add: return lhs->eval(theta) + rhs->eval(theta);
      case Kind::Sub: return lhs->eval(theta) - rhs->eval(theta);
      case Kind::Mul: return lhs->eval(theta) * rhs->eval(theta);
      case Kind::Div: return lhs->eval(theta) / rhs->eval(theta);
      case Kind::Pow: return std::pow(lhs->eval(theta), rhs->eval(theta));
      case Kind::Neg: return -lhs->eval(theta);
      case Kind::Call: {
        const double x = lhs->eval(theta);
        switch (function) {
          case Function::Cos: return std::cos(x);
          case Function::Sin: return std::sin(x);
          case Function::Exp: return std::exp(x);
          case Function::Sqrt: return std::sqrt(x);
          case Function::Abs: return std::abs(x);
        }
      }
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make(Node::Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError(what, pos_);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+')) {
        lhs = make(Node::Kind::Add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Node::Kind::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*')) {
        lhs = make(Node::Kind::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = make(Node::Kind::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (accept('(')) {
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Constant;
    n->value = value;
    return n;
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view id = text_.substr(start, pos_ - start);
    if (id == "theta") return make(Node::Kind::Theta);
    if (id == "pi") {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::Constant;
      n->value = std::numbers::pi;
      return n;
    }
    Node::Function fn;
    if (id == "cos") {
      fn = Node::Function::Cos;
    } else if (id == "sin") {
      fn = Node::Function::Sin;
    } else if (id == "exp") {
      fn = Node::Function::Exp;
    } else if (id == "sqrt") {
      fn = Node::Function::Sqrt;
    } else if (id == "abs") {
      fn = Node::Function::Abs;
    } else {
      pos_ = start;
      fail("unknown name '" + std::string(id) + "'");
    }
    if (!accept('(')) fail("expected '(' after function name");
    NodePtr arg = expr();
    if (!accept(')')) fail("expected ')'");
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Call;
    n->function = fn;
    n->lhs = std::move(arg);
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.text_ = std::string(text);
  Parser parser(e.text_);
  e.root_ = parser.parse();
  return e;
}

double Expression::operator()(double theta) const { return root_->eval(theta); }

}  // namespace pmink
