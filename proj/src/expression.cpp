#include "hcat/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

namespace hcat {

struct Expression::Node {
  enum class Op { Number, Variable, Add, Sub, Mul, Div, Pow, Neg, Abs, Exp, Log, Sqrt };
  Op op = Op::Number;
  double number = 0.0;
  std::size_t variable = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_leaf_number(double v) {
  auto n = std::make_shared<Node>();
  n->op = Node::Op::Number;
  n->number = v;
  return n;
}

NodePtr make_node(Node::Op op, std::vector<NodePtr> args) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

bool is_constant(const Node& n) {
  if (n.op == Node::Op::Variable) return false;
  for (const auto& a : n.args)
    if (!is_constant(*a)) return false;
  return true;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars,
         const std::vector<std::pair<std::string, std::string>>& aliases)
      : text_(text), vars_(vars), aliases_(aliases) {}

  NodePtr parse() {
    auto e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
    return e;
  }

 private:
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

  void expect(char c) {
    if (!accept(c)) {
      skip_space();
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr parse_sum() {
    auto lhs = parse_product();
    for (;;) {
      if (accept('+'))
        lhs = make_node(Node::Op::Add, {lhs, parse_product()});
      else if (accept('-'))
        lhs = make_node(Node::Op::Sub, {lhs, parse_product()});
      else
        return lhs;
    }
  }

  NodePtr parse_product() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = make_node(Node::Op::Mul, {lhs, parse_unary()});
      else if (accept('/'))
        lhs = make_node(Node::Op::Div, {lhs, parse_unary()});
      else
        return lhs;
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make_node(Node::Op::Neg, {parse_unary()});
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  // `^` binds tighter than unary minus on its left, and its exponent may
  // itself carry a sign: -y^2 == -(y^2), y^-1 == y^(-1), a^b^c == a^(b^c).
  NodePtr parse_power() {
    auto base = parse_primary();
    if (accept('^')) return make_node(Node::Op::Pow, {base, parse_unary()});
    return base;
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  NodePtr parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto* first = text_.data() + start;
    const auto* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError("malformed number", start);
    return make_leaf_number(v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));

    static const std::pair<const char*, Node::Op> unary_functions[] = {
        {"abs", Node::Op::Abs}, {"exp", Node::Op::Exp}, {"log", Node::Op::Log}, {"sqrt", Node::Op::Sqrt}};
    for (const auto& [fname, op] : unary_functions) {
      if (name == fname) {
        expect('(');
        auto arg = parse_sum();
        expect(')');
        return make_node(op, {arg});
      }
    }
    if (name == "pow") {
      expect('(');
      auto a = parse_sum();
      expect(',');
      auto b = parse_sum();
      expect(')');
      return make_node(Node::Op::Pow, {a, b});
    }

    for (const auto& [alias, target] : aliases_)
      if (name == alias) name = target;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) {
        auto n = std::make_shared<Node>();
        n->op = Node::Op::Variable;
        n->variable = i;
        return n;
      }
    }
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  const std::vector<std::pair<std::string, std::string>>& aliases_;
  std::size_t pos_ = 0;
};

Dual eval_dual(const Node& n, std::span<const double> vars, std::size_t wrt) {
  using Op = Node::Op;
  switch (n.op) {
    case Op::Number:
      return {n.number, 0.0};
    case Op::Variable:
      return {vars[n.variable], n.variable == wrt ? 1.0 : 0.0};
    case Op::Neg: {
      auto a = eval_dual(*n.args[0], vars, wrt);
      return {-a.value, -a.slope};
    }
    case Op::Add: {
      auto a = eval_dual(*n.args[0], vars, wrt);
      auto b = eval_dual(*n.args[1], vars, wrt);
      return {a.value + b.value, a.slope + b.slope};
    }
    case Op::Sub: {
      auto a = eval_dual(*n.args[0], vars, wrt);
      auto b = eval_dual(*n.args[1], vars, wrt);
      return {a.value - b.value, a.slope - b.slope};
    }
    case Op::Mul: {
      auto a = eval_dual(*n.args[0], vars, wrt);
      auto b = eval_dual(*n.args[1], vars, wrt);
      return {a.value * b.value, a.slope * b.value + a.value * b.slope};
    }
    case Op::Div: {
      auto a = eval_dual(*n.args[0], vars, wrt);
      auto b = eval_dual(*n.args[1], vars, wrt);
      const double q = a.value / b.value;
      return {q, (a.slope - q * b.slope) / b.value};
    }
    case Op::Pow: {
      auto a = eval_dual(*n.args[0], vars, wrt);
      auto b = eval_dual(*n.args[1], vars, wrt);
      const double v = std::pow(a.value, b.value);
      if (is_constant(*n.args[1])) {
        // d(a^b) = b a^(b-1) a'; avoids log(a) at a = 0
        if (a.slope == 0.0) return {v, 0.0};
        return {v, b.value * std::pow(a.value, b.value - 1.0) * a.slope};
      }
      double d = 0.0;
      if (b.slope != 0.0) d += v * std::log(a.value) * b.slope;
      if (a.slope != 0.0) d += b.value * std::pow(a.value, b.value - 1.0) * a.slope;
      return {v, d};
    }
    case Op::Abs: {
      auto a = eval_dual(*n.args[0], vars, wrt);
      const double sign = a.value > 0.0 ? 1.0 : (a.value < 0.0 ? -1.0 : 0.0);
      return {std::abs(a.value), sign * a.slope};
    }
    case Op::Exp: {
      auto a = eval_dual(*n.args[0], vars, wrt);
      const double v = std::exp(a.value);
      return {v, v * a.slope};
    }
    case Op::Log: {
      auto a = eval_dual(*n.args[0], vars, wrt);
      return {std::log(a.value), a.slope / a.value};
    }
    case Op::Sqrt: {
      auto a = eval_dual(*n.args[0], vars, wrt);
      const double v = std::sqrt(a.value);
      return {v, a.slope == 0.0 ? 0.0 : 0.5 * a.slope / v};
    }
  }
  return {};
}

double eval_value(const Node& n, std::span<const double> vars) {
  using Op = Node::Op;
  switch (n.op) {
    case Op::Number: return n.number;
    case Op::Variable: return vars[n.variable];
    case Op::Neg: return -eval_value(*n.args[0], vars);
    case Op::Add: return eval_value(*n.args[0], vars) + eval_value(*n.args[1], vars);
    case Op::Sub: return eval_value(*n.args[0], vars) - eval_value(*n.args[1], vars);
    case Op::Mul: return eval_value(*n.args[0], vars) * eval_value(*n.args[1], vars);
    case Op::Div: return eval_value(*n.args[0], vars) / eval_value(*n.args[1], vars);
    case Op::Pow: return std::pow(eval_value(*n.args[0], vars), eval_value(*n.args[1], vars));
    case Op::Abs: return std::abs(eval_value(*n.args[0], vars));
    case Op::Exp: return std::exp(eval_value(*n.args[0], vars));
    case Op::Log: return std::log(eval_value(*n.args[0], vars));
    case Op::Sqrt: return std::sqrt(eval_value(*n.args[0], vars));
  }
  return 0.0;
}

}  // namespace

Expression Expression::parse(std::string_view text, std::vector<std::string> variables,
                             std::vector<std::pair<std::string, std::string>> aliases) {
  Expression e;
  e.text_ = std::string(text);
  e.variables_ = std::move(variables);
  Parser p(e.text_, e.variables_, aliases);
  e.root_ = p.parse();
  return e;
}

double Expression::evaluate(std::span<const double> vars) const {
  if (vars.size() < variables_.size()) throw std::invalid_argument("expression: too few variable values");
  return eval_value(*root_, vars);
}

Dual Expression::evaluate_with_derivative(std::span<const double> vars, std::size_t wrt) const {
  if (vars.size() < variables_.size()) throw std::invalid_argument("expression: too few variable values");
  return eval_dual(*root_, vars, wrt);
}

}  // namespace hcat
