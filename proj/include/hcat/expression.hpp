#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hcat {

// Raised for malformed expression text; position is a 0-based byte offset.
class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::invalid_argument(what + " at position " + std::to_string(position)),
        message_(what),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }
  /// The message without the position suffix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::size_t position_;
};

/// Value together with its derivative along one chosen variable.
struct Dual {
  double value = 0.0;
  double slope = 0.0;
};

/// Parsed arithmetic expression over named real variables.
///
/// Grammar: numbers, variables, `+ - * / ^`, parentheses and the functions
/// `abs exp log sqrt pow`. Precedence from tightest: `^` (right
/// associative), unary minus, `* /`, `+ -`. Whitespace is ignored.
/// Immutable after parsing; safe to share across threads.
class Expression {
 public:
  /// Parses `text`; every identifier must appear in `variables` (or be one of
  /// the aliases given in `aliases` as {alias, target} pairs).
  static Expression parse(std::string_view text,
                          std::vector<std::string> variables = {"y"},
                          std::vector<std::pair<std::string, std::string>> aliases = {});

  double evaluate(std::span<const double> vars) const;
  double evaluate(double y) const { return evaluate(std::span<const double>(&y, 1)); }

  /// Forward-mode derivative with respect to variable `wrt`.
  Dual evaluate_with_derivative(std::span<const double> vars, std::size_t wrt) const;
  Dual evaluate_with_derivative(double y) const {
    return evaluate_with_derivative(std::span<const double>(&y, 1), 0);
  }

  const std::string& text() const noexcept { return text_; }
  const std::vector<std::string>& variables() const noexcept { return variables_; }

  struct Node;

 private:
  std::string text_;
  std::vector<std::string> variables_;
  std::shared_ptr<const Node> root_;
};

}  // namespace hcat
