#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace tkernel {

/// Real arithmetic expression in the variable x.
///
/// Grammar (standard precedence, '^' right-associative and binding tighter
/// than unary minus, so -x^2 == -(x^2)):
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'x' | 'pi' | name '(' expr ')' | '(' expr ')'
///
/// Functions: sin cos tan exp log sqrt abs sinh cosh tanh.
class Expression {
 public:
  static Expression parse(std::string_view text);

  /// Throws ParseError (position 0) if the value is not finite.
  double operator()(double x) const;

  const std::string& text() const noexcept { return text_; }

  struct Node;

 private:
  Expression(std::string text, std::shared_ptr<const Node> root);

  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace tkernel
