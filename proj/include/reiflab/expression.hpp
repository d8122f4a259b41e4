#pragma once

#include <memory>
#include <string>

#include "reiflab/grid_domain.hpp"

namespace reiflab {

/// A compiled scalar expression over the coordinates of a point.
///
/// Variables: x, y, z, r = |x|, theta = polar angle of (x, y) in [0, 2 pi).
/// Constant: pi. Functions: sin, cos, exp, abs, pow(a, b). Operators:
/// + - * / ^ (right associative), unary minus, parentheses. Numbers use the
/// usual decimal/exponent syntax.
class Expression {
 public:
  /// Throws InvalidInput with the offending position on a syntax error.
  static Expression parse(const std::string& text);

  double operator()(const Point& p) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace reiflab
