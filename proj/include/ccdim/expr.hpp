#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "ccdim/errors.hpp"

namespace ccdim {

struct ExprNode;

/// A parsed single-variable expression: literals, x, + - * / ^ (literal
/// exponent), unary -, sqrt/exp/log. Immutable after parsing; evaluation
/// and differentiation are pure.
class MapExpr {
 public:
  MapExpr();  // the constant 0

  static MapExpr parse(std::string_view text);

  /// Exact symbolic derivative, constant-folded (0*e -> 0, e+0 -> e, 1*e -> e).
  MapExpr derivative() const;

  /// Double-precision evaluation; throws EvalDomainError on sqrt/log/div
  /// faults or non-finite intermediate values.
  double eval(double x) const;

  std::string str() const;

  /// Structural equality (same tree, bitwise-equal literals).
  bool same_tree(const MapExpr& other) const;

 private:
  explicit MapExpr(std::shared_ptr<const ExprNode> root);
  std::shared_ptr<const ExprNode> root_;
};

}  // namespace ccdim
