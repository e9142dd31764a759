#pragma once

// Word expressions:
//   expr   := ['+'|'-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := atom ('^' int)? ("'")?
//   atom   := ident | scalar | '(' expr ')'
// Scalars are decimal literals with an optional trailing 'i'. Identifiers
// t1..tk are the stable letters; everything else resolves to a binding.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hnn/engine.h"

namespace hnn {

struct Expr {
  enum class Kind { Identifier, Scalar, Sum, Product, Power, Adjoint };

  Kind kind = Kind::Scalar;
  std::size_t offset = 0;
  std::string name;     // Identifier
  Complex value = 0.0;  // Scalar
  int exponent = 1;     // Power
  std::vector<int> signs;  // Sum: +1 / -1 per child
  std::vector<std::shared_ptr<const Expr>> children;
};

using ExprPtr = std::shared_ptr<const Expr>;

// Throws ParseError with the byte offset of the first offending character.
ExprPtr parse_expression(std::string_view src);

// Products are concatenated without normalization, so "(t1 + t1')^4" yields
// 16 words. Negative powers need a unitary operand and use its adjoint.
// Unknown identifiers throw ParseError.
HnnElement evaluate(const Expr& e, const ScenarioPtr& s);
HnnElement evaluate(std::string_view src, const ScenarioPtr& s);

// Evaluation inside the base algebra; stable letters are rejected.
AlgebraElement evaluate_base(const Expr& e, const BackendPtr& backend,
                             const std::vector<std::pair<std::string, AlgebraElement>>& bindings);

// Backend default bindings followed by the given extra bindings (later names win).
std::vector<std::pair<std::string, AlgebraElement>> base_bindings(
    const BackendPtr& backend, const std::vector<std::pair<std::string, AlgebraElement>>& extra = {});

}  // namespace hnn
