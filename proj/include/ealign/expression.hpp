// Minimal arithmetic expression parser for custom scenario fields u0/rho0.
// Grammar: + - * / ^ (right-assoc), unary -, parentheses, function calls,
// variables a1 (alias x) and a2 (alias y), constants pi and e.
#pragma once

#include "ealign/common.hpp"

#include <functional>
#include <memory>
#include <string>

namespace ealign {

class Expression {
 public:
  explicit Expression(const std::string& source);
  double operator()(double a1, double a2 = 0.0) const;
  const std::string& source() const { return src_; }

  struct Node;  // exposed for the parser implementation

 private:
  std::shared_ptr<const Node> root_;
  std::string src_;
};

}  // namespace ealign
