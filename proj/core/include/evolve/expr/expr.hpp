#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evolve/error.hpp"
#include "evolve/expr/dual.hpp"
#include "evolve/linalg.hpp"

namespace evolve::expr {

/// Static kind of an expression value. Vectors have three entries and
/// matrices are 3x3.
enum class Kind { scalar, vector, matrix };

const char* to_string(Kind kind) noexcept;

enum class NodeType {
  number,
  time,      // `t`
  frame,     // `F`
  constant,  // declared named constant (or a bound scalar)
  negate,
  add,
  subtract,
  multiply,
  divide,
  power,
  call,
};

enum class Function { det, tr, transpose, inv, dot, exp, log, sin, cos, sqrt };

const char* to_string(Function fn) noexcept;

struct Node;
using NodePtr = std::shared_ptr<const Node>;

/// Immutable typed syntax-tree node. `span` locates the operator token for
/// unary/binary nodes and the identifier for variables and calls.
struct Node {
  NodeType type = NodeType::number;
  Kind kind = Kind::scalar;
  double number = 0.0;
  int exponent = 0;
  Function function = Function::det;
  std::string name;
  std::vector<NodePtr> children;
  SourceSpan span;
};

/// Structural equality ignoring source spans.
bool structurally_equal(const Node& a, const Node& b);

/// Kinds of the identifiers an expression may reference besides `t` and `F`.
using Declarations = std::map<std::string, Kind, std::less<>>;

using ConstantValue = std::variant<double, Vec3, Mat3>;
using Constants = std::map<std::string, ConstantValue, std::less<>>;

Kind kind_of(const ConstantValue& value);

/// Declarations matching the kinds of `constants`.
Declarations declarations_for(const Constants& constants);

/// True for `t`, `F` and builtin function names.
bool is_reserved_identifier(std::string_view name);

/// A parsed, well-typed expression.
class Expression {
 public:
  Expression() = default;
  Expression(NodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

  const Node& root() const { return *root_; }
  const NodePtr& root_ptr() const { return root_; }
  Kind kind() const { return root_->kind; }
  const std::string& source() const { return source_; }

  bool uses_frame() const;

 private:
  NodePtr root_;
  std::string source_;
};

/// Parses `source`; throws ExprError on syntax, unknown identifier or
/// dimension mismatch.
Expression parse(std::string_view source, const Declarations& declarations = {});

/// Canonical text form with minimal parentheses; parse(pretty_print(e)) is
/// structurally equal to e.
std::string pretty_print(const Expression& expression);
std::string pretty_print(const Node& node);

/// Scalar bound at evaluation time together with its tangent.
struct DualBinding {
  std::string_view name;
  Dual value;
};

/// Point and direction of evaluation. `scalars` supplies named scalar
/// bindings that shadow nothing in `constants`.
struct Environment {
  double t = 0.0;
  double dt = 0.0;
  Mat3 F = Mat3::Identity();
  Mat3 dF = Mat3::Zero();
  const Constants* constants = nullptr;
  std::span<const DualBinding> scalars = {};
};

/// Value of a scalar expression.
double eval(const Expression& expression, double t, const Mat3& F, const Constants& constants = {});

/// Value and directional derivative d/de|0 of eval at (t + e dt, F + e dF).
/// Throws Error(singular_matrix) or Error(domain).
Dual eval_dual(const Expression& expression, double t, const Mat3& F, double dt, const Mat3& dF,
               const Constants& constants = {});

/// Scalar evaluation in a fully specified environment; `with_derivative`
/// false skips tangent propagation and its differentiability checks.
Dual eval_scalar(const Node& root, const Environment& env, bool with_derivative = true);

}  // namespace evolve::expr
