#include <cmath>

#include "evolve/expr/expr.hpp"

namespace evolve::expr {

namespace {

// Scalars live in entry (0,0), vectors in column 0; every other entry is
// zero so that matrix products act on vectors without special cases.
struct Value {
  Kind kind = Kind::scalar;
  Mat3 v = Mat3::Zero();
  Mat3 d = Mat3::Zero();

  static Value scalar(double value, double derivative) {
    Value out;
    out.v(0, 0) = value;
    out.d(0, 0) = derivative;
    return out;
  }
  Dual as_dual() const { return {v(0, 0), d(0, 0)}; }
};

Value from_constant(const ConstantValue& constant) {
  Value out;
  out.kind = kind_of(constant);
  if (const auto* s = std::get_if<double>(&constant)) {
    out.v(0, 0) = *s;
  } else if (const auto* vec = std::get_if<Vec3>(&constant)) {
    out.v.col(0) = *vec;
  } else {
    out.v = std::get<Mat3>(constant);
  }
  return out;
}

Value scale(const Value& matrix_like, const Dual& s) {
  Value out;
  out.kind = matrix_like.kind;
  out.v = s.value * matrix_like.v;
  out.d = s.derivative * matrix_like.v + s.value * matrix_like.d;
  return out;
}

Value product(const Value& a, const Value& b) {
  if (a.kind == Kind::scalar && b.kind == Kind::scalar) {
    const Dual r = a.as_dual() * b.as_dual();
    return Value::scalar(r.value, r.derivative);
  }
  if (a.kind == Kind::scalar) return scale(b, a.as_dual());
  if (b.kind == Kind::scalar) return scale(a, b.as_dual());
  Value out;
  out.kind = b.kind;  // matrix*matrix -> matrix, matrix*vector -> vector
  out.v = a.v * b.v;
  out.d = a.d * b.v + a.v * b.d;
  return out;
}

[[noreturn]] void domain_error(const Node& node, const std::string& message) {
  throw Error(ErrorCode::domain, std::to_string(node.span.line) + ":" + std::to_string(node.span.column) + ": " +
                                     message);
}

Mat3 checked_inverse(const Node& node, const Mat3& a) {
  if (!is_numerically_invertible(a)) {
    throw Error(ErrorCode::singular_matrix, std::to_string(node.span.line) + ":" +
                                                std::to_string(node.span.column) +
                                                ": inv of a numerically singular matrix");
  }
  return a.inverse();
}

Value matrix_inverse(const Node& node, const Value& a, bool with_derivative) {
  Value out;
  out.kind = Kind::matrix;
  out.v = checked_inverse(node, a.v);
  if (with_derivative) out.d = -out.v * a.d * out.v;
  return out;
}

Value identity_like(Kind kind) {
  Value out;
  out.kind = kind;
  if (kind == Kind::scalar) {
    out.v(0, 0) = 1.0;
  } else {
    out.v = Mat3::Identity();
  }
  return out;
}

class Evaluator {
 public:
  Evaluator(const Environment& env, bool with_derivative) : env_(env), with_derivative_(with_derivative) {}

  Value eval(const Node& node) const {
    switch (node.type) {
      case NodeType::number:
        return Value::scalar(node.number, 0.0);
      case NodeType::time:
        return Value::scalar(env_.t, env_.dt);
      case NodeType::frame: {
        Value out;
        out.kind = Kind::matrix;
        out.v = env_.F;
        out.d = env_.dF;
        return out;
      }
      case NodeType::constant:
        return lookup(node);
      case NodeType::negate: {
        Value out = eval(*node.children[0]);
        out.v = -out.v;
        out.d = -out.d;
        return out;
      }
      case NodeType::add:
      case NodeType::subtract: {
        Value a = eval(*node.children[0]);
        const Value b = eval(*node.children[1]);
        if (node.type == NodeType::add) {
          a.v += b.v;
          a.d += b.d;
        } else {
          a.v -= b.v;
          a.d -= b.d;
        }
        return a;
      }
      case NodeType::multiply:
        return product(eval(*node.children[0]), eval(*node.children[1]));
      case NodeType::divide: {
        const Value num = eval(*node.children[0]);
        const Dual den = eval(*node.children[1]).as_dual();
        if (den.value == 0.0) domain_error(node, "division by zero");
        const Dual inv = Dual(1.0) / den;
        return scale(num, inv);
      }
      case NodeType::power:
        return power(node);
      case NodeType::call:
        return call(node);
    }
    return {};
  }

 private:
  Value lookup(const Node& node) const {
    for (const auto& binding : env_.scalars) {
      if (binding.name == node.name) return Value::scalar(binding.value.value, binding.value.derivative);
    }
    if (env_.constants) {
      const auto it = env_.constants->find(node.name);
      if (it != env_.constants->end()) {
        if (kind_of(it->second) != node.kind) {
          throw Error(ErrorCode::dimension_mismatch,
                      "constant '" + node.name + "' bound with kind " + to_string(kind_of(it->second)) +
                          ", declared " + to_string(node.kind));
        }
        return from_constant(it->second);
      }
    }
    throw Error(ErrorCode::unknown_identifier, "no value bound for constant '" + node.name + "'");
  }

  Value power(const Node& node) const {
    Value base = eval(*node.children[0]);
    int n = node.exponent;
    if (n < 0) {
      if (base.kind == Kind::scalar) {
        const Dual b = base.as_dual();
        if (b.value == 0.0) domain_error(node, "negative power of zero");
        const Dual r = Dual(1.0) / b;
        base = Value::scalar(r.value, r.derivative);
      } else {
        base = matrix_inverse(node, base, with_derivative_);
      }
      n = -n;
    }
    Value result = identity_like(base.kind);
    while (n > 0) {
      if (n & 1) result = product(result, base);
      n >>= 1;
      if (n > 0) base = product(base, base);
    }
    return result;
  }

  Value call(const Node& node) const {
    const Value a = eval(*node.children[0]);
    switch (node.function) {
      case Function::det: {
        const double det = a.v.determinant();
        const double ddet = with_derivative_ ? (adjugate(a.v) * a.d).trace() : 0.0;
        return Value::scalar(det, ddet);
      }
      case Function::tr:
        return Value::scalar(a.v.trace(), a.d.trace());
      case Function::transpose: {
        Value out;
        out.kind = Kind::matrix;
        out.v = a.v.transpose();
        out.d = a.d.transpose();
        return out;
      }
      case Function::inv:
        return matrix_inverse(node, a, with_derivative_);
      case Function::dot: {
        const Value b = eval(*node.children[1]);
        const double value = a.v.col(0).dot(b.v.col(0));
        const double deriv = a.d.col(0).dot(b.v.col(0)) + a.v.col(0).dot(b.d.col(0));
        return Value::scalar(value, deriv);
      }
      case Function::exp:
        return from_dual(expr::exp(a.as_dual()));
      case Function::log:
        if (!(a.v(0, 0) > 0.0)) domain_error(node, "log of a non-positive value");
        return from_dual(expr::log(a.as_dual()));
      case Function::sin:
        return from_dual(expr::sin(a.as_dual()));
      case Function::cos:
        return from_dual(expr::cos(a.as_dual()));
      case Function::sqrt: {
        const Dual x = a.as_dual();
        if (x.value < 0.0) domain_error(node, "sqrt of a negative value");
        if (x.value == 0.0) {
          if (with_derivative_) domain_error(node, "sqrt is not differentiable at zero");
          return Value::scalar(0.0, 0.0);
        }
        return from_dual(expr::sqrt(x));
      }
    }
    return {};
  }

  static Value from_dual(const Dual& d) { return Value::scalar(d.value, d.derivative); }

  const Environment& env_;
  bool with_derivative_;
};

}  // namespace

Dual eval_scalar(const Node& root, const Environment& env, bool with_derivative) {
  if (root.kind != Kind::scalar) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string("expression is ") + to_string(root.kind) + "-valued, expected a scalar");
  }
  Environment local = env;
  if (!with_derivative) {
    local.dt = 0.0;
    local.dF.setZero();
  }
  const Value value = Evaluator(local, with_derivative).eval(root);
  return with_derivative ? value.as_dual() : Dual(value.v(0, 0), 0.0);
}

double eval(const Expression& expression, double t, const Mat3& F, const Constants& constants) {
  Environment env;
  env.t = t;
  env.F = F;
  env.constants = &constants;
  return eval_scalar(expression.root(), env, false).value;
}

Dual eval_dual(const Expression& expression, double t, const Mat3& F, double dt, const Mat3& dF,
               const Constants& constants) {
  Environment env;
  env.t = t;
  env.dt = dt;
  env.F = F;
  env.dF = dF;
  env.constants = &constants;
  return eval_scalar(expression.root(), env, true);
}

}  // namespace evolve::expr
