#include <gtest/gtest.h>

#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "evolve/error.hpp"
#include "evolve/expr/expr.hpp"
#include "support/oracle.hpp"

using evolve::ErrorCode;
using evolve::ExprError;
using evolve::Mat3;
using evolve::Vec3;
namespace expr = evolve::expr;

namespace {

Mat3 diag(double a, double b, double c) { return Vec3(a, b, c).asDiagonal(); }

ErrorCode parse_error_code(const std::string& source, const expr::Declarations& decls = {}) {
  try {
    expr::parse(source, decls);
  } catch (const ExprError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << source;
  return ErrorCode::io;
}

// Random well-typed scalar sources over t, F and the constants v (vector),
// M (matrix) and k (scalar).
class SourceGenerator {
 public:
  explicit SourceGenerator(std::uint32_t seed) : rng_(seed) {}

  std::string scalar(int depth) {
    if (depth <= 0) return scalar_leaf();
    switch (rng_.integer(0, 11)) {
      case 0: return "(" + scalar(depth - 1) + " + " + scalar(depth - 1) + ")";
      case 1: return "(" + scalar(depth - 1) + " - " + scalar(depth - 1) + ")";
      case 2: return scalar(depth - 1) + " * " + scalar(depth - 1);
      case 3: return scalar(depth - 1) + " / (2 + (" + scalar(depth - 1) + ")^2)";
      case 4: return "(" + scalar(depth - 1) + ")^" + std::to_string(rng_.integer(2, 3));
      case 5: return "sin(" + scalar(depth - 1) + ")";
      case 6: return "cos(" + scalar(depth - 1) + ")";
      case 7: return "exp(sin(" + scalar(depth - 1) + "))";
      case 8: return "sqrt(1 + (" + scalar(depth - 1) + ")^2)";
      case 9: return "log(1 + (" + scalar(depth - 1) + ")^2)";
      case 10: return "-" + scalar_leaf();
      default: return matrix_function(depth - 1);
    }
  }

  std::string matrix(int depth) {
    if (depth <= 0) {
      static const char* leaves[] = {"F", "M", "transpose(F)", "inv(F)"};
      return leaves[rng_.integer(0, 3)];
    }
    switch (rng_.integer(0, 4)) {
      case 0: return matrix(depth - 1) + " * " + matrix(depth - 1);
      case 1: return "(" + matrix(depth - 1) + " + " + matrix(depth - 1) + ")";
      case 2: return scalar(depth - 1) + " * " + matrix(depth - 1);
      case 3: return "transpose(" + matrix(depth - 1) + ")";
      default: return "(" + matrix(depth - 1) + " - F)";
    }
  }

 private:
  std::string scalar_leaf() {
    static const char* leaves[] = {"t", "k", "2.5", "det(F)", "tr(F)", "dot(v, F * v)", "tr(transpose(F) * F)"};
    return leaves[rng_.integer(0, 6)];
  }

  std::string matrix_function(int depth) {
    switch (rng_.integer(0, 2)) {
      case 0: return "tr(" + matrix(depth) + ")";
      case 1: return "det(" + matrix(depth) + ") / 10";
      default: return "dot(v, " + matrix(depth) + " * v)";
    }
  }

  evolve::testing::Rng rng_;
};

expr::Constants corpus_constants() {
  Mat3 M;
  M << 0.5, 0.1, 0.0, -0.2, 0.3, 0.1, 0.0, 0.4, -0.1;
  return {{"k", 0.7}, {"v", Vec3(0.3, -0.2, 0.9)}, {"M", M}};
}

std::vector<std::string> corpus(int count, std::uint32_t seed) {
  SourceGenerator gen(seed);
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) out.push_back(gen.scalar(1 + i % 3));
  return out;
}

}  // namespace

TEST(ExprParse, SingleCallTree) {
  const auto e = expr::parse("det(F)");
  EXPECT_EQ(e.kind(), expr::Kind::scalar);
  ASSERT_EQ(e.root().type, expr::NodeType::call);
  EXPECT_EQ(e.root().function, expr::Function::det);
  ASSERT_EQ(e.root().children.size(), 1u);
  EXPECT_EQ(e.root().children[0]->type, expr::NodeType::frame);
}

TEST(ExprParse, TypesThroughDeclaredConstants) {
  const expr::Declarations decls{{"mu", expr::Kind::scalar}, {"G", expr::Kind::matrix}, {"c", expr::Kind::scalar}};
  const auto e = expr::parse("mu * (tr(transpose(F)*G*F) + c)", decls);
  EXPECT_EQ(e.kind(), expr::Kind::scalar);
}

TEST(ExprParse, MatrixPlusScalarReportsOperatorSpan) {
  try {
    expr::parse("F + t");
    FAIL();
  } catch (const ExprError& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
    EXPECT_EQ(e.span().offset, 2u);
    EXPECT_EQ(e.span().length, 1u);
    EXPECT_EQ(e.span().line, 1);
    EXPECT_EQ(e.span().column, 3);
  }
}

TEST(ExprParse, LineAndColumnOnLaterLines) {
  try {
    expr::parse("det(F)\n  + foo");
    FAIL();
  } catch (const ExprError& e) {
    EXPECT_EQ(e.code(), ErrorCode::unknown_identifier);
    EXPECT_EQ(e.span().line, 2);
    EXPECT_EQ(e.span().column, 5);
  }
}

TEST(ExprParse, ErrorKinds) {
  EXPECT_EQ(parse_error_code("det(F"), ErrorCode::syntax);
  EXPECT_EQ(parse_error_code("1 +"), ErrorCode::syntax);
  EXPECT_EQ(parse_error_code(""), ErrorCode::syntax);
  EXPECT_EQ(parse_error_code("t ^ 1.5"), ErrorCode::syntax);
  EXPECT_EQ(parse_error_code("t ^ 65"), ErrorCode::syntax);
  EXPECT_EQ(parse_error_code("det(F, F)"), ErrorCode::syntax);
  EXPECT_EQ(parse_error_code("t $ 2"), ErrorCode::syntax);
  EXPECT_EQ(parse_error_code("x + 1"), ErrorCode::unknown_identifier);
  EXPECT_EQ(parse_error_code("foo(t)"), ErrorCode::unknown_identifier);
  EXPECT_EQ(parse_error_code("det(t)"), ErrorCode::dimension_mismatch);
  EXPECT_EQ(parse_error_code("exp(F)"), ErrorCode::dimension_mismatch);
  EXPECT_EQ(parse_error_code("t / F"), ErrorCode::dimension_mismatch);
  EXPECT_EQ(parse_error_code("v * F", {{"v", expr::Kind::vector}}), ErrorCode::dimension_mismatch);
  EXPECT_EQ(parse_error_code("v ^ 2", {{"v", expr::Kind::vector}}), ErrorCode::dimension_mismatch);
  EXPECT_EQ(parse_error_code("dot(F, F)"), ErrorCode::dimension_mismatch);
}

TEST(ExprParse, KindsOfProducts) {
  const expr::Declarations decls{{"v", expr::Kind::vector}};
  EXPECT_EQ(expr::parse("F * F", decls).kind(), expr::Kind::matrix);
  EXPECT_EQ(expr::parse("F * v", decls).kind(), expr::Kind::vector);
  EXPECT_EQ(expr::parse("t * v", decls).kind(), expr::Kind::vector);
  EXPECT_EQ(expr::parse("F ^ 2", decls).kind(), expr::Kind::matrix);
  EXPECT_EQ(expr::parse("dot(v, v)", decls).kind(), expr::Kind::scalar);
}

TEST(ExprEval, KnownValues) {
  EXPECT_EQ(expr::eval(expr::parse("det(F)"), 0.0, Mat3::Identity()), 1.0);
  EXPECT_EQ(expr::eval(expr::parse("(1+t)*det(F)"), 1.0, diag(2, 1, 1)), 4.0);
  const expr::Constants c{{"e", Vec3(0, 0, 1)}, {"G", Mat3(Mat3::Identity())}, {"c", 0.25}};
  const auto r = expr::parse("dot(F*e, G*(F*e)) + c", expr::declarations_for(c));
  EXPECT_DOUBLE_EQ(expr::eval(r, 0.0, Mat3::Identity(), c), 1.25);
}

TEST(ExprEval, Operators) {
  const Mat3 F = diag(2, 3, 4);
  EXPECT_DOUBLE_EQ(expr::eval(expr::parse("tr(F)"), 0, F), 9.0);
  EXPECT_DOUBLE_EQ(expr::eval(expr::parse("tr(transpose(F) * F)"), 0, F), 29.0);
  EXPECT_DOUBLE_EQ(expr::eval(expr::parse("det(inv(F))"), 0, F), 1.0 / 24.0);
  EXPECT_DOUBLE_EQ(expr::eval(expr::parse("tr(F^-1)"), 0, F), 0.5 + 1.0 / 3.0 + 0.25);
  EXPECT_DOUBLE_EQ(expr::eval(expr::parse("tr(F^3)"), 0, F), 8.0 + 27.0 + 64.0);
  EXPECT_DOUBLE_EQ(expr::eval(expr::parse("2 - 3 - 4"), 0, F), -5.0);
  EXPECT_DOUBLE_EQ(expr::eval(expr::parse("12 / 3 / 2"), 0, F), 2.0);
  EXPECT_DOUBLE_EQ(expr::eval(expr::parse("-2^2"), 0, F), 4.0);
  EXPECT_DOUBLE_EQ(expr::eval(expr::parse("2^-1"), 0, F), 0.5);
  EXPECT_DOUBLE_EQ(expr::eval(expr::parse("sqrt(t) + log(t) + exp(0) + sin(0) + cos(0)"), 4.0, F),
                   2.0 + std::log(4.0) + 2.0);
  EXPECT_DOUBLE_EQ(expr::eval(expr::parse("1.5e2 + 2E-1"), 0, F), 150.2);
}

TEST(ExprEval, DomainAndSingularErrors) {
  const auto code_at = [](const std::string& src, double t, const Mat3& F) {
    try {
      expr::eval(expr::parse(src), t, F);
    } catch (const evolve::Error& e) {
      return e.code();
    }
    return ErrorCode::io;
  };
  EXPECT_EQ(code_at("log(t)", 0.0, Mat3::Identity()), ErrorCode::domain);
  EXPECT_EQ(code_at("log(t)", -1.0, Mat3::Identity()), ErrorCode::domain);
  EXPECT_EQ(code_at("sqrt(t)", -1.0, Mat3::Identity()), ErrorCode::domain);
  EXPECT_EQ(code_at("1 / t", 0.0, Mat3::Identity()), ErrorCode::domain);
  EXPECT_EQ(code_at("tr(inv(F))", 0.0, diag(1, 1, 0)), ErrorCode::singular_matrix);
  EXPECT_EQ(code_at("tr(F^-2)", 0.0, diag(1, 0, 1)), ErrorCode::singular_matrix);
}

TEST(ExprDual, WorkedExamples) {
  evolve::testing::Rng rng(3);
  const Mat3 E = rng.matrix();
  const auto d = expr::eval_dual(expr::parse("det(F)"), 0.0, Mat3::Identity(), 0.0, E);
  EXPECT_DOUBLE_EQ(d.value, 1.0);
  EXPECT_NEAR(d.derivative, E.trace(), 1e-15);

  const auto p = expr::eval_dual(expr::parse("t*t"), 3.0, Mat3::Identity(), 1.0, Mat3::Zero());
  EXPECT_EQ(p.value, 9.0);
  EXPECT_EQ(p.derivative, 6.0);
}

TEST(ExprDual, LeibnizRuleIsExact) {
  evolve::testing::Rng rng(11);
  for (int k = 0; k < 50; ++k) {
    const evolve::expr::Dual x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const evolve::expr::Dual y{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const auto xy = x * y;
    EXPECT_EQ(xy.value, x.value * y.value);
    EXPECT_EQ(xy.derivative, x.value * y.derivative + y.value * x.derivative);
  }
}

TEST(ExprDual, InverseUsesClosedForm) {
  const Mat3 F = diag(2, 4, 5);
  const Mat3 E = evolve::elementary(0, 0);
  // d tr(F^-1) along E_00 = -1/F_00^2
  const auto d = expr::eval_dual(expr::parse("tr(inv(F))"), 0.0, F, 0.0, E);
  EXPECT_DOUBLE_EQ(d.derivative, -0.25);
}

TEST(ExprDual, SqrtAtZeroIsNotDifferentiable) {
  EXPECT_THROW(expr::eval_dual(expr::parse("sqrt(t)"), 0.0, Mat3::Identity(), 1.0, Mat3::Zero()), evolve::Error);
  EXPECT_DOUBLE_EQ(expr::eval(expr::parse("sqrt(t)"), 0.0, Mat3::Identity()), 0.0);
}

TEST(ExprProperty, DualMatchesCentralDifferences) {
  const expr::Constants constants = corpus_constants();
  const expr::Declarations decls = expr::declarations_for(constants);
  evolve::testing::Rng rng(2024);
  int checked = 0;
  for (const std::string& src : corpus(40, 7)) {
    const auto e = expr::parse(src, decls);
    for (int k = 0; k < 100; ++k) {
      const double t = rng.uniform(-1, 1);
      const Mat3 F = rng.invertible(10.0);
      const double dt = rng.uniform(-1, 1);
      const Mat3 dF = rng.matrix();
      const double h = 1e-6;
      const double fd = (expr::eval(e, t + h * dt, F + h * dF, constants) -
                         expr::eval(e, t - h * dt, F - h * dF, constants)) /
                        (2 * h);
      const auto d = expr::eval_dual(e, t, F, dt, dF, constants);
      ASSERT_NEAR(d.derivative, fd, 1e-6 * (1 + std::abs(d.derivative))) << src;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 4000);
}

TEST(ExprProperty, DirectionalDerivativeIsLinear) {
  const expr::Constants constants = corpus_constants();
  const expr::Declarations decls = expr::declarations_for(constants);
  evolve::testing::Rng rng(99);
  for (const std::string& src : corpus(30, 8)) {
    const auto e = expr::parse(src, decls);
    const double t = rng.uniform(-1, 1);
    const Mat3 F = rng.invertible(10.0);
    const double dt1 = rng.uniform(-1, 1), dt2 = rng.uniform(-1, 1);
    const Mat3 dF1 = rng.matrix(), dF2 = rng.matrix();
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
    const double d1 = expr::eval_dual(e, t, F, dt1, dF1, constants).derivative;
    const double d2 = expr::eval_dual(e, t, F, dt2, dF2, constants).derivative;
    const double combined = expr::eval_dual(e, t, F, a * dt1 + b * dt2, a * dF1 + b * dF2, constants).derivative;
    const double scale = std::abs(a * d1) + std::abs(b * d2) + 1e-300;
    EXPECT_LE(std::abs(combined - (a * d1 + b * d2)), 1e-12 * std::max(scale, 1.0)) << src;
  }
}

TEST(ExprProperty, PrintParseRoundTrip) {
  const expr::Declarations decls = expr::declarations_for(corpus_constants());
  std::vector<std::string> sources = corpus(200, 5);
  sources.insert(sources.end(), {"-2^2", "-(2^2)", "2 - (3 - 4)", "2 / (3 * 4)", "(1 + t) * det(F)", "t^-3",
                                 "-t * -t", "transpose(F * M)^2 * v", "1e-300 * t", "0.1 + 0.2"});
  for (const std::string& src : sources) {
    const auto e = expr::parse(src, decls);
    const std::string printed = expr::pretty_print(e);
    const auto again = expr::parse(printed, decls);
    EXPECT_TRUE(expr::structurally_equal(e.root(), again.root())) << src << " -> " << printed;
    EXPECT_EQ(expr::pretty_print(again), printed) << src;
  }
}

TEST(ExprProperty, EvaluationIsReentrant) {
  const auto e = expr::parse("det(F) * sin(t) + tr(inv(F))");
  const Mat3 F = diag(1, 2, 3);
  const double first = expr::eval(e, 0.3, F);
  std::vector<double> results(8);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < results.size(); ++i) {
    threads.emplace_back([&, i] {
      for (int k = 0; k < 1000; ++k) results[i] = expr::eval(e, 0.3, F);
    });
  }
  for (auto& th : threads) th.join();
  for (double r : results) EXPECT_EQ(r, first);
}
