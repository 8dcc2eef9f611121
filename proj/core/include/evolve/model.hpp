#pragma once

#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "evolve/expr/expr.hpp"
#include "evolve/linalg.hpp"

namespace evolve {

using expr::Dual;

/// One scalar component W_c(t, F) of a constitutive response, evaluated
/// with its exact directional derivative along (dt, dF).
class ScalarResponse {
 public:
  virtual ~ScalarResponse() = default;
  virtual Dual evaluate(double t, const Mat3& F, double dt, const Mat3& dF) const = 0;
  /// Value only; skips differentiability checks that evaluate() enforces.
  virtual double value(double t, const Mat3& F) const { return evaluate(t, F, 0.0, Mat3::Zero()).value; }
  virtual std::string describe() const = 0;
};

using ResponsePtr = std::shared_ptr<const ScalarResponse>;

/// Component backed by a parsed DSL expression.
class ExpressionResponse final : public ScalarResponse {
 public:
  ExpressionResponse(expr::Expression expression, std::shared_ptr<const expr::Constants> constants);

  Dual evaluate(double t, const Mat3& F, double dt, const Mat3& dF) const override;
  double value(double t, const Mat3& F) const override;
  std::string describe() const override;

  const expr::Expression& expression() const { return expression_; }

 private:
  expr::Expression expression_;
  std::shared_ptr<const expr::Constants> constants_;
};

struct TimeDomain {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double t) const { return t >= lo && t <= hi; }
};

/// Fixed-particle mechanical response W : (t, F) -> R^m. Immutable; all
/// members are safe to call concurrently.
class ConstitutiveModel {
 public:
  ConstitutiveModel(std::string label, std::vector<ResponsePtr> components, TimeDomain domain = {});

  const std::string& label() const { return label_; }
  int output_dimension() const { return static_cast<int>(components_.size()); }
  const std::vector<ResponsePtr>& components() const { return components_; }
  const TimeDomain& time_domain() const { return domain_; }

  /// W(t, F). Throws Error(singular_matrix) when F is not invertible.
  Eigen::VectorXd evaluate(double t, const Mat3& F) const;

  /// dW/dt at (t, F).
  Eigen::VectorXd d_dt(double t, const Mat3& F) const;

  /// Directional derivative of W in F along E.
  Eigen::VectorXd d_dF(double t, const Mat3& F, const Mat3& E) const;

  /// Value and derivative along the combined direction (dt, dF).
  std::pair<Eigen::VectorXd, Eigen::VectorXd> directional(double t, const Mat3& F, double dt, const Mat3& dF) const;

 private:
  std::string label_;
  std::vector<ResponsePtr> components_;
  TimeDomain domain_;
};

/// Model W1 with W1(t, F) = W(t, F C).
ConstitutiveModel change_reference(const ConstitutiveModel& model, const Mat3& C);

/// Model built from DSL component sources; every component must type as a
/// scalar. Throws ExprError or Error(schema).
ConstitutiveModel make_expression_model(std::string label, const std::vector<std::string>& sources,
                                        const expr::Constants& constants = {}, TimeDomain domain = {});

/// Stiffness profile mu(t): either a DSL expression in `t`, or the cubic
/// onset 1 + rate * max(t - t_on, 0)^3 (C2, constant before t_on).
struct CubicOnset {
  double t_on = 0.0;
  double rate = 1.0;
};
using StiffnessProfile = std::variant<expr::Expression, CubicOnset>;

/// Constants of the laminated liquid-crystal response at one particle X:
/// W = mu(t) * What(r, J) with r = g(F e, F e) + c and J = det F.
struct FixedParticleContext {
  Vec3 e = Vec3(0.0, 0.0, 1.0);
  Mat3 g = Mat3::Identity();
  double c = 0.25;  // ||X||^2
  StiffnessProfile mu = expr::parse("1");
  /// Components of What as expressions in the scalars `r` and `J`. Empty
  /// means the identity pair (r, J).
  std::vector<expr::Expression> what;
};

/// Parses a stiffness profile expression that may only reference `t`.
expr::Expression parse_stiffness(std::string_view source);

/// Parses an immersion component in `r` and `J`.
expr::Expression parse_immersion(std::string_view source);

namespace zoo {

/// Laminated liquid crystal. Validates g symmetric positive definite,
/// e nonzero, c >= 0.
ConstitutiveModel liquid_crystal(const FixedParticleContext& context, std::string label = "liquid_crystal");

/// W = det F.
ConstitutiveModel det_only();

/// W = (tr(F^T F), det F).
ConstitutiveModel isotropic();

/// W = exp(-t) det F.
ConstitutiveModel exp_decay();

}  // namespace zoo

/// Loads a model file (JSON). Throws Error(io), Error(schema) or ExprError.
ConstitutiveModel load_model(const std::filesystem::path& path);

/// Builds a model from model-file JSON text.
ConstitutiveModel parse_model(std::string_view json_text, const std::string& fallback_label = "model");

}  // namespace evolve
