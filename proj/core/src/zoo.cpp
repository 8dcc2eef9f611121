#include <cmath>

#include "evolve/error.hpp"
#include "evolve/model.hpp"

namespace evolve {

namespace {

bool references(const expr::Node& node, expr::NodeType type) {
  if (node.type == type) return true;
  for (const auto& child : node.children) {
    if (references(*child, type)) return true;
  }
  return false;
}

Dual stiffness(const StiffnessProfile& profile, double t, double dt, bool with_derivative) {
  if (const auto* onset = std::get_if<CubicOnset>(&profile)) {
    const double s = t - onset->t_on;
    if (s <= 0.0) return {1.0, 0.0};
    return {1.0 + onset->rate * s * s * s, 3.0 * onset->rate * s * s * dt};
  }
  expr::Environment env;
  env.t = t;
  env.dt = dt;
  return expr::eval_scalar(std::get<expr::Expression>(profile).root(), env, with_derivative);
}

class LiquidCrystalResponse final : public ScalarResponse {
 public:
  LiquidCrystalResponse(std::shared_ptr<const FixedParticleContext> data, int component)
      : data_(std::move(data)), component_(component) {}

  Dual evaluate(double t, const Mat3& F, double dt, const Mat3& dF) const override {
    return compute(t, F, dt, dF, true);
  }

  double value(double t, const Mat3& F) const override { return compute(t, F, 0.0, Mat3::Zero(), false).value; }

  std::string describe() const override {
    const auto& ctx = *data_;
    if (ctx.what.empty()) return component_ == 0 ? "mu(t) * r" : "mu(t) * J";
    return "mu(t) * (" + expr::pretty_print(ctx.what[component_]) + ")";
  }

 private:
  Dual compute(double t, const Mat3& F, double dt, const Mat3& dF, bool with_derivative) const {
    const auto& ctx = *data_;
    const Vec3 fe = F * ctx.e;
    const Vec3 gfe = ctx.g * fe;
    const Dual r{fe.dot(gfe) + ctx.c, 2.0 * gfe.dot(dF * ctx.e)};
    const Dual J{F.determinant(), (adjugate(F) * dF).trace()};
    const Dual mu = stiffness(ctx.mu, t, dt, with_derivative);
    Dual what;
    if (ctx.what.empty()) {
      what = component_ == 0 ? r : J;
    } else {
      const expr::DualBinding bindings[] = {{"r", r}, {"J", J}};
      expr::Environment env;
      env.scalars = bindings;
      what = expr::eval_scalar(ctx.what[component_].root(), env, with_derivative);
    }
    return mu * what;
  }

  std::shared_ptr<const FixedParticleContext> data_;
  int component_;
};

}  // namespace

expr::Expression parse_stiffness(std::string_view source) {
  expr::Expression e = expr::parse(source);
  if (e.kind() != expr::Kind::scalar || references(e.root(), expr::NodeType::frame)) {
    throw Error(ErrorCode::schema, "stiffness profile '" + std::string(source) + "' must be a scalar function of t");
  }
  return e;
}

expr::Expression parse_immersion(std::string_view source) {
  const expr::Declarations decls{{"r", expr::Kind::scalar}, {"J", expr::Kind::scalar}};
  expr::Expression e = expr::parse(source, decls);
  if (e.kind() != expr::Kind::scalar || references(e.root(), expr::NodeType::frame) ||
      references(e.root(), expr::NodeType::time)) {
    throw Error(ErrorCode::schema, "immersion component '" + std::string(source) + "' must be a scalar in r and J");
  }
  return e;
}

namespace zoo {

ConstitutiveModel liquid_crystal(const FixedParticleContext& context, std::string label) {
  if (!(context.e.norm() > 0.0)) throw Error(ErrorCode::schema, "liquid crystal: e must be nonzero");
  if (!(context.c >= 0.0)) throw Error(ErrorCode::schema, "liquid crystal: c must be nonnegative");
  const double gnorm = context.g.norm();
  if (!((context.g - context.g.transpose()).norm() <= 1e-12 * gnorm)) {
    throw Error(ErrorCode::schema, "liquid crystal: g must be symmetric");
  }
  const Eigen::LLT<Mat3> llt(context.g);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::schema, "liquid crystal: g must be positive definite");
  if (const auto* onset = std::get_if<CubicOnset>(&context.mu); onset && !std::isfinite(onset->rate)) {
    throw Error(ErrorCode::schema, "liquid crystal: onset rate must be finite");
  }

  auto data = std::make_shared<const FixedParticleContext>(context);
  const int m = context.what.empty() ? 2 : static_cast<int>(context.what.size());
  std::vector<ResponsePtr> components;
  for (int k = 0; k < m; ++k) components.push_back(std::make_shared<LiquidCrystalResponse>(data, k));
  return ConstitutiveModel(std::move(label), std::move(components));
}

ConstitutiveModel det_only() { return make_expression_model("det_only", {"det(F)"}); }

ConstitutiveModel isotropic() { return make_expression_model("isotropic", {"tr(transpose(F)*F)", "det(F)"}); }

ConstitutiveModel exp_decay() { return make_expression_model("exp_decay", {"exp(-t)*det(F)"}); }

}  // namespace zoo

}  // namespace evolve
