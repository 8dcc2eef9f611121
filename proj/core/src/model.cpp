#include "evolve/model.hpp"

#include <sstream>

#include "evolve/error.hpp"

namespace evolve {

namespace {

void require_invertible(const Mat3& F, const char* what) {
  if (!is_numerically_invertible(F)) {
    throw Error(ErrorCode::singular_matrix, std::string(what) + " is numerically singular");
  }
}

class ReferencedResponse final : public ScalarResponse {
 public:
  ReferencedResponse(ResponsePtr inner, const Mat3& C) : inner_(std::move(inner)), C_(C) {}

  Dual evaluate(double t, const Mat3& F, double dt, const Mat3& dF) const override {
    return inner_->evaluate(t, F * C_, dt, dF * C_);
  }
  double value(double t, const Mat3& F) const override { return inner_->value(t, F * C_); }
  std::string describe() const override { return inner_->describe() + " [F -> F*C]"; }

 private:
  ResponsePtr inner_;
  Mat3 C_;
};

}  // namespace

ExpressionResponse::ExpressionResponse(expr::Expression expression, std::shared_ptr<const expr::Constants> constants)
    : expression_(std::move(expression)), constants_(std::move(constants)) {
  if (expression_.kind() != expr::Kind::scalar) {
    throw Error(ErrorCode::schema, "component '" + expression_.source() + "' is " + expr::to_string(expression_.kind()) +
                                       "-valued; components must be scalar");
  }
}

Dual ExpressionResponse::evaluate(double t, const Mat3& F, double dt, const Mat3& dF) const {
  return expr::eval_dual(expression_, t, F, dt, dF, *constants_);
}

double ExpressionResponse::value(double t, const Mat3& F) const {
  return expr::eval(expression_, t, F, *constants_);
}

std::string ExpressionResponse::describe() const { return expr::pretty_print(expression_); }

ConstitutiveModel::ConstitutiveModel(std::string label, std::vector<ResponsePtr> components, TimeDomain domain)
    : label_(std::move(label)), components_(std::move(components)), domain_(domain) {
  if (components_.empty()) throw Error(ErrorCode::schema, "a model needs at least one component");
  if (!(domain_.lo <= domain_.hi)) throw Error(ErrorCode::schema, "time domain is empty");
}

Eigen::VectorXd ConstitutiveModel::evaluate(double t, const Mat3& F) const {
  require_invertible(F, "frame");
  Eigen::VectorXd out(output_dimension());
  for (int c = 0; c < output_dimension(); ++c) out(c) = components_[c]->value(t, F);
  return out;
}

Eigen::VectorXd ConstitutiveModel::d_dt(double t, const Mat3& F) const {
  return directional(t, F, 1.0, Mat3::Zero()).second;
}

Eigen::VectorXd ConstitutiveModel::d_dF(double t, const Mat3& F, const Mat3& E) const {
  return directional(t, F, 0.0, E).second;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ConstitutiveModel::directional(double t, const Mat3& F, double dt,
                                                                           const Mat3& dF) const {
  require_invertible(F, "frame");
  std::pair<Eigen::VectorXd, Eigen::VectorXd> out{Eigen::VectorXd(output_dimension()),
                                                  Eigen::VectorXd(output_dimension())};
  for (int c = 0; c < output_dimension(); ++c) {
    const Dual d = components_[c]->evaluate(t, F, dt, dF);
    out.first(c) = d.value;
    out.second(c) = d.derivative;
  }
  return out;
}

ConstitutiveModel change_reference(const ConstitutiveModel& model, const Mat3& C) {
  require_invertible(C, "reference change C");
  std::vector<ResponsePtr> components;
  components.reserve(model.components().size());
  for (const auto& component : model.components()) {
    components.push_back(std::make_shared<ReferencedResponse>(component, C));
  }
  return ConstitutiveModel(model.label() + " (changed reference)", std::move(components), model.time_domain());
}

ConstitutiveModel make_expression_model(std::string label, const std::vector<std::string>& sources,
                                        const expr::Constants& constants, TimeDomain domain) {
  for (const auto& [name, value] : constants) {
    if (expr::is_reserved_identifier(name)) {
      throw Error(ErrorCode::schema, "constant name '" + name + "' is reserved");
    }
  }
  auto shared = std::make_shared<const expr::Constants>(constants);
  const expr::Declarations decls = expr::declarations_for(constants);
  std::vector<ResponsePtr> components;
  for (const auto& source : sources) {
    components.push_back(std::make_shared<ExpressionResponse>(expr::parse(source, decls), shared));
  }
  return ConstitutiveModel(std::move(label), std::move(components), domain);
}

}  // namespace evolve
