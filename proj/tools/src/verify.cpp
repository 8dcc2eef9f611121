#include "verify.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "evolve/flow.hpp"
#include "evolve/foliation.hpp"

namespace evolve::cli {

namespace {

class Tally {
 public:
  explicit Tally(std::ostream& out) : out_(out) {}

  void check(bool ok, const std::string& name, const std::string& detail) {
    out_ << (ok ? "PASS " : "FAIL ") << name << "  " << detail << "\n";
    if (!ok) ++failures_;
  }
  int failures() const { return failures_; }

 private:
  std::ostream& out_;
  int failures_ = 0;
};

std::string num(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.3g", x);
  return buffer;
}

double probe_instant(const ConstitutiveModel& model) {
  const TimeDomain& d = model.time_domain();
  if (d.contains(0.5)) return 0.5;
  if (std::isfinite(d.lo) && std::isfinite(d.hi)) return 0.5 * (d.lo + d.hi);
  return std::isfinite(d.lo) ? d.lo + 0.5 : d.hi - 0.5;
}

double derivative_error(const ConstitutiveModel& model, double t, const SolverConfig& cfg) {
  constexpr double h = 1e-6;
  double worst = 0.0;
  for (const Mat3& F : sample_frames(8, cfg.seed, cfg)) {
    const auto rel = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
      return (a - b).norm() / (1.0 + b.norm());
    };
    const Eigen::VectorXd fd_t = (model.evaluate(t + h, F) - model.evaluate(t - h, F)) / (2.0 * h);
    worst = std::max(worst, rel(model.d_dt(t, F), fd_t));
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const Mat3 E = elementary(i, j);
        const Eigen::VectorXd fd = (model.evaluate(t, F + h * E) - model.evaluate(t, F - h * E)) / (2.0 * h);
        worst = std::max(worst, rel(model.d_dF(t, F, E), fd));
      }
    }
  }
  return worst;
}

Mat3 fixed_reference_change() {
  Mat3 C;
  C << 1.2, 0.3, -0.1, 0.0, 0.9, 0.4, 0.2, -0.3, 1.1;
  return C;
}

void generic_checks(Tally& tally, const ConstitutiveModel& model, const SolverConfig& cfg) {
  const std::string name = model.label();
  const double t = probe_instant(model);
  const double fd = derivative_error(model, t, cfg);
  tally.check(fd <= 1e-6, name + ".derivatives", "max relative FD gap " + num(fd));

  const FibreResult a = evolution_fibre(model, t, cfg);
  const FibreResult b = evolution_fibre(model, t, cfg);
  tally.check(a.converged, name + ".converged", std::to_string(a.samples_used) + " frames");
  tally.check(a.residual <= cfg.residual_tol, name + ".residual", num(a.residual));
  tally.check(a.singular_values == b.singular_values && a.pointwise_dim == b.pointwise_dim,
              name + ".deterministic", "repeat run identical");

  const FibreResult moved = evolution_fibre(change_reference(model, fixed_reference_change()), t, cfg);
  tally.check(moved.pointwise_dim == a.pointwise_dim && moved.sharp_dim == a.sharp_dim, name + ".covariance",
              "dims " + std::to_string(a.pointwise_dim) + "/" + std::to_string(a.sharp_dim) + " vs " +
                  std::to_string(moved.pointwise_dim) + "/" + std::to_string(moved.sharp_dim));
}

void expect_dims(Tally& tally, const ConstitutiveModel& model, double t, const SolverConfig& cfg, int dim,
                 int sharp) {
  const FibreResult f = evolution_fibre(model, t, cfg);
  tally.check(f.pointwise_dim == dim && f.sharp_dim == sharp, model.label() + ".fibre",
              "expected " + std::to_string(dim) + "/" + std::to_string(sharp) + ", got " +
                  std::to_string(f.pointwise_dim) + "/" + std::to_string(f.sharp_dim));
}

Leaf span_leaf(double lo, double hi, double spacing) {
  Leaf leaf;
  leaf.kind = LeafKind::remodeling_interval;
  leaf.t_lo = lo;
  leaf.t_hi = hi;
  leaf.grid_spacing = spacing;
  return leaf;
}

}  // namespace

int run_verify_suite(const std::optional<ConstitutiveModel>& extra, const SolverConfig& cfg, std::ostream& out) {
  Tally tally(out);

  FixedParticleContext constant;
  FixedParticleContext linear;
  linear.mu = parse_stiffness("1 + t");
  const ConstitutiveModel lc_const = zoo::liquid_crystal(constant, "lc_const");
  const ConstitutiveModel lc_linear = zoo::liquid_crystal(linear, "lc_linear");
  const ConstitutiveModel zoo_models[] = {zoo::det_only(), zoo::isotropic(), zoo::exp_decay(), lc_const, lc_linear};

  for (const auto& model : zoo_models) generic_checks(tally, model, cfg);
  expect_dims(tally, zoo_models[0], 0.0, cfg, 9, 1);
  expect_dims(tally, zoo_models[1], 0.0, cfg, 4, 1);
  expect_dims(tally, zoo_models[2], 1.0, cfg, 9, 1);
  expect_dims(tally, lc_const, 1.0, cfg, 6, 1);
  expect_dims(tally, lc_linear, 1.0, cfg, 5, 0);

  const ConstitutiveModel& decay = zoo_models[2];
  const RemodelingProcess process = integrate_process(decay, span_leaf(0.0, 3.0, 0.015), 0.0, cfg);
  double closed_form = 0.0;
  for (std::size_t i = 0; i < process.grid.size(); ++i) {
    const Mat3 exact = std::exp(process.grid[i] / 3.0) * Mat3::Identity();
    closed_form = std::max(closed_form, (process.P_samples[i] - exact).cwiseAbs().maxCoeff());
  }
  tally.check(closed_form <= 1e-8, "exp_decay.process", "max |P - exp(t/3) I| " + num(closed_form));
  const double residual = isomorphism_residual(decay, process, 20, cfg.seed);
  tally.check(residual <= 1e-8, "exp_decay.isomorphism", num(residual));
  const double defect = cocycle_check(decay, span_leaf(0.0, 3.0, 0.015), cfg);
  tally.check(defect <= 1e-8, "exp_decay.cocycle", num(defect));

  const RemodelingProcess still = integrate_process(lc_const, span_leaf(0.0, 1.0, 0.05), 0.0, cfg);
  double drift = 0.0;
  for (const Mat3& P : still.P_samples) drift = std::max(drift, (P - Mat3::Identity()).cwiseAbs().maxCoeff());
  tally.check(drift <= 1e-12, "lc_const.process", "max |P - I| " + num(drift));

  if (extra) generic_checks(tally, *extra, cfg);
  return tally.failures();
}

}  // namespace evolve::cli
