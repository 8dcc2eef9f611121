#include <gtest/gtest.h>

#include <cmath>

#include "evolve/error.hpp"
#include "evolve/flow.hpp"
#include "support/oracle.hpp"

using evolve::ConstitutiveModel;
using evolve::EvolutionTangent;
using evolve::JetArrow;
using evolve::Leaf;
using evolve::LeafKind;
using evolve::Mat3;
using evolve::RemodelingProcess;
using evolve::Vec3;
namespace zoo = evolve::zoo;
namespace oracle = evolve::testing;

namespace {

Leaf span(double lo, double hi, double spacing = 0.0) {
  Leaf leaf;
  leaf.kind = LeafKind::remodeling_interval;
  leaf.t_lo = lo;
  leaf.t_hi = hi;
  leaf.grid_spacing = spacing;
  return leaf;
}

double max_abs(const Mat3& m) { return m.cwiseAbs().maxCoeff(); }

// W(t, F) = What(F K(t)) with K(t) = I + t N, N = E_13: a remodeling
// material whose symmetry algebra K G K^-1 moves with t.
ConstitutiveModel sheared() {
  Mat3 N = Mat3::Zero();
  N(0, 2) = 1.0;
  return evolve::make_expression_model(
      "sheared", {"dot(F * (e + t * N * e), F * (e + t * N * e)) + c", "det(F)"},
      {{"e", Vec3(0, 0, 1)}, {"N", N}, {"c", 0.25}});
}

Mat3 shear(double t) {
  Mat3 K = Mat3::Identity();
  K(0, 2) = t;
  return K;
}

// W = (2 + sin t) det F: remodeling with Theta = -cos t / (3 (2 + sin t)) I.
ConstitutiveModel breathing() { return evolve::make_expression_model("breathing", {"(2 + sin(t)) * det(F)"}); }

double max_closed_form_error(const RemodelingProcess& p) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.grid.size(); ++i) {
    worst = std::max(worst, max_abs(p.P_samples[i] - std::exp(p.grid[i] / 3.0) * Mat3::Identity()));
  }
  return worst;
}

double system_residual(const ConstitutiveModel& model, double t, const EvolutionTangent& v) {
  const auto frames = evolve::sample_frames(60, 4321);
  const Eigen::MatrixXd A = evolve::assemble_system(model, t, frames);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  return (A * v.to_vector()).norm() / (svd.singularValues()(0) * v.to_vector().norm());
}

JetArrow random_arrow(oracle::Rng& rng, double src, double tgt) { return {src, tgt, rng.invertible(20.0)}; }

}  // namespace

TEST(JetArrow, CompositionLaw) {
  oracle::Rng rng(1);
  const Mat3 A = rng.invertible(), B = rng.invertible();
  const JetArrow ab = evolve::compose({1.0, 2.0, A}, {0.0, 1.0, B});
  EXPECT_EQ(ab.t_src, 0.0);
  EXPECT_EQ(ab.t_tgt, 2.0);
  EXPECT_EQ(ab.P, A * B);
  try {
    evolve::compose({1.0, 2.0, A}, {0.0, 1.5, B});
    FAIL();
  } catch (const evolve::Error& e) {
    EXPECT_EQ(e.code(), evolve::ErrorCode::instant_mismatch);
  }
}

TEST(JetArrow, GroupoidAxioms) {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const JetArrow c = random_arrow(rng, 0.0, 1.0);
    const JetArrow b = random_arrow(rng, 1.0, 2.0);
    const JetArrow a = random_arrow(rng, 2.0, 3.0);
    const JetArrow left = evolve::compose(evolve::compose(a, b), c);
    const JetArrow right = evolve::compose(a, evolve::compose(b, c));
    EXPECT_EQ(left.t_src, right.t_src);
    EXPECT_EQ(left.t_tgt, right.t_tgt);
    EXPECT_LE(max_abs(left.P - right.P), 1e-12 * (1 + max_abs(left.P)));

    const JetArrow id_src = JetArrow::identity(a.t_src);
    const JetArrow id_tgt = JetArrow::identity(a.t_tgt);
    EXPECT_EQ(evolve::compose(a, id_src).P, a.P);
    EXPECT_EQ(evolve::compose(id_tgt, a).P, a.P);

    const JetArrow inv = evolve::invert(a);
    EXPECT_EQ(inv.t_src, a.t_tgt);
    EXPECT_EQ(inv.t_tgt, a.t_src);
    const JetArrow loop = evolve::compose(a, inv);
    EXPECT_EQ(loop.t_src, a.t_tgt);
    EXPECT_EQ(loop.t_tgt, a.t_tgt);
    EXPECT_LE(max_abs(loop.P - Mat3::Identity()), 1e-12);
    EXPECT_LE(max_abs(evolve::compose(inv, a).P - Mat3::Identity()), 1e-12);
  }
  EXPECT_THROW(evolve::invert({0.0, 1.0, Mat3::Zero()}), evolve::Error);
}

TEST(ProcessGrid, Layout) {
  const auto g = evolve::process_grid(0.0, 1.0, 0.25, 0.1);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(std::count(g.begin(), g.end(), 0.25), 1);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
  EXPECT_EQ(evolve::process_grid(0.0, 1.0, 0.0, 0.25), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(evolve::process_grid(0.5, 0.5, 0.5, 0.0), (std::vector<double>{0.5}));
  EXPECT_THROW(evolve::process_grid(0.0, 1.0, 2.0, 0.1), evolve::Error);
  EXPECT_THROW(evolve::process_grid(0.0, 1.0, 0.5, 0.0), evolve::Error);
}

TEST(IntegrateGenerator, ConstantGeneratorMatchesExponential) {
  oracle::Rng rng(3);
  const Mat3 theta = 0.5 * rng.matrix();
  const auto grid = evolve::process_grid(-1.0, 2.0, 0.0, 0.01);
  const std::vector<EvolutionTangent> samples(grid.size(), EvolutionTangent{1.0, theta});
  const std::size_t ref = static_cast<std::size_t>(std::find(grid.begin(), grid.end(), 0.0) - grid.begin());
  const RemodelingProcess p = evolve::integrate_generator(grid, samples, ref);
  EXPECT_EQ(p.P_samples[ref], Mat3::Identity());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_LE(max_abs(p.P_samples[i] - oracle::expm(grid[i] * theta)), 1e-9) << grid[i];
  }
}

TEST(IntegrateGenerator, FourthOrderForTimeVaryingGenerator) {
  // commuting diagonal generator: P(t) = diag(exp(int_0^t theta_k))
  const auto theta_at = [](double t) {
    return Mat3(Vec3(std::cos(t), -0.5 * t, std::sin(2 * t)).asDiagonal());
  };
  const auto exact_at = [](double t) {
    return Mat3(Vec3(std::exp(std::sin(t)), std::exp(-0.25 * t * t), std::exp((1 - std::cos(2 * t)) / 2)).asDiagonal());
  };
  std::vector<double> errors;
  for (double h : {0.2, 0.1, 0.05}) {
    const auto grid = evolve::process_grid(0.0, 2.0, 0.0, h);
    std::vector<EvolutionTangent> samples;
    for (double t : grid) samples.push_back({1.0, theta_at(t)});
    const RemodelingProcess p = evolve::integrate_generator(grid, samples, 0);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, max_abs(p.P_samples[i] - exact_at(grid[i])));
    errors.push_back(worst);
  }
  EXPECT_GE(errors[0] / errors[1], 12.0);
  EXPECT_GE(errors[1] / errors[2], 12.0);
}

TEST(IntegrateGenerator, NearSingularProcessAborts) {
  const auto grid = evolve::process_grid(0.0, 1.0, 0.0, 0.05);
  const std::vector<EvolutionTangent> samples(grid.size(), EvolutionTangent{1.0, -20.0 * Mat3::Identity()});
  try {
    evolve::integrate_generator(grid, samples, 0);
    FAIL();
  } catch (const evolve::Error& e) {
    EXPECT_EQ(e.code(), evolve::ErrorCode::near_singular_process);
  }
  EXPECT_THROW(evolve::integrate_generator(grid, std::vector<EvolutionTangent>(2), 0), evolve::Error);
}

TEST(IntegrateProcess, ExponentialDecayClosedForm) {
  const RemodelingProcess p = evolve::integrate_process(zoo::exp_decay(), span(0.0, 3.0, 0.015), 0.0);
  EXPECT_EQ(p.P_samples[p.ref_index], Mat3::Identity());
  EXPECT_LE(max_closed_form_error(p), 1e-8);
  for (const auto& theta : p.theta_used) {
    EXPECT_EQ(theta.lambda, 1.0);
    EXPECT_LE(max_abs(theta.theta - Mat3::Identity() / 3.0), 1e-12);
  }
  for (const Mat3& P : p.P_samples) EXPECT_GT(P.determinant(), 0.0);
  EXPECT_LE(evolve::isomorphism_residual(zoo::exp_decay(), p), 1e-8);
}

TEST(IntegrateProcess, ZeroGeneratorGivesIdentity) {
  const RemodelingProcess p = evolve::integrate_process(zoo::liquid_crystal({}), span(0.0, 2.0, 0.1), 1.0);
  for (const Mat3& P : p.P_samples) EXPECT_LE(max_abs(P - Mat3::Identity()), 1e-14);
  EXPECT_LE(evolve::isomorphism_residual(zoo::liquid_crystal({}), p), 1e-14);
}

TEST(IntegrateProcess, TimeReversalReturnsIdentity) {
  for (const ConstitutiveModel& model : {zoo::exp_decay(), breathing(), sheared()}) {
    const RemodelingProcess forward = evolve::integrate_process(model, span(0.0, 2.0, 0.01), 0.0);
    const RemodelingProcess backward = evolve::integrate_process(model, span(0.0, 2.0, 0.01), 2.0);
    // arrow 2 -> 0 followed by arrow 0 -> 2
    const JetArrow there = forward.arrow(forward.grid.size() - 1);
    const JetArrow back = backward.arrow(0);
    const JetArrow loop = evolve::compose(back, there);
    EXPECT_LE(max_abs(loop.P - Mat3::Identity()), 1e-8) << model.label();
  }
}

TEST(IntegrateProcess, ShearedModelRecoversReferenceChange) {
  const ConstitutiveModel model = sheared();
  const RemodelingProcess p = evolve::integrate_process(model, span(-1.0, 1.0, 0.02), 0.0);
  EXPECT_LE(evolve::isomorphism_residual(model, p), 1e-6);
  // every valid P(t) differs from K(0) K(t)^-1 by a symmetry at t
  for (std::size_t i = 0; i < p.grid.size(); i += 10) {
    const Mat3 base = shear(p.grid[i]).inverse();
    const JetArrow self{p.grid[i], p.grid[i], base.inverse() * p.P_samples[i]};
    const auto frames = evolve::sample_frames(20, 5);
    EXPECT_LE(evolve::arrow_residual(model, self, frames), 1e-6);
  }
}

TEST(IntegrateProcess, RequiresRemodelingLeaf) {
  Leaf aging;
  aging.kind = LeafKind::aging_instant;
  EXPECT_THROW(evolve::integrate_process(zoo::exp_decay(), aging, 0.0), evolve::Error);
  evolve::FixedParticleContext ctx;
  ctx.mu = evolve::parse_stiffness("1 + t");
  try {
    evolve::integrate_process(zoo::liquid_crystal(ctx), span(0.0, 1.0, 0.1), 0.0);
    FAIL();
  } catch (const evolve::Error& e) {
    EXPECT_EQ(e.code(), evolve::ErrorCode::not_remodeling);
  }
}

TEST(IsomorphismResidual, DetectsCorruptedProcess) {
  RemodelingProcess p = evolve::integrate_process(zoo::exp_decay(), span(0.0, 3.0, 0.015), 0.0);
  for (Mat3& P : p.P_samples) P *= 1.01;
  const double residual = evolve::isomorphism_residual(zoo::exp_decay(), p);
  // |det F| (1.01^3 - 1) / (1 + |det F|) over the sampled frames
  EXPECT_GT(residual, 0.02);
  EXPECT_LE(residual, std::pow(1.01, 3) - 1 + 1e-9);
}

TEST(ConjugateSymmetry, IdentityArrowLeavesBasisUnchanged) {
  const auto f = evolve::evolution_fibre(zoo::isotropic(), 0.0);
  const auto moved = evolve::conjugate_symmetry(f.symmetry_basis, JetArrow::identity(0.0));
  ASSERT_EQ(moved.size(), f.symmetry_basis.size());
  for (std::size_t k = 0; k < moved.size(); ++k) EXPECT_EQ(moved[k].theta, f.symmetry_basis[k].theta);
  const std::vector<EvolutionTangent> bad{{1.0, Mat3::Zero()}};
  EXPECT_THROW(evolve::conjugate_symmetry(bad, JetArrow::identity(0.0)), evolve::Error);
  EXPECT_THROW(evolve::conjugate_symmetry(f.symmetry_basis, {0.0, 0.0, Mat3::Zero()}), evolve::Error);
}

TEST(ConjugateSymmetry, RotationPreservesAntisymmetry) {
  const auto f = evolve::evolution_fibre(zoo::isotropic(), 0.0);
  const Eigen::AngleAxisd rot(0.7, Vec3(1, 2, 3).normalized());
  const auto moved = evolve::conjugate_symmetry(f.symmetry_basis, {0.0, 0.0, rot.toRotationMatrix()});
  for (const auto& m : moved) {
    EXPECT_LE((m.theta + m.theta.transpose()).norm(), 1e-12);
    EXPECT_LE(system_residual(zoo::isotropic(), 0.0, m), 1e-6);
  }
}

TEST(ConjugateSymmetry, TransportsAlgebraAlongProcess) {
  for (const ConstitutiveModel& model : {zoo::liquid_crystal({}), sheared()}) {
    const RemodelingProcess p = evolve::integrate_process(model, span(0.0, 1.0, 0.02), 0.0);
    const std::size_t last = p.grid.size() - 1;
    const auto fibre = evolve::evolution_fibre(model, p.grid[last]);
    const auto moved = evolve::conjugate_symmetry(fibre.symmetry_basis, p.arrow(last));
    ASSERT_EQ(moved.size(), 5u);
    for (const auto& m : moved) EXPECT_LE(system_residual(model, p.t_ref, m), 1e-6) << model.label();
  }
}

TEST(ProcessFreedom, SymmetryShiftedProcessDiffersBySymmetry) {
  const ConstitutiveModel model = sheared();
  const RemodelingProcess p = evolve::integrate_process(model, span(0.0, 1.0, 0.01), 0.0);
  // shift the generator by the smooth symmetry field K(t) E_12 K(t)^-1
  std::vector<EvolutionTangent> shifted = p.theta_used;
  for (std::size_t i = 0; i < shifted.size(); ++i) {
    const Mat3 K = shear(p.grid[i]);
    shifted[i].theta += 0.5 * K * evolve::elementary(0, 1) * K.inverse();
  }
  const RemodelingProcess q = evolve::integrate_generator(p.grid, shifted, p.ref_index);
  EXPECT_LE(evolve::isomorphism_residual(model, q), 1e-6);
  const auto frames = evolve::sample_frames(20, 9);
  for (std::size_t i = 0; i < p.grid.size(); i += 10) {
    const Mat3 P = p.P_samples[i], Q = q.P_samples[i];
    EXPECT_LE(evolve::arrow_residual(model, {p.grid[i], p.grid[i], P.inverse() * Q}, frames), 1e-6);
    EXPECT_LE(evolve::arrow_residual(model, {p.t_ref, p.t_ref, Q * P.inverse()}, frames), 1e-6);
  }
}

TEST(CocycleCheck, ClosedFormModels) {
  EXPECT_LE(evolve::cocycle_defect(zoo::exp_decay(), 0.0, 1.0, 2.0, {}, 0.015), 1e-8);
  EXPECT_LE(evolve::cocycle_check(zoo::exp_decay(), span(0.0, 3.0, 0.015)), 1e-8);
  EXPECT_EQ(evolve::cocycle_check(zoo::liquid_crystal({}), span(0.0, 3.0, 0.1)), 0.0);
  EXPECT_LE(evolve::cocycle_check(sheared(), span(-1.0, 1.0, 0.02)), 1e-6);
  EXPECT_THROW(evolve::cocycle_defect(zoo::exp_decay(), 1.0, 0.0, 2.0, {}, 0.1), evolve::Error);
}

TEST(CocycleCheck, DefectShrinksUnderStepHalving) {
  const double coarse = evolve::cocycle_check(zoo::exp_decay(), span(0.0, 3.0), {}, 0.3);
  const double fine = evolve::cocycle_check(zoo::exp_decay(), span(0.0, 3.0), {}, 0.15);
  EXPECT_GT(coarse, 0.0);
  EXPECT_GE(coarse / fine, 8.0);
}

TEST(IsomorphismResidual, FourthOrderRefinement) {
  const ConstitutiveModel model = breathing();
  std::vector<double> residuals;
  for (double h : {0.2, 0.1, 0.05, 0.025}) {
    const RemodelingProcess p = evolve::integrate_process(model, span(0.0, 3.0), 0.0, {}, h);
    residuals.push_back(evolve::isomorphism_residual(model, p));
  }
  for (std::size_t i = 1; i < residuals.size(); ++i) EXPECT_GE(residuals[i - 1] / residuals[i], 8.0) << i;
  EXPECT_GE(std::log2(residuals.front() / residuals.back()) / 3.0, 3.5);
}
