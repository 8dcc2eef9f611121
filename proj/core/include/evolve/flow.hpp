#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evolve/evolution.hpp"
#include "evolve/foliation.hpp"
#include "evolve/linalg.hpp"
#include "evolve/model.hpp"

namespace evolve {

/// Groupoid element (t_src, t_tgt, P) at the fixed particle: an invertible
/// jet with W(t_src, F P) = W(t_tgt, F) when it is a material isomorphism.
struct JetArrow {
  double t_src = 0.0;
  double t_tgt = 0.0;
  Mat3 P = Mat3::Identity();

  static JetArrow identity(double t) { return {t, t, Mat3::Identity()}; }
};

/// a after b; requires b.t_tgt == a.t_src. Result (b.t_src, a.t_tgt, a.P b.P).
JetArrow compose(const JetArrow& a, const JetArrow& b);

/// (a.t_tgt, a.t_src, a.P^-1).
JetArrow invert(const JetArrow& a);

/// Curve of material isomorphisms P(t), each the arrow (t -> t_ref).
struct RemodelingProcess {
  double t_ref = 0.0;
  std::size_t ref_index = 0;
  std::vector<double> grid;
  std::vector<Mat3> P_samples;
  std::vector<EvolutionTangent> theta_used;

  JetArrow arrow(std::size_t i) const { return {grid[i], t_ref, P_samples[i]}; }
  /// Sample at the grid node equal to t; throws Error(invalid_argument) if absent.
  const Mat3& at(double t) const;
};

/// Nodes t_ref + k step inside [lo, hi], plus lo and hi themselves.
std::vector<double> process_grid(double lo, double hi, double t_ref, double step);

/// Integrates dP/dt = P Theta(t), P(grid[ref_index]) = I, with classical RK4
/// between consecutive nodes. Theta at the stage midpoint comes from cubic
/// Lagrange interpolation of the four nearest node samples.
RemodelingProcess integrate_generator(std::span<const double> grid, std::span<const EvolutionTangent> theta,
                                      std::size_t ref_index);

/// Canonical remodeling process on a remodeling leaf. `step` defaults to
/// the leaf's grid spacing. Throws Error(not_remodeling) if some node has
/// no remodeling direction and Error(near_singular_process) if det P
/// collapses below 1e-9.
RemodelingProcess integrate_process(const ConstitutiveModel& model, const Leaf& leaf, double t_ref,
                                    const SolverConfig& cfg = {}, std::optional<double> step = std::nullopt,
                                    unsigned threads = 0);

/// max_F ||W(t_src, F P) - W(t_tgt, F)|| / (1 + ||W(t_tgt, F)||).
double arrow_residual(const ConstitutiveModel& model, const JetArrow& arrow, std::span<const Mat3> frames);

/// max over grid nodes of arrow_residual, with frames sample_frames(n_frames, seed).
double isomorphism_residual(const ConstitutiveModel& model, const RemodelingProcess& process, int n_frames = 20,
                            std::uint64_t seed = 42);

/// Transports symmetry-algebra elements at arrow.t_src to arrow.t_tgt:
/// (0, Theta) -> (0, P Theta P^-1).
std::vector<EvolutionTangent> conjugate_symmetry(std::span<const EvolutionTangent> basis, const JetArrow& arrow);

/// ||P_z(t) - P_z(r) P_r(t)||_max for processes referenced at z and r.
double cocycle_defect(const ConstitutiveModel& model, double z, double r, double t, const SolverConfig& cfg,
                      double step, unsigned threads = 0);

/// Max cocycle defect over triples in the leaf; default triples sit at
/// fractions (0, 1/3, 2/3), (0, 1/2, 1) and (1/4, 1/2, 3/4) of its length.
double cocycle_check(const ConstitutiveModel& model, const Leaf& leaf, const SolverConfig& cfg = {},
                     std::optional<double> step = std::nullopt, std::span<const std::array<double, 3>> triples = {},
                     unsigned threads = 0);

}  // namespace evolve
