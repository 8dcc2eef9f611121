#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evolve/linalg.hpp"
#include "evolve/model.hpp"

namespace evolve {

/// Coordinates (lambda, Theta) of a left-invariant field
/// lambda d/dt + y^i_l Theta^l_j d/dy^i_j at one instant.
struct EvolutionTangent {
  double lambda = 0.0;
  Mat3 theta = Mat3::Zero();

  /// [lambda, Theta row-major].
  Vector10 to_vector() const;
  static EvolutionTangent from_vector(const Vector10& v);
};

struct SolverConfig {
  int n_samples_initial = 20;
  int n_samples_max = 320;
  double rank_tol_rel = 1e-9;
  double residual_tol = 1e-8;
  std::uint64_t seed = 42;
  double frame_det_min = 0.1;
  double frame_cond_max = 100.0;

  /// Throws Error(invalid_argument) when the invariants fail for a model
  /// with `output_dimension` components.
  void validate(int output_dimension) const;
};

/// Per-instant null-space analysis of the evolution equation.
struct FibreResult {
  double t = 0.0;
  int pointwise_dim = 0;
  int sharp_dim = 0;
  std::optional<EvolutionTangent> remodeling_direction;  // lambda == 1, orthogonal to symmetry_basis
  std::vector<EvolutionTangent> symmetry_basis;          // lambda == 0, Frobenius-orthonormal
  std::array<double, 10> singular_values{};              // descending
  int samples_used = 0;
  int rounds = 0;
  bool converged = true;
  /// max ||A v|| / sigma_max over the reported directions (v normalized).
  double residual = 0.0;

  int symmetry_dim() const { return static_cast<int>(symmetry_basis.size()); }
};

/// Deterministic frames. The list starts with I, diag(2,1,1), diag(1,1,2),
/// the rotation by 0.3 rad about z and I + 0.1*ones; the rest are random
/// with det F >= frame_det_min and cond F <= frame_cond_max.
std::vector<Mat3> sample_frames(int n, std::uint64_t seed, const SolverConfig& cfg = {});

/// Random frames only (no structured prefix), same acceptance rule.
std::vector<Mat3> random_frames(int n, std::uint64_t seed, const SolverConfig& cfg = {});

/// Rows (frame k, component c) of the evolution equation. Column 0 holds
/// dW_c/dt; column 1 + 3l + j holds sum_i F^i_l dW_c/dF^i_j.
Eigen::MatrixXd assemble_system(const ConstitutiveModel& model, double t, std::span<const Mat3> frames);

struct NullSpace {
  std::vector<Vector10> basis;  // orthonormal
  std::array<double, 10> singular_values{};
  int rank = 0;
};

/// Right-singular directions of A whose singular values are at most
/// rank_tol_rel * sigma_max (all ten when A == 0).
NullSpace null_space(const Eigen::MatrixXd& A, double rank_tol_rel);

/// ||A v|| / (sigma_max ||v||); zero when A == 0.
double relative_residual(const Eigen::MatrixXd& A, const Vector10& v, double sigma_max);

/// Splits a null basis into an optional remodeling direction (lambda = 1,
/// orthogonal to the symmetry part) and an orthonormal lambda = 0 basis.
void split_null_basis(const std::vector<Vector10>& basis, double lambda_tol, FibreResult& out);

/// Solves the evolution equation at t with adaptive frame doubling.
/// Throws Error(time_domain) when t is outside the model's domain.
FibreResult evolution_fibre(const ConstitutiveModel& model, double t, const SolverConfig& cfg = {});

}  // namespace evolve
