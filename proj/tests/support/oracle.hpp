#pragma once

// Reference computations for tests. Nothing here calls the library's frame
// sampler, dual-number evaluator or null-space splitter.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "evolve/linalg.hpp"
#include "evolve/model.hpp"

namespace evolve::testing {

class Rng {
 public:
  explicit Rng(std::uint32_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Mat3 matrix(double lo = -1.0, double hi = 1.0);
  Vec3 vector(double lo = -1.0, double hi = 1.0);
  /// Invertible with positive determinant and 2-norm condition number <= cond_max.
  Mat3 invertible(double cond_max = 50.0);

 private:
  std::mt19937 engine_;
};

/// Condition number from the eigenvalues of F^T F.
double oracle_condition(const Mat3& F);

/// Central differences with step h.
Eigen::VectorXd fd_dt(const ConstitutiveModel& model, double t, const Mat3& F, double h = 1e-6);
Eigen::VectorXd fd_dF(const ConstitutiveModel& model, double t, const Mat3& F, const Mat3& E, double h = 1e-6);

/// Analytic partials of a model: dW/dt (length m) and the m matrices
/// D_c with (D_c)_ij = dW_c/dF_ij.
struct Gradient {
  Eigen::VectorXd dt;
  std::vector<Mat3> dF;
};
using GradientFn = std::function<Gradient(double t, const Mat3& F)>;

Gradient det_gradient(double t, const Mat3& F);
Gradient isotropic_gradient(double t, const Mat3& F);

/// Rows of the evolution equation built from analytic partials.
Eigen::MatrixXd oracle_system(const GradientFn& gradient, double t, const std::vector<Mat3>& frames);

/// Orthonormal kernel basis (columns) from a full BDCSVD with relative tolerance.
Eigen::MatrixXd oracle_kernel(const Eigen::MatrixXd& A, double rel_tol = 1e-9);

/// Largest principal angle between two column spaces (orthonormal inputs),
/// computed from the sine side so that tiny angles keep their precision.
double largest_principal_angle(const Eigen::MatrixXd& Q1, const Eigen::MatrixXd& Q2);

/// Stacks Theta matrices (row-major) as columns of a 9 x k matrix and
/// orthonormalizes them.
Eigen::MatrixXd theta_span(const std::vector<Mat3>& thetas);

/// Matrix exponential by scaling and squaring with a Taylor series.
Mat3 expm(const Mat3& A);

}  // namespace evolve::testing
