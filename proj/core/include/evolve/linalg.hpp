#pragma once

#include <Eigen/Dense>

namespace evolve {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vector10 = Eigen::Matrix<double, 10, 1>;

/// Elementary matrix E_ij (one at (row, col), zero elsewhere).
inline Mat3 elementary(int row, int col) {
  Mat3 e = Mat3::Zero();
  e(row, col) = 1.0;
  return e;
}

/// True when |det A| is at least 1e-12 * ||A||_F^3.
bool is_numerically_invertible(const Mat3& a);

/// Two-norm condition number; infinity for singular input.
double condition_number(const Mat3& a);

Mat3 adjugate(const Mat3& a);

/// sin of the largest principal angle between the column spans of two
/// orthonormal bases; 1 when the dimensions differ.
double subspace_distance(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2);

}  // namespace evolve
