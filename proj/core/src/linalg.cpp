#include "evolve/linalg.hpp"

#include <cmath>
#include <limits>

#include "evolve/error.hpp"

namespace evolve {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::syntax: return "syntax error";
    case ErrorCode::unknown_identifier: return "unknown identifier";
    case ErrorCode::dimension_mismatch: return "dimension mismatch";
    case ErrorCode::singular_matrix: return "singular matrix";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::io: return "I/O error";
    case ErrorCode::schema: return "schema violation";
    case ErrorCode::time_domain: return "outside time domain";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::instant_mismatch: return "instant mismatch";
    case ErrorCode::not_remodeling: return "not a remodeling leaf";
    case ErrorCode::near_singular_process: return "near-singular process";
  }
  return "error";
}

bool is_numerically_invertible(const Mat3& a) {
  const double norm = a.norm();
  return norm > 0.0 && std::abs(a.determinant()) >= 1e-12 * norm * norm * norm;
}

double condition_number(const Mat3& a) {
  const Eigen::JacobiSVD<Mat3> svd(a);
  const auto& s = svd.singularValues();
  if (s(2) == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(2);
}

Mat3 adjugate(const Mat3& a) {
  Mat3 adj;
  adj(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
  adj(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
  adj(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
  adj(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
  adj(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
  adj(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
  adj(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
  adj(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
  adj(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  return adj;
}

double subspace_distance(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2) {
  if (q1.cols() != q2.cols() || q1.rows() != q2.rows()) return 1.0;
  if (q1.cols() == 0) return 0.0;
  // ||(I - Q2 Q2^T) Q1||_2 is the sine of the largest principal angle.
  const Eigen::MatrixXd residual = q1 - q2 * (q2.transpose() * q1);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
  return svd.singularValues()(0);
}

}  // namespace evolve
