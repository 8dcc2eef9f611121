#include "evolve/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "evolve/error.hpp"

namespace evolve {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [lo, hi) from the top 53 bits; independent of the standard
// library's distribution implementations.
double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

std::vector<Mat3> structured_frames() {
  std::vector<Mat3> frames;
  frames.push_back(Mat3::Identity());
  frames.push_back(Eigen::Vector3d(2.0, 1.0, 1.0).asDiagonal());
  frames.push_back(Eigen::Vector3d(1.0, 1.0, 2.0).asDiagonal());
  const double c = std::cos(0.3);
  const double s = std::sin(0.3);
  Mat3 rot;
  rot << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  frames.push_back(rot);
  frames.push_back(Mat3::Identity() + 0.1 * Mat3::Ones());
  return frames;
}

// Modified Gram-Schmidt, applied twice. Vectors whose column 0 is exactly
// zero keep it exactly zero.
std::vector<Vector10> orthonormalize(std::vector<Vector10> vectors) {
  std::vector<Vector10> out;
  for (auto& v : vectors) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : out) v -= q.dot(v) * q;
    }
    const double norm = v.norm();
    if (norm > 1e-12) out.push_back(v / norm);
  }
  return out;
}

}  // namespace

Vector10 EvolutionTangent::to_vector() const {
  Vector10 v;
  v(0) = lambda;
  for (int l = 0; l < 3; ++l) {
    for (int j = 0; j < 3; ++j) v(1 + 3 * l + j) = theta(l, j);
  }
  return v;
}

EvolutionTangent EvolutionTangent::from_vector(const Vector10& v) {
  EvolutionTangent out;
  out.lambda = v(0);
  for (int l = 0; l < 3; ++l) {
    for (int j = 0; j < 3; ++j) out.theta(l, j) = v(1 + 3 * l + j);
  }
  return out;
}

void SolverConfig::validate(int output_dimension) const {
  const auto fail = [](const std::string& message) { throw Error(ErrorCode::invalid_argument, message); };
  if (!(rank_tol_rel > 0.0 && rank_tol_rel < 1.0)) fail("rank tolerance must lie in (0, 1)");
  if (n_samples_initial < 1) fail("initial sample count must be positive");
  if (static_cast<long long>(n_samples_initial) * output_dimension < 10) {
    fail("initial samples times output dimension must be at least 10");
  }
  if (n_samples_max < n_samples_initial) fail("maximum sample count is below the initial count");
  if (!(residual_tol > 0.0)) fail("residual tolerance must be positive");
  if (!(frame_det_min > 0.0)) fail("frame determinant bound must be positive");
  if (!(frame_cond_max >= 1.0)) fail("frame condition bound must be at least 1");
}

std::vector<Mat3> random_frames(int n, std::uint64_t seed, const SolverConfig& cfg) {
  std::mt19937_64 rng(splitmix64(seed));
  std::vector<Mat3> frames;
  frames.reserve(std::max(n, 0));
  while (static_cast<int>(frames.size()) < n) {
    Mat3 F;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) F(i, j) = uniform(rng, -2.0, 2.0);
    }
    if (F.determinant() < 0.0) F.col(0) = -F.col(0);
    if (F.determinant() < cfg.frame_det_min || condition_number(F) > cfg.frame_cond_max) continue;
    frames.push_back(F);
  }
  return frames;
}

std::vector<Mat3> sample_frames(int n, std::uint64_t seed, const SolverConfig& cfg) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "sample_frames needs n >= 1");
  std::vector<Mat3> frames = structured_frames();
  if (n <= static_cast<int>(frames.size())) {
    frames.resize(n);
    return frames;
  }
  const auto extra = random_frames(n - static_cast<int>(frames.size()), seed, cfg);
  frames.insert(frames.end(), extra.begin(), extra.end());
  return frames;
}

Eigen::MatrixXd assemble_system(const ConstitutiveModel& model, double t, std::span<const Mat3> frames) {
  const int m = model.output_dimension();
  Eigen::MatrixXd A(static_cast<Eigen::Index>(frames.size()) * m, 10);
  std::array<Eigen::VectorXd, 9> partials;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const Mat3& F = frames[k];
    if (!is_numerically_invertible(F)) {
      throw Error(ErrorCode::singular_matrix, "frame " + std::to_string(k) + " is numerically singular");
    }
    const Eigen::VectorXd dt = model.d_dt(t, F);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) partials[3 * i + j] = model.d_dF(t, F, elementary(i, j));
    }
    for (int c = 0; c < m; ++c) {
      const Eigen::Index row = static_cast<Eigen::Index>(k) * m + c;
      Mat3 D;
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) D(i, j) = partials[3 * i + j](c);
      }
      const Mat3 coeff = F.transpose() * D;
      A(row, 0) = dt(c);
      for (int l = 0; l < 3; ++l) {
        for (int j = 0; j < 3; ++j) A(row, 1 + 3 * l + j) = coeff(l, j);
      }
    }
  }
  return A;
}

NullSpace null_space(const Eigen::MatrixXd& A, double rank_tol_rel) {
  Eigen::MatrixXd padded = A;
  if (padded.rows() < 10) {
    padded.conservativeResize(10, 10);
    padded.bottomRows(10 - A.rows()).setZero();
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(padded, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  NullSpace out;
  for (int k = 0; k < 10; ++k) out.singular_values[k] = sv(k);
  const double sigma_max = sv(0);
  out.rank = 0;
  if (sigma_max > 0.0) {
    for (int k = 0; k < 10; ++k) {
      if (sv(k) > rank_tol_rel * sigma_max) ++out.rank;
    }
  }
  for (int k = out.rank; k < 10; ++k) out.basis.push_back(svd.matrixV().col(k));
  return out;
}

double relative_residual(const Eigen::MatrixXd& A, const Vector10& v, double sigma_max) {
  if (sigma_max == 0.0) return 0.0;
  return (A * v).norm() / (sigma_max * v.norm());
}

void split_null_basis(const std::vector<Vector10>& basis, double lambda_tol, FibreResult& out) {
  out.remodeling_direction.reset();
  out.symmetry_basis.clear();
  out.pointwise_dim = static_cast<int>(basis.size());

  std::size_t pivot = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (std::abs(basis[i](0)) > best) {
      best = std::abs(basis[i](0));
      pivot = i;
    }
  }

  std::vector<Vector10> rest;
  if (!basis.empty() && best > lambda_tol) {
    const Vector10& p = basis[pivot];
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (i == pivot) continue;
      Vector10 v = basis[i] - (basis[i](0) / p(0)) * p;
      v(0) = 0.0;
      rest.push_back(v);
    }
    const auto symmetry = orthonormalize(std::move(rest));
    Vector10 direction = p / p(0);
    direction(0) = 1.0;
    for (const auto& s : symmetry) direction -= s.dot(direction) * s;
    direction(0) = 1.0;
    out.remodeling_direction = EvolutionTangent::from_vector(direction);
    for (const auto& s : symmetry) out.symmetry_basis.push_back(EvolutionTangent::from_vector(s));
  } else {
    for (const auto& b : basis) {
      Vector10 v = b;
      v(0) = 0.0;
      rest.push_back(v);
    }
    for (const auto& s : orthonormalize(std::move(rest))) {
      out.symmetry_basis.push_back(EvolutionTangent::from_vector(s));
    }
  }
  out.sharp_dim = out.remodeling_direction ? 1 : 0;
  out.pointwise_dim = out.symmetry_dim() + out.sharp_dim;
}

FibreResult evolution_fibre(const ConstitutiveModel& model, double t, const SolverConfig& cfg) {
  cfg.validate(model.output_dimension());
  if (!model.time_domain().contains(t)) {
    throw Error(ErrorCode::time_domain, "instant " + std::to_string(t) + " is outside the model time domain");
  }

  std::vector<Mat3> frames = sample_frames(cfg.n_samples_initial, cfg.seed, cfg);
  Eigen::MatrixXd A = assemble_system(model, t, frames);
  NullSpace ns = null_space(A, cfg.rank_tol_rel);
  int rounds = 1;
  bool converged = true;
  std::size_t previous = ns.basis.size();

  while (static_cast<int>(frames.size()) < cfg.n_samples_max) {
    const int add = std::min(static_cast<int>(frames.size()), cfg.n_samples_max - static_cast<int>(frames.size()));
    const auto fresh = random_frames(add, cfg.seed ^ splitmix64(static_cast<std::uint64_t>(rounds)), cfg);
    const Eigen::MatrixXd extra = assemble_system(model, t, fresh);
    Eigen::MatrixXd stacked(A.rows() + extra.rows(), 10);
    stacked << A, extra;
    A = std::move(stacked);
    frames.insert(frames.end(), fresh.begin(), fresh.end());
    ns = null_space(A, cfg.rank_tol_rel);
    ++rounds;
    converged = ns.basis.size() == previous;
    if (converged) break;
    previous = ns.basis.size();
  }

  FibreResult out;
  out.t = t;
  out.singular_values = ns.singular_values;
  out.samples_used = static_cast<int>(frames.size());
  out.rounds = rounds;
  out.converged = converged;
  split_null_basis(ns.basis, cfg.rank_tol_rel, out);

  const double sigma_max = ns.singular_values[0];
  double residual = 0.0;
  for (const auto& s : out.symmetry_basis) residual = std::max(residual, relative_residual(A, s.to_vector(), sigma_max));
  if (out.remodeling_direction) {
    residual = std::max(residual, relative_residual(A, out.remodeling_direction->to_vector(), sigma_max));
  }
  out.residual = residual;
  return out;
}

}  // namespace evolve
