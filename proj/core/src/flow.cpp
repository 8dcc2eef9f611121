#include "evolve/flow.hpp"

#include <algorithm>
#include <cmath>

#include "evolve/error.hpp"
#include "evolve/parallel.hpp"

namespace evolve {

namespace {

constexpr double kDetFloor = 1e-9;

Mat3 lagrange_theta(std::span<const double> grid, std::span<const EvolutionTangent> theta, std::size_t lo,
                    double t) {
  const std::size_t n = grid.size();
  const std::size_t width = std::min<std::size_t>(4, n);
  std::size_t start = lo > 0 ? lo - 1 : 0;
  start = std::min(start, n - width);
  Mat3 out = Mat3::Zero();
  for (std::size_t a = start; a < start + width; ++a) {
    double weight = 1.0;
    for (std::size_t b = start; b < start + width; ++b) {
      if (b != a) weight *= (t - grid[b]) / (grid[a] - grid[b]);
    }
    out += weight * theta[a].theta;
  }
  return out;
}

Mat3 rk4_step(const Mat3& P, double h, const Mat3& theta0, const Mat3& theta_mid, const Mat3& theta1) {
  const Mat3 k1 = P * theta0;
  const Mat3 k2 = (P + 0.5 * h * k1) * theta_mid;
  const Mat3 k3 = (P + 0.5 * h * k2) * theta_mid;
  const Mat3 k4 = (P + h * k3) * theta1;
  return P + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_det(const Mat3& P, double t) {
  if (!(std::abs(P.determinant()) >= kDetFloor)) {
    throw Error(ErrorCode::near_singular_process,
                "process became near-singular (|det P| < 1e-9) at t = " + std::to_string(t));
  }
}

}  // namespace

JetArrow compose(const JetArrow& a, const JetArrow& b) {
  if (b.t_tgt != a.t_src) {
    throw Error(ErrorCode::instant_mismatch, "cannot compose: target " + std::to_string(b.t_tgt) +
                                                 " differs from source " + std::to_string(a.t_src));
  }
  return {b.t_src, a.t_tgt, a.P * b.P};
}

JetArrow invert(const JetArrow& a) {
  if (!is_numerically_invertible(a.P)) throw Error(ErrorCode::singular_matrix, "arrow jet is singular");
  return {a.t_tgt, a.t_src, a.P.inverse()};
}

const Mat3& RemodelingProcess::at(double t) const {
  const auto it = std::find(grid.begin(), grid.end(), t);
  if (it == grid.end()) throw Error(ErrorCode::invalid_argument, "instant " + std::to_string(t) + " is not a node");
  return P_samples[static_cast<std::size_t>(it - grid.begin())];
}

std::vector<double> process_grid(double lo, double hi, double t_ref, double step) {
  if (!(lo <= t_ref && t_ref <= hi)) throw Error(ErrorCode::invalid_argument, "reference instant outside the leaf");
  if (lo == hi) return {t_ref};
  if (!(step > 0.0)) throw Error(ErrorCode::invalid_argument, "process step must be positive");
  const double slack = 1e-9 * step;
  std::vector<double> below;
  for (long k = 1;; ++k) {
    const double t = t_ref - static_cast<double>(k) * step;
    if (t <= lo + slack) break;
    below.push_back(t);
  }
  std::vector<double> grid;
  if (t_ref > lo) grid.push_back(lo);
  grid.insert(grid.end(), below.rbegin(), below.rend());
  grid.push_back(t_ref);
  for (long k = 1;; ++k) {
    const double t = t_ref + static_cast<double>(k) * step;
    if (t >= hi - slack) break;
    grid.push_back(t);
  }
  if (t_ref < hi) grid.push_back(hi);
  return grid;
}

RemodelingProcess integrate_generator(std::span<const double> grid, std::span<const EvolutionTangent> theta,
                                      std::size_t ref_index) {
  if (grid.empty() || grid.size() != theta.size() || ref_index >= grid.size()) {
    throw Error(ErrorCode::invalid_argument, "generator samples do not match the grid");
  }
  RemodelingProcess process;
  process.t_ref = grid[ref_index];
  process.ref_index = ref_index;
  process.grid.assign(grid.begin(), grid.end());
  process.theta_used.assign(theta.begin(), theta.end());
  process.P_samples.assign(grid.size(), Mat3::Identity());

  for (std::size_t i = ref_index; i + 1 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    const Mat3 mid = lagrange_theta(grid, theta, i, grid[i] + 0.5 * h);
    process.P_samples[i + 1] = rk4_step(process.P_samples[i], h, theta[i].theta, mid, theta[i + 1].theta);
    check_det(process.P_samples[i + 1], grid[i + 1]);
  }
  for (std::size_t i = ref_index; i > 0; --i) {
    const double h = grid[i - 1] - grid[i];
    const Mat3 mid = lagrange_theta(grid, theta, i - 1, grid[i] + 0.5 * h);
    process.P_samples[i - 1] = rk4_step(process.P_samples[i], h, theta[i].theta, mid, theta[i - 1].theta);
    check_det(process.P_samples[i - 1], grid[i - 1]);
  }
  return process;
}

RemodelingProcess integrate_process(const ConstitutiveModel& model, const Leaf& leaf, double t_ref,
                                    const SolverConfig& cfg, std::optional<double> step, unsigned threads) {
  if (!leaf.is_remodeling()) throw Error(ErrorCode::not_remodeling, "leaf is an aging instant");
  const double h = step.value_or(leaf.grid_spacing);
  const std::vector<double> grid = process_grid(leaf.t_lo, leaf.t_hi, t_ref, h);
  const std::size_t ref_index = static_cast<std::size_t>(std::find(grid.begin(), grid.end(), t_ref) - grid.begin());

  std::vector<FibreResult> fibres(grid.size());
  parallel_for(
      grid.size(), [&](std::size_t i) { fibres[i] = evolution_fibre(model, grid[i], cfg); }, threads);

  std::vector<EvolutionTangent> theta;
  theta.reserve(grid.size());
  for (const auto& fibre : fibres) {
    if (!fibre.remodeling_direction) {
      throw Error(ErrorCode::not_remodeling, "no remodeling direction at t = " + std::to_string(fibre.t));
    }
    theta.push_back(*fibre.remodeling_direction);
  }
  return integrate_generator(grid, theta, ref_index);
}

double arrow_residual(const ConstitutiveModel& model, const JetArrow& arrow, std::span<const Mat3> frames) {
  double worst = 0.0;
  for (const Mat3& F : frames) {
    const Eigen::VectorXd target = model.evaluate(arrow.t_tgt, F);
    const Eigen::VectorXd moved = model.evaluate(arrow.t_src, F * arrow.P);
    worst = std::max(worst, (moved - target).norm() / (1.0 + target.norm()));
  }
  return worst;
}

double isomorphism_residual(const ConstitutiveModel& model, const RemodelingProcess& process, int n_frames,
                            std::uint64_t seed) {
  const std::vector<Mat3> frames = sample_frames(n_frames, seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < process.grid.size(); ++i) {
    worst = std::max(worst, arrow_residual(model, process.arrow(i), frames));
  }
  return worst;
}

std::vector<EvolutionTangent> conjugate_symmetry(std::span<const EvolutionTangent> basis, const JetArrow& arrow) {
  if (!is_numerically_invertible(arrow.P)) throw Error(ErrorCode::singular_matrix, "arrow jet is singular");
  const Mat3 inverse = arrow.P.inverse();
  std::vector<EvolutionTangent> out;
  out.reserve(basis.size());
  for (const auto& element : basis) {
    if (element.lambda != 0.0) {
      throw Error(ErrorCode::invalid_argument, "symmetry elements must have lambda = 0");
    }
    out.push_back({0.0, arrow.P * element.theta * inverse});
  }
  return out;
}

double cocycle_defect(const ConstitutiveModel& model, double z, double r, double t, const SolverConfig& cfg,
                      double step, unsigned threads) {
  if (!(z < r && r < t)) throw Error(ErrorCode::invalid_argument, "cocycle triple must satisfy z < r < t");
  const auto span_leaf = [](double lo, double hi) {
    Leaf leaf;
    leaf.kind = LeafKind::remodeling_interval;
    leaf.t_lo = lo;
    leaf.t_hi = hi;
    return leaf;
  };
  const RemodelingProcess from_z_to_t = integrate_process(model, span_leaf(z, t), z, cfg, step, threads);
  const RemodelingProcess from_z_to_r = integrate_process(model, span_leaf(z, r), z, cfg, step, threads);
  const RemodelingProcess from_r_to_t = integrate_process(model, span_leaf(r, t), r, cfg, step, threads);
  // P_z(t) = P_z(r) P_r(t): the arrow t -> z factors through r.
  const Mat3 direct = from_z_to_t.P_samples.back();
  const Mat3 composed = from_z_to_r.P_samples.back() * from_r_to_t.P_samples.back();
  return (direct - composed).cwiseAbs().maxCoeff();
}

double cocycle_check(const ConstitutiveModel& model, const Leaf& leaf, const SolverConfig& cfg,
                     std::optional<double> step, std::span<const std::array<double, 3>> triples, unsigned threads) {
  if (!leaf.is_remodeling()) throw Error(ErrorCode::not_remodeling, "leaf is an aging instant");
  const double length = leaf.t_hi - leaf.t_lo;
  if (!(length > 0.0)) return 0.0;
  const double h = step.value_or(leaf.grid_spacing);
  static constexpr std::array<std::array<double, 3>, 3> kDefaultFractions{{
      {0.0, 1.0 / 3.0, 2.0 / 3.0},
      {0.0, 0.5, 1.0},
      {0.25, 0.5, 0.75},
  }};
  std::vector<std::array<double, 3>> chosen(triples.begin(), triples.end());
  if (chosen.empty()) {
    for (const auto& f : kDefaultFractions) {
      chosen.push_back({leaf.t_lo + f[0] * length, leaf.t_lo + f[1] * length, leaf.t_lo + f[2] * length});
    }
  }
  double worst = 0.0;
  for (const auto& [z, r, t] : chosen) {
    worst = std::max(worst, cocycle_defect(model, z, r, t, cfg, h, threads));
  }
  return worst;
}

}  // namespace evolve
