#include "evolve/foliation.hpp"

#include <algorithm>
#include <cmath>

#include "evolve/error.hpp"
#include "evolve/flow.hpp"
#include "evolve/parallel.hpp"

namespace evolve {

double TimeClassification::spacing() const {
  return grid.size() < 2 ? 0.0 : (t1 - t0) / static_cast<double>(grid.size() - 1);
}

bool TimeClassification::all_converged() const {
  return std::all_of(fibres.begin(), fibres.end(), [](const FibreResult& f) { return f.converged; });
}

std::vector<double> uniform_grid(double t0, double t1, int n_grid) {
  if (!(t0 < t1)) throw Error(ErrorCode::invalid_argument, "interval requires t0 < t1");
  if (n_grid < 2) throw Error(ErrorCode::invalid_argument, "grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(n_grid));
  const double denom = static_cast<double>(n_grid - 1);
  for (int i = 0; i < n_grid; ++i) {
    grid[i] = (static_cast<double>(n_grid - 1 - i) * t0 + static_cast<double>(i) * t1) / denom;
  }
  grid.front() = t0;
  grid.back() = t1;
  return grid;
}

std::vector<int> demote_spikes(std::span<const int> sharp) {
  std::vector<int> out(sharp.begin(), sharp.end());
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (sharp[i] != 1) continue;
    if (i == 0 || i + 1 == n) continue;  // runs touching the boundary stay
    if (sharp[i - 1] == 0 && sharp[i + 1] == 0) out[i] = 0;
  }
  return out;
}

TimeClassification classify_interval(const ConstitutiveModel& model, double t0, double t1, int n_grid,
                                     const SolverConfig& cfg, unsigned threads) {
  cfg.validate(model.output_dimension());
  TimeClassification out;
  out.t0 = t0;
  out.t1 = t1;
  out.grid = uniform_grid(t0, t1, n_grid);
  out.fibres.resize(out.grid.size());
  parallel_for(
      out.grid.size(), [&](std::size_t i) { out.fibres[i] = evolution_fibre(model, out.grid[i], cfg); }, threads);

  std::vector<int> sharp(out.grid.size());
  for (std::size_t i = 0; i < sharp.size(); ++i) sharp[i] = out.fibres[i].sharp_dim;
  out.effective_sharp = demote_spikes(sharp);
  return out;
}

const char* to_string(LeafKind kind) noexcept {
  return kind == LeafKind::remodeling_interval ? "remodeling" : "aging";
}

const char* to_string(Endpoint endpoint) noexcept {
  switch (endpoint) {
    case Endpoint::exact: return "exact";
    case Endpoint::grid_edge: return "grid_edge";
    case Endpoint::transition: return "transition";
  }
  return "?";
}

const char* to_string(MaximalityStatus status) noexcept {
  switch (status) {
    case MaximalityStatus::contained: return "contained";
    case MaximalityStatus::not_remodeling: return "not_remodeling";
    case MaximalityStatus::violation: return "violation";
  }
  return "?";
}

std::vector<Leaf> extract_leaves(const TimeClassification& classification) {
  const auto& grid = classification.grid;
  const auto& sharp = classification.effective_sharp;
  const std::size_t n = grid.size();
  const double h = classification.spacing();
  std::vector<Leaf> leaves;
  std::size_t i = 0;
  while (i < n) {
    Leaf leaf;
    leaf.grid_spacing = h;
    leaf.first_index = i;
    if (sharp[i] == 1) {
      std::size_t j = i;
      while (j + 1 < n && sharp[j + 1] == 1) ++j;
      leaf.kind = LeafKind::remodeling_interval;
      leaf.last_index = j;
      leaf.lo_end = i == 0 ? Endpoint::grid_edge : Endpoint::transition;
      leaf.hi_end = j + 1 == n ? Endpoint::grid_edge : Endpoint::transition;
      i = j + 1;
    } else {
      leaf.kind = LeafKind::aging_instant;
      leaf.last_index = i;
      ++i;
    }
    leaf.t_lo = grid[leaf.first_index];
    leaf.t_hi = grid[leaf.last_index];
    leaves.push_back(leaf);
  }
  return leaves;
}

SmoothAgingVerdict detect_smooth_aging(const TimeClassification& classification) {
  SmoothAgingVerdict verdict;
  const auto& fibres = classification.fibres;
  for (std::size_t i = 0; i < fibres.size(); ++i) {
    if (classification.effective_sharp[i] == 1) ++verdict.remodeling_instants;
    if (i > 0 && fibres[i].pointwise_dim != fibres[i - 1].pointwise_dim) {
      verdict.dimension_jumps.push_back(fibres[i].t);
    }
  }
  verdict.smooth_aging = !fibres.empty() && verdict.remodeling_instants == 0 && verdict.dimension_jumps.empty();
  if (verdict.smooth_aging) verdict.constant_fibre_dim = fibres.front().pointwise_dim;
  return verdict;
}

std::vector<MaximalityRecord> MaximalityVerdict::violations() const {
  std::vector<MaximalityRecord> out;
  for (const auto& r : records) {
    if (r.status == MaximalityStatus::violation) out.push_back(r);
  }
  return out;
}

MaximalityVerdict check_maximality(std::span<const Leaf> leaves, std::span<const Interval> candidates,
                                   const ConstitutiveModel& model, const SolverConfig& cfg,
                                   const MaximalityOptions& options) {
  if (options.points_per_candidate < 2) {
    throw Error(ErrorCode::invalid_argument, "maximality check needs at least 2 points per candidate");
  }
  MaximalityVerdict verdict;
  for (const Interval& candidate : candidates) {
    MaximalityRecord record;
    record.candidate = candidate;
    if (!(candidate.lo <= candidate.hi)) {
      throw Error(ErrorCode::invalid_argument, "candidate interval has lo > hi");
    }

    Leaf probe;
    probe.kind = LeafKind::remodeling_interval;
    probe.t_lo = candidate.lo;
    probe.t_hi = candidate.hi;
    probe.grid_spacing = (candidate.hi - candidate.lo) / static_cast<double>(options.points_per_candidate - 1);
    try {
      const RemodelingProcess process = integrate_process(model, probe, candidate.lo, cfg);
      record.residual = isomorphism_residual(model, process, options.verification_frames, cfg.seed);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::not_remodeling && e.code() != ErrorCode::near_singular_process) throw;
      record.status = MaximalityStatus::not_remodeling;
      record.note = e.what();
      verdict.records.push_back(record);
      continue;
    }
    if (!(record.residual <= cfg.residual_tol)) {
      record.status = MaximalityStatus::not_remodeling;
      record.note = "process verification residual " + std::to_string(record.residual) + " exceeds tolerance";
      verdict.records.push_back(record);
      continue;
    }

    record.status = MaximalityStatus::violation;
    record.note = "verified remodeling interval is not contained in any reported remodeling leaf";
    for (std::size_t k = 0; k < leaves.size(); ++k) {
      const Leaf& leaf = leaves[k];
      if (!leaf.is_remodeling()) continue;
      const double tol = 1e-9 * std::max({1.0, std::abs(leaf.t_lo), std::abs(leaf.t_hi)});
      if (candidate.lo >= leaf.t_lo - tol && candidate.hi <= leaf.t_hi + tol) {
        record.status = MaximalityStatus::contained;
        record.leaf_index = k;
        record.equals_leaf = std::abs(candidate.lo - leaf.t_lo) <= tol && std::abs(candidate.hi - leaf.t_hi) <= tol;
        record.note = record.equals_leaf ? "equals leaf" : "contained in leaf";
        break;
      }
    }
    verdict.records.push_back(record);
  }
  return verdict;
}

}  // namespace evolve
