#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evolve/evolution.hpp"
#include "evolve/model.hpp"

namespace evolve {

/// Fibre analysis on a uniform grid of [t0, t1].
struct TimeClassification {
  double t0 = 0.0;
  double t1 = 0.0;
  std::vector<double> grid;
  std::vector<FibreResult> fibres;
  /// sharp_dim after isolated-spike demotion; never exceeds the pointwise value.
  std::vector<int> effective_sharp;

  double spacing() const;
  bool all_converged() const;
};

/// Uniform grid t_i = ((n-1-i) t0 + i t1) / (n-1); endpoints are exact.
std::vector<double> uniform_grid(double t0, double t1, int n_grid);

/// Demotes every maximal run of ones of length 1 whose existing neighbours
/// are zero, except runs touching either end of the sequence.
std::vector<int> demote_spikes(std::span<const int> sharp);

/// Classifies every grid instant (in parallel, `threads` = 0 uses the
/// default worker count). Requires t0 < t1 and n_grid >= 2.
TimeClassification classify_interval(const ConstitutiveModel& model, double t0, double t1, int n_grid,
                                     const SolverConfig& cfg = {}, unsigned threads = 0);

enum class LeafKind { remodeling_interval, aging_instant };

/// How a leaf endpoint was determined. `grid_edge`: the leaf reaches the end
/// of the analysed window and may continue beyond it. `transition`: an aging
/// instant is one grid cell away, so the true boundary lies inside that cell.
enum class Endpoint { exact, grid_edge, transition };

const char* to_string(LeafKind kind) noexcept;
const char* to_string(Endpoint endpoint) noexcept;

struct Leaf {
  LeafKind kind = LeafKind::aging_instant;
  double t_lo = 0.0;
  double t_hi = 0.0;
  Endpoint lo_end = Endpoint::exact;
  Endpoint hi_end = Endpoint::exact;
  std::size_t first_index = 0;
  std::size_t last_index = 0;
  double grid_spacing = 0.0;

  bool is_remodeling() const { return kind == LeafKind::remodeling_interval; }
  bool boundary_uncertain() const { return lo_end == Endpoint::transition || hi_end == Endpoint::transition; }
};

/// Maximal runs of effective_sharp = 1 become remodeling intervals; every
/// other grid instant is an aging singleton. Ordered by time.
std::vector<Leaf> extract_leaves(const TimeClassification& classification);

struct SmoothAgingVerdict {
  bool smooth_aging = false;
  std::optional<int> constant_fibre_dim;
  /// Instants where pointwise_dim differs from the previous grid instant.
  std::vector<double> dimension_jumps;
  /// Grid instants with effective_sharp = 1.
  std::size_t remodeling_instants = 0;
};

SmoothAgingVerdict detect_smooth_aging(const TimeClassification& classification);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

enum class MaximalityStatus {
  contained,        // verified remodeling interval inside a reported leaf
  not_remodeling,   // no remodeling process integrates on the candidate
  violation,        // verified remodeling interval not inside any leaf
};

const char* to_string(MaximalityStatus status) noexcept;

struct MaximalityRecord {
  Interval candidate;
  MaximalityStatus status = MaximalityStatus::not_remodeling;
  std::optional<std::size_t> leaf_index;
  bool equals_leaf = false;
  double residual = 0.0;
  std::string note;
};

struct MaximalityVerdict {
  std::vector<MaximalityRecord> records;

  std::vector<MaximalityRecord> violations() const;
  bool passed() const { return violations().empty(); }
};

struct MaximalityOptions {
  int points_per_candidate = 21;
  int verification_frames = 20;
};

/// For each candidate on which a remodeling process integrates and verifies
/// (isomorphism residual <= cfg.residual_tol), requires containment in one
/// reported remodeling leaf.
MaximalityVerdict check_maximality(std::span<const Leaf> leaves, std::span<const Interval> candidates,
                                   const ConstitutiveModel& model, const SolverConfig& cfg = {},
                                   const MaximalityOptions& options = {});

}  // namespace evolve
