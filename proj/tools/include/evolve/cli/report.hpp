#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evolve/evolution.hpp"
#include "evolve/foliation.hpp"
#include "evolve/flow.hpp"

namespace evolve::cli {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

struct ModelSource {
  std::string path;
  std::string bytes;
};

/// Reads the whole file; throws Error(io).
ModelSource read_model_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomically(const std::filesystem::path& path, std::string_view contents);

struct GridParameters {
  double t0 = 0.0;
  double t1 = 0.0;
  int grid = 0;
};

struct ProcessRecord {
  std::size_t leaf_index = 0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double t_ref = 0.0;
  double step = 0.0;
  std::size_t nodes = 0;
  double isomorphism_residual = 0.0;
  std::optional<double> cocycle_defect;
  std::optional<std::string> error;
  std::vector<double> grid;  // filled only when samples are requested
  std::vector<Mat3> P_samples;
};

struct Timings {
  double classify_seconds = 0.0;
  double process_seconds = 0.0;
};

/// JSON text, two-space indentation, fixed key order, trailing newline.
std::string fibre_json(const ModelSource& source, const ConstitutiveModel& model, const SolverConfig& cfg,
                       const FibreResult& fibre);

std::string classify_json(const ModelSource& source, const ConstitutiveModel& model, const SolverConfig& cfg,
                          const GridParameters& grid, const TimeClassification& classification,
                          const std::vector<Leaf>& leaves, const SmoothAgingVerdict& verdict,
                          const std::vector<ProcessRecord>& processes, const std::optional<Timings>& timings,
                          std::string_view command = "classify");

/// Header `t,pointwise_dim,sharp_dim,effective_sharp,sigma_min`, one row per grid instant.
std::string grid_csv(const TimeClassification& classification);

}  // namespace evolve::cli
