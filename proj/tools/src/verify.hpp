#pragma once

#include <iosfwd>
#include <optional>

#include "evolve/evolution.hpp"
#include "evolve/model.hpp"

namespace evolve::cli {

/// Prints one PASS/FAIL line per check and returns the number of failures.
/// The zoo is always checked; `extra` adds the model-agnostic checks for a
/// user model.
int run_verify_suite(const std::optional<ConstitutiveModel>& extra, const SolverConfig& cfg, std::ostream& out);

}  // namespace evolve::cli
