#include "evolve/cli/report.hpp"

#include <cstdio>

#include "evolve/cli/cli.hpp"
#include "json.hpp"

namespace evolve::cli {

namespace {

using json = nlohmann::ordered_json;

json matrix(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

json tangent(const EvolutionTangent& v) { return {{"lambda", v.lambda}, {"theta", matrix(v.theta)}}; }

json header(std::string_view command, const ModelSource& source, const ConstitutiveModel& model) {
  json doc;
  doc["tool"] = {{"name", "evolve"}, {"version", version()}};
  doc["command"] = command;
  doc["model"] = {{"label", model.label()},
                  {"file", source.path},
                  {"fnv1a64", hex64(fnv1a64(source.bytes))},
                  {"output_dimension", model.output_dimension()}};
  return doc;
}

json solver(const SolverConfig& cfg) {
  return {{"samples", cfg.n_samples_initial},   {"max_samples", cfg.n_samples_max},
          {"rank_tol", cfg.rank_tol_rel},       {"residual_tol", cfg.residual_tol},
          {"seed", cfg.seed},                   {"frame_det_min", cfg.frame_det_min},
          {"frame_cond_max", cfg.frame_cond_max}};
}

json smallest_sigmas(const FibreResult& f) {
  return {f.singular_values[9], f.singular_values[8], f.singular_values[7]};
}

json fibre_record(const FibreResult& f) {
  json r;
  r["t"] = f.t;
  r["pointwise_dim"] = f.pointwise_dim;
  r["sharp_dim"] = f.sharp_dim;
  r["symmetry_dim"] = f.symmetry_dim();
  r["sigma_smallest"] = smallest_sigmas(f);
  r["samples_used"] = f.samples_used;
  r["rounds"] = f.rounds;
  r["converged"] = f.converged;
  r["residual"] = f.residual;
  return r;
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

std::string fibre_json(const ModelSource& source, const ConstitutiveModel& model, const SolverConfig& cfg,
                       const FibreResult& fibre) {
  json doc = header("fibre", source, model);
  json config = solver(cfg);
  config["t"] = fibre.t;
  doc["config"] = config;

  json record = fibre_record(fibre);
  record["singular_values"] = fibre.singular_values;
  record["remodeling_direction"] = fibre.remodeling_direction ? tangent(*fibre.remodeling_direction) : json(nullptr);
  json basis = json::array();
  for (const auto& s : fibre.symmetry_basis) basis.push_back(matrix(s.theta));
  record["symmetry_basis"] = basis;
  doc["fibre"] = record;
  return dump(doc);
}

std::string classify_json(const ModelSource& source, const ConstitutiveModel& model, const SolverConfig& cfg,
                          const GridParameters& grid, const TimeClassification& classification,
                          const std::vector<Leaf>& leaves, const SmoothAgingVerdict& verdict,
                          const std::vector<ProcessRecord>& processes, const std::optional<Timings>& timings,
                          std::string_view command) {
  json doc = header(command, source, model);
  json config = solver(cfg);
  config["t0"] = grid.t0;
  config["t1"] = grid.t1;
  config["grid"] = grid.grid;
  doc["config"] = config;

  json instants = json::array();
  for (std::size_t i = 0; i < classification.fibres.size(); ++i) {
    json r = fibre_record(classification.fibres[i]);
    r["effective_sharp"] = classification.effective_sharp[i];
    instants.push_back(std::move(r));
  }
  doc["all_converged"] = classification.all_converged();
  doc["instants"] = std::move(instants);

  json leaf_list = json::array();
  for (const Leaf& leaf : leaves) {
    leaf_list.push_back({{"kind", to_string(leaf.kind)},
                         {"t_lo", leaf.t_lo},
                         {"t_hi", leaf.t_hi},
                         {"lo_end", to_string(leaf.lo_end)},
                         {"hi_end", to_string(leaf.hi_end)},
                         {"first_index", leaf.first_index},
                         {"last_index", leaf.last_index},
                         {"boundary_uncertain", leaf.boundary_uncertain()}});
  }
  doc["leaves"] = std::move(leaf_list);

  doc["smooth_aging"] = {
      {"verdict", verdict.smooth_aging},
      {"constant_fibre_dim", verdict.constant_fibre_dim ? json(*verdict.constant_fibre_dim) : json(nullptr)},
      {"dimension_jumps", verdict.dimension_jumps},
      {"remodeling_instants", verdict.remodeling_instants}};

  json process_list = json::array();
  for (const ProcessRecord& p : processes) {
    json r;
    r["leaf_index"] = p.leaf_index;
    r["t_lo"] = p.t_lo;
    r["t_hi"] = p.t_hi;
    r["t_ref"] = p.t_ref;
    r["step"] = p.step;
    r["nodes"] = p.nodes;
    if (p.error) {
      r["error"] = *p.error;
    } else {
      r["isomorphism_residual"] = p.isomorphism_residual;
      r["cocycle_defect"] = p.cocycle_defect ? json(*p.cocycle_defect) : json(nullptr);
    }
    if (!p.grid.empty()) {
      json samples = json::array();
      for (std::size_t i = 0; i < p.grid.size(); ++i) samples.push_back({{"t", p.grid[i]}, {"P", matrix(p.P_samples[i])}});
      r["samples"] = std::move(samples);
    }
    process_list.push_back(std::move(r));
  }
  doc["processes"] = std::move(process_list);

  if (timings) {
    doc["timings"] = {{"classify_seconds", timings->classify_seconds},
                      {"process_seconds", timings->process_seconds}};
  }
  return dump(doc);
}

std::string grid_csv(const TimeClassification& classification) {
  std::string out = "t,pointwise_dim,sharp_dim,effective_sharp,sigma_min\n";
  char line[128];
  for (std::size_t i = 0; i < classification.fibres.size(); ++i) {
    const FibreResult& f = classification.fibres[i];
    std::snprintf(line, sizeof line, "%.17g,%d,%d,%d,%.17g\n", f.t, f.pointwise_dim, f.sharp_dim,
                  classification.effective_sharp[i], f.singular_values[9]);
    out += line;
  }
  return out;
}

}  // namespace evolve::cli
