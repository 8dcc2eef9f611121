#include "evolve/cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

#include "CLI11.hpp"
#include "evolve/cli/report.hpp"
#include "evolve/error.hpp"
#include "verify.hpp"

namespace evolve::cli {

namespace {

struct Options {
  std::string model;
  double t = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  int grid = 201;
  int samples = 20;
  int max_samples = 320;
  double rank_tol = 1e-9;
  std::uint64_t seed = 42;
  std::string out;
  std::string csv;
  std::optional<std::size_t> leaf;
  std::optional<double> t_ref;
  bool timings = false;
  bool samples_in_report = false;
};

class Failure : public std::runtime_error {
 public:
  Failure(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::not_remodeling:
      return exit_usage;
    case ErrorCode::near_singular_process:
      return exit_verification;
    default:
      return exit_model;
  }
}

SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  cfg.n_samples_initial = o.samples;
  cfg.n_samples_max = o.max_samples;
  cfg.rank_tol_rel = o.rank_tol;
  cfg.seed = o.seed;
  return cfg;
}

void add_solver_flags(CLI::App& app, Options& o) {
  app.add_option("--samples", o.samples, "Initial frame count")->capture_default_str();
  app.add_option("--max-samples", o.max_samples, "Frame count cap for adaptive doubling")->capture_default_str();
  app.add_option("--rank-tol", o.rank_tol, "Relative singular-value threshold")->capture_default_str();
  app.add_option("--seed", o.seed, "Frame sampling seed")->capture_default_str();
}

void add_interval_flags(CLI::App& app, Options& o) {
  app.add_option("--t0", o.t0, "Interval start")->required();
  app.add_option("--t1", o.t1, "Interval end")->required();
  app.add_option("--grid", o.grid, "Grid points")->capture_default_str();
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
  } else {
    write_atomically(o.out, text);
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ProcessRecord process_leaf(const ConstitutiveModel& model, const std::vector<Leaf>& leaves, std::size_t index,
                           std::optional<double> t_ref, const SolverConfig& cfg, bool keep_samples) {
  const Leaf& leaf = leaves[index];
  ProcessRecord record;
  record.leaf_index = index;
  record.t_lo = leaf.t_lo;
  record.t_hi = leaf.t_hi;
  record.t_ref = t_ref.value_or(leaf.t_lo);
  record.step = leaf.grid_spacing;
  try {
    const RemodelingProcess process = integrate_process(model, leaf, record.t_ref, cfg);
    record.nodes = process.grid.size();
    record.isomorphism_residual = isomorphism_residual(model, process, 20, cfg.seed);
    if (leaf.t_hi > leaf.t_lo) record.cocycle_defect = cocycle_check(model, leaf, cfg);
    if (keep_samples) {
      record.grid = process.grid;
      record.P_samples = process.P_samples;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::not_remodeling && e.code() != ErrorCode::near_singular_process) throw;
    record.error = e.what();
  }
  return record;
}

bool record_verified(const ProcessRecord& r, const SolverConfig& cfg) {
  constexpr double cocycle_tol = 1e-6;
  return !r.error && r.isomorphism_residual <= std::max(cfg.residual_tol, 1e-6) &&
         (!r.cocycle_defect || *r.cocycle_defect <= cocycle_tol);
}

struct Loaded {
  ModelSource source;
  ConstitutiveModel model;
};

Loaded load(const Options& o) {
  ModelSource source = read_model_file(o.model);
  ConstitutiveModel model = parse_model(source.bytes, std::filesystem::path(o.model).stem().string());
  return {std::move(source), std::move(model)};
}

int run_fibre(const Options& o, std::ostream& out, std::ostream& err) {
  const Loaded loaded = load(o);
  const SolverConfig cfg = solver_config(o);
  const FibreResult fibre = evolution_fibre(loaded.model, o.t, cfg);
  emit(o, out, fibre_json(loaded.source, loaded.model, cfg, fibre));
  if (!fibre.converged) {
    err << "evolve: fibre dimension did not stabilise within " << cfg.n_samples_max << " frames\n";
    return exit_nonconvergent;
  }
  return exit_ok;
}

int run_classify(const Options& o, std::ostream& out, std::ostream& err, bool process_command) {
  const Loaded loaded = load(o);
  const SolverConfig cfg = solver_config(o);
  const auto start = std::chrono::steady_clock::now();
  const TimeClassification classification = classify_interval(loaded.model, o.t0, o.t1, o.grid, cfg);
  const std::vector<Leaf> leaves = extract_leaves(classification);
  const SmoothAgingVerdict verdict = detect_smooth_aging(classification);
  Timings timings;
  timings.classify_seconds = seconds_since(start);

  const auto process_start = std::chrono::steady_clock::now();
  std::vector<ProcessRecord> processes;
  if (process_command) {
    std::size_t index = 0;
    if (o.leaf) {
      index = *o.leaf;
      if (index >= leaves.size()) {
        throw Failure(exit_usage, "--leaf " + std::to_string(index) + " out of range (" +
                                      std::to_string(leaves.size()) + " leaves)");
      }
    } else {
      const auto it = std::find_if(leaves.begin(), leaves.end(), [](const Leaf& l) { return l.is_remodeling(); });
      if (it == leaves.end()) throw Failure(exit_verification, "no remodeling leaf on the interval");
      index = static_cast<std::size_t>(it - leaves.begin());
    }
    if (!leaves[index].is_remodeling()) {
      throw Failure(exit_usage, "leaf " + std::to_string(index) + " is an aging instant");
    }
    if (o.t_ref && !(leaves[index].t_lo <= *o.t_ref && *o.t_ref <= leaves[index].t_hi)) {
      throw Failure(exit_usage, "--t-ref lies outside leaf " + std::to_string(index));
    }
    processes.push_back(process_leaf(loaded.model, leaves, index, o.t_ref, cfg, o.samples_in_report));
  } else {
    for (std::size_t k = 0; k < leaves.size(); ++k) {
      if (leaves[k].is_remodeling()) processes.push_back(process_leaf(loaded.model, leaves, k, std::nullopt, cfg, false));
    }
  }
  timings.process_seconds = seconds_since(process_start);

  const std::string report =
      classify_json(loaded.source, loaded.model, cfg, {o.t0, o.t1, o.grid}, classification, leaves, verdict, processes,
                    o.timings ? std::optional<Timings>(timings) : std::nullopt, process_command ? "process" : "classify");
  emit(o, out, report);
  if (!o.csv.empty()) write_atomically(o.csv, grid_csv(classification));

  if (!classification.all_converged()) {
    err << "evolve: some instants did not reach a stable fibre dimension\n";
    return exit_nonconvergent;
  }
  if (process_command) {
    const ProcessRecord& r = processes.front();
    if (!record_verified(r, cfg)) {
      err << "evolve: process verification failed on leaf " << r.leaf_index << "\n";
      return exit_verification;
    }
  }
  return exit_ok;
}

int run_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const SolverConfig cfg = solver_config(o);
  std::optional<ConstitutiveModel> extra;
  if (!o.model.empty()) extra = load(o).model;
  const int failures = run_verify_suite(extra, cfg, out);
  if (failures > 0) {
    err << "evolve: " << failures << " verification check(s) failed\n";
    return exit_verification;
  }
  return exit_ok;
}

}  // namespace

const char* version() noexcept { return EVOLVE_VERSION; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Material evolution analysis at a fixed particle", "evolve"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  CLI::App* fibre = app.add_subcommand("fibre", "Null-space analysis at one instant");
  fibre->add_option("--model", o.model, "Model file (JSON)")->required();
  fibre->add_option("--t", o.t, "Instant")->required();
  add_solver_flags(*fibre, o);
  fibre->add_option("--out", o.out, "Write the JSON report here");

  CLI::App* classify = app.add_subcommand("classify", "Classify a time interval into leaves");
  classify->add_option("--model", o.model, "Model file (JSON)")->required();
  add_interval_flags(*classify, o);
  add_solver_flags(*classify, o);
  classify->add_option("--out", o.out, "Write the JSON report here");
  classify->add_option("--csv", o.csv, "Write per-instant CSV here");
  classify->add_flag("--timings", o.timings, "Include wall-clock timings in the report");

  CLI::App* process = app.add_subcommand("process", "Integrate and verify a remodeling process");
  process->add_option("--model", o.model, "Model file (JSON)")->required();
  add_interval_flags(*process, o);
  add_solver_flags(*process, o);
  process->add_option("--leaf", o.leaf, "Leaf index (default: first remodeling leaf)");
  process->add_option("--t-ref", o.t_ref, "Reference instant (default: leaf start)");
  process->add_option("--out", o.out, "Write the JSON report here");
  process->add_option("--csv", o.csv, "Write per-instant CSV here");
  process->add_flag("--timings", o.timings, "Include wall-clock timings in the report");
  process->add_flag("--samples-out", o.samples_in_report, "Include P(t) samples in the report");

  CLI::App* verify = app.add_subcommand("verify", "Run the built-in property suite");
  verify->add_option("--model", o.model, "Also check this model file");
  add_solver_flags(*verify, o);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    if (fibre->parsed()) return run_fibre(o, out, err);
    if (classify->parsed()) return run_classify(o, out, err, false);
    if (process->parsed()) return run_classify(o, out, err, true);
    return run_verify(o, out, err);
  } catch (const Failure& e) {
    err << "evolve: " << e.what() << "\n";
    return e.code();
  } catch (const Error& e) {
    err << "evolve: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "evolve: " << e.what() << "\n";
    return exit_model;
  }
}

}  // namespace evolve::cli
