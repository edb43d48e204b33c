#pragma once

#include "binrec/ensembles.hpp"
#include "binrec/recovery.hpp"
#include "binrec/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace binrec {

struct ExperimentConfig {
  Index N = 100;
  std::vector<double> k_fractions;
  std::vector<double> m_fractions;
  Index trials = 25;
  /// m, N and seed are filled in per trial.
  EnsembleConfig ensemble;
  std::vector<Program> programs{Program::box_bp};
  double success_tol = 1e-4;
  std::uint64_t master_seed = 0;
  /// Also solve from b' = A(1 - x0) with the same matrix and count
  /// simultaneous successes and failures.
  bool record_simultaneous = false;
  /// Adds noise of this norm to b; robust_box_bp then uses eta = noise_eps.
  std::optional<double> noise_eps;
  /// Worker threads; empty means BINREC_THREADS or the machine parallelism.
  std::optional<unsigned> threads;

  /// Throws ConfigError on invalid settings.
  void validate() const;

  Index k_at(std::size_t i) const;
  Index m_at(std::size_t j) const;

  /// N = 100, fractions 0.05, 0.10, ..., 1.0, 10 trials.
  static ExperimentConfig ci_preset();
  /// N = 500, fractions 0.01, ..., 1.0, 25 trials.
  static ExperimentConfig paper_scale_preset();
};

/// Evenly spaced fractions step, 2 step, ..., 1.
std::vector<double> fraction_grid(double step);

struct TrialRecord {
  Index N = 0;
  Index m = 0;
  Index k = 0;
  Index trial = 0;
  Program program = Program::box_bp;
  EnsembleKind ensemble = EnsembleKind::gaussian;
  double mu = 0.0;
  std::uint64_t seed = 0;
  bool success = false;
  bool both = false;
  bool neither = false;
  double l2_error = 0.0;  // NaN when no solution was produced
  SolveStatus status = SolveStatus::optimal;
};

struct CellStats {
  Index k = 0;
  Index m = 0;
  Index trials = 0;
  /// Indexed like ExperimentConfig::programs.
  std::vector<Index> successes;
  std::vector<Index> both_count;
  std::vector<Index> neither_count;
  std::vector<double> mean_error;
};

struct PhaseDiagram {
  ExperimentConfig config;
  /// Row-major over (k index, m index).
  std::vector<CellStats> cells;
  /// Ordered by (k index, m index, trial, program).
  std::vector<TrialRecord> records;

  const CellStats& cell(std::size_t ki, std::size_t mj) const;
  /// Throws DomainError when the program was not run.
  std::size_t program_index(Program program) const;
  double success_rate(std::size_t ki, std::size_t mj, Program program) const;
};

/// Seed of trial t in cell (i, j).
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t ki, std::size_t mj, Index trial);

unsigned resolve_threads(std::optional<unsigned> requested);

PhaseDiagram run_phase_transition(const ExperimentConfig& config);

/// Rebuilds the cell statistics from per-trial records in CSV order.
PhaseDiagram diagram_from_records(const ExperimentConfig& config, std::vector<TrialRecord> records);

void write_csv(const PhaseDiagram& diagram, const std::filesystem::path& path);
std::vector<TrialRecord> read_csv(const std::filesystem::path& path);

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
/// results.csv -> results.config.json
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

std::string heatmap_svg(const PhaseDiagram& diagram, Program program);
void render_heatmap(const PhaseDiagram& diagram, Program program, const std::filesystem::path& path);

}  // namespace binrec
