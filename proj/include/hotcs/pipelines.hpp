#pragma once

#include "hotcs/datagen.hpp"
#include "hotcs/hot.hpp"
#include "hotcs/io.hpp"
#include "hotcs/priors.hpp"
#include "hotcs/rng.hpp"
#include "hotcs/solvers.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hotcs {

enum class SolverKind { Omp, Bp, Lasso };

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& s);

/// One solver invocation, fully described. Fields outside the selected
/// kind are ignored. Negative epsilon_rel / lambda_rel ask for noise-matched
/// values derived from the scenario SNR: ε = 10^(−snr/20)·‖y‖ and
/// λ = max(10^(−snr/20), 0.02)·‖Aᴴy‖_∞.
struct SolverConfig {
  SolverKind kind = SolverKind::Omp;
  Index max_atoms = 4;         // omp
  double residual_tol = 1e-6;  // omp
  double epsilon_rel = -1.0;   // bp, relative to ‖y‖
  double lambda_rel = 0.05;    // lasso, relative to ‖Aᴴy‖_∞
  int max_iters = 20000;       // bp / lasso inner-iteration budget
};

/// Dispatches to the configured solver. The OMP atom budget is clamped to
/// min(M, N) so small-ratio sweep cells stay runnable.
SolverResult run_solver(const SolverConfig& config, const CMatrix& dict,
                        const CVector& y, double snr_db);

/// Pipeline output: a CSV-ready table plus scalar summaries. Wall-clock
/// figures live only in `summary`; the table stays byte-reproducible.
struct PipelineReport {
  CsvTable table;
  std::map<std::string, double> summary;
  std::uint64_t seed = 0;
};

struct SweepGridConfig {
  std::vector<double> ratios{0.25, 0.35, 0.45, 0.55, 0.65, 0.75};
  std::vector<double> snrs_db{15.0, 20.0, 25.0, 30.0, 35.0, 40.0};
  Index trials = 1;
  double success_threshold = 0.1;  // cell succeeds when mean NMSE ≤ this
  Index steps_per_trial = 5;       // channel sources: steps per short trace
};

/// Runs fn(0..n-1) on up to `threads` workers. Work items must be
/// independent; results should be written to per-index slots so the
/// schedule cannot affect output.
void parallel_for(Index n, Index threads, const std::function<void(Index)>& fn);

/// Adds noise drawn from rng, rescaled so the empirical per-trial SNR is
/// exactly snr_db. Zero clean vector is returned unchanged.
CVector add_measurement_noise(const CVector& clean, double snr_db, Rng& rng,
                              bool complex_noise);

/// Iterated self-referencing: round 0 runs the weak solver against the prior
/// dictionary; each later round rebuilds the transform around the previous
/// reconstruction and re-solves the same measurements.
/// CSV columns: round,nmse,corr.
PipelineReport boost_weak_learner(const CVector& signal, const MeasurementModel& model,
                                  const PriorTransform& prior, Index rounds,
                                  const SolverConfig& weak, std::uint64_t seed);

/// One weak reconstruction steers the transform; a stronger solver then
/// sweeps its hyperparameter on both the prior and steered dictionaries.
/// The sweep value maps to epsilon_rel (bp), lambda_rel (lasso), or
/// max_atoms (omp). reference_override substitutes for the weak
/// reconstruction when present (diagnostics and tests).
/// CSV columns: hyper,nmse_prior,nmse_hot,weak_nmse.
PipelineReport weak_guides_strong(const CVector& signal, const MeasurementModel& model,
                                  const PriorTransform& prior, const SolverConfig& weak,
                                  const SolverConfig& strong,
                                  const std::vector<double>& hyper_sweep,
                                  std::uint64_t seed,
                                  const std::optional<CVector>& reference_override = {});

/// Tracks a signal sequence with fresh measurements each step. The steered
/// arm uses its own previous estimate as reference; the baseline arm stays
/// in the prior domain. Both arms share each step's Φ_t and noise. A zero
/// previous estimate falls back to the prior domain for that step.
/// CSV columns: step,nmse_prior,corr_prior,nmse_hot,corr_hot,ref_corr,fallback.
PipelineReport sequential_estimation(const std::vector<CVector>& trace, double ratio,
                                     double snr_db, const PriorTransform& prior,
                                     const SolverConfig& solver, std::uint64_t seed);

/// Success-region sweep over (ratio, SNR) cells. Channel sources run short
/// tracking traces and average steps after the first; vector sources draw a
/// fresh signal per trial and steer via an internal weak OMP pass.
/// CSV columns: ratio,snr_db,nmse_prior,nmse_hot,corr_prior,corr_hot,
///              success_prior,success_hot,fail_prior,fail_hot.
PipelineReport phase_transition_sweep(const SignalSource& source,
                                      const SweepGridConfig& grid,
                                      const PriorTransform& prior,
                                      const SolverConfig& solver, std::uint64_t seed,
                                      Index threads = 1);

/// Column-wise transform coding: one shared transform steered by column
/// group means, global top-⌈keep·total⌉ magnitude selection, inverse, NMSE
/// per arm. CSV columns: keep_fraction,nmse_prior,nmse_hot.
PipelineReport image_topk_compression(const RMatrix& image, const PriorTransform& prior,
                                      Index num_refs,
                                      const std::vector<double>& keep_fractions);

/// Per-column compressed sensing across a (ratio, SNR) grid with a shared
/// steered transform built from column group means. Same CSV layout as
/// phase_transition_sweep.
PipelineReport image_cs_reconstruction(const RMatrix& image, const PriorTransform& prior,
                                       Index num_refs, const SweepGridConfig& grid,
                                       const SolverConfig& solver, std::uint64_t seed,
                                       Index threads = 1);

}  // namespace hotcs
