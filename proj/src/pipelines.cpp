#include "hotcs/pipelines.hpp"

#include "hotcs/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace hotcs {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool has_imag(const CVector& v) { return v.imag().cwiseAbs().maxCoeff() != 0.0; }
bool has_imag(const CMatrix& m) { return m.imag().cwiseAbs().maxCoeff() != 0.0; }

CMatrix draw_sensing(Rng& rng, Index m, Index n, bool complex_domain) {
  return complex_domain ? rng.cgaussian_sensing(m, n) : rng.gaussian_sensing(m, n);
}

Index measurement_count(double ratio, Index n) {
  if (!(ratio > 0.0) || ratio > 1.0) {
    throw std::invalid_argument("ratio must lie in (0, 1]");
  }
  const Index m = static_cast<Index>(std::llround(ratio * static_cast<double>(n)));
  return std::clamp<Index>(m, 1, n);
}

void validate_grid(const SweepGridConfig& grid) {
  if (grid.ratios.empty() || grid.snrs_db.empty()) {
    throw std::invalid_argument("sweep grid: empty ratio or snr axis");
  }
  for (double r : grid.ratios) {
    if (!(r > 0.0) || r > 1.0) throw std::invalid_argument("sweep grid: ratio outside (0, 1]");
  }
  if (grid.trials < 1) throw std::invalid_argument("sweep grid: trials must be >= 1");
  if (grid.steps_per_trial < 1) {
    throw std::invalid_argument("sweep grid: steps_per_trial must be >= 1");
  }
  if (grid.success_threshold < 0.0) {
    throw std::invalid_argument("sweep grid: negative success threshold");
  }
}

/// Steered transform from a single reconstruction, or nothing when the
/// reference is unusable (zero or non-finite estimates).
std::optional<PosteriorTransform> try_steer(const PriorTransform& prior, const CVector& ref) {
  if (ref.size() != prior.dim() || ref.norm() == 0.0) return std::nullopt;
  try {
    return construct_hot(prior, ref);
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

struct SeqStep {
  double nmse_p = 0.0, corr_p = 0.0;
  double nmse_h = 0.0, corr_h = 0.0;
  double ref_corr = 0.0;
  bool fallback = false;
  bool unconv_p = false, unconv_h = false;
};

struct SeqOutcome {
  std::vector<SeqStep> steps;
  double wall_p = 0.0, wall_h = 0.0;
};

/// Shared engine for tracking runs: fresh Φ_t and noise per step, both arms
/// solving the same measurements. The steered arm references its own
/// previous estimate; step 0 and zero-reference steps reuse the baseline
/// solve (identical work, charged to both walls).
SeqOutcome run_sequential_core(const std::vector<CVector>& trace, Index m, double snr_db,
                               const PriorTransform& prior, const SolverConfig& solver,
                               Rng& rng, bool complex_domain) {
  const Index n = prior.dim();
  SeqOutcome out;
  out.steps.reserve(trace.size());
  CVector prev;

  for (std::size_t t = 0; t < trace.size(); ++t) {
    const CVector& x = trace[t];
    const CMatrix phi = draw_sensing(rng, m, n, complex_domain);
    const CVector y = add_measurement_noise(phi * x, snr_db, rng, complex_domain);

    SeqStep step;

    const auto tick_p = Clock::now();
    const CMatrix dict_p = phi * prior.matrix();
    const SolverResult res_p = run_solver(solver, dict_p, y, snr_db);
    const CVector est_p = prior.synthesize(res_p.coeffs);
    const double dt_p = seconds_since(tick_p);
    out.wall_p += dt_p;

    CVector est_h;
    bool steered = false;
    if (t > 0) {
      step.ref_corr = correlation(prev, x);
      const auto tick_h = Clock::now();
      std::optional<PosteriorTransform> post = try_steer(prior, prev);
      if (post) {
        const CMatrix dict_h = post->sensing_matrix(phi);
        const SolverResult res_h = run_solver(solver, dict_h, y, snr_db);
        est_h = post->synthesize(res_h.coeffs);
        step.unconv_h = !res_h.converged;
        steered = true;
      }
      out.wall_h += seconds_since(tick_h);
    }
    if (!steered) {
      step.fallback = t > 0;
      est_h = est_p;
      step.unconv_h = !res_p.converged;
      out.wall_h += dt_p;
    }

    step.nmse_p = nmse(est_p, x);
    step.corr_p = correlation(est_p, x);
    step.nmse_h = nmse(est_h, x);
    step.corr_h = correlation(est_h, x);
    step.unconv_p = !res_p.converged;
    out.steps.push_back(step);
    prev = std::move(est_h);
  }
  return out;
}

struct CellStats {
  double nmse_p = 0.0, nmse_h = 0.0;
  double corr_p = 0.0, corr_h = 0.0;
  Index fail_p = 0, fail_h = 0;
};

std::vector<CVector> build_column_mean_refs(const RMatrix& image, Index num_refs) {
  const Index cols = image.cols();
  num_refs = std::min(num_refs, cols);
  std::vector<CVector> refs;
  std::vector<CVector> basis;
  for (Index g = 0; g < num_refs; ++g) {
    const Index lo = g * cols / num_refs;
    const Index hi = (g + 1) * cols / num_refs;
    CVector mean = CVector::Zero(image.rows());
    for (Index c = lo; c < hi; ++c) mean += image.col(c).cast<Complex>();
    mean /= static_cast<double>(hi - lo);
    const double norm = mean.norm();
    if (norm == 0.0) continue;
    // Keep only refs with a substantial component outside the span of the
    // ones already kept; near-duplicates would make the steering degenerate.
    CVector resid = mean;
    for (const CVector& b : basis) resid -= b * b.dot(resid);
    if (resid.norm() < 1e-8 * norm) continue;
    basis.push_back(resid / resid.norm());
    refs.push_back(std::move(mean));
  }
  if (refs.empty()) {
    throw std::invalid_argument("image references: all column means degenerate");
  }
  return refs;
}

/// Keeps the k largest-magnitude entries of w (ties broken by flat index)
/// and measures the image-level reconstruction error after inverting
/// column-wise through synth.
template <typename Synth>
double topk_nmse(const CMatrix& w, Index k, const RMatrix& image, Synth&& synth) {
  const Index total = w.size();
  std::vector<Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), 0);
  auto larger = [&](Index a, Index b) {
    const double ma = std::abs(*(w.data() + a));
    const double mb = std::abs(*(w.data() + b));
    if (ma != mb) return ma > mb;
    return a < b;
  };
  if (k < total) {
    std::nth_element(order.begin(), order.begin() + (k - 1), order.end(), larger);
  }
  CMatrix kept = CMatrix::Zero(w.rows(), w.cols());
  for (Index i = 0; i < k; ++i) {
    const Index flat = order[static_cast<std::size_t>(i)];
    *(kept.data() + flat) = *(w.data() + flat);
  }
  double err = 0.0, energy = 0.0;
  for (Index c = 0; c < w.cols(); ++c) {
    const CVector rec = synth(CVector(kept.col(c)));
    err += (rec - image.col(c).cast<Complex>()).squaredNorm();
    energy += image.col(c).squaredNorm();
  }
  return energy > 0.0 ? err / energy : 0.0;
}

}  // namespace

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Omp: return "omp";
    case SolverKind::Bp: return "bp";
    case SolverKind::Lasso: return "lasso";
  }
  return "unknown";
}

SolverKind solver_kind_from_string(const std::string& s) {
  if (s == "omp") return SolverKind::Omp;
  if (s == "bp") return SolverKind::Bp;
  if (s == "lasso") return SolverKind::Lasso;
  throw std::invalid_argument("unknown solver kind: " + s);
}

SolverResult run_solver(const SolverConfig& config, const CMatrix& dict, const CVector& y,
                        double snr_db) {
  switch (config.kind) {
    case SolverKind::Omp: {
      const Index budget = std::min({config.max_atoms, dict.rows(), dict.cols()});
      return omp(dict, y, std::max<Index>(budget, 1), config.residual_tol);
    }
    case SolverKind::Bp: {
      const double rel =
          config.epsilon_rel >= 0.0 ? config.epsilon_rel : std::pow(10.0, -snr_db / 20.0);
      return bp(dict, y, rel * y.norm(), config.max_iters);
    }
    case SolverKind::Lasso: {
      // Auto mode tracks the noise level but keeps a floor of sparsity
      // pressure so near-noiseless cells do not turn into dense fits.
      const double rel = config.lambda_rel >= 0.0
                             ? config.lambda_rel
                             : std::max(std::pow(10.0, -snr_db / 20.0), 0.02);
      const double lambda_max = (dict.adjoint() * y).cwiseAbs().maxCoeff();
      return lasso(dict, y, rel * lambda_max, config.max_iters);
    }
  }
  throw std::invalid_argument("run_solver: unknown solver kind");
}

void parallel_for(Index n, Index threads, const std::function<void(Index)>& fn) {
  const Index workers = std::min<Index>(std::max<Index>(threads, 1), n);
  if (workers <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const Index i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

CVector add_measurement_noise(const CVector& clean, double snr_db, Rng& rng,
                              bool complex_domain) {
  const Index m = clean.size();
  CVector noise = complex_domain ? rng.cgaussian_vector(m) : rng.gaussian_vector(m);
  const double target = std::pow(10.0, -snr_db / 20.0) * clean.norm();
  const double raw = noise.norm();
  if (target == 0.0 || raw == 0.0) return clean;
  return clean + noise * (target / raw);
}

PipelineReport boost_weak_learner(const CVector& signal, const MeasurementModel& model,
                                  const PriorTransform& prior, Index rounds,
                                  const SolverConfig& weak, std::uint64_t seed) {
  if (rounds < 1) throw std::invalid_argument("boost: rounds must be >= 1");
  if (signal.size() != prior.dim() || model.phi.cols() != prior.dim()) {
    throw std::invalid_argument("boost: signal / sensing / prior dimension mismatch");
  }

  const bool complex_domain = !prior.is_real() || has_imag(signal) || has_imag(model.phi);
  Rng rng(seed);
  const CVector y = add_measurement_noise(model.phi * signal, model.snr_db, rng, complex_domain);
  const CMatrix dict_prior = model.phi * prior.matrix();

  PipelineReport report;
  report.seed = seed;
  report.table.columns = {"round", "nmse", "corr"};

  CVector est;
  Index fallback_rounds = 0;
  double round0 = 0.0, final_nmse = 0.0;
  for (Index r = 0; r < rounds; ++r) {
    std::optional<PosteriorTransform> post;
    if (r > 0) {
      post = try_steer(prior, est);
      if (!post) ++fallback_rounds;
    }
    if (post) {
      const CMatrix dict = post->sensing_matrix(model.phi);
      est = post->synthesize(run_solver(weak, dict, y, model.snr_db).coeffs);
    } else if (r == 0) {
      est = prior.synthesize(run_solver(weak, dict_prior, y, model.snr_db).coeffs);
    }
    // A fallback round keeps the previous estimate: re-solving the prior
    // dictionary would reproduce it exactly.
    const double nm = nmse(est, signal);
    report.table.rows.push_back({static_cast<double>(r), nm, correlation(est, signal)});
    if (r == 0) round0 = nm;
    final_nmse = nm;
  }

  report.summary["round0_nmse"] = round0;
  report.summary["final_nmse"] = final_nmse;
  report.summary["nmse_ratio"] = round0 > 0.0 ? final_nmse / round0 : 1.0;
  report.summary["fallback_rounds"] = static_cast<double>(fallback_rounds);
  return report;
}

PipelineReport weak_guides_strong(const CVector& signal, const MeasurementModel& model,
                                  const PriorTransform& prior, const SolverConfig& weak,
                                  const SolverConfig& strong,
                                  const std::vector<double>& hyper_sweep, std::uint64_t seed,
                                  const std::optional<CVector>& reference_override) {
  if (hyper_sweep.empty()) throw std::invalid_argument("weak_guides_strong: empty hyper sweep");
  if (signal.size() != prior.dim() || model.phi.cols() != prior.dim()) {
    throw std::invalid_argument("weak_guides_strong: dimension mismatch");
  }
  if (reference_override && reference_override->size() != prior.dim()) {
    throw std::invalid_argument("weak_guides_strong: reference dimension mismatch");
  }

  const bool complex_domain = !prior.is_real() || has_imag(signal) || has_imag(model.phi);
  Rng rng(seed);
  const CVector y = add_measurement_noise(model.phi * signal, model.snr_db, rng, complex_domain);
  const CMatrix dict_prior = model.phi * prior.matrix();

  CVector ref;
  if (reference_override) {
    ref = *reference_override;
  } else {
    ref = prior.synthesize(run_solver(weak, dict_prior, y, model.snr_db).coeffs);
  }
  const double weak_nmse = nmse(ref, signal);

  std::optional<PosteriorTransform> post = try_steer(prior, ref);
  const CMatrix dict_hot = post ? post->sensing_matrix(model.phi) : dict_prior;

  PipelineReport report;
  report.seed = seed;
  report.table.columns = {"hyper", "nmse_prior", "nmse_hot", "weak_nmse"};

  double min_p = std::numeric_limits<double>::infinity();
  double min_h = min_p;
  for (double hyper : hyper_sweep) {
    SolverConfig tuned = strong;
    switch (strong.kind) {
      case SolverKind::Bp: tuned.epsilon_rel = hyper; break;
      case SolverKind::Lasso: tuned.lambda_rel = hyper; break;
      case SolverKind::Omp:
        tuned.max_atoms = std::max<Index>(1, static_cast<Index>(std::llround(hyper)));
        break;
    }
    const CVector est_p = prior.synthesize(run_solver(tuned, dict_prior, y, model.snr_db).coeffs);
    const CVector est_h = post ? post->synthesize(run_solver(tuned, dict_hot, y, model.snr_db).coeffs)
                               : est_p;
    const double np = nmse(est_p, signal);
    const double nh = nmse(est_h, signal);
    min_p = std::min(min_p, np);
    min_h = std::min(min_h, nh);
    report.table.rows.push_back({hyper, np, nh, weak_nmse});
  }

  report.summary["weak_nmse"] = weak_nmse;
  report.summary["min_nmse_prior"] = min_p;
  report.summary["min_nmse_hot"] = min_h;
  report.summary["steered"] = post ? 1.0 : 0.0;
  return report;
}

PipelineReport sequential_estimation(const std::vector<CVector>& trace, double ratio,
                                     double snr_db, const PriorTransform& prior,
                                     const SolverConfig& solver, std::uint64_t seed) {
  if (trace.empty()) throw std::invalid_argument("sequential: empty trace");
  bool complex_domain = !prior.is_real();
  for (const CVector& x : trace) {
    if (x.size() != prior.dim()) {
      throw std::invalid_argument("sequential: trace entry dimension mismatch");
    }
    complex_domain = complex_domain || has_imag(x);
  }
  const Index m = measurement_count(ratio, prior.dim());

  Rng rng(seed);
  SeqOutcome out = run_sequential_core(trace, m, snr_db, prior, solver, rng, complex_domain);

  PipelineReport report;
  report.seed = seed;
  report.table.columns = {"step",     "nmse_prior", "corr_prior", "nmse_hot",
                          "corr_hot", "ref_corr",   "fallback"};
  double tn_p = 0.0, tn_h = 0.0, tc_p = 0.0, tc_h = 0.0;
  Index fallbacks = 0;
  for (std::size_t t = 0; t < out.steps.size(); ++t) {
    const SeqStep& s = out.steps[t];
    report.table.rows.push_back({static_cast<double>(t), s.nmse_p, s.corr_p, s.nmse_h,
                                 s.corr_h, s.ref_corr, s.fallback ? 1.0 : 0.0});
    tn_p += s.nmse_p;
    tn_h += s.nmse_h;
    tc_p += s.corr_p;
    tc_h += s.corr_h;
    if (s.fallback) ++fallbacks;
  }
  const double steps = static_cast<double>(out.steps.size());
  report.summary["tnmse_prior"] = tn_p / steps;
  report.summary["tnmse_hot"] = tn_h / steps;
  report.summary["tcorr_prior"] = tc_p / steps;
  report.summary["tcorr_hot"] = tc_h / steps;
  report.summary["wall_prior_seconds"] = out.wall_p;
  report.summary["wall_hot_seconds"] = out.wall_h;
  report.summary["fallback_steps"] = static_cast<double>(fallbacks);
  return report;
}

namespace {

/// Single sweep trial for a fixed vector signal: weak OMP pass steers the
/// transform, then the configured solver runs on both arms.
CellStats vector_trial(const CVector& x, Index m, double snr_db, const PriorTransform& prior,
                       const SolverConfig& solver, Rng& rng, bool complex_domain) {
  const CMatrix phi = draw_sensing(rng, m, prior.dim(), complex_domain);
  const CVector y = add_measurement_noise(phi * x, snr_db, rng, complex_domain);
  const CMatrix dict_p = phi * prior.matrix();

  SolverConfig weak;
  weak.kind = SolverKind::Omp;
  weak.max_atoms = 4;
  const CVector guide = prior.synthesize(run_solver(weak, dict_p, y, snr_db).coeffs);

  const SolverResult res_p = run_solver(solver, dict_p, y, snr_db);
  const CVector est_p = prior.synthesize(res_p.coeffs);

  CellStats stats;
  stats.nmse_p = nmse(est_p, x);
  stats.corr_p = correlation(est_p, x);
  stats.fail_p = res_p.converged ? 0 : 1;

  std::optional<PosteriorTransform> post = try_steer(prior, guide);
  if (post) {
    const SolverResult res_h = run_solver(solver, post->sensing_matrix(phi), y, snr_db);
    const CVector est_h = post->synthesize(res_h.coeffs);
    stats.nmse_h = nmse(est_h, x);
    stats.corr_h = correlation(est_h, x);
    stats.fail_h = res_h.converged ? 0 : 1;
  } else {
    stats.nmse_h = stats.nmse_p;
    stats.corr_h = stats.corr_p;
    stats.fail_h = stats.fail_p;
  }
  return stats;
}

/// Steady-state aggregate of a short tracking trace: step 0 has no
/// reference yet, so it is excluded whenever later steps exist.
CellStats channel_trial(const ChannelParams& params, Index m, double snr_db,
                        const PriorTransform& prior, const SolverConfig& solver, Rng& rng) {
  auto trace = gen_channel_trace(params, rng.next_u64());
  SeqOutcome out = run_sequential_core(trace, m, snr_db, prior, solver, rng, true);

  CellStats stats;
  const std::size_t first = out.steps.size() > 1 ? 1 : 0;
  const double count = static_cast<double>(out.steps.size() - first);
  for (std::size_t t = 0; t < out.steps.size(); ++t) {
    const SeqStep& s = out.steps[t];
    if (t >= first) {
      stats.nmse_p += s.nmse_p / count;
      stats.nmse_h += s.nmse_h / count;
      stats.corr_p += s.corr_p / count;
      stats.corr_h += s.corr_h / count;
    }
    stats.fail_p += s.unconv_p ? 1 : 0;
    stats.fail_h += s.unconv_h ? 1 : 0;
  }
  return stats;
}

PipelineReport aggregate_sweep(const SweepGridConfig& grid, const std::vector<CellStats>& slots,
                               std::uint64_t seed) {
  PipelineReport report;
  report.seed = seed;
  report.table.columns = {"ratio",        "snr_db",      "nmse_prior",   "nmse_hot",
                          "corr_prior",   "corr_hot",    "success_prior", "success_hot",
                          "fail_prior",   "fail_hot"};

  const Index s_count = static_cast<Index>(grid.snrs_db.size());
  Index area_p = 0, area_h = 0;
  for (std::size_t ri = 0; ri < grid.ratios.size(); ++ri) {
    for (std::size_t si = 0; si < grid.snrs_db.size(); ++si) {
      const Index cell = static_cast<Index>(ri) * s_count + static_cast<Index>(si);
      CellStats mean;
      for (Index k = 0; k < grid.trials; ++k) {
        const CellStats& t = slots[static_cast<std::size_t>(cell * grid.trials + k)];
        mean.nmse_p += t.nmse_p;
        mean.nmse_h += t.nmse_h;
        mean.corr_p += t.corr_p;
        mean.corr_h += t.corr_h;
        mean.fail_p += t.fail_p;
        mean.fail_h += t.fail_h;
      }
      const double trials = static_cast<double>(grid.trials);
      mean.nmse_p /= trials;
      mean.nmse_h /= trials;
      mean.corr_p /= trials;
      mean.corr_h /= trials;
      const bool ok_p = mean.nmse_p <= grid.success_threshold;
      const bool ok_h = mean.nmse_h <= grid.success_threshold;
      area_p += ok_p ? 1 : 0;
      area_h += ok_h ? 1 : 0;
      report.table.rows.push_back({grid.ratios[ri], grid.snrs_db[si], mean.nmse_p, mean.nmse_h,
                                   mean.corr_p, mean.corr_h, ok_p ? 1.0 : 0.0, ok_h ? 1.0 : 0.0,
                                   static_cast<double>(mean.fail_p),
                                   static_cast<double>(mean.fail_h)});
    }
  }

  report.summary["area_prior"] = static_cast<double>(area_p);
  report.summary["area_hot"] = static_cast<double>(area_h);
  report.summary["area_ratio"] =
      static_cast<double>(area_h) / static_cast<double>(std::max<Index>(area_p, 1));
  return report;
}

}  // namespace

PipelineReport phase_transition_sweep(const SignalSource& source, const SweepGridConfig& grid,
                                      const PriorTransform& prior, const SolverConfig& solver,
                                      std::uint64_t seed, Index threads) {
  validate_grid(grid);
  if (source.kind == SignalSource::Kind::Image) {
    throw std::invalid_argument(
        "phase_transition: image sources go through image_cs_reconstruction");
  }

  const Index n = prior.dim();
  CVector file_signal;
  if (source.kind == SignalSource::Kind::File) {
    file_signal = load_csv_vector(source.path);
    if (file_signal.size() != n) {
      throw std::invalid_argument(source.path + ": vector length does not match prior");
    }
  }
  if (source.kind == SignalSource::Kind::Channel && source.channel.n != n) {
    throw std::invalid_argument("phase_transition: channel dimension does not match prior");
  }

  const Index s_count = static_cast<Index>(grid.snrs_db.size());
  const Index cells = static_cast<Index>(grid.ratios.size()) * s_count;
  std::vector<CellStats> slots(static_cast<std::size_t>(cells * grid.trials));

  parallel_for(cells * grid.trials, threads, [&](Index item) {
    const Index cell = item / grid.trials;
    const Index trial = item % grid.trials;
    const double ratio = grid.ratios[static_cast<std::size_t>(cell / s_count)];
    const double snr = grid.snrs_db[static_cast<std::size_t>(cell % s_count)];
    const Index m = measurement_count(ratio, n);
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(trial)));

    CellStats stats;
    switch (source.kind) {
      case SignalSource::Kind::Channel: {
        ChannelParams params = source.channel;
        params.t = grid.steps_per_trial;
        stats = channel_trial(params, m, snr, prior, solver, rng);
        break;
      }
      case SignalSource::Kind::Audio: {
        const CVector x = gen_audio(source.audio, rng.next_u64());
        stats = vector_trial(x, m, snr, prior, solver, rng, !prior.is_real() || has_imag(x));
        break;
      }
      case SignalSource::Kind::File: {
        stats = vector_trial(file_signal, m, snr, prior, solver, rng,
                             !prior.is_real() || has_imag(file_signal));
        break;
      }
      case SignalSource::Kind::Image: break;  // rejected above
    }
    slots[static_cast<std::size_t>(item)] = stats;
  });

  return aggregate_sweep(grid, slots, seed);
}

PipelineReport image_topk_compression(const RMatrix& image, const PriorTransform& prior,
                                      Index num_refs,
                                      const std::vector<double>& keep_fractions) {
  if (image.rows() != prior.dim() || image.cols() < 1) {
    throw std::invalid_argument("image_topk: image shape does not match prior");
  }
  if (num_refs < 1) throw std::invalid_argument("image_topk: need at least one reference");
  if (keep_fractions.empty()) throw std::invalid_argument("image_topk: no keep fractions");
  for (double f : keep_fractions) {
    if (!(f > 0.0) || f > 1.0) {
      throw std::invalid_argument("image_topk: keep fraction outside (0, 1]");
    }
  }

  const auto refs = build_column_mean_refs(image, num_refs);
  const PosteriorTransform post = construct_hot_multi(prior, ReferenceSet(refs));

  const Index n = image.rows();
  const Index cols = image.cols();
  CMatrix w_prior(n, cols), w_hot(n, cols);
  for (Index c = 0; c < cols; ++c) {
    const CVector x = image.col(c).cast<Complex>();
    w_prior.col(c) = prior.analyze(x);
    w_hot.col(c) = post.analyze(x);
  }

  PipelineReport report;
  report.table.columns = {"keep_fraction", "nmse_prior", "nmse_hot"};
  const Index total = n * cols;
  for (double f : keep_fractions) {
    const Index k = std::clamp<Index>(
        static_cast<Index>(std::ceil(f * static_cast<double>(total))), 1, total);
    const double np = topk_nmse(w_prior, k, image,
                                [&](const CVector& w) { return prior.synthesize(w); });
    const double nh =
        topk_nmse(w_hot, k, image, [&](const CVector& w) { return post.synthesize(w); });
    report.table.rows.push_back({f, np, nh});
  }

  report.summary["num_refs_used"] = static_cast<double>(refs.size());
  if (keep_fractions.size() == 1) {
    report.summary["nmse_prior"] = report.table.rows[0][1];
    report.summary["nmse_hot"] = report.table.rows[0][2];
    const double np = report.table.rows[0][1];
    report.summary["nmse_ratio"] = np > 0.0 ? report.table.rows[0][2] / np : 1.0;
  }
  return report;
}

PipelineReport image_cs_reconstruction(const RMatrix& image, const PriorTransform& prior,
                                       Index num_refs, const SweepGridConfig& grid,
                                       const SolverConfig& solver, std::uint64_t seed,
                                       Index threads) {
  validate_grid(grid);
  if (image.rows() != prior.dim() || image.cols() < 1) {
    throw std::invalid_argument("image_cs: image shape does not match prior");
  }
  if (num_refs < 1) throw std::invalid_argument("image_cs: need at least one reference");

  const auto refs = build_column_mean_refs(image, num_refs);
  const PosteriorTransform post = construct_hot_multi(prior, ReferenceSet(refs));
  const bool complex_domain = !prior.is_real();

  const Index n = image.rows();
  const Index s_count = static_cast<Index>(grid.snrs_db.size());
  const Index cells = static_cast<Index>(grid.ratios.size()) * s_count;
  std::vector<CellStats> slots(static_cast<std::size_t>(cells * grid.trials));

  parallel_for(cells * grid.trials, threads, [&](Index item) {
    const Index cell = item / grid.trials;
    const Index trial = item % grid.trials;
    const double ratio = grid.ratios[static_cast<std::size_t>(cell / s_count)];
    const double snr = grid.snrs_db[static_cast<std::size_t>(cell % s_count)];
    const Index m = measurement_count(ratio, n);
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(cell), static_cast<std::uint64_t>(trial)));

    const CMatrix phi = draw_sensing(rng, m, n, complex_domain);
    const CMatrix dict_p = phi * prior.matrix();
    const CMatrix dict_h = post.sensing_matrix(phi);

    CellStats stats;
    double err_p = 0.0, err_h = 0.0, energy = 0.0;
    double corr_p = 0.0, corr_h = 0.0;
    for (Index c = 0; c < image.cols(); ++c) {
      const CVector x = image.col(c).cast<Complex>();
      const CVector y = add_measurement_noise(phi * x, snr, rng, complex_domain);
      const SolverResult res_p = run_solver(solver, dict_p, y, snr);
      const SolverResult res_h = run_solver(solver, dict_h, y, snr);
      const CVector est_p = prior.synthesize(res_p.coeffs);
      const CVector est_h = post.synthesize(res_h.coeffs);
      err_p += (est_p - x).squaredNorm();
      err_h += (est_h - x).squaredNorm();
      energy += x.squaredNorm();
      corr_p += correlation(est_p, x);
      corr_h += correlation(est_h, x);
      stats.fail_p += res_p.converged ? 0 : 1;
      stats.fail_h += res_h.converged ? 0 : 1;
    }
    const double cols = static_cast<double>(image.cols());
    stats.nmse_p = energy > 0.0 ? err_p / energy : 0.0;
    stats.nmse_h = energy > 0.0 ? err_h / energy : 0.0;
    stats.corr_p = corr_p / cols;
    stats.corr_h = corr_h / cols;
    slots[static_cast<std::size_t>(item)] = stats;
  });

  PipelineReport report = aggregate_sweep(grid, slots, seed);
  report.summary["num_refs_used"] = static_cast<double>(refs.size());
  return report;
}

}  // namespace hotcs
